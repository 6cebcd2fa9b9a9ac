#pragma once

#include <cstdint>
#include <filesystem>
#include <nlohmann/json_fwd.hpp>
#include <string>
#include <vector>

#include "hybridcal/data.hpp"
#include "hybridcal/surrogate.hpp"

namespace hybridcal::optimize {

/// Target distance and the miss beyond which utility is zero.
struct UtilityConfig {
    double target = 100.0;    // m
    double miss_cap = 100.0;  // m

    void validate() const;
};

/// Search grid. Row-major evaluation order: psi outer, v0 inner, which also
/// defines the argmax tie-break (lowest psi, then lowest v0).
struct GridSpec {
    double v0_min = 40.0, v0_max = 100.0, v0_step = 2.5;   // m/s
    double psi_min = 1.0, psi_max = 90.0, psi_step = 1.0;  // degrees

    int n_v0() const;
    int n_psi() const;
    double v0_at(int j) const { return v0_min + j * v0_step; }
    double psi_at(int i) const { return psi_min + i * psi_step; }
    void validate() const;  // min < max, step > 0, steps divide ranges evenly
};

struct ObjectiveSurface {
    GridSpec grid;
    std::vector<double> values;  // n_psi x n_v0, row-major in psi
    physics::LaunchInput argmax;
    double max_value = 0.0;

    double value_at(int psi_index, int v0_index) const {
        return values[static_cast<std::size_t>(psi_index) * grid.n_v0() + v0_index];
    }
};

/// u = 1 - min(|miss|, cap)/cap; peaks at 1 for a direct hit, 0 at the cap.
double utility(double miss, const UtilityConfig& cfg);

/// Expected utility of one Gaussian predictive distribution via the n-node
/// Gauss-Hermite rule: (1/sqrt(pi)) sum_j w_j u(target - (mean + sqrt(2 var) xi_j)).
/// Zero variance degenerates to utility(target - mean) exactly.
double gh_expected_utility(const surrogate::PerSamplePrediction& pred,
                           const UtilityConfig& cfg, int nodes = 7);

/// Posterior-averaged expected utility at x: the mean over theta samples of
/// gh_expected_utility applied to each per-sample prediction, clamped to
/// [0, 1]. Collapses to a single evaluation for the black-box GP.
double expected_utility(const surrogate::CalibratedSurrogate& s,
                        const physics::LaunchInput& x, const UtilityConfig& cfg,
                        std::size_t n_samples = 4500, int nodes = 7);

/// Posterior-averaged predictive distance at x (mean of per-sample means).
double expected_distance(const surrogate::CalibratedSurrogate& s,
                         const physics::LaunchInput& x, std::size_t n_samples = 4500);

/// Evaluates expected_utility at every grid node (parallel over nodes, each
/// writing its own slot) and scans for the argmax in row-major order with
/// strict improvement, so ties resolve to the lowest psi then lowest v0.
ObjectiveSurface grid_search(const surrogate::CalibratedSurrogate& s, const GridSpec& grid,
                             const UtilityConfig& cfg, std::size_t n_samples = 4500,
                             int nodes = 7);

/// One seeded noisy observation of the truth model at the chosen action.
double evaluate_truth(const physics::LaunchInput& x, const physics::PhysicsParams& params,
                      const data::NoiseSpec& noise);

/// CSV export, header `psi_deg,v0_mps,expected_utility`, one node per row,
/// row-major in psi.
void write_surface_csv(const ObjectiveSurface& surface, const std::filesystem::path& path);

struct RunReport {
    std::string dataset;
    std::string model;
    double argmax_psi_deg = 0.0;
    double argmax_v0_mps = 0.0;
    double max_expected_utility = 0.0;
    double expected_distance_m = 0.0;
    double observed_distance_m = 0.0;
    std::uint64_t seed = 0;
};

nlohmann::json report_to_json(const RunReport& r);
RunReport report_from_json(const nlohmann::json& j);
void write_report_json(const RunReport& r, const std::filesystem::path& path);

}  // namespace hybridcal::optimize
