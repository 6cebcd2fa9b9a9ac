#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "hybridcal/data.hpp"

namespace hybridcal::calibrate {

/// Priors of the simple-model calibration: 1/g ~ Uniform(inv_g_low,
/// inv_g_high), tau ~ Gamma(shape, rate). Gamma is shape-rate (mean
/// shape/rate), matching the convention of the reference software stack.
struct SimplePrior {
    double inv_g_low = 0.001;
    double inv_g_high = 1.0;
    double tau_shape = 0.25;
    double tau_rate = 2.5;

    void validate() const;
};

struct McmcConfig {
    int chains = 4;
    int burn_in = 2000;
    int keep = 1200;  // per chain
    std::uint64_t seed = 0;
};

struct PosteriorMeta {
    int chains = 0;
    int burn_in = 0;
    int kept_per_chain = 0;
    double acceptance_rate = 0.0;
    std::uint64_t seed = 0;
};

struct PosteriorSamples {
    std::vector<double> g_draws;    // m/s^2
    std::vector<double> tau_draws;  // 1/m^2
    PosteriorMeta meta;

    std::size_t size() const { return g_draws.size(); }
    void validate() const;
};

/// Joint log density of (g via u = 1/g, tau) against the dataset:
/// Gaussian likelihood around the parabolic range plus the priors above.
/// -inf when 1/g is outside the uniform support or tau <= 0.
double log_posterior_simple(const data::Dataset& ds, double g, double tau,
                            const SimplePrior& prior = {});

/// Adaptive random-walk Metropolis on (logit of scaled 1/g, log tau) with
/// Jacobian corrections. Chains run independently with derived seeds and are
/// pooled chain-major. A diagnostic warning (not fatal) is printed when the
/// pooled acceptance rate leaves [0.05, 0.95].
PosteriorSamples sample_posterior(const data::Dataset& ds, const McmcConfig& cfg,
                                  const SimplePrior& prior = {});

struct SummaryRow {
    double mean, sd, q05, q25, q50, q75, q95;
};

struct Summary {
    SummaryRow g, tau;
};

SummaryRow summarize(std::span<const double> draws);
Summary posterior_summary(const PosteriorSamples& s);

/// Quantile by linear interpolation on the sorted draws.
double quantile_sorted(std::span<const double> sorted, double p);

/// CSV export (header `g_mps2,tau_per_m2`) plus a JSON sidecar for the meta.
void save_posterior(const PosteriorSamples& s, const std::filesystem::path& csv_path,
                    const std::filesystem::path& meta_path);
PosteriorSamples load_posterior(const std::filesystem::path& csv_path,
                                const std::filesystem::path& meta_path);

/// Deterministic uniform subsample without replacement; indices returned
/// sorted so pooled chain order is preserved. want >= total returns identity.
std::vector<std::size_t> subsample_indices(std::size_t total, std::size_t want,
                                           std::uint64_t seed);

}  // namespace hybridcal::calibrate
