#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "hybridcal/optimize.hpp"

namespace hybridcal::pipeline {

/// Knobs shared by the calibrate / optimize / reproduce entry points.
struct FitOptions {
    int mcmc_chains = 4;
    int mcmc_burn_in = 2000;
    int mcmc_keep = 1200;
    int gp_restarts = 16;
    std::size_t n_samples = 4500;
    int gh_nodes = 7;
};

physics::PhysicsParams truth_params();  // m = 1 kg, g = 9.8, C_D = 0.01

data::Dataset resolve_dataset(const std::string& source);  // builtin label or CSV path

/// Deterministic per-(dataset, model) seed derivation from a base seed.
std::uint64_t combo_seed(std::uint64_t base, const std::string& dataset,
                         surrogate::SurrogateKind kind);

surrogate::CalibratedSurrogate fit_model(const data::Dataset& ds,
                                         surrogate::SurrogateKind kind, std::uint64_t seed,
                                         const FitOptions& opt);

struct ComboResult {
    optimize::RunReport report;
    optimize::ObjectiveSurface surface;
};

/// Calibrate, grid-search and truth-evaluate one dataset/model combination.
ComboResult run_combo(const data::Dataset& ds, surrogate::SurrogateKind kind,
                      std::uint64_t base_seed, const optimize::GridSpec& grid,
                      const optimize::UtilityConfig& ucfg, double truth_sigma_m,
                      const FitOptions& opt);

struct ReproduceResult {
    std::vector<optimize::RunReport> rows;  // A/simple, A/gp, A/hybrid, B/..., C/...
    bool ordering_ok = false;
};

/// All nine dataset x model combinations. Writes one report JSON per combo
/// plus a combined report under output_dir, prints the summary table, and
/// checks the hybrid > gp > simple ordering of the max objective per dataset.
/// Throws when a combination fails; ordering_ok reflects the assertion.
ReproduceResult run_reproduce(std::uint64_t seed, const std::filesystem::path& output_dir,
                              bool quiet, const FitOptions& opt);

}  // namespace hybridcal::pipeline
