#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace hybridcal::mcmc {

using LogDensity = std::function<double(const std::vector<double>&)>;

struct ChainConfig {
    int burn_in = 2000;
    int keep = 1200;
    double target_accept = 0.35;
    double initial_scale = 0.1;
};

struct ChainResult {
    std::vector<std::vector<double>> draws;  // keep rows, dim columns
    double acceptance_rate;                  // post burn-in
};

/// Adaptive random-walk Metropolis. During burn-in the proposal is
/// N(0, lambda^2 Sigma) with Sigma the running covariance of the chain
/// (Haario-style) and lambda tuned by Robbins-Monro toward the target
/// acceptance; both are frozen afterwards so the kept draws target the exact
/// density. Deterministic given the seed.
ChainResult run_adaptive_rwm(const LogDensity& log_target, const std::vector<double>& init,
                             const ChainConfig& cfg, std::uint64_t seed);

}  // namespace hybridcal::mcmc
