#include "hybridcal/mcmc.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "hybridcal/rng.hpp"

namespace hybridcal::mcmc {

ChainResult run_adaptive_rwm(const LogDensity& log_target, const std::vector<double>& init,
                             const ChainConfig& cfg, std::uint64_t seed) {
    const int d = static_cast<int>(init.size());
    if (d < 1) throw std::invalid_argument("run_adaptive_rwm: empty initial point");
    if (cfg.keep < 1 || cfg.burn_in < 0)
        throw std::invalid_argument("run_adaptive_rwm: bad chain schedule");

    rng::Xoshiro256 gen(seed);
    Eigen::VectorXd z = Eigen::Map<const Eigen::VectorXd>(init.data(), d);
    double lp = log_target(init);
    if (!std::isfinite(lp))
        throw std::invalid_argument("run_adaptive_rwm: initial point has -inf density");

    double log_lambda = std::log(cfg.initial_scale);
    Eigen::MatrixXd proposal_chol = Eigen::MatrixXd::Identity(d, d);

    // Welford accumulators for the burn-in covariance.
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
    Eigen::MatrixXd m2 = Eigen::MatrixXd::Zero(d, d);
    long count = 0;

    std::vector<double> x(d), prop(d);
    ChainResult out;
    out.draws.reserve(cfg.keep);
    long accepted_kept = 0;

    const int total = cfg.burn_in + cfg.keep;
    for (int step = 0; step < total; ++step) {
        Eigen::VectorXd noise(d);
        for (int k = 0; k < d; ++k) noise(k) = gen.normal();
        const Eigen::VectorXd cand = z + std::exp(log_lambda) * (proposal_chol * noise);
        for (int k = 0; k < d; ++k) prop[k] = cand(k);
        const double lp_cand = log_target(prop);
        const bool accept =
            std::isfinite(lp_cand) && std::log(gen.uniform01()) < lp_cand - lp;
        if (accept) {
            z = cand;
            lp = lp_cand;
        }

        if (step < cfg.burn_in) {
            // Robbins-Monro scale adaptation toward the target acceptance.
            const double gamma = std::pow(static_cast<double>(step + 1), -0.6);
            log_lambda += gamma * ((accept ? 1.0 : 0.0) - cfg.target_accept);

            ++count;
            const Eigen::VectorXd delta = z - mean;
            mean += delta / static_cast<double>(count);
            m2 += delta * (z - mean).transpose();
            if (count >= 100 && count % 50 == 0) {
                Eigen::MatrixXd cov = m2 / static_cast<double>(count - 1);
                cov += 1e-8 * Eigen::MatrixXd::Identity(d, d);
                Eigen::LLT<Eigen::MatrixXd> llt(cov);
                if (llt.info() == Eigen::Success) proposal_chol = llt.matrixL();
            }
        } else {
            for (int k = 0; k < d; ++k) x[k] = z(k);
            out.draws.push_back(x);
            if (accept) ++accepted_kept;
        }
    }
    out.acceptance_rate = static_cast<double>(accepted_kept) / cfg.keep;
    return out;
}

}  // namespace hybridcal::mcmc
