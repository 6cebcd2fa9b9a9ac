#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <nlohmann/json_fwd.hpp>

namespace hybridcal::gp {

/// RBF-ARD hyperparameters. Inputs are used in raw units (v0 in m/s on
/// dimension 0, psi in degrees on dimension 1); targets are standardized
/// before fitting, so signal_var and noise_var live on the standardized
/// output scale.
struct GPHyperparams {
    double signal_var = 1.0;                      // sigma_f^2
    std::array<double, 2> lengthscales{10.0, 10.0};  // l1 (v0), l2 (psi)
    double noise_var = 0.01;                      // sigma^2

    void validate() const;  // all strictly positive
};

struct PredictiveDist {
    double mean;      // m
    double variance;  // m^2, latent-function variance (observation noise is
                      // added by the surrogate layer feeding the optimizer)
};

/// sigma_f^2 exp(-1/2 sum_i (a_i-b_i)^2 / l_i^2)
double kernel_rbf_ard(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                      const GPHyperparams& hyper);

/// log N(y | 0, K + sigma^2 I) via a jittered Cholesky factorization.
/// Throws on factorization failure after the jitter schedule is exhausted.
double log_marginal_likelihood(const Eigen::MatrixXd& X, const Eigen::VectorXd& y_std,
                               const GPHyperparams& hyper);

/// Marginal likelihood plus the hyperparameter log-priors:
///   sigma_f ~ U(0.1, 1), l_i ~ U(1, 50), sigma ~ half-Normal(scale 5).
/// -inf outside the prior support.
double log_hyper_posterior(const Eigen::MatrixXd& X, const Eigen::VectorXd& y_std,
                           const GPHyperparams& hyper);

struct FitConfig {
    int restarts = 16;
    std::uint64_t seed = 0;
    int max_iters = 2000;
    double simplex_tol = 1e-8;
};

/// Trained regressor with cached factorization. Immutable once built.
class GPModel {
  public:
    /// MAP fit: standardizes targets, then multi-start Nelder-Mead over
    /// transformed hyperparameters (logit for the bounded ones, log for
    /// sigma), starts drawn from the priors. Deterministic given the seed.
    static GPModel fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y_raw,
                       const FitConfig& cfg);

    /// Direct construction with explicit standardization constants and
    /// hyperparameters (used by loaders and tests); recomputes the
    /// factorization.
    static GPModel make(const Eigen::MatrixXd& X, const Eigen::VectorXd& y_raw,
                        double target_shift, double target_scale,
                        const GPHyperparams& hyper);

    /// Predictive mean and latent variance at x, de-standardized. Negative
    /// round-off variance is clamped to zero after de-standardization.
    PredictiveDist predict(const Eigen::Vector2d& x) const;

    /// k(x, X) against the training inputs.
    Eigen::VectorXd kernel_vector(const Eigen::Vector2d& x) const;

    /// C^{-1} v through the cached factorization, C = K + sigma^2 I.
    Eigen::VectorXd apply_cov_inverse(const Eigen::VectorXd& v) const;

    const Eigen::MatrixXd& inputs() const { return X_; }
    const Eigen::VectorXd& targets_raw() const { return y_raw_; }
    const GPHyperparams& hyper() const { return hyper_; }
    double target_shift() const { return shift_; }
    double target_scale() const { return scale_; }
    /// Fitted observation-noise variance on the raw output scale.
    double noise_var_raw() const { return hyper_.noise_var * scale_ * scale_; }
    Eigen::Index train_count() const { return X_.rows(); }
    const Eigen::MatrixXd& cholesky_lower() const { return chol_lower_; }

    nlohmann::json to_json() const;
    static GPModel from_json(const nlohmann::json& j);

  private:
    GPModel() = default;
    void factorize();

    Eigen::MatrixXd X_;       // N x 2
    Eigen::VectorXd y_raw_;   // N
    Eigen::VectorXd y_std_;   // (y_raw - shift) / scale
    double shift_ = 0.0;
    double scale_ = 1.0;
    GPHyperparams hyper_;
    Eigen::MatrixXd chol_lower_;  // L with L L^T = C (+ jitter)
    Eigen::VectorXd alpha_;       // C^{-1} y_std
};

namespace detail {
/// C = K + noise_var I with the jitter schedule applied; returns the lower
/// Cholesky factor. Throws std::runtime_error when PSD repair fails.
Eigen::MatrixXd cholesky_with_jitter(Eigen::MatrixXd C);
Eigen::MatrixXd build_covariance(const Eigen::MatrixXd& X, const GPHyperparams& hyper);
}  // namespace detail

}  // namespace hybridcal::gp
