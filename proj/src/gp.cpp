#include "hybridcal/gp.hpp"

#include <cmath>
#include <nlohmann/json.hpp>
#include <stdexcept>
#include <vector>

#include "hybridcal/nelder_mead.hpp"
#include "hybridcal/rng.hpp"

namespace hybridcal::gp {

namespace {

constexpr double kSigmaFLow = 0.1, kSigmaFHigh = 1.0;
constexpr double kLengthLow = 1.0, kLengthHigh = 50.0;
constexpr double kSigmaNoiseScale = 5.0;
constexpr double kLog2Pi = 1.8378770664093454836;

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace

void GPHyperparams::validate() const {
    if (!(signal_var > 0.0) || !(noise_var > 0.0) || !(lengthscales[0] > 0.0) ||
        !(lengthscales[1] > 0.0))
        throw std::invalid_argument("GPHyperparams: all entries must be strictly positive");
}

double kernel_rbf_ard(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                      const GPHyperparams& hyper) {
    const double d0 = (a(0) - b(0)) / hyper.lengthscales[0];
    const double d1 = (a(1) - b(1)) / hyper.lengthscales[1];
    return hyper.signal_var * std::exp(-0.5 * (d0 * d0 + d1 * d1));
}

namespace detail {

Eigen::MatrixXd build_covariance(const Eigen::MatrixXd& X, const GPHyperparams& hyper) {
    const Eigen::Index n = X.rows();
    Eigen::MatrixXd C(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        C(i, i) = hyper.signal_var + hyper.noise_var;
        for (Eigen::Index j = 0; j < i; ++j) {
            const double k = kernel_rbf_ard(X.row(i), X.row(j), hyper);
            C(i, j) = k;
            C(j, i) = k;
        }
    }
    return C;
}

Eigen::MatrixXd cholesky_with_jitter(Eigen::MatrixXd C) {
    const Eigen::Index n = C.rows();
    double jitter = 1e-10 * C.diagonal().mean();
    for (int attempt = 0; attempt <= 8; ++attempt) {
        Eigen::MatrixXd J = C + jitter * Eigen::MatrixXd::Identity(n, n);
        Eigen::LLT<Eigen::MatrixXd> llt(J);
        if (llt.info() == Eigen::Success) return llt.matrixL();
        jitter *= 2.0;
    }
    throw std::runtime_error("gp: covariance factorization failed after jitter schedule");
}

}  // namespace detail

double log_marginal_likelihood(const Eigen::MatrixXd& X, const Eigen::VectorXd& y_std,
                               const GPHyperparams& hyper) {
    if (X.rows() != y_std.size())
        throw std::invalid_argument("log_marginal_likelihood: X rows must match y length");
    hyper.validate();
    const Eigen::MatrixXd L = detail::cholesky_with_jitter(detail::build_covariance(X, hyper));
    const Eigen::VectorXd v = L.triangularView<Eigen::Lower>().solve(y_std);
    const double n = static_cast<double>(y_std.size());
    return -0.5 * v.squaredNorm() - L.diagonal().array().log().sum() - 0.5 * n * kLog2Pi;
}

double log_hyper_posterior(const Eigen::MatrixXd& X, const Eigen::VectorXd& y_std,
                           const GPHyperparams& hyper) {
    const double sigma_f = std::sqrt(hyper.signal_var);
    const double sigma = std::sqrt(hyper.noise_var);
    if (!(sigma_f > kSigmaFLow && sigma_f < kSigmaFHigh)) return -INFINITY;
    for (const double l : hyper.lengthscales)
        if (!(l > kLengthLow && l < kLengthHigh)) return -INFINITY;
    if (!(sigma > 0.0)) return -INFINITY;

    double lp = log_marginal_likelihood(X, y_std, hyper);
    lp += -std::log(kSigmaFHigh - kSigmaFLow);
    lp += -2.0 * std::log(kLengthHigh - kLengthLow);
    // half-Normal(scale 5) on sigma
    lp += 0.5 * std::log(2.0 / (M_PI * kSigmaNoiseScale * kSigmaNoiseScale)) -
          sigma * sigma / (2.0 * kSigmaNoiseScale * kSigmaNoiseScale);
    return lp;
}

namespace {

GPHyperparams hyper_from_z(const std::vector<double>& z) {
    GPHyperparams h;
    const double sf = kSigmaFLow + (kSigmaFHigh - kSigmaFLow) * sigmoid(z[0]);
    h.signal_var = sf * sf;
    h.lengthscales[0] = kLengthLow + (kLengthHigh - kLengthLow) * sigmoid(z[1]);
    h.lengthscales[1] = kLengthLow + (kLengthHigh - kLengthLow) * sigmoid(z[2]);
    const double sigma = std::exp(z[3]);
    h.noise_var = sigma * sigma;
    return h;
}

double logit_in(double v, double lo, double hi) {
    const double s = (v - lo) / (hi - lo);
    return std::log(s / (1.0 - s));
}

}  // namespace

GPModel GPModel::fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y_raw,
                     const FitConfig& cfg) {
    if (X.rows() < 2)
        throw std::invalid_argument("GPModel::fit: need at least 2 training points");
    if (X.rows() != y_raw.size())
        throw std::invalid_argument("GPModel::fit: X rows must match y length");

    const double shift = y_raw.mean();
    double scale = std::sqrt((y_raw.array() - shift).square().mean());
    if (!(scale > 0.0)) scale = 1.0;
    const Eigen::VectorXd y_std = (y_raw.array() - shift) / scale;

    auto objective = [&](const std::vector<double>& z) {
        const GPHyperparams h = hyper_from_z(z);
        if (!(h.noise_var > 0.0) || !std::isfinite(h.noise_var)) return 1e300;
        try {
            const double lp = log_hyper_posterior(X, y_std, h);
            return std::isfinite(lp) ? -lp : 1e300;
        } catch (const std::runtime_error&) {
            return 1e300;
        }
    };

    rng::Xoshiro256 gen(cfg.seed);
    NelderMeadOptions nm;
    nm.max_iters = cfg.max_iters;
    nm.simplex_tol = cfg.simplex_tol;

    bool have_best = false;
    double best_val = 0.0;
    std::vector<double> best_z;
    for (int r = 0; r < cfg.restarts; ++r) {
        const double sf0 = gen.uniform(kSigmaFLow, kSigmaFHigh);
        const double l10 = gen.uniform(kLengthLow, kLengthHigh);
        const double l20 = gen.uniform(kLengthLow, kLengthHigh);
        const double s0 = std::max(1e-4, std::abs(kSigmaNoiseScale * gen.normal()));
        const std::vector<double> z0 = {logit_in(sf0, kSigmaFLow, kSigmaFHigh),
                                        logit_in(l10, kLengthLow, kLengthHigh),
                                        logit_in(l20, kLengthLow, kLengthHigh),
                                        std::log(s0)};
        const NelderMeadResult res = nelder_mead(objective, z0, nm);
        if (res.value >= 1e300) continue;  // start never reached a feasible point
        if (!have_best || res.value < best_val) {
            have_best = true;
            best_val = res.value;
            best_z = res.x;
        }
    }
    if (!have_best) throw std::runtime_error("GPModel::fit: every restart failed");

    return make(X, y_raw, shift, scale, hyper_from_z(best_z));
}

GPModel GPModel::make(const Eigen::MatrixXd& X, const Eigen::VectorXd& y_raw,
                      double target_shift, double target_scale, const GPHyperparams& hyper) {
    if (X.rows() < 1) throw std::invalid_argument("GPModel::make: need training points");
    if (X.rows() != y_raw.size())
        throw std::invalid_argument("GPModel::make: X rows must match y length");
    if (!(target_scale > 0.0))
        throw std::invalid_argument("GPModel::make: target_scale must be > 0");
    hyper.validate();

    GPModel m;
    m.X_ = X;
    m.y_raw_ = y_raw;
    m.shift_ = target_shift;
    m.scale_ = target_scale;
    m.y_std_ = (y_raw.array() - target_shift) / target_scale;
    m.hyper_ = hyper;
    m.factorize();
    return m;
}

void GPModel::factorize() {
    chol_lower_ = detail::cholesky_with_jitter(detail::build_covariance(X_, hyper_));
    alpha_ = chol_lower_.transpose().triangularView<Eigen::Upper>().solve(
        chol_lower_.triangularView<Eigen::Lower>().solve(y_std_));
}

Eigen::VectorXd GPModel::kernel_vector(const Eigen::Vector2d& x) const {
    Eigen::VectorXd k(X_.rows());
    for (Eigen::Index i = 0; i < X_.rows(); ++i)
        k(i) = kernel_rbf_ard(X_.row(i), x, hyper_);
    return k;
}

Eigen::VectorXd GPModel::apply_cov_inverse(const Eigen::VectorXd& v) const {
    return chol_lower_.transpose().triangularView<Eigen::Upper>().solve(
        chol_lower_.triangularView<Eigen::Lower>().solve(v));
}

PredictiveDist GPModel::predict(const Eigen::Vector2d& x) const {
    const Eigen::VectorXd k = kernel_vector(x);
    const double mean_std = k.dot(alpha_);
    const Eigen::VectorXd v = chol_lower_.triangularView<Eigen::Lower>().solve(k);
    const double var_std = hyper_.signal_var - v.squaredNorm();
    double var = var_std * scale_ * scale_;
    if (var < 0.0) var = 0.0;
    return {shift_ + scale_ * mean_std, var};
}

nlohmann::json GPModel::to_json() const {
    nlohmann::json j;
    std::vector<std::array<double, 2>> inputs(X_.rows());
    for (Eigen::Index i = 0; i < X_.rows(); ++i) inputs[i] = {X_(i, 0), X_(i, 1)};
    j["inputs"] = inputs;
    j["targets_raw"] = std::vector<double>(y_raw_.data(), y_raw_.data() + y_raw_.size());
    j["target_shift"] = shift_;
    j["target_scale"] = scale_;
    j["hyperparams"] = {{"signal_var", hyper_.signal_var},
                        {"lengthscales", hyper_.lengthscales},
                        {"noise_var", hyper_.noise_var}};
    return j;
}

GPModel GPModel::from_json(const nlohmann::json& j) {
    const auto inputs = j.at("inputs").get<std::vector<std::array<double, 2>>>();
    const auto targets = j.at("targets_raw").get<std::vector<double>>();
    if (inputs.size() != targets.size() || inputs.empty())
        throw std::runtime_error("GPModel::from_json: malformed model document");
    Eigen::MatrixXd X(inputs.size(), 2);
    Eigen::VectorXd y(targets.size());
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        X(i, 0) = inputs[i][0];
        X(i, 1) = inputs[i][1];
        y(i) = targets[i];
    }
    GPHyperparams h;
    h.signal_var = j.at("hyperparams").at("signal_var").get<double>();
    h.lengthscales = j.at("hyperparams").at("lengthscales").get<std::array<double, 2>>();
    h.noise_var = j.at("hyperparams").at("noise_var").get<double>();
    return make(X, y, j.at("target_shift").get<double>(), j.at("target_scale").get<double>(),
                h);
}

}  // namespace hybridcal::gp
