#include "hybridcal/surrogate.hpp"

#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <numeric>
#include <stdexcept>

#include "hybridcal/kernels.hpp"

namespace hybridcal::surrogate {

std::string kind_name(SurrogateKind k) {
    switch (k) {
        case SurrogateKind::simple: return "simple";
        case SurrogateKind::blackbox_gp: return "gp";
        case SurrogateKind::hybrid: return "hybrid";
    }
    throw std::logic_error("kind_name: bad kind");
}

SurrogateKind kind_from_name(const std::string& name) {
    if (name == "simple") return SurrogateKind::simple;
    if (name == "gp") return SurrogateKind::blackbox_gp;
    if (name == "hybrid") return SurrogateKind::hybrid;
    throw std::invalid_argument("unknown surrogate kind '" + name +
                                "' (expected simple, gp or hybrid)");
}

namespace {

Eigen::MatrixXd dataset_inputs(const data::Dataset& ds) {
    Eigen::MatrixXd X(ds.size(), 2);
    for (std::size_t i = 0; i < ds.size(); ++i) {
        X(i, 0) = ds.experiments[i].v0_mps;
        X(i, 1) = ds.experiments[i].psi_deg;
    }
    return X;
}

Eigen::VectorXd dataset_targets(const data::Dataset& ds) {
    Eigen::VectorXd y(ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) y(i) = ds.experiments[i].y_m;
    return y;
}

Eigen::VectorXd range_factors(const Eigen::MatrixXd& X) {
    Eigen::VectorXd f(X.rows());
    for (Eigen::Index i = 0; i < X.rows(); ++i)
        f(i) = physics::range_factor(physics::LaunchInput{X(i, 0), X(i, 1)});
    return f;
}

}  // namespace

void CalibratedSurrogate::finalize_caches() {
    if (posterior_) {
        posterior_->validate();
        const std::size_t n = posterior_->size();
        u_draws_.resize(n);
        kernels::reciprocal(posterior_->g_draws.data(), n, u_draws_.data());
        if (kind_ == SurrogateKind::simple) {
            var_draws_.resize(n);
            kernels::reciprocal(posterior_->tau_draws.data(), n, var_draws_.data());
        }
    }
    if (kind_ == SurrogateKind::hybrid) {
        u_ref_ = 1.0 / ref_g_;
        beta_factor_ = gp_->apply_cov_inverse(range_factors(gp_->inputs()));
    }
}

CalibratedSurrogate CalibratedSurrogate::fit_simple(const data::Dataset& ds,
                                                    const calibrate::McmcConfig& mcmc_cfg) {
    ds.validate();
    CalibratedSurrogate s;
    s.kind_ = SurrogateKind::simple;
    s.posterior_ = calibrate::sample_posterior(ds, mcmc_cfg);
    s.finalize_caches();
    return s;
}

CalibratedSurrogate CalibratedSurrogate::fit_gp_blackbox(const data::Dataset& ds,
                                                         const gp::FitConfig& fit_cfg) {
    ds.validate();
    CalibratedSurrogate s;
    s.kind_ = SurrogateKind::blackbox_gp;
    s.gp_ = gp::GPModel::fit(dataset_inputs(ds), dataset_targets(ds), fit_cfg);
    return s;
}

CalibratedSurrogate CalibratedSurrogate::fit_hybrid(const data::Dataset& ds,
                                                    const calibrate::McmcConfig& mcmc_cfg,
                                                    const gp::FitConfig& fit_cfg) {
    ds.validate();
    CalibratedSurrogate s;
    s.kind_ = SurrogateKind::hybrid;
    s.posterior_ = calibrate::sample_posterior(ds, mcmc_cfg);

    const auto& g = s.posterior_->g_draws;
    s.ref_g_ = std::accumulate(g.begin(), g.end(), 0.0) / static_cast<double>(g.size());

    const Eigen::MatrixXd X = dataset_inputs(ds);
    const Eigen::VectorXd y = dataset_targets(ds);
    const Eigen::VectorXd residuals = y - range_factors(X) / s.ref_g_;
    s.gp_ = gp::GPModel::fit(X, residuals, fit_cfg);
    s.finalize_caches();
    return s;
}

CalibratedSurrogate CalibratedSurrogate::from_gp(gp::GPModel model) {
    CalibratedSurrogate s;
    s.kind_ = SurrogateKind::blackbox_gp;
    s.gp_ = std::move(model);
    return s;
}

CalibratedSurrogate CalibratedSurrogate::from_parts(
    SurrogateKind kind, std::optional<calibrate::PosteriorSamples> posterior,
    std::optional<gp::GPModel> model, double residual_reference_g) {
    CalibratedSurrogate s;
    s.kind_ = kind;
    s.posterior_ = std::move(posterior);
    s.gp_ = std::move(model);
    s.ref_g_ = residual_reference_g;
    if (kind != SurrogateKind::blackbox_gp && !s.posterior_)
        throw std::invalid_argument("from_parts: posterior required for this kind");
    if (kind != SurrogateKind::simple && !s.gp_)
        throw std::invalid_argument("from_parts: GP model required for this kind");
    if (kind == SurrogateKind::hybrid && !(s.ref_g_ > 0.0))
        throw std::invalid_argument("from_parts: hybrid needs residual_reference_g > 0");
    s.finalize_caches();
    return s;
}

std::size_t CalibratedSurrogate::posterior_size() const {
    return kind_ == SurrogateKind::blackbox_gp ? 1 : posterior_->size();
}

const calibrate::PosteriorSamples& CalibratedSurrogate::posterior() const {
    if (!posterior_) throw std::logic_error("surrogate has no posterior samples");
    return *posterior_;
}

const gp::GPModel& CalibratedSurrogate::model() const {
    if (!gp_) throw std::logic_error("surrogate has no GP model");
    return *gp_;
}

double CalibratedSurrogate::residual_reference_g() const {
    if (kind_ != SurrogateKind::hybrid)
        throw std::logic_error("residual_reference_g is defined for hybrid surrogates");
    return ref_g_;
}

double CalibratedSurrogate::hybrid_residual_mean(const physics::LaunchInput& x,
                                                 std::size_t sample_index) const {
    if (kind_ != SurrogateKind::hybrid)
        throw std::logic_error("hybrid_residual_mean requires a hybrid surrogate");
    if (sample_index >= u_draws_.size())
        throw std::out_of_range("hybrid_residual_mean: sample index out of range");
    const Eigen::VectorXd k = gp_->kernel_vector({x.v0, x.psi_deg});
    const double base = gp_->predict({x.v0, x.psi_deg}).mean;
    const double w = k.dot(beta_factor_);
    return base + (u_ref_ - u_draws_[sample_index]) * w;
}

PerSamplePrediction CalibratedSurrogate::predict_for_sample(const physics::LaunchInput& x,
                                                            std::size_t sample_index) const {
    switch (kind_) {
        case SurrogateKind::simple: {
            if (sample_index >= u_draws_.size())
                throw std::out_of_range("predict_for_sample: sample index out of range");
            const double mean =
                physics::simple_range(posterior_->g_draws[sample_index], x);
            return {mean, var_draws_[sample_index]};
        }
        case SurrogateKind::blackbox_gp: {
            const gp::PredictiveDist pd = gp_->predict({x.v0, x.psi_deg});
            return {pd.mean, pd.variance + gp_->noise_var_raw()};
        }
        case SurrogateKind::hybrid: {
            if (sample_index >= u_draws_.size())
                throw std::out_of_range("predict_for_sample: sample index out of range");
            const double eta =
                physics::simple_range(posterior_->g_draws[sample_index], x);
            const double delta = hybrid_residual_mean(x, sample_index);
            const gp::PredictiveDist pd = gp_->predict({x.v0, x.psi_deg});
            return {eta + delta, pd.variance + gp_->noise_var_raw()};
        }
    }
    throw std::logic_error("predict_for_sample: bad kind");
}

CalibratedSurrogate::NodeTerms CalibratedSurrogate::node_terms(
    const physics::LaunchInput& x) const {
    const double f = physics::range_factor(x);
    switch (kind_) {
        case SurrogateKind::simple:
            return {f, 0.0, 0.0, true};
        case SurrogateKind::blackbox_gp: {
            const gp::PredictiveDist pd = gp_->predict({x.v0, x.psi_deg});
            return {0.0, pd.mean, pd.variance + gp_->noise_var_raw(), false};
        }
        case SurrogateKind::hybrid: {
            const gp::PredictiveDist pd = gp_->predict({x.v0, x.psi_deg});
            const Eigen::VectorXd k = gp_->kernel_vector({x.v0, x.psi_deg});
            const double w = k.dot(beta_factor_);
            // mean_s = f u_s + delta(x) + (u_ref - u_s) w
            //        = (f - w) u_s + (delta(x) + u_ref w)
            return {f - w, pd.mean + u_ref_ * w, pd.variance + gp_->noise_var_raw(), false};
        }
    }
    throw std::logic_error("node_terms: bad kind");
}

void CalibratedSurrogate::save(const std::filesystem::path& dir,
                               const std::string& basename) const {
    std::filesystem::create_directories(dir);
    nlohmann::json manifest;
    manifest["kind"] = kind_name(kind_);
    if (posterior_) {
        const std::string csv = basename + "_posterior.csv";
        const std::string meta = basename + "_posterior_meta.json";
        calibrate::save_posterior(*posterior_, dir / csv, dir / meta);
        manifest["posterior_csv"] = csv;
        manifest["posterior_meta_json"] = meta;
    }
    if (gp_) {
        const std::string gpfile = basename + "_gp.json";
        std::ofstream out(dir / gpfile);
        if (!out) throw std::runtime_error("surrogate save: cannot open " + gpfile);
        out << gp_->to_json().dump(2) << '\n';
        manifest["gp_model"] = gpfile;
    }
    if (kind_ == SurrogateKind::hybrid) manifest["residual_reference_g"] = ref_g_;
    std::ofstream mout(dir / (basename + "_surrogate.json"));
    if (!mout) throw std::runtime_error("surrogate save: cannot open manifest");
    mout << manifest.dump(2) << '\n';
}

CalibratedSurrogate CalibratedSurrogate::load(const std::filesystem::path& manifest_path) {
    std::ifstream in(manifest_path);
    if (!in)
        throw std::runtime_error("surrogate load: cannot open " + manifest_path.string());
    const nlohmann::json manifest = nlohmann::json::parse(in);
    const SurrogateKind kind = kind_from_name(manifest.at("kind").get<std::string>());
    const auto dir = manifest_path.parent_path();

    std::optional<calibrate::PosteriorSamples> posterior;
    if (manifest.contains("posterior_csv"))
        posterior = calibrate::load_posterior(
            dir / manifest.at("posterior_csv").get<std::string>(),
            dir / manifest.at("posterior_meta_json").get<std::string>());

    std::optional<gp::GPModel> model;
    if (manifest.contains("gp_model")) {
        std::ifstream gin(dir / manifest.at("gp_model").get<std::string>());
        if (!gin) throw std::runtime_error("surrogate load: cannot open GP model file");
        model = gp::GPModel::from_json(nlohmann::json::parse(gin));
    }
    const double ref_g = manifest.value("residual_reference_g", 0.0);
    return from_parts(kind, std::move(posterior), std::move(model), ref_g);
}

}  // namespace hybridcal::surrogate
