#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>

#include "hybridcal/calibrate.hpp"
#include "hybridcal/data.hpp"
#include "hybridcal/gp.hpp"

namespace hybridcal::surrogate {

enum class SurrogateKind { simple, blackbox_gp, hybrid };

std::string kind_name(SurrogateKind k);
SurrogateKind kind_from_name(const std::string& name);

/// Predictive mean and total observation variance for one posterior sample;
/// this pair is what enters the utility integral.
struct PerSamplePrediction {
    double mean;      // m
    double variance;  // m^2
};

/// One calibrated predictive model behind a common per-sample interface.
///
/// simple      - parabolic range with (g, tau) drawn from the MCMC posterior.
/// blackbox_gp - GP trained on raw observations; independent of the sample
///               index.
/// hybrid      - parabolic mean plus a GP discrepancy. The GP hyperparameters
///               are fit once on residuals at the posterior-mean g; at
///               prediction time the GP mean is conditioned on each sample's
///               exact residual targets, which is a cheap linear update
///               because the posterior mean is linear in the targets.
class CalibratedSurrogate {
  public:
    static CalibratedSurrogate fit_simple(const data::Dataset& ds,
                                          const calibrate::McmcConfig& mcmc_cfg);
    static CalibratedSurrogate fit_gp_blackbox(const data::Dataset& ds,
                                               const gp::FitConfig& fit_cfg);
    static CalibratedSurrogate fit_hybrid(const data::Dataset& ds,
                                          const calibrate::McmcConfig& mcmc_cfg,
                                          const gp::FitConfig& fit_cfg);

    /// Wraps an existing GP as a black-box surrogate (loaders and tests).
    static CalibratedSurrogate from_gp(gp::GPModel model);
    /// Rebuilds a simple/hybrid surrogate from stored artifacts.
    static CalibratedSurrogate from_parts(SurrogateKind kind,
                                          std::optional<calibrate::PosteriorSamples> posterior,
                                          std::optional<gp::GPModel> model,
                                          double residual_reference_g);

    SurrogateKind kind() const { return kind_; }
    /// Number of distinct posterior samples (1 for the black-box GP).
    std::size_t posterior_size() const;
    const calibrate::PosteriorSamples& posterior() const;
    const gp::GPModel& model() const;
    double residual_reference_g() const;

    PerSamplePrediction predict_for_sample(const physics::LaunchInput& x,
                                           std::size_t sample_index) const;

    /// The discrepancy-GP mean conditioned on sample_index's residual targets
    /// (hybrid only).
    double hybrid_residual_mean(const physics::LaunchInput& x, std::size_t sample_index) const;

    /// Per-node affine form of the per-sample predictive mean,
    ///   mean_s = intercept + slope * u_draws()[s],
    /// used by the batched objective kernels. For per_sample_variance
    /// surrogates the variance array is obs_var_draws(); otherwise
    /// const_variance applies to every sample.
    struct NodeTerms {
        double slope;
        double intercept;
        double const_variance;
        bool per_sample_variance;
    };
    NodeTerms node_terms(const physics::LaunchInput& x) const;

    std::span<const double> u_draws() const { return u_draws_; }        // 1/g
    std::span<const double> obs_var_draws() const { return var_draws_; }  // 1/tau

    /// Bundle persistence: a JSON manifest referencing the posterior CSV and
    /// the GP model JSON next to it.
    void save(const std::filesystem::path& dir, const std::string& basename) const;
    static CalibratedSurrogate load(const std::filesystem::path& manifest_path);

  private:
    CalibratedSurrogate() = default;
    void finalize_caches();

    SurrogateKind kind_ = SurrogateKind::simple;
    std::optional<calibrate::PosteriorSamples> posterior_;
    std::optional<gp::GPModel> gp_;
    double ref_g_ = 0.0;   // residual reference (hybrid)
    double u_ref_ = 0.0;   // 1 / ref_g_
    std::vector<double> u_draws_;
    std::vector<double> var_draws_;
    Eigen::VectorXd beta_factor_;  // C^{-1} eta_factor(X), hybrid update direction
};

}  // namespace hybridcal::surrogate
