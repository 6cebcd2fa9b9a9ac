#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numeric>

#include "hybridcal/surrogate.hpp"

using namespace hybridcal;
using surrogate::CalibratedSurrogate;
using surrogate::SurrogateKind;

namespace {

calibrate::McmcConfig fast_mcmc(std::uint64_t seed) {
    calibrate::McmcConfig cfg;
    cfg.chains = 2;
    cfg.burn_in = 1500;
    cfg.keep = 800;
    cfg.seed = seed;
    return cfg;
}

double mean_of(std::span<const double> v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

TEST_CASE("fit_simple") {
    const auto s = CalibratedSurrogate::fit_simple(data::builtin_dataset("C"), fast_mcmc(4));
    CHECK(s.kind() == SurrogateKind::simple);
    const double g_mean = mean_of(std::span<const double>(s.posterior().g_draws));
    CHECK(g_mean > 29.0);
    CHECK(g_mean < 43.0);

    CHECK_THROWS(CalibratedSurrogate::fit_simple(data::Dataset{"empty", {}}, fast_mcmc(1)));

    // well-specified noiseless data recovers the generating constant
    data::Dataset ds{"well_specified", {}};
    int id = 0;
    for (const auto& e : data::builtin_dataset("A").experiments) {
        const double y = physics::simple_range(9.8, {e.v0_mps, e.psi_deg});
        ds.experiments.push_back({std::to_string(++id), e.psi_deg, e.v0_mps, y});
    }
    const auto sw = CalibratedSurrogate::fit_simple(ds, fast_mcmc(6));
    const double gw = mean_of(std::span<const double>(sw.posterior().g_draws));
    CHECK(gw > 9.3);
    CHECK(gw < 10.3);
}

TEST_CASE("fit_gp_blackbox") {
    const auto ds = data::builtin_dataset("A");
    const auto s = CalibratedSurrogate::fit_gp_blackbox(ds, {16, 8});
    CHECK(s.kind() == SurrogateKind::blackbox_gp);
    CHECK(s.posterior_size() == 1);

    // training points predicted within two predictive standard deviations
    for (const auto& e : ds.experiments) {
        const auto pred = s.predict_for_sample({e.v0_mps, e.psi_deg}, 0);
        CHECK(std::abs(pred.mean - e.y_m) < 2.0 * std::sqrt(pred.variance) + 1e-6);
    }

    // prediction between the low-speed training rows stays bracketed
    const auto mid = s.predict_for_sample({57.5, 29.0}, 0);
    CHECK(mid.mean > 80.0);
    CHECK(mid.mean < 180.0);

    // theta independence
    CHECK(s.predict_for_sample({70.0, 40.0}, 0).mean ==
          s.predict_for_sample({70.0, 40.0}, 123456).mean);

    // row order invariance of the fitted hyperparameters
    data::Dataset perm = ds;
    std::swap(perm.experiments[0], perm.experiments[4]);
    std::swap(perm.experiments[1], perm.experiments[5]);
    const auto sp = CalibratedSurrogate::fit_gp_blackbox(perm, {16, 8});
    CHECK(s.model().hyper().lengthscales[0] ==
          doctest::Approx(sp.model().hyper().lengthscales[0]).epsilon(1e-3));
    CHECK(s.model().hyper().lengthscales[1] ==
          doctest::Approx(sp.model().hyper().lengthscales[1]).epsilon(1e-3));
}

TEST_CASE("fit_hybrid") {
    const auto ds = data::builtin_dataset("C");
    const auto s = CalibratedSurrogate::fit_hybrid(ds, fast_mcmc(10), {16, 11});
    CHECK(s.kind() == SurrogateKind::hybrid);

    // stored reference g reproduces the GP training targets exactly
    const double ref_g = s.residual_reference_g();
    const auto& gp_model = s.model();
    for (Eigen::Index i = 0; i < gp_model.train_count(); ++i) {
        const physics::LaunchInput xi{gp_model.inputs()(i, 0), gp_model.inputs()(i, 1)};
        const double expected = ds.experiments[i].y_m - physics::simple_range(ref_g, xi);
        CHECK(gp_model.targets_raw()(i) == expected);
    }

    // additive decomposition: the mean is the sum of the parabolic term and
    // the per-sample residual prediction, up to the rounding of that sum
    const physics::LaunchInput x{72.5, 72.0};
    for (const std::size_t idx : {std::size_t{0}, std::size_t{7}, std::size_t{500}}) {
        const auto pred = s.predict_for_sample(x, idx);
        const double eta = physics::simple_range(s.posterior().g_draws[idx], x);
        const double delta = s.hybrid_residual_mean(x, idx);
        CHECK(pred.mean == eta + delta);
        CHECK(pred.mean - eta == doctest::Approx(delta).epsilon(1e-12));
    }

    CHECK_THROWS(s.predict_for_sample(x, s.posterior_size()));
}

TEST_CASE("hybrid with zero discrepancy degenerates to the simple prediction") {
    // data generated exactly from the parabolic model: residuals vanish and
    // the hybrid mean tracks the simple mean
    data::Dataset ds{"zero_disc", {}};
    int id = 0;
    for (const auto& e : data::builtin_dataset("A").experiments) {
        const double y = physics::simple_range(9.8, {e.v0_mps, e.psi_deg});
        ds.experiments.push_back({std::to_string(++id), e.psi_deg, e.v0_mps, y});
    }
    const auto s = CalibratedSurrogate::fit_hybrid(ds, fast_mcmc(21), {16, 22});

    // training residuals shrink to well below the data scale
    for (Eigen::Index i = 0; i < s.model().train_count(); ++i)
        CHECK(std::abs(s.model().targets_raw()(i)) < 1.0);

    const physics::LaunchInput x{65.0, 40.0};
    for (const std::size_t idx : {std::size_t{0}, std::size_t{100}}) {
        const auto pred = s.predict_for_sample(x, idx);
        const double eta = physics::simple_range(s.posterior().g_draws[idx], x);
        CHECK(std::abs(pred.mean - eta) < 0.01 * eta);  // correction ~0
        CHECK(pred.variance >= 0.0);
    }
}

TEST_CASE("per sample prediction for the simple surrogate") {
    // construct directly: a single posterior draw at g = 9.8
    calibrate::PosteriorSamples post;
    post.g_draws = {9.8};
    post.tau_draws = {4.0};
    post.meta = {1, 0, 1, 1.0, 0};
    const auto s = CalibratedSurrogate::from_parts(SurrogateKind::simple, post, std::nullopt,
                                                   0.0);
    const auto pred = s.predict_for_sample({31.3, 45.0}, 0);
    CHECK(pred.mean == doctest::Approx(99.97).epsilon(1e-3));
    CHECK(pred.variance == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("node terms agree with per-sample predictions") {
    const auto ds = data::builtin_dataset("B");
    const auto s = CalibratedSurrogate::fit_hybrid(ds, fast_mcmc(33), {16, 34});
    const physics::LaunchInput x{57.5, 21.0};
    const auto terms = s.node_terms(x);
    CHECK_FALSE(terms.per_sample_variance);
    for (const std::size_t idx : {std::size_t{0}, std::size_t{50}, std::size_t{900}}) {
        const auto pred = s.predict_for_sample(x, idx);
        const double affine = terms.intercept + terms.slope * s.u_draws()[idx];
        CHECK(pred.mean == doctest::Approx(affine).epsilon(1e-10));
        CHECK(pred.variance == doctest::Approx(terms.const_variance).epsilon(1e-12));
    }

    const auto ss = CalibratedSurrogate::fit_simple(ds, fast_mcmc(35));
    const auto terms_s = ss.node_terms(x);
    CHECK(terms_s.per_sample_variance);
    for (const std::size_t idx : {std::size_t{0}, std::size_t{123}}) {
        const auto pred = ss.predict_for_sample(x, idx);
        CHECK(pred.mean ==
              doctest::Approx(terms_s.intercept + terms_s.slope * ss.u_draws()[idx])
                  .epsilon(1e-10));
        CHECK(pred.variance == ss.obs_var_draws()[idx]);
    }
}

TEST_CASE("bundle persistence round trip") {
    const auto dir = std::filesystem::temp_directory_path() / "hybridcal_bundle";
    const auto ds = data::builtin_dataset("C");
    const auto s = CalibratedSurrogate::fit_hybrid(ds, fast_mcmc(44), {16, 45});
    s.save(dir, "c_hybrid");
    const auto loaded = CalibratedSurrogate::load(dir / "c_hybrid_surrogate.json");
    CHECK(loaded.kind() == SurrogateKind::hybrid);
    CHECK(loaded.residual_reference_g() == s.residual_reference_g());
    CHECK(loaded.posterior().g_draws == s.posterior().g_draws);
    const physics::LaunchInput x{72.5, 72.0};
    const auto a = s.predict_for_sample(x, 11);
    const auto b = loaded.predict_for_sample(x, 11);
    CHECK(a.mean == doctest::Approx(b.mean).epsilon(1e-12));
    CHECK(a.variance == doctest::Approx(b.variance).epsilon(1e-12));
}
