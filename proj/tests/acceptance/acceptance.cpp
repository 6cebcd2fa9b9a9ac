// Acceptance suite: one check per shipped guarantee, each printing a single
// [PASS]/[FAIL] line. Run all, or a single one with --criterion N.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include <Eigen/Dense>

#include "hybridcal/calibrate.hpp"
#include "hybridcal/data.hpp"
#include "hybridcal/gp.hpp"
#include "hybridcal/mcmc.hpp"
#include "hybridcal/optimize.hpp"
#include "hybridcal/pipeline.hpp"
#include "hybridcal/quadrature.hpp"
#include "hybridcal/rng.hpp"

using namespace hybridcal;
namespace fs = std::filesystem;

namespace {

const physics::PhysicsParams kTruth{1.0, 9.8, 0.01};
constexpr std::uint64_t kPipelineSeed = 1;

double now_seconds() {
    using clock = std::chrono::steady_clock;
    static const auto start = clock::now();
    return std::chrono::duration<double>(clock::now() - start).count();
}

bool report(int n, bool ok, const std::string& detail) {
    std::printf("[%s] criterion %d: %s\n", ok ? "PASS" : "FAIL", n, detail.c_str());
    std::fflush(stdout);
    return ok;
}

// ---------- 1: analytic impact agrees with the RK4 oracle ----------
bool criterion_1() {
    const double t0 = now_seconds();
    double worst = 0.0;
    for (int i = 0; i < 10; ++i)
        for (int j = 0; j < 10; ++j) {
            const physics::LaunchInput x{40.0 + 60.0 * j / 9.0, 5.0 + 80.0 * i / 9.0};
            const auto oracle = physics::integrate_impact_oracle(kTruth, x, 1e-5);
            const double analytic = physics::impact_distance(kTruth, x);
            worst = std::max(worst, std::abs(analytic - oracle.x_impact) / oracle.x_impact);
        }
    const double elapsed = now_seconds() - t0;
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "physics fidelity: max rel err %.3g (< 1e-4), %.1f s (< 10 s)", worst,
                  elapsed);
    return report(1, worst < 1e-4 && elapsed < 10.0, buf);
}

// ---------- 2: training-table reproduction ----------
bool criterion_2() {
    const struct {
        double psi, v0, y;
        bool base;
    } rows[8] = {{25, 60, 118.18, true},  {30, 70, 159.79, true}, {36, 80, 174.14, true},
                 {45, 90, 181.67, true},  {60, 75, 143.21, true}, {10, 42, 47.305, false},
                 {80, 53, 54.294, false}, {85, 71, 43.239, false}};
    bool ok = true;
    double worst = 0.0;
    for (const auto& r : rows) {
        const double d = std::abs(physics::impact_distance(kTruth, {r.v0, r.psi}) - r.y);
        worst = std::max(worst, d);
        if (d >= 15.0) ok = false;
        if (r.base && d >= 12.0) ok = false;
    }
    char buf[128];
    std::snprintf(buf, sizeof buf,
                  "deterministic impact vs tabled rows: worst |diff| %.2f m "
                  "(< 15 all, < 12 rows 1-5)",
                  worst);
    return report(2, ok, buf);
}

// ---------- 3: vacuum equivalence ----------
bool criterion_3() {
    rng::Xoshiro256 gen(303);
    const physics::PhysicsParams vacuum{1.0, 9.8, 0.0};
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const physics::LaunchInput x{gen.uniform(5.0, 120.0), gen.uniform(0.5, 89.5)};
        const double a = physics::impact_distance(vacuum, x);
        const double b = physics::simple_range(9.8, x);
        worst = std::max(worst, std::abs(a - b) / b);
    }
    char buf[96];
    std::snprintf(buf, sizeof buf, "vacuum equivalence: max rel err %.3g (< 1e-6)", worst);
    return report(3, worst < 1e-6, buf);
}

// ---------- 4: GP core ----------
struct DenseInverse {
    std::vector<std::vector<double>> inv;
    double det;
};

DenseInverse gauss_jordan(std::vector<std::vector<double>> a) {
    const std::size_t n = a.size();
    std::vector<std::vector<double>> inv(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1.0;
    double det = 1.0;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        if (piv != col) {
            std::swap(a[piv], a[col]);
            std::swap(inv[piv], inv[col]);
            det = -det;
        }
        const double p = a[col][col];
        det *= p;
        for (std::size_t c = 0; c < n; ++c) {
            a[col][c] /= p;
            inv[col][c] /= p;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const double f = a[r][col];
            if (f == 0.0) continue;
            for (std::size_t c = 0; c < n; ++c) {
                a[r][c] -= f * a[col][c];
                inv[r][c] -= f * inv[col][c];
            }
        }
    }
    return {inv, det};
}

double brute_force_lml(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                       const gp::GPHyperparams& h) {
    const std::size_t n = X.rows();
    std::vector<std::vector<double>> C(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const double d0 = (X(i, 0) - X(j, 0)) / h.lengthscales[0];
            const double d1 = (X(i, 1) - X(j, 1)) / h.lengthscales[1];
            C[i][j] = h.signal_var * std::exp(-0.5 * (d0 * d0 + d1 * d1));
            if (i == j) C[i][j] += h.noise_var;
        }
    const auto gj = gauss_jordan(C);
    double quad = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) quad += y(i) * gj.inv[i][j] * y(j);
    return -0.5 * quad - 0.5 * std::log(gj.det) -
           0.5 * static_cast<double>(n) * std::log(2.0 * M_PI);
}

bool criterion_4() {
    rng::Xoshiro256 gen(404);
    // (a) marginal likelihood vs the dense brute force
    double worst_lml = 0.0;
    for (const int n : {2, 4, 6, 8, 10}) {
        Eigen::MatrixXd X(n, 2);
        Eigen::VectorXd y(n);
        for (int i = 0; i < n; ++i) {
            X(i, 0) = gen.uniform(40.0, 100.0);
            X(i, 1) = gen.uniform(1.0, 90.0);
            y(i) = gen.normal();
        }
        const gp::GPHyperparams h{gen.uniform(0.05, 0.9),
                                  {gen.uniform(5.0, 45.0), gen.uniform(5.0, 45.0)},
                                  gen.uniform(0.01, 0.5)};
        worst_lml = std::max(worst_lml, std::abs(gp::log_marginal_likelihood(X, y, h) -
                                                 brute_force_lml(X, y, h)));
    }

    // (b) near-noiseless reproduction of a training target
    Eigen::MatrixXd Xt(4, 2);
    Xt << 50, 20, 60, 35, 75, 50, 90, 70;
    Eigen::VectorXd yt(4);
    yt << 0.4, -1.1, 0.9, 0.2;
    const auto m = gp::GPModel::make(Xt, yt, 0.0, 1.0, {0.64, {18.0, 22.0}, 1e-10});
    double worst_interp = 0.0;
    for (int i = 0; i < 4; ++i)
        worst_interp =
            std::max(worst_interp, std::abs(m.predict({Xt(i, 0), Xt(i, 1)}).mean - yt(i)));

    // (c) synthetic hyperparameter recovery
    const int n = 40;
    Eigen::MatrixXd X(n, 2);
    for (int i = 0; i < n; ++i) {
        X(i, 0) = gen.uniform(40.0, 100.0);
        X(i, 1) = gen.uniform(1.0, 90.0);
    }
    const gp::GPHyperparams truth{0.64, {15.0, 20.0}, 0.01};
    Eigen::MatrixXd K(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            K(i, j) = gp::kernel_rbf_ard(X.row(i), X.row(j), truth);
            if (i == j) K(i, j) += truth.noise_var;
        }
    Eigen::VectorXd z(n);
    for (int i = 0; i < n; ++i) z(i) = gen.normal();
    const Eigen::VectorXd y = Eigen::LLT<Eigen::MatrixXd>(K).matrixL() * z;
    const auto fit = gp::GPModel::fit(X, y, {16, 405});
    const double l1 = fit.hyper().lengthscales[0], l2 = fit.hyper().lengthscales[1];
    const bool recovery_ok = l1 > 7.5 && l1 < 22.5 && l2 > 10.0 && l2 < 30.0;

    char buf[192];
    std::snprintf(buf, sizeof buf,
                  "GP core: lml vs brute force %.2g (< 1e-8); interpolation %.2g (< 1e-6); "
                  "recovered lengthscales (%.1f, %.1f) within +-50%%",
                  worst_lml, worst_interp, l1, l2);
    return report(4, worst_lml < 1e-8 && worst_interp < 1e-6 && recovery_ok, buf);
}

// ---------- 5: quadrature vs Monte-Carlo oracle ----------
bool criterion_5() {
    const auto& rule = quadrature::gauss_hermite(7);
    const double wsum_err = std::abs(rule.weight_sum() - std::sqrt(M_PI));
    const bool weights_ok = wsum_err < 1e-12;

    const optimize::UtilityConfig cfg;
    rng::Xoshiro256 gen(505);
    double worst = 0.0, worst_mean = 0.0, worst_sd = 0.0;
    for (double mean = 0.0; mean <= 250.0; mean += 50.0) {
        for (double sd = 0.0; sd <= 50.0; sd += 10.0) {
            const double gh =
                optimize::gh_expected_utility({mean, sd * sd}, cfg, 7);
            double mc;
            if (sd == 0.0) {
                mc = optimize::utility(cfg.target - mean, cfg);
            } else {
                double acc = 0.0;
                for (int k = 0; k < 10'000'000; ++k)
                    acc += optimize::utility(cfg.target - (mean + sd * gen.normal()), cfg);
                mc = acc / 1e7;
            }
            const double err = std::abs(gh - mc);
            if (err > worst) {
                worst = err;
                worst_mean = mean;
                worst_sd = sd;
            }
        }
    }
    const bool sweep_ok = worst < 1e-2;
    char buf[384];
    std::snprintf(buf, sizeof buf,
                  "quadrature: weights sum to sqrt(pi) within %.1e (< 1e-12, %s); "
                  "7-node rule vs 1e7-draw MC max |err| %.4f at (mean %.0f, sd %.0f) "
                  "(< 1e-2, %s). The 7-node rule carries an inherent bias for the kinked "
                  "utility that exceeds 1e-2 once sd >~ 12; it stays under 1e-2 only for "
                  "sd <= 10",
                  wsum_err, weights_ok ? "ok" : "violated", worst, worst_mean, worst_sd,
                  sweep_ok ? "ok" : "violated");
    return report(5, weights_ok && sweep_ok, buf);
}

// ---------- 6: MCMC on an analytic gaussian ----------
bool criterion_6() {
    const double mx = 1.0, my = -2.0, sxx = 1.0, sxy = 0.3, syy = 0.5;
    const auto target = [&](const std::vector<double>& x) {
        const double det = sxx * syy - sxy * sxy;
        const double dx = x[0] - mx, dy = x[1] - my;
        return -0.5 * (syy * dx * dx - 2.0 * sxy * dx * dy + sxx * dy * dy) / det;
    };
    mcmc::ChainConfig cfg;
    cfg.burn_in = 5000;
    cfg.keep = 50000;
    const auto res = mcmc::run_adaptive_rwm(target, {0.0, 0.0}, cfg, 606);

    double m0 = 0.0, m1 = 0.0;
    for (const auto& d : res.draws) {
        m0 += d[0];
        m1 += d[1];
    }
    m0 /= cfg.keep;
    m1 /= cfg.keep;
    double c00 = 0.0, c01 = 0.0, c11 = 0.0;
    for (const auto& d : res.draws) {
        c00 += (d[0] - m0) * (d[0] - m0);
        c01 += (d[0] - m0) * (d[1] - m1);
        c11 += (d[1] - m1) * (d[1] - m1);
    }
    c00 /= cfg.keep - 1;
    c01 /= cfg.keep - 1;
    c11 /= cfg.keep - 1;

    const bool ok = std::abs(m0 - mx) < 0.05 && std::abs(m1 - my) < 0.05 &&
                    std::abs(c00 - sxx) < 0.10 * sxx && std::abs(c11 - syy) < 0.10 * syy &&
                    std::abs(c01 - sxy) < 0.10 * std::abs(sxy);
    char buf[192];
    std::snprintf(buf, sizeof buf,
                  "MCMC on analytic gaussian: mean err (%.3f, %.3f) < 0.05; cov rel err "
                  "(%.1f%%, %.1f%%, %.1f%%) < 10%%",
                  std::abs(m0 - mx), std::abs(m1 - my), 100.0 * std::abs(c00 - sxx) / sxx,
                  100.0 * std::abs(c01 - sxy) / sxy, 100.0 * std::abs(c11 - syy) / syy);
    return report(6, ok, buf);
}

// ---------- 7: biased gravity estimate on dataset C ----------
bool criterion_7() {
    calibrate::McmcConfig cfg;
    cfg.seed = rng::sub_seed(kPipelineSeed, 7);
    const auto post = calibrate::sample_posterior(data::builtin_dataset("C"), cfg);
    double mean = 0.0;
    for (const double g : post.g_draws) mean += g;
    mean /= static_cast<double>(post.size());
    char buf[128];
    std::snprintf(buf, sizeof buf,
                  "dataset C simple posterior: mean g %.3f m/s^2 in [29, 43] and > 9.8",
                  mean);
    return report(7, mean > 29.0 && mean < 43.0 && mean > 9.8, buf);
}

// ---------- 8: nine-combination qualitative reproduction ----------
bool criterion_8() {
    const double t0 = now_seconds();
    const optimize::GridSpec grid;
    const optimize::UtilityConfig ucfg;
    const pipeline::FitOptions opt;

    bool ordering_ok = true, overshoot_ok = true, hybrid_ok = true, argmax_ok = true;
    std::string hybrid_c;
    for (const std::string label : {"A", "B", "C"}) {
        const auto ds = data::builtin_dataset(label);
        const auto rs =
            pipeline::run_combo(ds, surrogate::SurrogateKind::simple, kPipelineSeed, grid,
                                ucfg, 5.0, opt);
        const auto rg =
            pipeline::run_combo(ds, surrogate::SurrogateKind::blackbox_gp, kPipelineSeed,
                                grid, ucfg, 5.0, opt);
        const auto rh =
            pipeline::run_combo(ds, surrogate::SurrogateKind::hybrid, kPipelineSeed, grid,
                                ucfg, 5.0, opt);

        if (!(rh.report.max_expected_utility > rg.report.max_expected_utility &&
              rg.report.max_expected_utility > rs.report.max_expected_utility))
            ordering_ok = false;

        const double simple_truth = physics::impact_distance(
            kTruth, {rs.report.argmax_v0_mps, rs.report.argmax_psi_deg});
        if (!(simple_truth > 100.0)) overshoot_ok = false;

        const double hybrid_truth = physics::impact_distance(
            kTruth, {rh.report.argmax_v0_mps, rh.report.argmax_psi_deg});
        if (!(std::abs(hybrid_truth - 100.0) <= 33.0)) hybrid_ok = false;

        if (label == "C") {
            if (std::abs(rh.report.argmax_psi_deg - 72.0) > 1.0 ||
                std::abs(rh.report.argmax_v0_mps - 72.5) > 2.5)
                argmax_ok = false;
            char b[48];
            std::snprintf(b, sizeof b, "(%.0f deg, %.1f m/s)", rh.report.argmax_psi_deg,
                          rh.report.argmax_v0_mps);
            hybrid_c = b;
        }
    }
    const double elapsed = now_seconds() - t0;
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "nine combinations (seed %llu, %.1f s < 600 s): hybrid > gp > simple %s; "
                  "simple overshoots on all %s; hybrid within 33 m on all %s; "
                  "hybrid-C argmax %s within one grid step of (72, 72.5) %s",
                  static_cast<unsigned long long>(kPipelineSeed), elapsed,
                  ordering_ok ? "ok" : "VIOLATED", overshoot_ok ? "ok" : "VIOLATED",
                  hybrid_ok ? "ok" : "VIOLATED", hybrid_c.c_str(),
                  argmax_ok ? "ok" : "VIOLATED");
    return report(8, ordering_ok && overshoot_ok && hybrid_ok && argmax_ok &&
                         elapsed < 600.0,
                  buf);
}

// ---------- 9: exact-value caveat ----------
bool criterion_9() {
    // the published objective maxima and distances depend on unrecoverable
    // noise realizations; this suite checks them only through the windows and
    // orderings of criteria 2, 7 and 8 - no equality assertion exists
    return report(9, true,
                  "exact-value caveat honored: published maxima/distances checked by "
                  "window and ordering only (criteria 2, 7, 8)");
}

// ---------- 10: byte-identical reruns ----------
std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool criterion_10() {
    const fs::path d1 = fs::temp_directory_path() / "hc_acc_rep1";
    const fs::path d2 = fs::temp_directory_path() / "hc_acc_rep2";
    fs::remove_all(d1);
    fs::remove_all(d2);
    const pipeline::FitOptions opt;
    pipeline::run_reproduce(42, d1, true, opt);
    pipeline::run_reproduce(42, d2, true, opt);

    bool ok = slurp(d1 / "reproduce_report.json") == slurp(d2 / "reproduce_report.json");
    for (const std::string label : {"A", "B", "C"})
        for (const std::string model : {"simple", "gp", "hybrid"}) {
            const std::string f = "report_" + label + "_" + model + ".json";
            if (slurp(d1 / f) != slurp(d2 / f)) ok = false;
        }
    return report(10, ok, "reproduce --seed 42 run twice: run reports byte-identical");
}

}  // namespace

int main(int argc, char** argv) {
    int which = 0;
    for (int i = 1; i < argc - 1; ++i)
        if (std::strcmp(argv[i], "--criterion") == 0) which = std::atoi(argv[i + 1]);

    bool (*checks[10])() = {criterion_1, criterion_2, criterion_3, criterion_4,
                            criterion_5, criterion_6, criterion_7, criterion_8,
                            criterion_9, criterion_10};
    bool all_ok = true;
    for (int n = 1; n <= 10; ++n) {
        if (which != 0 && which != n) continue;
        if (!checks[n - 1]()) all_ok = false;
    }
    return all_ok ? 0 : 1;
}
