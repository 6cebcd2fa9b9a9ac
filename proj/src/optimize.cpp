#include "hybridcal/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <nlohmann/json.hpp>
#include <stdexcept>

#include "hybridcal/kernels.hpp"
#include "hybridcal/quadrature.hpp"
#include "hybridcal/threads.hpp"

namespace hybridcal::optimize {

namespace {

constexpr double kInvSqrtPi = 0.56418958354775628694807945156077;

int count_steps(double lo, double hi, double step, const char* what) {
    const double span = hi - lo;
    const double steps = span / step;
    const long rounded = std::lround(steps);
    if (rounded < 1 || std::abs(steps - static_cast<double>(rounded)) > 1e-9)
        throw std::invalid_argument(std::string("GridSpec: ") + what +
                                    " step must divide the range evenly");
    return static_cast<int>(rounded) + 1;
}

// Normalized weights w_j / sqrt(pi) for the given rule size.
struct NormalizedRule {
    std::vector<double> nodes;
    std::vector<double> wnorm;
};

const NormalizedRule& normalized_rule(int n) {
    static std::mutex mu;
    static std::map<int, NormalizedRule> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it == cache.end()) {
        const auto& rule = quadrature::gauss_hermite(n);
        NormalizedRule nr;
        nr.nodes = rule.nodes;
        nr.wnorm.resize(rule.weights.size());
        for (std::size_t j = 0; j < rule.weights.size(); ++j)
            nr.wnorm[j] = rule.weights[j] * kInvSqrtPi;
        it = cache.emplace(n, std::move(nr)).first;
    }
    return it->second;
}

// Draw-set view shared by expected_utility / expected_distance / grid_search:
// subsampled u (= 1/g) and observation-variance arrays.
struct DrawSet {
    std::vector<double> u;
    std::vector<double> var;
    std::size_t n = 1;  // 1 for the black-box GP
};

DrawSet make_draw_set(const surrogate::CalibratedSurrogate& s, std::size_t n_samples) {
    DrawSet d;
    if (s.kind() == surrogate::SurrogateKind::blackbox_gp) return d;
    const auto u_all = s.u_draws();
    const auto idx = calibrate::subsample_indices(u_all.size(), n_samples,
                                                  s.posterior().meta.seed);
    d.n = idx.size();
    d.u.reserve(d.n);
    for (const auto i : idx) d.u.push_back(u_all[i]);
    if (s.kind() == surrogate::SurrogateKind::simple) {
        const auto v_all = s.obs_var_draws();
        d.var.reserve(d.n);
        for (const auto i : idx) d.var.push_back(v_all[i]);
    }
    return d;
}

double node_expected_utility(const surrogate::CalibratedSurrogate& s, const DrawSet& draws,
                             const physics::LaunchInput& x, const UtilityConfig& cfg,
                             const NormalizedRule& rule) {
    const auto terms = s.node_terms(x);
    double value;
    if (s.kind() == surrogate::SurrogateKind::blackbox_gp) {
        value = gh_expected_utility({terms.intercept, terms.const_variance}, cfg,
                                    static_cast<int>(rule.nodes.size()));
    } else if (terms.per_sample_variance) {
        value = kernels::gh_mean_utility(draws.u.data(), draws.var.data(), draws.n,
                                         terms.slope, terms.intercept, rule.nodes.data(),
                                         rule.wnorm.data(), static_cast<int>(rule.nodes.size()),
                                         cfg.target, cfg.miss_cap);
    } else {
        const double spread = std::sqrt(2.0 * std::max(terms.const_variance, 0.0));
        std::vector<double> offsets(rule.nodes.size());
        for (std::size_t j = 0; j < rule.nodes.size(); ++j)
            offsets[j] = spread * rule.nodes[j];
        value = kernels::gh_mean_utility_const_var(
            draws.u.data(), draws.n, terms.slope, terms.intercept, offsets.data(),
            rule.wnorm.data(), static_cast<int>(rule.nodes.size()), cfg.target, cfg.miss_cap);
    }
    return std::clamp(value, 0.0, 1.0);
}

}  // namespace

void UtilityConfig::validate() const {
    if (!(target > 0.0) || !(miss_cap > 0.0))
        throw std::invalid_argument("UtilityConfig: target and miss_cap must be > 0");
}

int GridSpec::n_v0() const { return count_steps(v0_min, v0_max, v0_step, "v0"); }
int GridSpec::n_psi() const { return count_steps(psi_min, psi_max, psi_step, "psi"); }

void GridSpec::validate() const {
    if (!(v0_min < v0_max) || !(psi_min < psi_max) || !(v0_step > 0.0) || !(psi_step > 0.0))
        throw std::invalid_argument("GridSpec: need min < max and step > 0");
    (void)n_v0();
    (void)n_psi();
}

double utility(double miss, const UtilityConfig& cfg) {
    cfg.validate();
    const double m = std::min(std::abs(miss), cfg.miss_cap);
    return 1.0 - m / cfg.miss_cap;
}

double gh_expected_utility(const surrogate::PerSamplePrediction& pred,
                           const UtilityConfig& cfg, int nodes) {
    cfg.validate();
    if (!(pred.variance >= 0.0))
        throw std::invalid_argument("gh_expected_utility: variance must be >= 0");
    if (pred.variance == 0.0) return utility(cfg.target - pred.mean, cfg);
    const auto& rule = normalized_rule(nodes);
    const double spread = std::sqrt(2.0 * pred.variance);
    double acc = 0.0;
    for (std::size_t j = 0; j < rule.nodes.size(); ++j)
        acc += rule.wnorm[j] *
               utility(cfg.target - (pred.mean + spread * rule.nodes[j]), cfg);
    return acc;
}

double expected_utility(const surrogate::CalibratedSurrogate& s,
                        const physics::LaunchInput& x, const UtilityConfig& cfg,
                        std::size_t n_samples, int nodes) {
    cfg.validate();
    x.validate();
    const DrawSet draws = make_draw_set(s, n_samples);
    return node_expected_utility(s, draws, x, cfg, normalized_rule(nodes));
}

double expected_distance(const surrogate::CalibratedSurrogate& s,
                         const physics::LaunchInput& x, std::size_t n_samples) {
    if (s.kind() == surrogate::SurrogateKind::blackbox_gp)
        return s.predict_for_sample(x, 0).mean;
    const DrawSet draws = make_draw_set(s, n_samples);
    const auto terms = s.node_terms(x);
    double acc = 0.0;
    for (std::size_t i = 0; i < draws.n; ++i) acc += terms.intercept + terms.slope * draws.u[i];
    return acc / static_cast<double>(draws.n);
}

ObjectiveSurface grid_search(const surrogate::CalibratedSurrogate& s, const GridSpec& grid,
                             const UtilityConfig& cfg, std::size_t n_samples, int nodes) {
    grid.validate();
    cfg.validate();
    const int np = grid.n_psi(), nv = grid.n_v0();
    const DrawSet draws = make_draw_set(s, n_samples);
    const auto& rule = normalized_rule(nodes);

    ObjectiveSurface surface;
    surface.grid = grid;
    surface.values.assign(static_cast<std::size_t>(np) * nv, 0.0);
    parallel_for(surface.values.size(), [&](std::size_t flat) {
        const int i = static_cast<int>(flat) / nv;
        const int j = static_cast<int>(flat) % nv;
        const physics::LaunchInput x{grid.v0_at(j), grid.psi_at(i)};
        surface.values[flat] = node_expected_utility(s, draws, x, cfg, rule);
    });

    std::size_t best = 0;
    for (std::size_t flat = 1; flat < surface.values.size(); ++flat)
        if (surface.values[flat] > surface.values[best]) best = flat;
    surface.argmax = {grid.v0_at(static_cast<int>(best) % nv),
                      grid.psi_at(static_cast<int>(best) / nv)};
    surface.max_value = surface.values[best];
    return surface;
}

double evaluate_truth(const physics::LaunchInput& x, const physics::PhysicsParams& params,
                      const data::NoiseSpec& noise) {
    return data::observe(params, x, noise, 0);
}

void write_surface_csv(const ObjectiveSurface& surface, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_surface_csv: cannot open " + path.string());
    out << "psi_deg,v0_mps,expected_utility\n";
    const int np = surface.grid.n_psi(), nv = surface.grid.n_v0();
    char buf[96];
    for (int i = 0; i < np; ++i)
        for (int j = 0; j < nv; ++j) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", surface.grid.psi_at(i),
                          surface.grid.v0_at(j), surface.value_at(i, j));
            out << buf;
        }
    if (!out) throw std::runtime_error("write_surface_csv: write failed " + path.string());
}

nlohmann::json report_to_json(const RunReport& r) {
    return {{"dataset", r.dataset},
            {"model", r.model},
            {"argmax_psi_deg", r.argmax_psi_deg},
            {"argmax_v0_mps", r.argmax_v0_mps},
            {"max_expected_utility", r.max_expected_utility},
            {"expected_distance_m", r.expected_distance_m},
            {"observed_distance_m", r.observed_distance_m},
            {"seed", r.seed}};
}

RunReport report_from_json(const nlohmann::json& j) {
    RunReport r;
    r.dataset = j.at("dataset").get<std::string>();
    r.model = j.at("model").get<std::string>();
    r.argmax_psi_deg = j.at("argmax_psi_deg").get<double>();
    r.argmax_v0_mps = j.at("argmax_v0_mps").get<double>();
    r.max_expected_utility = j.at("max_expected_utility").get<double>();
    r.expected_distance_m = j.at("expected_distance_m").get<double>();
    r.observed_distance_m = j.at("observed_distance_m").get<double>();
    r.seed = j.at("seed").get<std::uint64_t>();
    return r;
}

void write_report_json(const RunReport& r, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_report_json: cannot open " + path.string());
    out << report_to_json(r).dump(2) << '\n';
}

}  // namespace hybridcal::optimize
