#include "hybridcal/calibrate.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <numeric>
#include <stdexcept>

#include "hybridcal/mcmc.hpp"
#include "hybridcal/rng.hpp"
#include "hybridcal/threads.hpp"

namespace hybridcal::calibrate {

namespace {
constexpr double kLog2Pi = 1.8378770664093454836;
}

void SimplePrior::validate() const {
    if (!(0.0 < inv_g_low && inv_g_low < inv_g_high))
        throw std::invalid_argument("SimplePrior: need 0 < inv_g_low < inv_g_high");
    if (!(tau_shape > 0.0 && tau_rate > 0.0))
        throw std::invalid_argument("SimplePrior: gamma shape and rate must be > 0");
}

void PosteriorSamples::validate() const {
    if (g_draws.empty() || g_draws.size() != tau_draws.size())
        throw std::invalid_argument("PosteriorSamples: draw lists must be non-empty and equal");
}

double log_posterior_simple(const data::Dataset& ds, double g, double tau,
                            const SimplePrior& prior) {
    prior.validate();
    if (!(g > 0.0) || !(tau > 0.0)) return -INFINITY;
    const double u = 1.0 / g;
    if (!(u > prior.inv_g_low && u < prior.inv_g_high)) return -INFINITY;

    double lp = 0.0;
    for (const auto& e : ds.experiments) {
        const double mu =
            physics::simple_range(g, physics::LaunchInput{e.v0_mps, e.psi_deg});
        const double r = e.y_m - mu;
        lp += 0.5 * (std::log(tau) - kLog2Pi) - 0.5 * tau * r * r;
    }
    lp += -std::log(prior.inv_g_high - prior.inv_g_low);
    lp += prior.tau_shape * std::log(prior.tau_rate) - std::lgamma(prior.tau_shape) +
          (prior.tau_shape - 1.0) * std::log(tau) - prior.tau_rate * tau;
    return lp;
}

PosteriorSamples sample_posterior(const data::Dataset& ds, const McmcConfig& cfg,
                                  const SimplePrior& prior) {
    ds.validate();
    prior.validate();
    if (cfg.chains < 1) throw std::invalid_argument("sample_posterior: need >= 1 chain");

    const double lo = prior.inv_g_low, width = prior.inv_g_high - prior.inv_g_low;
    // z = (logit((u - lo)/width), log tau); the Jacobian terms keep the
    // target an exact density in z.
    auto log_target = [&](const std::vector<double>& z) {
        const double s = 1.0 / (1.0 + std::exp(-z[0]));
        const double u = lo + width * s;
        const double tau = std::exp(z[1]);
        const double lp = log_posterior_simple(ds, 1.0 / u, tau, prior);
        if (!std::isfinite(lp)) return lp;
        return lp + std::log(width * s * (1.0 - s)) + z[1];
    };

    std::vector<mcmc::ChainResult> chains(cfg.chains);
    mcmc::ChainConfig ccfg;
    ccfg.burn_in = cfg.burn_in;
    ccfg.keep = cfg.keep;
    parallel_for(cfg.chains, [&](std::size_t c) {
        chains[c] = mcmc::run_adaptive_rwm(log_target, {0.0, 0.0}, ccfg,
                                           rng::sub_seed(cfg.seed, 0xC0FFEE + c));
    });

    PosteriorSamples out;
    out.g_draws.reserve(static_cast<std::size_t>(cfg.chains) * cfg.keep);
    out.tau_draws.reserve(out.g_draws.capacity());
    double acc = 0.0;
    for (const auto& chain : chains) {
        for (const auto& z : chain.draws) {
            const double s = 1.0 / (1.0 + std::exp(-z[0]));
            out.g_draws.push_back(1.0 / (lo + width * s));
            out.tau_draws.push_back(std::exp(z[1]));
        }
        acc += chain.acceptance_rate;
    }
    acc /= cfg.chains;
    out.meta = {cfg.chains, cfg.burn_in, cfg.keep, acc, cfg.seed};
    if (acc < 0.05 || acc > 0.95)
        std::cerr << "[hybridcal] warning: MCMC acceptance rate " << acc
                  << " outside [0.05, 0.95] after adaptation\n";
    return out;
}

SummaryRow summarize(std::span<const double> draws) {
    if (draws.empty()) throw std::invalid_argument("summarize: no draws");
    const double n = static_cast<double>(draws.size());
    const double mean = std::accumulate(draws.begin(), draws.end(), 0.0) / n;
    double ss = 0.0;
    for (const double d : draws) ss += (d - mean) * (d - mean);
    const double sd = draws.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    std::vector<double> sorted(draws.begin(), draws.end());
    std::sort(sorted.begin(), sorted.end());
    return {mean,
            sd,
            quantile_sorted(sorted, 0.05),
            quantile_sorted(sorted, 0.25),
            quantile_sorted(sorted, 0.50),
            quantile_sorted(sorted, 0.75),
            quantile_sorted(sorted, 0.95)};
}

Summary posterior_summary(const PosteriorSamples& s) {
    s.validate();
    return {summarize(s.g_draws), summarize(s.tau_draws)};
}

double quantile_sorted(std::span<const double> sorted, double p) {
    if (sorted.empty()) throw std::invalid_argument("quantile_sorted: no draws");
    if (sorted.size() == 1) return sorted[0];
    const double pos = p * static_cast<double>(sorted.size() - 1);
    const std::size_t i = static_cast<std::size_t>(pos);
    if (i + 1 >= sorted.size()) return sorted.back();
    const double frac = pos - static_cast<double>(i);
    return sorted[i] + frac * (sorted[i + 1] - sorted[i]);
}

void save_posterior(const PosteriorSamples& s, const std::filesystem::path& csv_path,
                    const std::filesystem::path& meta_path) {
    s.validate();
    std::ofstream out(csv_path);
    if (!out) throw std::runtime_error("save_posterior: cannot open " + csv_path.string());
    out << "g_mps2,tau_per_m2\n";
    char buf[96];
    for (std::size_t i = 0; i < s.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", s.g_draws[i], s.tau_draws[i]);
        out << buf;
    }
    if (!out) throw std::runtime_error("save_posterior: write failed " + csv_path.string());

    nlohmann::json j;
    j["chains"] = s.meta.chains;
    j["burn_in"] = s.meta.burn_in;
    j["kept_per_chain"] = s.meta.kept_per_chain;
    j["acceptance_rate"] = s.meta.acceptance_rate;
    j["seed"] = s.meta.seed;
    std::ofstream meta(meta_path);
    if (!meta) throw std::runtime_error("save_posterior: cannot open " + meta_path.string());
    meta << j.dump(2) << '\n';
}

PosteriorSamples load_posterior(const std::filesystem::path& csv_path,
                                const std::filesystem::path& meta_path) {
    std::ifstream in(csv_path);
    if (!in) throw std::runtime_error("load_posterior: cannot open " + csv_path.string());
    std::string line;
    if (!std::getline(in, line) ||
        (line != "g_mps2,tau_per_m2" && line != "g_mps2,tau_per_m2\r"))
        throw std::runtime_error("load_posterior: bad header in " + csv_path.string());
    PosteriorSamples s;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw std::runtime_error("load_posterior: malformed row in " + csv_path.string());
        double g = 0.0, tau = 0.0;
        auto r1 = std::from_chars(line.data(), line.data() + comma, g);
        auto r2 = std::from_chars(line.data() + comma + 1, line.data() + line.size(), tau);
        if (r1.ec != std::errc{} || r2.ec != std::errc{})
            throw std::runtime_error("load_posterior: non-numeric row in " + csv_path.string());
        s.g_draws.push_back(g);
        s.tau_draws.push_back(tau);
    }
    std::ifstream meta(meta_path);
    if (!meta) throw std::runtime_error("load_posterior: cannot open " + meta_path.string());
    nlohmann::json j = nlohmann::json::parse(meta);
    s.meta.chains = j.at("chains").get<int>();
    s.meta.burn_in = j.at("burn_in").get<int>();
    s.meta.kept_per_chain = j.at("kept_per_chain").get<int>();
    s.meta.acceptance_rate = j.at("acceptance_rate").get<double>();
    s.meta.seed = j.at("seed").get<std::uint64_t>();
    s.validate();
    return s;
}

std::vector<std::size_t> subsample_indices(std::size_t total, std::size_t want,
                                           std::uint64_t seed) {
    std::vector<std::size_t> idx(total);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    if (want >= total) return idx;
    rng::Xoshiro256 gen(rng::sub_seed(seed, 0x5AB5A));
    // Partial Fisher-Yates: the first `want` entries become the sample.
    for (std::size_t i = 0; i < want; ++i) {
        const std::size_t j = i + gen.below(total - i);
        std::swap(idx[i], idx[j]);
    }
    idx.resize(want);
    std::sort(idx.begin(), idx.end());
    return idx;
}

}  // namespace hybridcal::calibrate
