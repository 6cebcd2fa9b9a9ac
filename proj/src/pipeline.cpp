#include "hybridcal/pipeline.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <stdexcept>

#include "hybridcal/rng.hpp"

namespace hybridcal::pipeline {

physics::PhysicsParams truth_params() { return {1.0, 9.8, 0.01}; }

data::Dataset resolve_dataset(const std::string& source) {
    if (source == "A" || source == "B" || source == "C") return data::builtin_dataset(source);
    return data::load_dataset(source);
}

std::uint64_t combo_seed(std::uint64_t base, const std::string& dataset,
                         surrogate::SurrogateKind kind) {
    std::uint64_t h = rng::splitmix64(base);
    for (const char c : dataset) h = rng::splitmix64(h ^ static_cast<std::uint64_t>(c));
    return rng::splitmix64(h ^ (static_cast<std::uint64_t>(kind) + 11));
}

surrogate::CalibratedSurrogate fit_model(const data::Dataset& ds,
                                         surrogate::SurrogateKind kind, std::uint64_t seed,
                                         const FitOptions& opt) {
    calibrate::McmcConfig mcfg;
    mcfg.chains = opt.mcmc_chains;
    mcfg.burn_in = opt.mcmc_burn_in;
    mcfg.keep = opt.mcmc_keep;
    mcfg.seed = rng::sub_seed(seed, 1);
    gp::FitConfig gcfg;
    gcfg.restarts = opt.gp_restarts;
    gcfg.seed = rng::sub_seed(seed, 2);
    switch (kind) {
        case surrogate::SurrogateKind::simple:
            return surrogate::CalibratedSurrogate::fit_simple(ds, mcfg);
        case surrogate::SurrogateKind::blackbox_gp:
            return surrogate::CalibratedSurrogate::fit_gp_blackbox(ds, gcfg);
        case surrogate::SurrogateKind::hybrid:
            return surrogate::CalibratedSurrogate::fit_hybrid(ds, mcfg, gcfg);
    }
    throw std::logic_error("fit_model: bad kind");
}

ComboResult run_combo(const data::Dataset& ds, surrogate::SurrogateKind kind,
                      std::uint64_t base_seed, const optimize::GridSpec& grid,
                      const optimize::UtilityConfig& ucfg, double truth_sigma_m,
                      const FitOptions& opt) {
    const std::uint64_t seed = combo_seed(base_seed, ds.name, kind);
    const auto model = fit_model(ds, kind, seed, opt);
    const auto surface = optimize::grid_search(model, grid, ucfg, opt.n_samples, opt.gh_nodes);

    ComboResult out;
    out.surface = surface;
    out.report.dataset = ds.name;
    out.report.model = surrogate::kind_name(kind);
    out.report.argmax_psi_deg = surface.argmax.psi_deg;
    out.report.argmax_v0_mps = surface.argmax.v0;
    out.report.max_expected_utility = surface.max_value;
    out.report.expected_distance_m =
        optimize::expected_distance(model, surface.argmax, opt.n_samples);
    out.report.observed_distance_m = optimize::evaluate_truth(
        surface.argmax, truth_params(), {truth_sigma_m, rng::sub_seed(seed, 3)});
    out.report.seed = base_seed;
    return out;
}

ReproduceResult run_reproduce(std::uint64_t seed, const std::filesystem::path& output_dir,
                              bool quiet, const FitOptions& opt) {
    std::filesystem::create_directories(output_dir);
    const optimize::GridSpec grid;
    const optimize::UtilityConfig ucfg;
    const double sigma = 5.0;

    ReproduceResult result;
    nlohmann::json combined = nlohmann::json::array();
    for (const std::string label : {"A", "B", "C"}) {
        const auto ds = data::builtin_dataset(label);
        for (const auto kind : {surrogate::SurrogateKind::simple,
                                surrogate::SurrogateKind::blackbox_gp,
                                surrogate::SurrogateKind::hybrid}) {
            ComboResult combo;
            try {
                combo = run_combo(ds, kind, seed, grid, ucfg, sigma, opt);
            } catch (const std::exception& e) {
                throw std::runtime_error("reproduce: dataset " + label + " model " +
                                         surrogate::kind_name(kind) + " failed: " + e.what());
            }
            optimize::write_report_json(
                combo.report,
                output_dir / ("report_" + label + "_" + surrogate::kind_name(kind) + ".json"));
            combined.push_back(optimize::report_to_json(combo.report));
            result.rows.push_back(combo.report);
        }
    }

    result.ordering_ok = true;
    for (std::size_t d = 0; d < 3; ++d) {
        const double u_simple = result.rows[3 * d + 0].max_expected_utility;
        const double u_gp = result.rows[3 * d + 1].max_expected_utility;
        const double u_hybrid = result.rows[3 * d + 2].max_expected_utility;
        if (!(u_hybrid > u_gp && u_gp > u_simple)) result.ordering_ok = false;
    }

    {
        nlohmann::json j;
        j["seed"] = seed;
        j["rows"] = combined;
        j["ordering_hybrid_gp_simple"] = result.ordering_ok;
        std::ofstream out(output_dir / "reproduce_report.json");
        if (!out) throw std::runtime_error("reproduce: cannot write combined report");
        out << j.dump(2) << '\n';
    }

    if (!quiet) {
        std::printf("set model   psi*   v0*    maxEU   E[dist]  observed  (seed %llu)\n",
                    static_cast<unsigned long long>(seed));
        for (const auto& r : result.rows)
            std::printf("%-3s %-7s %5.1f %6.2f  %.4f  %7.2f  %8.2f\n", r.dataset.c_str(),
                        r.model.c_str(), r.argmax_psi_deg, r.argmax_v0_mps,
                        r.max_expected_utility, r.expected_distance_m, r.observed_distance_m);
        std::printf("ordering hybrid > gp > simple per dataset: %s\n",
                    result.ordering_ok ? "yes" : "NO");
    }
    if (!result.ordering_ok)
        throw std::runtime_error("reproduce: hybrid > gp > simple ordering violated");
    return result;
}

}  // namespace hybridcal::pipeline
