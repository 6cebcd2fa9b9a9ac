// Command-line front-end: data generation, calibration, optimization, surface
// export and the one-shot nine-combination reproduction run.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "hybridcal/pipeline.hpp"
#include "hybridcal/rng.hpp"

namespace fs = std::filesystem;
using namespace hybridcal;

namespace {

struct GlobalOpts {
    std::uint64_t seed = 1;
    std::string output_dir = ".";
    bool quiet = false;
};

std::string summary_text(const surrogate::CalibratedSurrogate& model) {
    std::ostringstream out;
    char line[160];
    if (model.kind() != surrogate::SurrogateKind::blackbox_gp) {
        const auto s = calibrate::posterior_summary(model.posterior());
        std::snprintf(line, sizeof line,
                      "posterior g   : mean %.3f m/s^2, sd %.3f, q50 %.3f\n", s.g.mean,
                      s.g.sd, s.g.q50);
        out << line;
        std::snprintf(line, sizeof line, "posterior tau : mean %.6f 1/m^2, sd %.6f\n",
                      s.tau.mean, s.tau.sd);
        out << line;
        std::snprintf(line, sizeof line, "MCMC acceptance rate: %.3f\n",
                      model.posterior().meta.acceptance_rate);
        out << line;
    }
    if (model.kind() != surrogate::SurrogateKind::simple) {
        const auto& h = model.model().hyper();
        std::snprintf(line, sizeof line,
                      "MAP phi: sigma_f %.4f, l1 %.3f m/s, l2 %.3f deg, sigma %.4f\n",
                      std::sqrt(h.signal_var), h.lengthscales[0], h.lengthscales[1],
                      std::sqrt(h.noise_var));
        out << line;
    }
    if (model.kind() == surrogate::SurrogateKind::hybrid) {
        std::snprintf(line, sizeof line, "residual reference g: %.4f m/s^2\n",
                      model.residual_reference_g());
        out << line;
    }
    return out.str();
}

std::vector<physics::LaunchInput> load_designs(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("designs file not found: " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("designs file empty: " + path.string());
    if (!line.empty() && line.back() == '\r') line.pop_back();
    // Accept either a bare design table or the dataset format.
    int psi_col = -1, v0_col = -1, col = 0;
    std::stringstream header(line);
    std::string field;
    while (std::getline(header, field, ',')) {
        if (field == "psi_deg") psi_col = col;
        if (field == "v0_mps") v0_col = col;
        ++col;
    }
    if (psi_col < 0 || v0_col < 0)
        throw std::runtime_error("designs file " + path.string() +
                                 " needs psi_deg and v0_mps columns");
    std::vector<physics::LaunchInput> designs;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::vector<std::string> fields;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (static_cast<int>(fields.size()) <= std::max(psi_col, v0_col))
            throw std::runtime_error("designs file " + path.string() + ": short row " +
                                     std::to_string(row));
        physics::LaunchInput x{std::stod(fields[v0_col]), std::stod(fields[psi_col])};
        x.validate();
        designs.push_back(x);
    }
    if (designs.empty())
        throw std::runtime_error("designs file " + path.string() + " has no rows");
    return designs;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hybridcal - ballistic surrogate calibration and firing optimization"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    GlobalOpts g;
    app.add_option("--seed", g.seed, "base RNG seed")->capture_default_str();
    app.add_option("--output-dir", g.output_dir, "directory for output files")
        ->capture_default_str();
    app.add_flag("--quiet", g.quiet, "suppress progress output");

    // generate
    auto* gen = app.add_subcommand("generate", "simulate noisy experiments");
    std::string gen_builtin, gen_designs, gen_out;
    double gen_sigma = 5.0, gen_mass = 1.0, gen_gravity = 9.8, gen_drag = 0.01;
    gen->add_option("--builtin", gen_builtin, "built-in dataset label (A, B or C)");
    gen->add_option("--designs", gen_designs, "CSV of designs (psi_deg,v0_mps columns)");
    gen->add_option("--out", gen_out, "output CSV path (default <output-dir>/dataset.csv)");
    gen->add_option("--sigma-m", gen_sigma, "observation noise sd in metres")
        ->capture_default_str();
    gen->add_option("--mass-kg", gen_mass, "truth mass")->capture_default_str();
    gen->add_option("--gravity-mps2", gen_gravity, "truth gravity")->capture_default_str();
    gen->add_option("--drag-kgpm", gen_drag, "truth drag coefficient")->capture_default_str();

    // calibrate
    auto* cal = app.add_subcommand("calibrate", "fit a surrogate and store its artifacts");
    std::string cal_dataset, cal_model = "simple";
    pipeline::FitOptions cal_opt;
    cal->add_option("--dataset", cal_dataset, "builtin label or CSV path")->required();
    cal->add_option("--model", cal_model, "simple | gp | hybrid")->capture_default_str();
    cal->add_option("--chains", cal_opt.mcmc_chains)->capture_default_str();
    cal->add_option("--burn-in", cal_opt.mcmc_burn_in)->capture_default_str();
    cal->add_option("--steps", cal_opt.mcmc_keep, "kept draws per chain")
        ->capture_default_str();
    cal->add_option("--restarts", cal_opt.gp_restarts, "MAP multi-start count")
        ->capture_default_str();

    // optimize / surface share flags
    auto add_opt_flags = [&](CLI::App* cmd, std::string& dataset, std::string& model,
                             std::string& artifacts, bool& fit_inline,
                             optimize::GridSpec& grid, optimize::UtilityConfig& ucfg,
                             pipeline::FitOptions& opt) {
        cmd->add_option("--dataset", dataset, "builtin label or CSV path")->required();
        cmd->add_option("--model", model, "simple | gp | hybrid")->capture_default_str();
        cmd->add_option("--artifacts", artifacts, "surrogate manifest JSON to load");
        cmd->add_flag("--fit", fit_inline, "calibrate inline instead of loading artifacts");
        cmd->add_option("--v0-min", grid.v0_min)->capture_default_str();
        cmd->add_option("--v0-max", grid.v0_max)->capture_default_str();
        cmd->add_option("--v0-step", grid.v0_step)->capture_default_str();
        cmd->add_option("--psi-min", grid.psi_min)->capture_default_str();
        cmd->add_option("--psi-max", grid.psi_max)->capture_default_str();
        cmd->add_option("--psi-step", grid.psi_step)->capture_default_str();
        cmd->add_option("--target-m", ucfg.target)->capture_default_str();
        cmd->add_option("--miss-cap-m", ucfg.miss_cap)->capture_default_str();
        cmd->add_option("--n-samples", opt.n_samples, "posterior samples in the expectation")
            ->capture_default_str();
        cmd->add_option("--gh-nodes", opt.gh_nodes)->capture_default_str();
        cmd->add_option("--chains", opt.mcmc_chains)->capture_default_str();
        cmd->add_option("--burn-in", opt.mcmc_burn_in)->capture_default_str();
        cmd->add_option("--steps", opt.mcmc_keep)->capture_default_str();
        cmd->add_option("--restarts", opt.gp_restarts)->capture_default_str();
    };

    auto* opt_cmd = app.add_subcommand("optimize", "grid-search the expected utility");
    std::string opt_dataset, opt_model = "simple", opt_artifacts;
    bool opt_fit = false;
    optimize::GridSpec opt_grid;
    optimize::UtilityConfig opt_ucfg;
    pipeline::FitOptions opt_fitopt;
    double opt_sigma = 5.0;
    add_opt_flags(opt_cmd, opt_dataset, opt_model, opt_artifacts, opt_fit, opt_grid, opt_ucfg,
                  opt_fitopt);
    opt_cmd->add_option("--sigma-m", opt_sigma, "noise sd for the truth evaluation")
        ->capture_default_str();

    auto* surf_cmd = app.add_subcommand("surface", "export the objective surface only");
    std::string surf_dataset, surf_model = "simple", surf_artifacts;
    bool surf_fit = false;
    optimize::GridSpec surf_grid;
    optimize::UtilityConfig surf_ucfg;
    pipeline::FitOptions surf_fitopt;
    add_opt_flags(surf_cmd, surf_dataset, surf_model, surf_artifacts, surf_fit, surf_grid,
                  surf_ucfg, surf_fitopt);

    auto* rep = app.add_subcommand("reproduce", "run all nine dataset/model combinations");
    pipeline::FitOptions rep_opt;
    rep->add_option("--chains", rep_opt.mcmc_chains)->capture_default_str();
    rep->add_option("--burn-in", rep_opt.mcmc_burn_in)->capture_default_str();
    rep->add_option("--steps", rep_opt.mcmc_keep)->capture_default_str();
    rep->add_option("--restarts", rep_opt.gp_restarts)->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        const fs::path outdir = g.output_dir;
        fs::create_directories(outdir);

        if (gen->parsed()) {
            data::Dataset ds;
            const physics::PhysicsParams params{gen_mass, gen_gravity, gen_drag};
            if (!gen_builtin.empty() && !gen_designs.empty())
                throw std::runtime_error("generate: pass exactly one of --builtin/--designs");
            if (!gen_builtin.empty()) {
                ds = data::builtin_dataset(gen_builtin);
            } else if (!gen_designs.empty()) {
                ds = data::generate_dataset(load_designs(gen_designs), params,
                                            {gen_sigma, g.seed});
            } else {
                throw std::runtime_error("generate: need --builtin or --designs");
            }
            const fs::path out = gen_out.empty() ? outdir / "dataset.csv" : fs::path(gen_out);
            data::save_dataset(ds, out);
            if (!g.quiet) {
                std::printf("wrote %zu experiments to %s\n", ds.size(), out.string().c_str());
                std::printf("truth params: mass %.4g kg, gravity %.4g m/s^2, drag %.4g kg/m\n",
                            params.mass, params.gravity, params.drag_coeff);
            }
            return 0;
        }

        if (cal->parsed()) {
            const auto ds = pipeline::resolve_dataset(cal_dataset);
            const auto kind = surrogate::kind_from_name(cal_model);
            const auto model = pipeline::fit_model(
                ds, kind, pipeline::combo_seed(g.seed, ds.name, kind), cal_opt);
            const std::string base = ds.name + "_" + cal_model;
            model.save(outdir, base);
            const std::string summary = summary_text(model);
            std::ofstream sout(outdir / (base + "_summary.txt"));
            if (!sout) throw std::runtime_error("calibrate: cannot write summary file");
            sout << summary;
            if (!g.quiet) {
                std::fputs(summary.c_str(), stdout);
                std::printf("artifacts written under %s (manifest %s_surrogate.json)\n",
                            outdir.string().c_str(), base.c_str());
            }
            return 0;
        }

        struct SearchRun {
            data::Dataset ds;
            surrogate::CalibratedSurrogate model;
            optimize::ObjectiveSurface surface;
        };
        auto run_search = [&](const std::string& dataset, const std::string& model_name,
                              const std::string& artifacts, bool fit_inline,
                              const optimize::GridSpec& grid,
                              const optimize::UtilityConfig& ucfg,
                              const pipeline::FitOptions& fitopt) -> SearchRun {
            auto ds = pipeline::resolve_dataset(dataset);
            const auto kind = surrogate::kind_from_name(model_name);
            if (artifacts.empty() && !fit_inline)
                throw std::runtime_error(
                    "missing calibration artifacts: pass --artifacts <manifest> or --fit");
            auto model = !artifacts.empty()
                             ? surrogate::CalibratedSurrogate::load(artifacts)
                             : pipeline::fit_model(
                                   ds, kind, pipeline::combo_seed(g.seed, ds.name, kind),
                                   fitopt);
            auto surface =
                optimize::grid_search(model, grid, ucfg, fitopt.n_samples, fitopt.gh_nodes);
            return {std::move(ds), std::move(model), std::move(surface)};
        };

        if (opt_cmd->parsed()) {
            const auto run = run_search(opt_dataset, opt_model, opt_artifacts, opt_fit,
                                        opt_grid, opt_ucfg, opt_fitopt);
            const auto kind = surrogate::kind_from_name(opt_model);
            const std::uint64_t cseed = pipeline::combo_seed(g.seed, run.ds.name, kind);

            optimize::RunReport r;
            r.dataset = run.ds.name;
            r.model = opt_model;
            r.argmax_psi_deg = run.surface.argmax.psi_deg;
            r.argmax_v0_mps = run.surface.argmax.v0;
            r.max_expected_utility = run.surface.max_value;
            r.expected_distance_m =
                optimize::expected_distance(run.model, run.surface.argmax, opt_fitopt.n_samples);
            r.observed_distance_m = optimize::evaluate_truth(
                run.surface.argmax, pipeline::truth_params(),
                {opt_sigma, rng::sub_seed(cseed, 3)});
            r.seed = g.seed;

            optimize::write_surface_csv(run.surface, outdir / (run.ds.name + "_" + opt_model +
                                                               "_surface.csv"));
            optimize::write_report_json(r, outdir / (run.ds.name + "_" + opt_model +
                                                     "_report.json"));
            std::printf("argmax: psi %.1f deg, v0 %.2f m/s, E[u] %.4f\n", r.argmax_psi_deg,
                        r.argmax_v0_mps, r.max_expected_utility);
            return 0;
        }

        if (surf_cmd->parsed()) {
            const auto run = run_search(surf_dataset, surf_model, surf_artifacts, surf_fit,
                                        surf_grid, surf_ucfg, surf_fitopt);
            const fs::path out = outdir / (run.ds.name + "_" + surf_model + "_surface.csv");
            optimize::write_surface_csv(run.surface, out);
            if (!g.quiet)
                std::printf("wrote %s (argmax psi %.1f, v0 %.2f, E[u] %.4f)\n",
                            out.string().c_str(), run.surface.argmax.psi_deg,
                            run.surface.argmax.v0, run.surface.max_value);
            return 0;
        }

        if (rep->parsed()) {
            pipeline::run_reproduce(g.seed, outdir, g.quiet, rep_opt);
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
