#include "hybridcal/data.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "hybridcal/rng.hpp"

namespace hybridcal::data {

void Dataset::validate() const {
    if (experiments.empty()) throw std::invalid_argument("Dataset: must contain experiments");
    std::set<std::string> ids;
    for (const auto& e : experiments) {
        if (!ids.insert(e.id).second)
            throw std::invalid_argument("Dataset: duplicate experiment id '" + e.id + "'");
        if (!std::isfinite(e.y_m) || !std::isfinite(e.psi_deg) || !std::isfinite(e.v0_mps))
            throw std::invalid_argument("Dataset: non-finite value in experiment '" + e.id + "'");
    }
}

void NoiseSpec::validate() const {
    if (!(sigma_m >= 0.0)) throw std::invalid_argument("NoiseSpec: sigma must be >= 0");
}

double observe(const physics::PhysicsParams& params, const physics::LaunchInput& launch,
               const NoiseSpec& noise, std::uint64_t draw_index) {
    noise.validate();
    const double y = physics::impact_distance(params, launch);
    if (noise.sigma_m == 0.0) return y;
    return y + noise.sigma_m * rng::counter_normal(noise.seed, draw_index);
}

Dataset builtin_dataset(const std::string& label) {
    // Common rows 1-5 of the training table.
    static const std::vector<Experiment> base = {
        {"1", 25.0, 60.0, 118.18},  {"2", 30.0, 70.0, 159.79}, {"3", 36.0, 80.0, 174.14},
        {"4", 45.0, 90.0, 181.67},  {"5", 60.0, 75.0, 143.21},
    };
    Experiment sixth;
    if (label == "A")
        sixth = {"6a", 10.0, 42.0, 47.305};
    else if (label == "B")
        sixth = {"6b", 80.0, 53.0, 54.294};
    else if (label == "C")
        sixth = {"6c", 85.0, 71.0, 43.239};
    else
        throw std::invalid_argument("builtin_dataset: unknown label '" + label +
                                    "' (expected A, B or C)");
    Dataset ds{label, base};
    ds.experiments.push_back(sixth);
    ds.validate();
    return ds;
}

Dataset generate_dataset(const std::vector<physics::LaunchInput>& designs,
                         const physics::PhysicsParams& params, const NoiseSpec& noise,
                         const std::string& name) {
    if (designs.empty()) throw std::invalid_argument("generate_dataset: designs must be non-empty");
    Dataset ds{name, {}};
    ds.experiments.reserve(designs.size());
    for (std::size_t i = 0; i < designs.size(); ++i) {
        const double y = observe(params, designs[i], noise, i);
        ds.experiments.push_back(
            {std::to_string(i + 1), designs[i].psi_deg, designs[i].v0, y});
    }
    ds.validate();
    return ds;
}

namespace {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_double(std::string_view field, const std::string& context) {
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), out);
    if (ec != std::errc{} || ptr != field.data() + field.size())
        throw std::runtime_error("dataset CSV: non-numeric field '" + std::string(field) +
                                 "' in " + context);
    return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

}  // namespace

void save_dataset(const Dataset& ds, const std::filesystem::path& path) {
    ds.validate();
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_dataset: cannot open " + path.string());
    out << "id,psi_deg,v0_mps,y_m\n";
    for (const auto& e : ds.experiments)
        out << e.id << ',' << format_double(e.psi_deg) << ',' << format_double(e.v0_mps) << ','
            << format_double(e.y_m) << '\n';
    if (!out) throw std::runtime_error("save_dataset: write failed for " + path.string());
}

Dataset load_dataset(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_dataset: cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("load_dataset: empty file " + path.string());
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "id,psi_deg,v0_mps,y_m")
        throw std::runtime_error("load_dataset: bad header '" + line + "' in " + path.string());

    Dataset ds{path.stem().string(), {}};
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::string context = "row " + std::to_string(row) + " of " + path.string();
        const auto fields = split_csv_line(line);
        if (fields.size() != 4)
            throw std::runtime_error("dataset CSV: expected 4 columns, got " +
                                     std::to_string(fields.size()) + " in " + context);
        Experiment e;
        e.id = fields[0];
        e.psi_deg = parse_double(fields[1], context);
        e.v0_mps = parse_double(fields[2], context);
        e.y_m = parse_double(fields[3], context);
        ds.experiments.push_back(e);
    }
    if (ds.experiments.empty())
        throw std::runtime_error("load_dataset: no experiments in " + path.string());
    ds.validate();
    return ds;
}

}  // namespace hybridcal::data
