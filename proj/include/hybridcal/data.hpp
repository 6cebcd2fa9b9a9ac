#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "hybridcal/physics.hpp"

namespace hybridcal::data {

struct Experiment {
    std::string id;
    double psi_deg;
    double v0_mps;
    double y_m;  // observed impact distance
};

struct Dataset {
    std::string name;
    std::vector<Experiment> experiments;

    void validate() const;  // non-empty, unique ids, finite values
    std::size_t size() const { return experiments.size(); }
};

/// Observation noise: one seeded stream per generation run. Normal variates
/// come from the counter-addressable SplitMix64 + Box-Muller generator in
/// rng.hpp, so a (seed, draw_index) pair always yields the same value.
struct NoiseSpec {
    double sigma_m = 5.0;
    std::uint64_t seed = 0;

    void validate() const;  // sigma >= 0
};

/// One noisy observation of the truth model: impact_distance + sigma * eps,
/// eps ~ N(0,1) addressed by draw_index within the seeded stream.
double observe(const physics::PhysicsParams& params, const physics::LaunchInput& launch,
               const NoiseSpec& noise, std::uint64_t draw_index);

/// The built-in six-experiment training sets. All share rows 1-5; the sixth
/// row is 6a, 6b or 6c respectively.
Dataset builtin_dataset(const std::string& label);

/// Simulates the truth model at each design with sequential draw indices.
Dataset generate_dataset(const std::vector<physics::LaunchInput>& designs,
                         const physics::PhysicsParams& params, const NoiseSpec& noise,
                         const std::string& name = "generated");

/// CSV persistence. Header `id,psi_deg,v0_mps,y_m`, UTF-8, '.' decimal
/// separator, one experiment per line. Values round-trip exactly.
void save_dataset(const Dataset& ds, const std::filesystem::path& path);
Dataset load_dataset(const std::filesystem::path& path);

}  // namespace hybridcal::data
