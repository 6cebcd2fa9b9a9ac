#pragma once

#include <cmath>
#include <cstdint>

namespace hybridcal::rng {

/// SplitMix64 finalizer. Used both to expand seeds and as the mixing stage of
/// the counter-addressable generator below.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Derive an independent sub-stream seed from a base seed and a tag.
constexpr std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t tag) {
    return splitmix64(seed + 0x9E3779B97F4A7C15ULL * (tag + 1));
}

/// Maps 64 random bits to a double in the open interval (0, 1).
inline double bits_to_unit_open(std::uint64_t bits) {
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

/// Xoshiro256++ sequential generator, seeded through SplitMix64.
class Xoshiro256 {
  public:
    explicit Xoshiro256(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& w : state_) {
            sm += 0x9E3779B97F4A7C15ULL;
            w = splitmix64(sm);
        }
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    double uniform01() { return bits_to_unit_open(next()); }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Standard normal via Box-Muller; the spare variate is cached.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) { return next() % n; }

  private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t state_[4]{};
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Counter-addressable standard normal: deterministic in (seed, index) with
/// random access, no sequential state. Two SplitMix64-mixed words feed a
/// Box-Muller transform.
inline double counter_normal(std::uint64_t seed, std::uint64_t index) {
    const std::uint64_t b1 = splitmix64(seed ^ splitmix64(2 * index + 1));
    const std::uint64_t b2 = splitmix64(seed ^ splitmix64(2 * index + 2));
    const double u1 = bits_to_unit_open(b1);
    const double u2 = bits_to_unit_open(b2);
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(6.283185307179586476925286766559 * u2);
}

}  // namespace hybridcal::rng
