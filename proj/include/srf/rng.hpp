#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace srf {

/// One step of the splitmix64 sequence; advances `state` and returns the output.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

/// Seed-splitting rule used everywhere a substream is needed (per tree, per
/// experiment cell, per repetition): each component is folded into the parent
/// seed through one splitmix64 step, so
///   derive_seed(s, a, b) == derive_seed(derive_seed(s, a), b)
/// and substreams are decorrelated regardless of component magnitudes.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t component) {
    std::uint64_t state = seed ^ ((component + 0x9e3779b97f4a7c15ull) * 0xbf58476d1ce4e5b9ull);
    return splitmix64_next(state);
}

template <class... Rest>
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t component, Rest... rest) {
    return derive_seed(derive_seed(seed, component), rest...);
}

/// Order-dependent hash of an index sequence (records which training rows an
/// experiment cell saw).
inline std::uint64_t hash_index_sequence(const std::size_t* data, std::size_t len) {
    std::uint64_t h = 0x5851f42d4c957f2dull;
    for (std::size_t i = 0; i < len; ++i) {
        std::uint64_t state = h ^ (static_cast<std::uint64_t>(data[i]) + 0x9e3779b97f4a7c15ull);
        h = splitmix64_next(state);
    }
    return h;
}

/// Project-wide random generator: mt19937_64 for the bit stream, with fixed
/// output transforms (53-bit uniforms, Box-Muller normals) so that a given
/// seed replays the identical stream on every platform and standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53 random mantissa bits.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Uniform index in [0, n). Lemire multiply-shift; bias below n / 2^64.
    std::size_t uniform_index(std::size_t n) {
        return static_cast<std::size_t>(
            (static_cast<unsigned __int128>(next_u64()) * static_cast<unsigned __int128>(n)) >> 64);
    }

    /// Standard normal via Box-Muller; the second value of each pair is cached.
    double gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - uniform01();  // (0, 1], keeps log() finite
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace srf
