#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

#include "cream/numerics.hpp"

namespace cream {

/// Deterministic sampling on top of mt19937_64. Distributions are built from
/// raw 53-bit uniforms so streams are reproducible across platforms
/// (std::*_distribution is implementation-defined).
class Rng {
public:
    explicit Rng(uint64_t seed) : eng_(seed) {}

    /// Uniform on [0, 1).
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal, Box-Muller. Draws two uniforms per call.
    double gauss() {
        const double u1 = 1.0 - uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    /// Circularly symmetric complex Gaussian with E|z|^2 = var.
    cplx cgauss(double var) {
        const double u1 = 1.0 - uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-var * std::log(u1));
        return {r * std::cos(2.0 * M_PI * u2), r * std::sin(2.0 * M_PI * u2)};
    }

private:
    std::mt19937_64 eng_;
};

constexpr uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Collapses (master seed, cell coordinates) into one stream seed, so each
/// Monte-Carlo cell owns an independent generator.
inline uint64_t mix_seed(std::initializer_list<uint64_t> parts) {
    uint64_t h = 0x2545f4914f6cdd1dULL;
    for (uint64_t p : parts) h = splitmix64(h ^ splitmix64(p));
    return h;
}

inline uint64_t fnv1a(std::string_view s) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace cream
