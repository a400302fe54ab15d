#pragma once

#include <complex>
#include <cstdint>
#include <random>

#include <boost/random/normal_distribution.hpp>

namespace robsub {

/// Engine used for every stochastic routine. mt19937_64 is fully specified by
/// the C++ standard, and the Boost distributions have a single implementation,
/// so a seed reproduces the same stream on every platform.
using Rng = std::mt19937_64;
inline constexpr const char* kRngName = "mt19937_64+boost.normal";

/// SplitMix64 finalizer; derives independent stream seeds from (seed, stream).
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline double standard_normal(Rng& rng) {
    boost::random::normal_distribution<double> dist(0.0, 1.0);
    return dist(rng);
}

/// One CN(0, sigma^2) scalar: independent real and imaginary parts, each N(0, sigma^2 / 2).
inline std::complex<double> complex_normal(Rng& rng, double sigma) {
    const double s = sigma / 1.4142135623730951;
    const double re = standard_normal(rng) * s;
    const double im = standard_normal(rng) * s;
    return {re, im};
}

} // namespace robsub
