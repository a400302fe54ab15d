#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "robsub/rng.hpp"
#include "robsub/types.hpp"

namespace robsub {

struct ArrayGeometry {
    Index m = 50;
    double spacing_wavelengths = 0.25;

    void validate() const;
};

/// ULA response for a plane wave arriving at angle theta from the array axis:
/// entry k is exp(-i 2 pi spacing k cos(theta)). Norm is sqrt(m).
Eigen::VectorXcd steering_vector(const ArrayGeometry& geom, double theta);

/// delta(t) = r(t) xi(t), xi ~ CN(0, sigma_delta^2 I).
struct RandomInterference {
    double p = 0.33;
    double sigma_delta = 1.4142135623730951;
};

/// delta(t) = r(t) |xi(t)| B, xi ~ N(0, sigma_delta^2), B the steering vector at doa_interf.
struct DirectedRandomAmplitude {
    double p = 0.1;
    double sigma_delta = 1.4142135623730951;
    double doa_interf = 1.5707963267948966;
};

/// delta(t) = r(t) B s_delta.
struct DirectedConstant {
    double p = 0.1;
    double s_delta = 1.0;
    double doa_interf = 1.5707963267948966;
};

using InterferenceRegime = std::variant<RandomInterference, DirectedRandomAmplitude, DirectedConstant>;

/// CLI name of the regime: random, directed-rand-amp or directed-const.
std::string regime_name(const InterferenceRegime& regime);
/// Name plus parameters, e.g. "random;p=0.33;sigma_delta=1.41421".
std::string regime_descriptor(const InterferenceRegime& regime);
double regime_probability(const InterferenceRegime& regime);

struct ScenarioConfig {
    Index m = 50;
    Index d = 1;
    Index n = 100000;
    double spacing_wavelengths = 0.25;
    double signal_freq_hz = 300.0;
    double sample_rate_hz = 10000.0;
    double doa_rad = 0.7853981633974483;
    double sigma_eps = 0.7071067811865476;
    InterferenceRegime regime = RandomInterference{};
    std::uint64_t seed = 1;

    ArrayGeometry geometry() const { return {m, spacing_wavelengths}; }
    void validate() const;
};

struct LabeledDataset {
    SnapshotMatrix X;
    std::vector<Index> truth_support;
    Eigen::MatrixXcd A0;
    Eigen::VectorXcd s;
    Eigen::MatrixXcd delta;

    std::vector<bool> truth_flags() const;
};

/// Vector of `dim` independent CN(0, sigma^2) entries.
Eigen::VectorXcd complex_gaussian(Index dim, double sigma, Rng& rng);

/// Synthetic snapshots x(t_i) = A0 s(t_i) + eps(t_i) + delta(t_i), t_i = i / fs, with
/// s(t) = exp(i 2 pi f t). Single-source scenarios only (d = 1).
///
/// Draw order per snapshot: Bernoulli flag, noise vector, then the interference draw
/// (when flagged). The stream is a single Rng seeded with cfg.seed.
LabeledDataset generate(const ScenarioConfig& cfg);

} // namespace robsub
