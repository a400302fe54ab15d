#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "robsub/penalty.hpp"
#include "robsub/rng.hpp"
#include "robsub/types.hpp"

namespace robsub {

/// Noise convention for the chi-quantile penalty.
enum class NoiseConvention {
    /// epsilon ~ CN(0, sigma^2 I): real and imaginary parts each have variance sigma^2 / 2.
    Circular,
    /// Real and imaginary parts are each N(0, sigma^2 I).
    IndependentParts,
};

const char* to_string(NoiseConvention c) noexcept;
NoiseConvention noise_convention_from_string(const std::string& s);

struct LambdaSpec {
    double q = 0.1;
    Index n = 1;
    Index m = 2;
    Index d = 1;
    double sigma = 0.7071067811865476;
    NoiseConvention convention = NoiseConvention::Circular;

    void validate() const;
};

/// Penalty whose r-th largest entry is  scale * sigma * F^{-1}_{chi_k}(1 - q r / n)  with
/// k = 2 (m - d), scale = sqrt(2)/2 for circular noise and 1 otherwise. Entries whose
/// probability 1 - q r / n is <= 0 are zero.
PenaltyVector lambda_chi(const LambdaSpec& spec);

/// Draws one interference-free snapshot  A0 s + epsilon.
using SnapshotModel = std::function<Eigen::VectorXcd(Rng&)>;

/// Empirical version of the same recipe: the r-th largest entry is the empirical
/// (1 - q r / n)-quantile of ||(I - P) x|| over `trials` draws of the model.
/// Throws std::invalid_argument if trials < 100.
PenaltyVector lambda_monte_carlo(const LambdaSpec& spec, const SubspaceEstimate& basis, const SnapshotModel& model,
                                 std::size_t trials, std::uint64_t seed);

/// Quantile of sorted samples with the midpoint (Hazen) convention: position N p + 1/2
/// (1-based), linear interpolation, clamped to the sample range.
double empirical_quantile(std::span<const double> sorted, double p);

} // namespace robsub
