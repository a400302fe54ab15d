#include "robsub/lambda_design.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "robsub/chi.hpp"

namespace robsub {

const char* to_string(NoiseConvention c) noexcept {
    switch (c) {
    case NoiseConvention::Circular: return "circular";
    case NoiseConvention::IndependentParts: return "independent-parts";
    }
    return "unknown";
}

NoiseConvention noise_convention_from_string(const std::string& s) {
    if (s == "circular") return NoiseConvention::Circular;
    if (s == "independent-parts") return NoiseConvention::IndependentParts;
    throw std::invalid_argument("unknown noise convention '" + s + "' (expected circular or independent-parts)");
}

void LambdaSpec::validate() const {
    if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("LambdaSpec: q must lie in (0, 1)");
    if (n < 1) throw std::invalid_argument("LambdaSpec: n must be at least 1");
    if (!(d >= 1 && d < m)) throw std::invalid_argument("LambdaSpec: need 1 <= d < m");
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw std::invalid_argument("LambdaSpec: sigma must be positive");
}

PenaltyVector lambda_chi(const LambdaSpec& spec) {
    spec.validate();
    const int k = static_cast<int>(2 * (spec.m - spec.d));
    const double scale =
        spec.sigma * (spec.convention == NoiseConvention::Circular ? std::sqrt(2.0) / 2.0 : 1.0);
    const auto n = static_cast<std::size_t>(spec.n);
    std::vector<double> values(n, 0.0);
    for (std::size_t r = 1; r <= n; ++r) {
        const double tail = spec.q * static_cast<double>(r) / static_cast<double>(n);
        if (tail >= 1.0) break;  // every later rank has an even larger tail
        values[r - 1] = scale * chi_quantile_upper(k, tail);
    }
    return PenaltyVector(std::move(values));
}

double empirical_quantile(std::span<const double> sorted, double p) {
    if (sorted.empty()) throw std::invalid_argument("empirical_quantile: no samples");
    const auto n = static_cast<double>(sorted.size());
    const double h = n * p + 0.5;  // 1-based position
    if (h <= 1.0) return sorted.front();
    if (h >= n) return sorted.back();
    const double lo = std::floor(h);
    const auto i = static_cast<std::size_t>(lo) - 1;
    return sorted[i] + (h - lo) * (sorted[i + 1] - sorted[i]);
}

PenaltyVector lambda_monte_carlo(const LambdaSpec& spec, const SubspaceEstimate& basis, const SnapshotModel& model,
                                 std::size_t trials, std::uint64_t seed) {
    spec.validate();
    if (trials < 100) throw std::invalid_argument("lambda_monte_carlo: need at least 100 trials");
    if (basis.m() != spec.m) throw std::invalid_argument("lambda_monte_carlo: basis has the wrong channel count");

    const Eigen::MatrixXcd& U = basis.basis();
    Rng rng(seed);
    std::vector<double> norms(trials);
    for (std::size_t t = 0; t < trials; ++t) {
        const Eigen::VectorXcd x = model(rng);
        if (x.size() != spec.m) throw std::invalid_argument("lambda_monte_carlo: model returned a snapshot of wrong size");
        norms[t] = (x - U * (U.adjoint() * x)).norm();
    }
    std::sort(norms.begin(), norms.end());

    const auto n = static_cast<std::size_t>(spec.n);
    std::vector<double> values(n, 0.0);
    for (std::size_t r = 1; r <= n; ++r) {
        const double p = 1.0 - spec.q * static_cast<double>(r) / static_cast<double>(n);
        if (p <= 0.0) break;
        values[r - 1] = empirical_quantile(norms, p);
    }
    return PenaltyVector(std::move(values));
}

} // namespace robsub
