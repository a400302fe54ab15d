#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace robsub {

/// Nonnegative SLOPE weight vector, stored in nonincreasing order.
///
/// Any input order is accepted; construction sorts the entries so that
/// `values()[0]` is the largest weight. The SLOPE norm pairs the largest weight
/// with the largest modulus, so only the multiset of weights matters.
class PenaltyVector {
public:
    PenaltyVector() = default;
    explicit PenaltyVector(std::vector<double> values);

    static PenaltyVector zeros(std::size_t n);
    static PenaltyVector constant(std::size_t n, double value);

    std::size_t size() const noexcept { return values_.size(); }
    bool empty() const noexcept { return values_.empty(); }
    std::span<const double> values() const noexcept { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }

    /// True when at least one weight is positive, i.e. the SLOPE functional is a norm.
    bool is_norm() const noexcept;

    PenaltyVector scaled(double factor) const;

private:
    std::vector<double> values_;
};

} // namespace robsub
