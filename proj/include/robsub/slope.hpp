#pragma once

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "robsub/penalty.hpp"

namespace robsub {

/// Sorted-L1 norm  sum_i lam_(i) |x|_(i): the largest weight multiplies the largest modulus.
double slope_norm(std::span<const double> x, const PenaltyVector& lam);
double slope_norm(std::span<const std::complex<double>> x, const PenaltyVector& lam);

/// Euclidean norm of every column.
Eigen::VectorXd column_norms(const Eigen::MatrixXcd& X);

/// SLOPE norm of the column-norm vector of X.
double group_slope_norm(const Eigen::MatrixXcd& X, const PenaltyVector& lam);

/// Proximal operator of the SLOPE norm:
///
///     argmin_v  1/2 ||w - v||^2 + sum_i lam_(i) |v|_(i)
///
/// Signs are stripped and restored, |w| is sorted in decreasing order (stable
/// in the original index), the sorted weights are subtracted, and the result
/// is projected onto the nonincreasing nonnegative cone with a
/// pool-adjacent-violators stack. O(n log n), dominated by the sort.
///
/// Throws std::invalid_argument on length mismatch or non-finite input.
std::vector<double> prox_slope(std::span<const double> w, const PenaltyVector& lam);

} // namespace robsub
