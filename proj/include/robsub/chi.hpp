#pragma once

namespace robsub {

/// Regularized incomplete gamma functions P(a, x) and Q(a, x) = 1 - P(a, x).
struct IncompleteGamma {
    double p;
    double q;
    /// log Q(a, x), accurate deep into the upper tail where q underflows.
    double log_q;
};

IncompleteGamma regularized_gamma(double a, double x);

/// CDF of the chi-squared distribution with k degrees of freedom.
double chi_squared_cdf(int k, double x);

/// Quantile of the chi distribution (square root of the chi-squared quantile).
/// Requires k >= 1 and 0 <= p < 1; returns 0 at p = 0.
double chi_quantile(int k, double p);

/// Same quantity, parameterized by the upper-tail probability 1 - p. Use this
/// form when the tail is tiny (e.g. q r / n = 1e-6) to avoid cancellation in 1 - tail.
double chi_quantile_upper(int k, double tail);

} // namespace robsub
