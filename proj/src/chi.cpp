#include "robsub/chi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace robsub {

namespace {

constexpr double kEps = 1e-16;
constexpr int kMaxTerms = 100000;

/// log of x^a e^{-x} / Gamma(a)
double log_prefactor(double a, double x) { return a * std::log(x) - x - std::lgamma(a); }

} // namespace

IncompleteGamma regularized_gamma(double a, double x) {
    if (!(a > 0.0)) throw std::invalid_argument("regularized_gamma: a must be positive");
    if (!(x >= 0.0)) throw std::invalid_argument("regularized_gamma: x must be nonnegative");
    if (x == 0.0) return {0.0, 1.0, 0.0};
    if (std::isinf(x)) return {1.0, 0.0, -std::numeric_limits<double>::infinity()};

    const double lp = log_prefactor(a, x);
    if (x < a + 1.0) {
        // Series: P = x^a e^-x / Gamma(a+1) * sum_k x^k / ((a+1)...(a+k))
        double term = 1.0 / a;
        double sum = term;
        for (int k = 1; k < kMaxTerms; ++k) {
            term *= x / (a + k);
            sum += term;
            if (std::abs(term) < std::abs(sum) * kEps) break;
        }
        const double p = std::exp(lp + std::log(sum));
        const double q = 1.0 - p;
        return {p, q, std::log1p(-p)};
    }

    // Continued fraction for Q (modified Lentz).
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < kMaxTerms; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < kEps) break;
    }
    const double log_q = lp + std::log(h);
    const double q = std::exp(log_q);
    return {1.0 - q, q, log_q};
}

double chi_squared_cdf(int k, double x) {
    if (k < 1) throw std::invalid_argument("chi_squared_cdf: degrees of freedom must be >= 1");
    if (x <= 0.0) return 0.0;
    return regularized_gamma(0.5 * k, 0.5 * x).p;
}

double chi_quantile_upper(int k, double tail) {
    if (k < 1) throw std::invalid_argument("chi_quantile: degrees of freedom must be >= 1");
    if (!(tail > 0.0) || tail > 1.0) throw std::invalid_argument("chi_quantile: probability must lie in [0, 1)");
    if (tail == 1.0) return 0.0;

    // Solve Q(a, z) = tail for z = x / 2 where x is the chi-squared quantile.
    // Deep tails are matched in log space; otherwise on P to keep the lower tail accurate.
    const double a = 0.5 * k;
    const bool log_space = tail < 0.01;
    const double target = log_space ? std::log(tail) : 1.0 - tail;
    auto residual = [&](double z) {
        const IncompleteGamma g = regularized_gamma(a, z);
        return log_space ? g.log_q - target : g.p - target;  // increasing in z
    };
    auto slope = [&](double z) {
        const IncompleteGamma g = regularized_gamma(a, z);
        const double log_pdf = (a - 1.0) * std::log(z) - z - std::lgamma(a);
        return log_space ? -std::exp(log_pdf - g.log_q) : std::exp(log_pdf);
    };
    // log Q is decreasing; flip sign so the root-finder always sees an increasing function.
    auto f = [&](double z) { return log_space ? -residual(z) : residual(z); };
    auto df = [&](double z) { return log_space ? -slope(z) : slope(z); };

    // Wilson-Hilferty starting point, normal quantile from Abramowitz & Stegun 26.2.23.
    double z0;
    {
        const double p = 1.0 - tail;
        const double t = std::sqrt(-2.0 * std::log(std::min(p, tail)));
        double zn = t - (2.515517 + 0.802853 * t + 0.010328 * t * t) /
                            (1.0 + 1.432788 * t + 0.189269 * t * t + 0.001308 * t * t * t);
        if (p < 0.5) zn = -zn;
        const double h = 2.0 / (9.0 * k);
        const double cube = 1.0 - h + zn * std::sqrt(h);
        z0 = 0.5 * k * std::max(cube * cube * cube, 1e-3);
    }

    double lo = 0.0;
    double hi = std::max(z0, 1.0);
    while (f(hi) < 0.0) {
        lo = hi;
        hi *= 2.0;
    }
    double z = std::clamp(z0, lo, hi);
    if (z <= lo || z >= hi) z = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        const double fz = f(z);
        if (fz == 0.0) break;
        if (fz < 0.0) lo = z; else hi = z;
        const double dz = df(z);
        double next = (dz > 0.0 && std::isfinite(dz)) ? z - fz / dz : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - z) <= 1e-14 * std::max(1.0, z) || hi - lo <= 1e-14 * std::max(1.0, z)) {
            z = next;
            break;
        }
        z = next;
    }
    return std::sqrt(2.0 * z);
}

double chi_quantile(int k, double p) {
    if (!(p >= 0.0) || p >= 1.0) throw std::invalid_argument("chi_quantile: probability must lie in [0, 1)");
    if (p == 0.0) return 0.0;
    return chi_quantile_upper(k, 1.0 - p);
}

} // namespace robsub
