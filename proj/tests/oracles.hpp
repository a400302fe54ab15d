#pragma once
// Independent reference computations used only by tests.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "robsub/penalty.hpp"
#include "robsub/slope.hpp"
#include "robsub/types.hpp"

namespace oracle {

/// Sorted-L1 norm evaluated straight from the definition.
inline double slope_value(const std::vector<double>& v, std::vector<double> lam) {
    std::vector<double> a(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) a[i] = std::abs(v[i]);
    std::sort(a.begin(), a.end(), std::greater<>());
    std::sort(lam.begin(), lam.end(), std::greater<>());
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += lam[i] * a[i];
    return s;
}

inline double prox_objective(const std::vector<double>& w, const std::vector<double>& lam,
                             const std::vector<double>& v) {
    double q = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) q += 0.5 * (w[i] - v[i]) * (w[i] - v[i]);
    return q + slope_value(v, lam);
}

/// Brute-force prox by exhaustive pattern search.
///
/// The minimizer keeps the order of |w| and is constant on consecutive clusters of
/// that order, with an optional all-zero tail. On a cluster with a common nonzero value
/// the objective is a smooth quadratic whose stationary point is the cluster mean of
/// (|w| - lam). Every (partition, zero tail) pattern yields a feasible candidate; the one
/// with the smallest true objective is the minimizer. Cost is O(2^n n log n).
inline std::vector<double> prox_exhaustive(const std::vector<double>& w, std::vector<double> lam) {
    const std::size_t n = w.size();
    std::sort(lam.begin(), lam.end(), std::greater<>());
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return std::abs(w[i]) > std::abs(w[j]); });
    std::vector<double> a(n);
    for (std::size_t k = 0; k < n; ++k) a[k] = std::abs(w[order[k]]);

    std::vector<double> absw(n);
    for (std::size_t i = 0; i < n; ++i) absw[i] = std::abs(w[i]);

    std::vector<double> best(n, 0.0);
    double best_obj = prox_objective(absw, lam, best);
    const std::uint32_t patterns = n == 0 ? 1u : (1u << (n - 1));
    std::vector<double> cand(n);
    for (std::uint32_t cuts = 0; cuts < patterns; ++cuts) {
        // Blocks: a cut after sorted position k when bit k is set.
        std::vector<std::pair<std::size_t, std::size_t>> blocks;
        std::size_t start = 0;
        for (std::size_t k = 0; k < n; ++k) {
            if (k + 1 == n || (cuts >> k) & 1u) {
                blocks.emplace_back(start, k + 1);
                start = k + 1;
            }
        }
        for (int zero_tail = 0; zero_tail < 2; ++zero_tail) {
            std::vector<double> sorted_v(n, 0.0);
            for (std::size_t b = 0; b < blocks.size(); ++b) {
                const auto [lo, hi] = blocks[b];
                double value = 0.0;
                if (!(zero_tail && b + 1 == blocks.size())) {
                    for (std::size_t k = lo; k < hi; ++k) value += a[k] - lam[k];
                    value = std::max(0.0, value / static_cast<double>(hi - lo));
                }
                for (std::size_t k = lo; k < hi; ++k) sorted_v[k] = value;
            }
            for (std::size_t k = 0; k < n; ++k) cand[order[k]] = sorted_v[k];
            const double obj = prox_objective(absw, lam, cand);
            if (obj < best_obj) {
                best_obj = obj;
                best = cand;
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i)
        if (w[i] < 0) best[i] = -best[i];
    return best;
}

/// Reference objective 1/2 ||(I - P)(X - D)||_F^2 + group SLOPE(D) with an explicit projector.
inline double delta_objective(const Eigen::MatrixXcd& P, const Eigen::MatrixXcd& X, const Eigen::MatrixXcd& D,
                              const std::vector<double>& lam) {
    const Eigen::Index m = X.rows();
    const Eigen::MatrixXcd R = (Eigen::MatrixXcd::Identity(m, m) - P) * (X - D);
    std::vector<double> norms(static_cast<std::size_t>(D.cols()));
    for (Eigen::Index j = 0; j < D.cols(); ++j) norms[static_cast<std::size_t>(j)] = D.col(j).norm();
    return 0.5 * R.squaredNorm() + slope_value(norms, lam);
}

/// Direct numerical minimization over all of C^{m x n} by accelerated proximal gradient
/// (FISTA with gradient restart). The smooth part has a unit Lipschitz constant. The
/// nonsmooth part is a function of column norms only, so its prox shrinks each column
/// along itself by the scalar SLOPE prox of the norm vector.
inline double delta_objective_min(const Eigen::MatrixXcd& P, const Eigen::MatrixXcd& X,
                                  const std::vector<double>& lam, int iterations) {
    const Eigen::Index m = X.rows();
    const Eigen::Index n = X.cols();
    const Eigen::MatrixXcd Q = Eigen::MatrixXcd::Identity(m, m) - P;
    const robsub::PenaltyVector pen(lam);
    auto group_prox = [&](const Eigen::MatrixXcd& Y) {
        std::vector<double> norms(static_cast<std::size_t>(n));
        for (Eigen::Index j = 0; j < n; ++j) norms[static_cast<std::size_t>(j)] = Y.col(j).norm();
        const std::vector<double> c = robsub::prox_slope(norms, pen);
        Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(m, n);
        for (Eigen::Index j = 0; j < n; ++j) {
            const double r = norms[static_cast<std::size_t>(j)];
            if (r > 0.0) out.col(j) = Y.col(j) * (c[static_cast<std::size_t>(j)] / r);
        }
        return out;
    };
    Eigen::MatrixXcd D = Eigen::MatrixXcd::Zero(m, n);
    Eigen::MatrixXcd Yk = D;
    double t = 1.0;
    double best = delta_objective(P, X, D, lam);
    for (int k = 0; k < iterations; ++k) {
        const Eigen::MatrixXcd grad = -Q * (X - Yk);
        const Eigen::MatrixXcd Dn = group_prox(Yk - grad);
        const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        // Restart the momentum when it points uphill.
        const double uphill = ((Yk - Dn).cwiseProduct((Dn - D).conjugate())).sum().real();
        if (uphill > 0.0) {
            Yk = Dn;
            t = 1.0;
        } else {
            Yk = Dn + ((t - 1.0) / tn) * (Dn - D);
            t = tn;
        }
        D = Dn;
        best = std::min(best, delta_objective(P, X, D, lam));
    }
    return best;
}

/// Sum of squared singular values beyond the d-th, from a full SVD.
inline double svd_tail_energy(const Eigen::MatrixXcd& M, Eigen::Index d) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M);
    const Eigen::VectorXd s = svd.singularValues();
    double tail = 0.0;
    for (Eigen::Index i = d; i < s.size(); ++i) tail += s(i) * s(i);
    return tail;
}

/// Quantile of the chi distribution with k degrees of freedom.
inline double chi_quantile(int k, double p) {
    boost::math::chi_squared_distribution<double> dist(k);
    return std::sqrt(boost::math::quantile(dist, p));
}

inline double chi_quantile_upper(int k, double tail) {
    boost::math::chi_squared_distribution<double> dist(k);
    return std::sqrt(boost::math::quantile(boost::math::complement(dist, tail)));
}

inline double chi_squared_cdf(int k, double x) { return boost::math::gamma_p(0.5 * k, 0.5 * x); }

/// Random m x n complex matrix with standard normal parts.
inline Eigen::MatrixXcd random_complex(Eigen::Index m, Eigen::Index n, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::MatrixXcd M(m, n);
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < m; ++i) M(i, j) = {g(rng), g(rng)};
    return M;
}

/// Random orthonormal m x d basis.
inline Eigen::MatrixXcd random_basis(Eigen::Index m, Eigen::Index d, std::mt19937_64& rng) {
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(random_complex(m, d, rng));
    return qr.householderQ() * Eigen::MatrixXcd::Identity(m, d);
}

/// Random penalty: nonnegative, at least one positive entry, arbitrary order.
inline std::vector<double> random_penalty(std::size_t n, std::mt19937_64& rng, double scale = 2.0) {
    std::uniform_real_distribution<double> u(0.0, scale);
    std::bernoulli_distribution zero(0.2);
    std::vector<double> lam(n);
    for (auto& l : lam) l = zero(rng) ? 0.0 : u(rng);
    if (n > 0) lam[0] = std::max(lam[0], 0.1);
    return lam;
}

}  // namespace oracle
