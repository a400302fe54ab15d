#include "robsub/doa_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "robsub/solver.hpp"

namespace robsub {

namespace {

double ratio(std::size_t num, std::size_t den) {
    return static_cast<double>(num) / static_cast<double>(std::max<std::size_t>(den, 1));
}

} // namespace

double Confusion::fdp() const noexcept { return ratio(fp, fp + tp); }
double Confusion::fnr() const noexcept { return ratio(fn, fn + tn); }
double Confusion::sensitivity() const noexcept { return ratio(tp, tp + fn); }
double Confusion::fallout() const noexcept { return ratio(fp, fp + tn); }
double Confusion::miss_rate() const noexcept { return ratio(fn, fn + tp); }

Confusion confusion(const std::vector<bool>& flags, const std::vector<bool>& truth) {
    if (flags.size() != truth.size()) throw std::invalid_argument("confusion: flags and truth differ in length");
    Confusion c;
    for (std::size_t i = 0; i < flags.size(); ++i) {
        if (truth[i]) {
            (flags[i] ? c.tp : c.fn) += 1;
        } else {
            (flags[i] ? c.fp : c.tn) += 1;
        }
    }
    return c;
}

std::size_t DetectionReport::discoveries() const {
    return static_cast<std::size_t>(std::count(flags.begin(), flags.end(), true));
}

std::vector<Index> unflagged(const std::vector<bool>& flags) {
    std::vector<Index> keep;
    for (std::size_t i = 0; i < flags.size(); ++i) {
        if (!flags[i]) keep.push_back(static_cast<Index>(i));
    }
    return keep;
}

SubspaceEstimate refit_subspace(const SnapshotMatrix& X, std::span<const Index> keep, Index d) {
    if (static_cast<Index>(keep.size()) < d) throw std::invalid_argument("refit_subspace: fewer kept snapshots than d");
    if (d < 1 || d >= X.m()) throw std::invalid_argument("refit_subspace: need 1 <= d < m");
    Eigen::MatrixXcd kept(X.m(), static_cast<Index>(keep.size()));
    for (std::size_t k = 0; k < keep.size(); ++k) {
        const Index i = keep[k];
        if (i < 0 || i >= X.n()) throw std::out_of_range("refit_subspace: snapshot index out of range");
        kept.col(static_cast<Index>(k)) = X.data().col(i);
    }
    return leading_subspace_from_gram(gram(kept), d);
}

double doa_grid_search(const SubspaceEstimate& basis, const ArrayGeometry& geom, double grid) {
    if (basis.dim() != 1) throw std::invalid_argument("doa_grid_search: only one-dimensional subspaces are supported");
    if (!(grid > 0.0)) throw std::invalid_argument("doa_grid_search: grid step must be positive");
    if (basis.m() != geom.m) throw std::invalid_argument("doa_grid_search: geometry and basis disagree on m");
    const Eigen::VectorXcd u = basis.basis().col(0);
    const double root_m = std::sqrt(static_cast<double>(geom.m));
    auto score = [&](double theta) { return std::abs(u.dot(steering_vector(geom, theta))) / root_m; };

    const double pi = std::numbers::pi;
    double best_theta = 0.0;
    double best = -1.0;
    for (long k = 1;; ++k) {
        const double theta = static_cast<double>(k) * grid;
        if (theta >= pi) break;
        const double s = score(theta);
        if (s > best) {
            best = s;
            best_theta = theta;
        }
    }
    if (best < 0.0) throw std::invalid_argument("doa_grid_search: grid step too coarse for (0, pi)");

    // Golden-section refinement on the bracket around the best grid point.
    double lo = std::max(best_theta - grid, 0.5 * best_theta);
    double hi = std::min(best_theta + grid, 0.5 * (best_theta + pi));
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double f1 = score(x1);
    double f2 = score(x2);
    while (hi - lo > kDoaRefineTolerance) {
        if (f1 >= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = score(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = score(x2);
        }
    }
    const double refined = 0.5 * (lo + hi);
    return score(refined) >= best ? refined : best_theta;
}

} // namespace robsub
