#include "robsub/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "robsub/slope.hpp"

namespace robsub {

namespace {

constexpr Index kChunk = 2048;

void require(bool ok, const std::string& msg) {
    if (!ok) throw std::invalid_argument(msg);
}

std::span<const double> as_span(const Eigen::VectorXd& v) {
    return {v.data(), static_cast<std::size_t>(v.size())};
}

std::vector<Index> support_of(const Eigen::VectorXd& c) {
    std::vector<Index> support;
    for (Index i = 0; i < c.size(); ++i) {
        if (c[i] > 0.0) support.push_back(i);
    }
    return support;
}

/// Column norms of (I - U U^H) X, chunked so no m x n temporary is formed.
Eigen::VectorXd residual_norms(const Eigen::MatrixXcd& U, const Eigen::MatrixXcd& X) {
    Eigen::VectorXd norms(X.cols());
    Eigen::MatrixXcd R;
    for (Index j = 0; j < X.cols(); j += kChunk) {
        const Index w = std::min(kChunk, X.cols() - j);
        R.noalias() = X.middleCols(j, w);
        R.noalias() -= U * (U.adjoint() * X.middleCols(j, w));
        norms.segment(j, w) = R.colwise().norm().transpose();
    }
    return norms;
}

/// Gram of X - Delta when every column of Delta has the form alpha_i (x_i - U0 U0^H x_i).
///
/// With beta = 1 - alpha and c_i = U0^H x_i, column i of X - Delta is beta_i x_i + alpha_i U0 c_i, so
///     G = G_X - Y Y^H + Z U0^H + U0 Z^H + U0 W U0^H
/// where Y_i = sqrt(1 - beta_i^2) x_i, Z = sum beta_i alpha_i x_i c_i^H, W = sum alpha_i^2 c_i c_i^H,
/// all sums over the support. Cost is O(m^2 |S|) instead of O(m^2 n).
Eigen::MatrixXcd structured_gram(const Eigen::MatrixXcd& gram_x, const Eigen::MatrixXcd& X, const Eigen::MatrixXcd& U0,
                                 const Eigen::VectorXd& alpha, const std::vector<Index>& support) {
    const Index m = X.rows();
    const Index d = U0.cols();
    const Index s = static_cast<Index>(support.size());
    Eigen::MatrixXcd G = gram_x;
    if (s == 0) return G;

    Eigen::MatrixXcd Y(m, s);
    Eigen::MatrixXcd XS(m, s);
    Eigen::VectorXd a(s);
    for (Index k = 0; k < s; ++k) {
        const Index i = support[static_cast<std::size_t>(k)];
        XS.col(k) = X.col(i);
        a[k] = alpha[i];
    }
    const Eigen::MatrixXcd CS = U0.adjoint() * XS;  // d x s
    for (Index k = 0; k < s; ++k) {
        const double beta = 1.0 - a[k];
        Y.col(k) = std::sqrt(std::max(0.0, 1.0 - beta * beta)) * XS.col(k);
    }
    Eigen::MatrixXcd lower = Eigen::MatrixXcd::Zero(m, m);
    lower.selfadjointView<Eigen::Lower>().rankUpdate(Y, -1.0);
    G += lower.selfadjointView<Eigen::Lower>();

    Eigen::MatrixXcd Z = Eigen::MatrixXcd::Zero(m, d);
    Eigen::MatrixXcd W = Eigen::MatrixXcd::Zero(d, d);
    {
        Eigen::MatrixXcd scaled_c(d, s);
        Eigen::MatrixXcd alpha_c(d, s);
        for (Index k = 0; k < s; ++k) {
            scaled_c.col(k) = ((1.0 - a[k]) * a[k]) * CS.col(k);
            alpha_c.col(k) = a[k] * CS.col(k);
        }
        Z.noalias() = XS * scaled_c.adjoint();
        W.noalias() = alpha_c * alpha_c.adjoint();
    }
    const Eigen::MatrixXcd ZU = Z * U0.adjoint();
    G += ZU + ZU.adjoint();
    G.noalias() += U0 * W * U0.adjoint();
    return G;
}

} // namespace

// ---------------------------------------------------------------------------
// Domain types

SnapshotMatrix::SnapshotMatrix(Eigen::MatrixXcd data) : data_(std::move(data)) {
    require(data_.rows() >= 1 && data_.cols() >= 1, "SnapshotMatrix: need at least one channel and one snapshot");
    require(data_.allFinite(), "SnapshotMatrix: non-finite entries");
}

SubspaceEstimate::SubspaceEstimate(Eigen::MatrixXcd basis) : basis_(std::move(basis)) {
    const Index m = basis_.rows();
    const Index d = basis_.cols();
    require(d >= 1, "SubspaceEstimate: dimension must be at least 1");
    require(d < m, "SubspaceEstimate: dimension must be smaller than the channel count");
    require(basis_.allFinite(), "SubspaceEstimate: non-finite basis");
    const Eigen::MatrixXcd gram_err = basis_.adjoint() * basis_ - Eigen::MatrixXcd::Identity(d, d);
    require(gram_err.cwiseAbs().maxCoeff() <= 1e-10, "SubspaceEstimate: basis is not orthonormal");
}

SubspaceEstimate SubspaceEstimate::span_of(const Eigen::MatrixXcd& A) {
    require(A.cols() >= 1 && A.cols() < A.rows(), "SubspaceEstimate::span_of: need 1 <= d < m");
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(A);
    const Eigen::MatrixXcd R = qr.matrixQR().topRows(A.cols()).triangularView<Eigen::Upper>();
    const double scale = A.cwiseAbs().maxCoeff();
    for (Index k = 0; k < A.cols(); ++k) {
        require(std::abs(R(k, k)) > 1e-12 * std::max(scale, 1.0), "SubspaceEstimate::span_of: rank-deficient input");
    }
    Eigen::MatrixXcd Q = qr.householderQ() * Eigen::MatrixXcd::Identity(A.rows(), A.cols());
    return SubspaceEstimate(std::move(Q));
}

std::vector<bool> InterferenceEstimate::flags() const {
    std::vector<bool> out(static_cast<std::size_t>(col_norms.size()), false);
    for (Index i : support) out[static_cast<std::size_t>(i)] = true;
    return out;
}

// ---------------------------------------------------------------------------
// Half-steps

Eigen::MatrixXcd residual_projector_apply(const SubspaceEstimate& basis, const SnapshotMatrix& X) {
    require(basis.m() == X.m(), "residual_projector_apply: basis and data channel counts differ");
    const Eigen::MatrixXcd& U = basis.basis();
    Eigen::MatrixXcd R = X.data();
    R.noalias() -= U * (U.adjoint() * X.data());
    return R;
}

InterferenceEstimate delta_update(const SubspaceEstimate& basis, const SnapshotMatrix& X, const PenaltyVector& lam) {
    require(static_cast<Index>(lam.size()) == X.n(), "delta_update: penalty length must equal the snapshot count");
    const Eigen::MatrixXcd R = residual_projector_apply(basis, X);
    const Eigen::VectorXd norms = R.colwise().norm().transpose();
    const std::vector<double> c = prox_slope(as_span(norms), lam);

    InterferenceEstimate est;
    est.delta = Eigen::MatrixXcd::Zero(X.m(), X.n());
    est.col_norms = Eigen::Map<const Eigen::VectorXd>(c.data(), static_cast<Index>(c.size()));
    for (Index i = 0; i < X.n(); ++i) {
        if (norms[i] > 0.0 && est.col_norms[i] > 0.0) {
            est.delta.col(i) = (est.col_norms[i] / norms[i]) * R.col(i);
        } else {
            est.col_norms[i] = 0.0;
        }
    }
    est.support = support_of(est.col_norms);
    return est;
}

Eigen::MatrixXcd gram(const Eigen::MatrixXcd& M) {
    Eigen::MatrixXcd lower = Eigen::MatrixXcd::Zero(M.rows(), M.rows());
    lower.selfadjointView<Eigen::Lower>().rankUpdate(M);
    return lower.selfadjointView<Eigen::Lower>();
}

SubspaceEstimate leading_subspace_from_gram(const Eigen::MatrixXcd& gram_matrix, Index d) {
    const Index m = gram_matrix.rows();
    require(gram_matrix.cols() == m, "leading_subspace_from_gram: Gram matrix must be square");
    require(d >= 1 && d < m, "leading_subspace_from_gram: need 1 <= d < m");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(gram_matrix);
    if (eig.info() != Eigen::Success) {
        throw std::runtime_error("leading_subspace_from_gram: eigendecomposition failed");
    }
    // Eigenvalues come back ascending; take the top d, largest first.
    Eigen::MatrixXcd U(m, d);
    for (Index k = 0; k < d; ++k) U.col(k) = eig.eigenvectors().col(m - 1 - k);
    return SubspaceEstimate(std::move(U));
}

SubspaceEstimate basis_update(const SnapshotMatrix& X, const Eigen::MatrixXcd& delta, Index d) {
    require(delta.rows() == X.m() && delta.cols() == X.n(), "basis_update: Delta shape must match X");
    require(d >= 1 && d < X.m(), "basis_update: need 1 <= d < m");
    const Eigen::MatrixXcd M = X.data() - delta;
    require(M.allFinite(), "basis_update: X - Delta is not finite");
    return leading_subspace_from_gram(gram(M), d);
}

double residual_energy(const SubspaceEstimate& basis, const Eigen::MatrixXcd& delta, const SnapshotMatrix& X) {
    require(basis.m() == X.m(), "residual_energy: basis and data channel counts differ");
    require(delta.rows() == X.m() && delta.cols() == X.n(), "residual_energy: Delta shape must match X");
    const Eigen::MatrixXcd& U = basis.basis();
    const Eigen::MatrixXcd& Xd = X.data();
    double total = 0.0;
    Eigen::MatrixXcd T;
    for (Index j = 0; j < Xd.cols(); j += kChunk) {
        const Index w = std::min(kChunk, Xd.cols() - j);
        T.noalias() = Xd.middleCols(j, w) - delta.middleCols(j, w);
        const Eigen::MatrixXcd coef = U.adjoint() * T;
        T.noalias() -= U * coef;
        total += T.squaredNorm();
    }
    return total;
}

double objective(const SubspaceEstimate& basis, const Eigen::MatrixXcd& delta, const SnapshotMatrix& X,
                 const PenaltyVector& lam) {
    require(static_cast<Index>(lam.size()) == X.n(), "objective: penalty length must equal the snapshot count");
    return 0.5 * residual_energy(basis, delta, X) + group_slope_norm(delta, lam);
}

double projector_distance(const SubspaceEstimate& a, const SubspaceEstimate& b) {
    require(a.m() == b.m() && a.dim() == b.dim(), "projector_distance: subspaces must have equal shape");
    // ||P_a - P_b||_F^2 = 2 (d - ||Ua^H Ub||_F^2) = 2 ||(I - P_a) Ub||_F^2
    const Eigen::MatrixXcd& Ua = a.basis();
    const Eigen::MatrixXcd& Ub = b.basis();
    const Eigen::MatrixXcd off = Ub - Ua * (Ua.adjoint() * Ub);
    return std::sqrt(2.0) * off.norm();
}

void SolverConfig::validate() const {
    require(eta > 0.0, "SolverConfig: eta must be positive");
    require(max_iterations >= 1, "SolverConfig: max_iterations must be at least 1");
}

// ---------------------------------------------------------------------------
// Alternating minimization

namespace {

/// Working state for the solver. Delta is kept explicitly together with the
/// (U0, alpha) pair that generated it, which lets the next basis update use
/// the structured Gram update.
class AltMin {
public:
    AltMin(const SnapshotMatrix& X, Index d, const PenaltyVector& lam)
        : X_(X), d_(d), lam_(lam), gram_x_(gram(X.data())),
          delta_(Eigen::MatrixXcd::Zero(X.m(), X.n())), alpha_(Eigen::VectorXd::Zero(X.n())),
          c_(Eigen::VectorXd::Zero(X.n())) {}

    SubspaceEstimate basis_step() const {
        if (!generator_) return leading_subspace_from_gram(gram_x_, d_);
        return leading_subspace_from_gram(structured_gram(gram_x_, X_.data(), generator_->basis(), alpha_, support_), d_);
    }

    /// Replaces Delta by the exact minimizer for `basis`; returns ||Delta_new - Delta_old||_F.
    double delta_step(const SubspaceEstimate& basis) {
        const Eigen::MatrixXcd& U = basis.basis();
        const Eigen::MatrixXcd& Xd = X_.data();
        const Eigen::VectorXd norms = residual_norms(U, Xd);
        const std::vector<double> c = prox_slope(as_span(norms), lam_);

        double diff_sq = 0.0;
        Eigen::MatrixXcd R;
        for (Index j = 0; j < Xd.cols(); j += kChunk) {
            const Index w = std::min(kChunk, Xd.cols() - j);
            bool any = false;
            for (Index i = j; i < j + w; ++i) {
                if (c[static_cast<std::size_t>(i)] > 0.0 || alpha_[i] != 0.0) {
                    any = true;
                    break;
                }
            }
            if (!any) continue;
            R.noalias() = Xd.middleCols(j, w);
            R.noalias() -= U * (U.adjoint() * Xd.middleCols(j, w));
            for (Index k = 0; k < w; ++k) {
                const Index i = j + k;
                const double ci = c[static_cast<std::size_t>(i)];
                const double a = (ci > 0.0 && norms[i] > 0.0) ? ci / norms[i] : 0.0;
                if (a == 0.0 && alpha_[i] == 0.0) continue;
                if (a == 0.0) {
                    diff_sq += delta_.col(i).squaredNorm();
                    delta_.col(i).setZero();
                } else {
                    const Eigen::VectorXcd fresh = a * R.col(k);
                    diff_sq += (fresh - delta_.col(i)).squaredNorm();
                    delta_.col(i) = fresh;
                }
                alpha_[i] = a;
            }
        }
        for (Index i = 0; i < Xd.cols(); ++i) {
            c_[i] = alpha_[i] > 0.0 ? c[static_cast<std::size_t>(i)] : 0.0;
        }
        support_ = support_of(c_);
        generator_ = basis;
        return std::sqrt(diff_sq);
    }

    InterferenceEstimate estimate() const { return {delta_, c_, support_}; }
    const Eigen::MatrixXcd& delta() const { return delta_; }

private:
    const SnapshotMatrix& X_;
    Index d_;
    const PenaltyVector& lam_;
    Eigen::MatrixXcd gram_x_;
    Eigen::MatrixXcd delta_;
    Eigen::VectorXd alpha_;
    Eigen::VectorXd c_;
    std::vector<Index> support_;
    std::optional<SubspaceEstimate> generator_;
};

} // namespace

SolverResult solve(const SnapshotMatrix& X, Index d, const PenaltyVector& lam, const SolverConfig& cfg) {
    cfg.validate();
    require(d >= 1 && d < X.m(), "solve: need 1 <= d < m");
    require(static_cast<Index>(lam.size()) == X.n(), "solve: penalty length must equal the snapshot count");
    if (cfg.init) {
        require(cfg.init->m() == X.m() && cfg.init->dim() == d, "solve: initial basis has the wrong shape");
    }

    using clock = std::chrono::steady_clock;
    AltMin state(X, d, lam);
    std::vector<double> trace;
    std::vector<double> seconds;
    std::optional<SubspaceEstimate> previous;

    if (cfg.init) {
        state.delta_step(*cfg.init);
        trace.push_back(objective(*cfg.init, state.delta(), X, lam));
        previous = cfg.init;
    }

    int iterations = 0;
    bool converged = false;
    std::optional<SubspaceEstimate> current;
    while (iterations < cfg.max_iterations) {
        const auto start = clock::now();
        current = state.basis_step();
        trace.push_back(objective(*current, state.delta(), X, lam));
        const double delta_change = state.delta_step(*current);
        trace.push_back(objective(*current, state.delta(), X, lam));
        ++iterations;
        if (cfg.record_timing) {
            seconds.push_back(std::chrono::duration<double>(clock::now() - start).count());
        }
        if (previous && delta_change < cfg.eta && projector_distance(*previous, *current) < cfg.eta) {
            converged = true;
            break;
        }
        previous = current;
    }

    return SolverResult{*current, state.estimate(), std::move(trace), iterations, converged, std::move(seconds)};
}

} // namespace robsub
