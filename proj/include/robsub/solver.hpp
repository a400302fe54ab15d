#pragma once

#include <optional>
#include <vector>

#include <Eigen/Core>

#include "robsub/penalty.hpp"
#include "robsub/types.hpp"

namespace robsub {

/// (I - U U^H) X, computed as X - U (U^H X).
Eigen::MatrixXcd residual_projector_apply(const SubspaceEstimate& basis, const SnapshotMatrix& X);

/// Exact minimizer over Delta of the objective for a fixed basis.
///
/// c = prox_slope(column norms of R), Delta_i = (c_i / ||r_i||) r_i with R = (I - P) X.
/// Columns with a zero residual get Delta_i = 0.
InterferenceEstimate delta_update(const SubspaceEstimate& basis, const SnapshotMatrix& X,
                                  const PenaltyVector& lam);

/// d leading left singular vectors of X - Delta.
SubspaceEstimate basis_update(const SnapshotMatrix& X, const Eigen::MatrixXcd& delta, Index d);

/// d leading eigenvectors (descending) of a Hermitian PSD Gram matrix M M^H.
SubspaceEstimate leading_subspace_from_gram(const Eigen::MatrixXcd& gram, Index d);

/// M M^H, accumulated as a Hermitian rank update.
Eigen::MatrixXcd gram(const Eigen::MatrixXcd& M);

/// ||(I - P)(X - Delta)||_F^2.
double residual_energy(const SubspaceEstimate& basis, const Eigen::MatrixXcd& delta, const SnapshotMatrix& X);

/// 1/2 ||(I - P)(X - Delta)||_F^2 + ||[[Delta]]||_lam.
///
/// The 1/2 matches the prox normalization, which makes delta_update the exact
/// Delta-minimizer and keeps the penalty on the same scale as the residual norms.
double objective(const SubspaceEstimate& basis, const Eigen::MatrixXcd& delta, const SnapshotMatrix& X,
                 const PenaltyVector& lam);

/// ||P_a - P_b||_F for two subspaces of equal dimension, without forming m x m matrices.
double projector_distance(const SubspaceEstimate& a, const SubspaceEstimate& b);

struct SolverConfig {
    double eta = 1e-6;
    int max_iterations = 500;
    /// When set, the first step is a Delta-update from this basis instead of Delta = 0.
    std::optional<SubspaceEstimate> init;
    /// Record wall time per iteration (cheap; used by benchmarks).
    bool record_timing = true;

    void validate() const;
};

struct SolverResult {
    SubspaceEstimate subspace;
    InterferenceEstimate interference;
    /// Objective after every half-step (basis update, then Delta update).
    std::vector<double> objective_trace;
    int iterations = 0;
    bool converged = false;
    std::vector<double> iteration_seconds;
};

/// Alternating minimization: basis update from X - Delta (truncated SVD), then
/// Delta update by the SLOPE prox, until both ||Delta^{k+1} - Delta^k||_F and
/// ||P^{k+1} - P^k||_F drop below eta or max_iterations is reached.
SolverResult solve(const SnapshotMatrix& X, Index d, const PenaltyVector& lam, const SolverConfig& cfg = {});

} // namespace robsub
