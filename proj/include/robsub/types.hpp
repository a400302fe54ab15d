#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

namespace robsub {

using Index = Eigen::Index;

/// m x n array observations; rows are channels, columns are snapshots.
class SnapshotMatrix {
public:
    explicit SnapshotMatrix(Eigen::MatrixXcd data);

    const Eigen::MatrixXcd& data() const noexcept { return data_; }
    Index m() const noexcept { return data_.rows(); }
    Index n() const noexcept { return data_.cols(); }

private:
    Eigen::MatrixXcd data_;
};

/// Orthonormal m x d basis of an estimated signal subspace, 1 <= d < m.
class SubspaceEstimate {
public:
    /// Validates orthonormality (within 1e-10) and 1 <= d < m.
    explicit SubspaceEstimate(Eigen::MatrixXcd basis);

    /// Orthonormal basis for col(A) via Householder QR; A must have full column rank.
    static SubspaceEstimate span_of(const Eigen::MatrixXcd& A);

    const Eigen::MatrixXcd& basis() const noexcept { return basis_; }
    Index m() const noexcept { return basis_.rows(); }
    Index dim() const noexcept { return basis_.cols(); }

    /// Explicit m x m projector; for diagnostics and tests only.
    Eigen::MatrixXcd projector() const { return basis_ * basis_.adjoint(); }

private:
    Eigen::MatrixXcd basis_;
};

/// Estimated interference: Delta, its column norms c, and support {i : c_i > 0}.
struct InterferenceEstimate {
    Eigen::MatrixXcd delta;
    Eigen::VectorXd col_norms;
    std::vector<Index> support;

    /// Per-snapshot flags, true where the column is in the support.
    std::vector<bool> flags() const;
};

} // namespace robsub
