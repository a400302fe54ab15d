#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "robsub/signal_sim.hpp"
#include "robsub/types.hpp"

namespace robsub {

/// 2x2 cross-tabulation of estimated vs. true interference.
struct Confusion {
    std::size_t tn = 0;  // clean, estimated clean
    std::size_t fp = 0;  // clean, flagged
    std::size_t fn = 0;  // interfered, estimated clean
    std::size_t tp = 0;  // interfered, flagged

    std::size_t total() const noexcept { return tn + fp + fn + tp; }
    std::size_t n0() const noexcept { return tn + fp; }

    /// False discovery proportion FP / max(FP + TP, 1).
    double fdp() const noexcept;
    /// Rate plotted as "false positive rate": the false discovery proportion.
    double fpr() const noexcept { return fdp(); }
    /// Rate plotted as "false negative rate": FN / max(FN + TN, 1), the share of
    /// snapshots estimated clean that actually carry interference.
    double fnr() const noexcept;

    // Textbook variants, reported alongside for comparison.
    double sensitivity() const noexcept;        // TP / (TP + FN)
    double fallout() const noexcept;            // FP / (FP + TN)
    double miss_rate() const noexcept;          // FN / (FN + TP)
};

Confusion confusion(const std::vector<bool>& flags, const std::vector<bool>& truth);

/// d leading left singular vectors of the columns of X listed in `keep`.
SubspaceEstimate refit_subspace(const SnapshotMatrix& X, std::span<const Index> keep, Index d);

/// Column indices not flagged.
std::vector<Index> unflagged(const std::vector<bool>& flags);

/// Direction of arrival for a one-dimensional subspace: maximizes ||P a(theta)|| / ||a(theta)||
/// over the grid {k * grid} inside (0, pi), then refines with golden-section search to
/// kDoaRefineTolerance.
/// Ties on the grid go to the smallest angle.
double doa_grid_search(const SubspaceEstimate& basis, const ArrayGeometry& geom, double grid);

inline constexpr double kDefaultDoaGrid = 1e-3 * 3.14159265358979323846;

/// Final bracket width of the golden-section refinement, in radians. Far below the
/// estimator's statistical spread, so two estimates are never compared at rounding level.
inline constexpr double kDoaRefineTolerance = 1e-9;

struct SolverSummary {
    int iterations = 0;
    bool converged = false;
    double final_objective = 0.0;
    double solve_seconds = 0.0;
    std::vector<double> iteration_seconds;
};

struct DetectionReport {
    std::vector<bool> flags;
    Confusion confusion;
    bool has_truth = false;
    double doa_cleaned = 0.0;
    double doa_all = 0.0;
    SolverSummary solver;

    std::size_t n0() const noexcept { return confusion.n0(); }
    double fdp() const noexcept { return confusion.fdp(); }
    std::size_t discoveries() const;
};

} // namespace robsub
