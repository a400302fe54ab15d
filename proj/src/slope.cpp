#include "robsub/slope.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace robsub {

namespace {

void require_same_length(std::size_t x, std::size_t lam, const char* what) {
    if (x != lam) {
        throw std::invalid_argument(std::string(what) + ": length mismatch (" + std::to_string(x) +
                                    " values, " + std::to_string(lam) + " weights)");
    }
}

double sorted_pairing(std::vector<double> moduli, const PenaltyVector& lam) {
    std::sort(moduli.begin(), moduli.end(), std::greater<>());
    double total = 0.0;
    for (std::size_t i = 0; i < moduli.size(); ++i) {
        total += lam[i] * moduli[i];
    }
    return total;
}

} // namespace

PenaltyVector::PenaltyVector(std::vector<double> values) : values_(std::move(values)) {
    for (double v : values_) {
        if (!std::isfinite(v) || v < 0.0) {
            throw std::invalid_argument("PenaltyVector: weights must be finite and nonnegative");
        }
    }
    std::sort(values_.begin(), values_.end(), std::greater<>());
}

PenaltyVector PenaltyVector::zeros(std::size_t n) { return PenaltyVector(std::vector<double>(n, 0.0)); }

PenaltyVector PenaltyVector::constant(std::size_t n, double value) {
    return PenaltyVector(std::vector<double>(n, value));
}

bool PenaltyVector::is_norm() const noexcept { return !values_.empty() && values_.front() > 0.0; }

PenaltyVector PenaltyVector::scaled(double factor) const {
    if (!(factor >= 0.0)) {
        throw std::invalid_argument("PenaltyVector::scaled: factor must be nonnegative");
    }
    std::vector<double> out(values_);
    for (double& v : out) v *= factor;
    return PenaltyVector(std::move(out));
}

double slope_norm(std::span<const double> x, const PenaltyVector& lam) {
    require_same_length(x.size(), lam.size(), "slope_norm");
    std::vector<double> moduli(x.size());
    std::transform(x.begin(), x.end(), moduli.begin(), [](double v) { return std::abs(v); });
    return sorted_pairing(std::move(moduli), lam);
}

double slope_norm(std::span<const std::complex<double>> x, const PenaltyVector& lam) {
    require_same_length(x.size(), lam.size(), "slope_norm");
    std::vector<double> moduli(x.size());
    std::transform(x.begin(), x.end(), moduli.begin(), [](std::complex<double> v) { return std::abs(v); });
    return sorted_pairing(std::move(moduli), lam);
}

Eigen::VectorXd column_norms(const Eigen::MatrixXcd& X) { return X.colwise().norm().transpose(); }

double group_slope_norm(const Eigen::MatrixXcd& X, const PenaltyVector& lam) {
    require_same_length(static_cast<std::size_t>(X.cols()), lam.size(), "group_slope_norm");
    const Eigen::VectorXd norms = column_norms(X);
    return slope_norm(std::span<const double>(norms.data(), static_cast<std::size_t>(norms.size())), lam);
}

std::vector<double> prox_slope(std::span<const double> w, const PenaltyVector& lam) {
    require_same_length(w.size(), lam.size(), "prox_slope");
    const std::size_t n = w.size();
    for (double v : w) {
        if (!std::isfinite(v)) throw std::invalid_argument("prox_slope: non-finite input");
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return std::abs(w[a]) > std::abs(w[b]); });

    // Blocks of the nonincreasing fit: [start, end) in sorted positions, with running sum.
    struct Block {
        std::size_t start;
        std::size_t end;
        double sum;
        double mean() const { return sum / static_cast<double>(end - start); }
    };
    std::vector<Block> stack;
    stack.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        stack.push_back({k, k + 1, std::abs(w[order[k]]) - lam[k]});
        while (stack.size() > 1 && stack[stack.size() - 2].mean() <= stack.back().mean()) {
            const Block top = stack.back();
            stack.pop_back();
            stack.back().end = top.end;
            stack.back().sum += top.sum;
        }
    }

    std::vector<double> out(n, 0.0);
    for (const Block& b : stack) {
        const double level = std::max(b.mean(), 0.0);
        if (level == 0.0) continue;
        for (std::size_t k = b.start; k < b.end; ++k) {
            const std::size_t i = order[k];
            out[i] = std::copysign(level, w[i]);
        }
    }
    return out;
}

} // namespace robsub
