#pragma once

// Small dense factorizations with sign-tracked log-determinants.

#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "gydet/errors.hpp"

namespace gydet::linalg {

/// Log-determinant summary shared by the factorizations below.
struct DetSummary {
    double log_abs = 0.0;
    int sign = 1;
    double min_pivot = std::numeric_limits<double>::infinity();
};

/// Symmetric-indefinite LDLᵀ with Bunch-Kaufman partial pivoting:
/// P A Pᵀ = L D Lᵀ, D block diagonal with 1×1 and 2×2 blocks.
/// Only the lower triangle of the input is referenced.
class BunchKaufman {
public:
    explicit BunchKaufman(Eigen::MatrixXd a) : lu_(std::move(a)) {
        const Eigen::Index n = lu_.rows();
        if (lu_.cols() != n) throw DomainError("BunchKaufman requires a square matrix");
        // mirror the lower triangle so that full row/column swaps stay symmetric
        for (Eigen::Index j = 0; j < n; ++j)
            for (Eigen::Index i = j + 1; i < n; ++i) lu_(j, i) = lu_(i, j);
        factor();
    }

    Eigen::Index size() const noexcept { return lu_.rows(); }
    const DetSummary& det() const noexcept { return det_; }

    /// Solves A X = B.
    Eigen::MatrixXd solve(Eigen::MatrixXd b) const {
        const Eigen::Index n = size();
        for (const auto& [i, j] : swaps_) b.row(i).swap(b.row(j));
        // L y = b (unit lower, with 2×2 blocks contributing two columns)
        for (Eigen::Index k = 0; k < n;) {
            const int step = block_[k];
            const Eigen::Index r = n - k - step;
            if (r > 0)
                b.bottomRows(r).noalias() -= lu_.block(k + step, k, r, step) * b.middleRows(k, step);
            k += step;
        }
        for (Eigen::Index k = 0; k < n;) {
            if (block_[k] == 1) {
                b.row(k) /= lu_(k, k);
                k += 1;
            } else {
                const double a = lu_(k, k), c = lu_(k + 1, k + 1), off = lu_(k + 1, k);
                const double dt = a * c - off * off;
                for (Eigen::Index col = 0; col < b.cols(); ++col) {
                    const double x0 = b(k, col), x1 = b(k + 1, col);
                    b(k, col) = (c * x0 - off * x1) / dt;
                    b(k + 1, col) = (a * x1 - off * x0) / dt;
                }
                k += 2;
            }
        }
        for (Eigen::Index k = n; k > 0;) {
            const Eigen::Index top = k - block_[k - 1];
            const int step = block_[top];
            const Eigen::Index r = n - top - step;
            if (r > 0)
                b.middleRows(top, step).noalias() -=
                    lu_.block(top + step, top, r, step).transpose() * b.bottomRows(r);
            k = top;
        }
        for (auto it = swaps_.rbegin(); it != swaps_.rend(); ++it) b.row(it->first).swap(b.row(it->second));
        return b;
    }

    Eigen::MatrixXd inverse() const { return solve(Eigen::MatrixXd::Identity(size(), size())); }

private:
    void factor() {
        const Eigen::Index n = lu_.rows();
        const double alpha = (1.0 + std::sqrt(17.0)) / 8.0;
        block_.assign(static_cast<std::size_t>(n), 1);
        for (Eigen::Index k = 0; k < n;) {
            const double absakk = std::fabs(lu_(k, k));
            Eigen::Index imax = k;
            double colmax = 0.0;
            if (k + 1 < n) {
                colmax = lu_.col(k).tail(n - k - 1).cwiseAbs().maxCoeff(&imax);
                imax += k + 1;
            }

            int step = 1;
            Eigen::Index kp = k;
            if (absakk < alpha * colmax) {
                double rowmax = 0.0;
                for (Eigen::Index j = k; j < n; ++j)
                    if (j != imax) rowmax = std::fmax(rowmax, std::fabs(lu_(imax, j)));
                if (absakk * rowmax >= alpha * colmax * colmax) {
                    kp = k;
                } else if (std::fabs(lu_(imax, imax)) >= alpha * rowmax) {
                    kp = imax;
                } else {
                    kp = imax;
                    step = 2;
                }
            }
            const Eigen::Index kk = k + step - 1;
            if (kp != kk) {
                lu_.row(kk).swap(lu_.row(kp));
                lu_.col(kk).swap(lu_.col(kp));
                swaps_.emplace_back(kk, kp);
            }

            const Eigen::Index r = n - k - step;
            if (step == 1) {
                const double d = lu_(k, k);
                record_pivot(d, std::fabs(d));
                if (d != 0.0 && r > 0) {
                    const Eigen::VectorXd w = lu_.col(k).tail(r);
                    lu_.bottomRightCorner(r, r).noalias() -= (w / d) * w.transpose();
                    lu_.col(k).tail(r) = w / d;
                }
            } else {
                block_[static_cast<std::size_t>(k)] = 2;
                block_[static_cast<std::size_t>(k + 1)] = 2;
                const double a = lu_(k, k), c = lu_(k + 1, k + 1), off = lu_(k + 1, k);
                const double dt = a * c - off * off;
                const double mean = 0.5 * (a + c);
                const double rad = std::hypot(0.5 * (a - c), off);
                const double big = std::fabs(mean) + rad;
                record_pivot(dt, big > 0.0 ? std::fabs(dt) / big : 0.0);
                if (dt != 0.0 && r > 0) {
                    const Eigen::MatrixXd w = lu_.block(k + 2, k, r, 2);
                    Eigen::Matrix2d dinv;
                    dinv << c / dt, -off / dt, -off / dt, a / dt;
                    const Eigen::MatrixXd l = w * dinv;
                    lu_.bottomRightCorner(r, r).noalias() -= l * w.transpose();
                    lu_.block(k + 2, k, r, 2) = l;
                }
            }
            k += step;
        }
    }

    void record_pivot(double value, double magnitude) {
        det_.min_pivot = std::fmin(det_.min_pivot, magnitude);
        if (value == 0.0) {
            det_.log_abs = -std::numeric_limits<double>::infinity();
            det_.sign = 0;
            return;
        }
        if (det_.sign == 0) return;
        det_.log_abs += std::log(std::fabs(value));
        if (value < 0) det_.sign = -det_.sign;
    }

    Eigen::MatrixXd lu_;
    std::vector<int> block_;
    std::vector<std::pair<Eigen::Index, Eigen::Index>> swaps_;
    DetSummary det_;
};

/// General LU with partial (row) pivoting: P A = L U.
class PivotedLU {
public:
    explicit PivotedLU(Eigen::MatrixXd a) : lu_(std::move(a)) {
        const Eigen::Index n = lu_.rows();
        if (lu_.cols() != n) throw DomainError("PivotedLU requires a square matrix");
        perm_.resize(static_cast<std::size_t>(n));
        for (Eigen::Index k = 0; k < n; ++k) {
            Eigen::Index p = k;
            lu_.col(k).tail(n - k).cwiseAbs().maxCoeff(&p);
            p += k;
            perm_[static_cast<std::size_t>(k)] = p;
            if (p != k) {
                lu_.row(k).swap(lu_.row(p));
                det_.sign = -det_.sign;
            }
            const double d = lu_(k, k);
            det_.min_pivot = std::fmin(det_.min_pivot, std::fabs(d));
            if (d == 0.0) {
                det_.sign = 0;
                det_.log_abs = -std::numeric_limits<double>::infinity();
                continue;
            }
            if (det_.sign != 0) {
                det_.log_abs += std::log(std::fabs(d));
                if (d < 0) det_.sign = -det_.sign;
            }
            const Eigen::Index r = n - k - 1;
            if (r > 0) {
                lu_.col(k).tail(r) /= d;
                lu_.bottomRightCorner(r, r).noalias() -= lu_.col(k).tail(r) * lu_.row(k).tail(r);
            }
        }
    }

    const DetSummary& det() const noexcept { return det_; }

    Eigen::MatrixXd solve(Eigen::MatrixXd b) const {
        for (std::size_t k = 0; k < perm_.size(); ++k)
            if (perm_[k] != static_cast<Eigen::Index>(k)) b.row(static_cast<Eigen::Index>(k)).swap(b.row(perm_[k]));
        lu_.triangularView<Eigen::UnitLower>().solveInPlace(b);
        lu_.triangularView<Eigen::Upper>().solveInPlace(b);
        return b;
    }

private:
    Eigen::MatrixXd lu_;
    std::vector<Eigen::Index> perm_;
    DetSummary det_;
};

/// Largest |A - Aᵀ| entry.
inline double asymmetry(const Eigen::MatrixXd& a) {
    return (a - a.transpose()).cwiseAbs().maxCoeff();
}

} // namespace gydet::linalg
