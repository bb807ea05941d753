#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <string_view>

namespace gydet {

enum class Method {
    scalar_a,
    scalar_y,
    matrix_a,
    matrix_y,
    dense_lu,
    eigen_product,
    sinh_product,
    asymptotic,
};

constexpr std::string_view to_string(Method m) noexcept {
    switch (m) {
    case Method::scalar_a: return "scalar-a";
    case Method::scalar_y: return "scalar-y";
    case Method::matrix_a: return "matrix-A";
    case Method::matrix_y: return "matrix-Y";
    case Method::dense_lu: return "dense-LU";
    case Method::eigen_product: return "eigen-product";
    case Method::sinh_product: return "sinh-product";
    case Method::asymptotic: return "asymptotic";
    }
    return "unknown";
}

/// Sign-tracked natural logarithm of a determinant.
///
/// `min_pivot` is the smallest pivot magnitude seen by a factorization-based
/// route (infinity for closed-form routes); `rescalings` counts the
/// renormalizations applied by growing-solution routes.
struct LogDet {
    double log_abs = 0.0;
    int sign = 1;
    Method method = Method::dense_lu;
    double min_pivot = std::numeric_limits<double>::infinity();
    std::size_t rescalings = 0;

    /// exp(log_abs) with the sign; overflows for large operators.
    double value() const { return sign * std::exp(log_abs); }
};

/// |a - b| / max(|a|, |b|, 1): relative for large logs, absolute near zero.
inline double log_abs_gap(const LogDet& a, const LogDet& b) {
    const double scale = std::fmax(1.0, std::fmax(std::fabs(a.log_abs), std::fabs(b.log_abs)));
    return std::fabs(a.log_abs - b.log_abs) / scale;
}

/// True when both results have the same sign and relative log gap ≤ tol.
inline bool agree(const LogDet& a, const LogDet& b, double tol) {
    return a.sign == b.sign && log_abs_gap(a, b) <= tol;
}

} // namespace gydet
