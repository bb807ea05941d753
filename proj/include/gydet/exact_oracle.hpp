#pragma once

// Independent ground-truth routes for log det(-Δ + V): dense pivoted LU,
// the separable 2D eigenvalue product, and the closed-form sinh product
//   det(-Δ_2 + m²) = ∏_{k=1}^{M-1} sinh(γ_k N) / sinh(γ_k),
//   cosh γ_k = 1 + (m² - λ_k)/2.

#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gydet/errors.hpp"
#include "gydet/lattice.hpp"
#include "gydet/logdet.hpp"
#include "gydet/special.hpp"

namespace gydet {

/// Dense partial-pivot LU: log|det| = Σ log|u_kk|, sign from pivots and the
/// row permutation.
inline LogDet dense_logdet(const Eigen::MatrixXd& h, std::size_t max_rows = default_dense_row_cap) {
    if (h.rows() != h.cols()) throw DomainError("dense_logdet requires a square matrix");
    if (static_cast<std::size_t>(h.rows()) > max_rows)
        throw SizeError("dense_logdet: " + std::to_string(h.rows()) + " rows exceeds cap " +
                        std::to_string(max_rows));
    if (!h.allFinite()) throw NonFinite("dense_logdet: matrix has non-finite entries");
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(h);
    const auto& u = lu.matrixLU();
    LogDet out;
    out.method = Method::dense_lu;
    out.sign = static_cast<int>(lu.permutationP().determinant());
    CompensatedSum acc;
    for (Eigen::Index i = 0; i < u.rows(); ++i) {
        const double p = u(i, i);
        if (p == 0.0) throw SingularMatrix("dense_logdet: exact zero pivot at row " + std::to_string(i));
        out.min_pivot = std::fmin(out.min_pivot, std::fabs(p));
        acc += std::log(std::fabs(p));
        if (p < 0) out.sign = -out.sign;
    }
    out.log_abs = acc.value();
    return out;
}

inline LogDet dense_logdet(const PotentialField& pot, std::size_t max_rows = default_dense_row_cap) {
    return dense_logdet(build_interior_hamiltonian(pot, max_rows), max_rows);
}

/// Σ_j Σ_k log(m² + 4 sin²(πj/2N) + 4 sin²(πk/2M)) over the separable
/// spectrum of the 2D Dirichlet Laplacian.
inline LogDet eigenproduct_logdet_2d(double m2, std::size_t n, std::size_t m) {
    if (!(m2 >= 0.0)) throw DomainError("eigenproduct_logdet_2d requires m2 >= 0");
    if (n < 2 || m < 2) throw DomainError("eigenproduct_logdet_2d requires N, M >= 2");
    const std::vector<double> lx = transverse_eigenvalues(n);
    const std::vector<double> ly = transverse_eigenvalues(m);
    CompensatedSum acc;
    for (double a : lx)
        for (double b : ly) acc += std::log(m2 - a - b);
    LogDet out;
    out.method = Method::eigen_product;
    out.log_abs = acc.value();
    return out;
}

struct GammaValue {
    double m2;
    double lambda;
    double gamma;
};

/// γ = arccosh(1 + (m² - λ)/2), accurate near zero argument.
inline GammaValue gamma_k(double m2, double lambda) {
    const double t = 0.5 * (m2 - lambda);
    if (!(t >= 0.0)) throw DomainError("gamma_k requires m2 >= lambda");
    return GammaValue{m2, lambda, acosh1p(t)};
}

using GammaFunction = std::function<GammaValue(double, double)>;

/// Σ_k [log sinh(γ_k N) - log sinh(γ_k)] over the M-1 transverse modes.
/// `gamma` is replaceable for fault-injection tests.
inline LogDet sinh_product_logdet(double m2, std::size_t n, std::size_t m,
                                  const GammaFunction& gamma = gamma_k) {
    if (!(m2 >= 0.0)) throw DomainError("sinh_product_logdet requires m2 >= 0");
    if (n < 2 || m < 2) throw DomainError("sinh_product_logdet requires N, M >= 2");
    CompensatedSum acc;
    for (double lam : transverse_eigenvalues(m)) {
        const double g = gamma(m2, lam).gamma;
        if (!(g > 0.0)) throw DomainError("sinh_product_logdet: zero mode (gamma = 0)");
        acc += log_sinh(g * static_cast<double>(n));
        acc += -log_sinh(g);
    }
    LogDet out;
    out.method = Method::sinh_product;
    out.log_abs = acc.value();
    return out;
}

} // namespace gydet
