#pragma once

// Large-lattice asymptotics of log det(-Δ_2 + m²) on an N×M Dirichlet
// rectangle.
//
// Massive (m > 0):
//   NM·I1(m) - (N+M)/2·g(m) + ¼ ln(m²(m²+4)²(m²+8))
// Massless:
//   (4G/π)NM - (N+M) ln(1+√2) - ¼ ln(NM) + ½ ln(4√2)
//     + ln(q^{1/24} (N/M)^{1/4} P(q)),   q = e^{-2πN/M}

#include <cmath>
#include <cstddef>
#include <numbers>

#include "gydet/errors.hpp"
#include "gydet/exact_oracle.hpp"
#include "gydet/quadrature.hpp"
#include "gydet/special.hpp"

namespace gydet {

struct AsymptoticBreakdown {
    double area_term = 0.0;
    double perimeter_term = 0.0;
    double log_term = 0.0;
    double constant_term = 0.0;
    double modular_term = 0.0;
    double total = 0.0;
};

inline AsymptoticBreakdown with_total(AsymptoticBreakdown b) {
    b.total = b.area_term + b.perimeter_term + b.log_term + b.constant_term + b.modular_term;
    return b;
}

/// Catalan's constant, computed once from the accelerated series.
inline double catalan_constant() {
    static const double g = catalan();
    return g;
}

/// Massless area density 4G/π.
inline double massless_area_density() { return 4.0 * catalan_constant() / std::numbers::pi; }

/// I1(m) = (1/π) ∫_0^π arccosh(1 + (m² + 2(1 - cos x))/2) dx.
inline double quad_I1(double m2, double abs_tol = 1e-12) {
    if (!(m2 >= 0.0)) throw DomainError("quad_I1 requires m2 >= 0");
    auto f = [m2](double x) {
        const double s = std::sin(0.5 * x);
        return acosh1p(0.5 * m2 + 2.0 * s * s);
    };
    const auto r = integrate(f, 0.0, std::numbers::pi, {.abs_tol = abs_tol * std::numbers::pi});
    return r.value / std::numbers::pi;
}

/// I2(m) = -(1/2π) ∫_0^π ln(m⁴ + 8m² + 14 - 4(m²+4) cos x + 2 cos 2x) dx.
/// The argument is evaluated in the factored form u(u + 4), u = m² + 4 sin²(x/2).
inline double quad_I2(double m2, double abs_tol = 1e-10) {
    if (!(m2 > 0.0)) throw DomainError("quad_I2 requires m2 > 0 (log-singular integrand at m = 0)");
    auto f = [m2](double x) {
        const double s = std::sin(0.5 * x);
        const double u = m2 + 4.0 * s * s;
        return std::log(u) + std::log(u + 4.0);
    };
    const double scale = 2.0 * std::numbers::pi;
    const auto r = integrate(f, 0.0, std::numbers::pi, {.abs_tol = abs_tol * scale});
    return -r.value / scale;
}

/// g(m) = arccosh(1 + m²/2) + arccosh(3 + m²/2).
inline double g_of_m(double m2) {
    if (!(m2 >= 0.0)) throw DomainError("g_of_m requires m2 >= 0");
    return acosh1p(0.5 * m2) + acosh1p(2.0 + 0.5 * m2);
}

/// Small-k expansion ξ_k ≈ c0 + c1 k²/(2M²) of ξ_k = e^{γ_k}.
struct MassiveCorrectionParams {
    double c0;
    double c1;
};

inline MassiveCorrectionParams massive_correction_params(double m2) {
    if (!(m2 >= 0.0)) throw DomainError("massive_correction_params requires m2 >= 0");
    const double root = std::sqrt(m2 * (m2 + 4.0));
    const double c0 = 0.5 * (m2 + 2.0 + root);
    // cosh γ_k ≈ 1 + m²/2 + π²k²/(2M²) to leading order in k/M
    const double c1 = std::numbers::pi * std::numbers::pi * (1.0 + (m2 + 2.0) / root);
    return {c0, c1};
}

/// Limit of Σ_k ln(1 - ξ_k^{-2N}) for large M; exponentially small in N.
/// Not part of massive_asymptotic_logdet's total.
inline double s2_massive_correction(double m2, std::size_t n, std::size_t m) {
    if (!(m2 > 0.0)) throw DomainError("s2_massive_correction requires m2 > 0");
    const auto [c0, c1] = massive_correction_params(m2);
    const double nn = static_cast<double>(n);
    const double mm = static_cast<double>(m);
    const double lead = -2.0 * nn * std::log(c0);
    // terms decrease in k; stop once they no longer move the sum
    CompensatedSum acc;
    for (std::size_t k = 1;; ++k) {
        const double kk = static_cast<double>(k);
        const double term = std::log1p(-std::exp(lead - c1 * nn * kk * kk / (c0 * mm * mm)));
        acc += term;
        if (std::fabs(term) <= 1e-17 * std::fabs(acc.value())) break;
    }
    return acc.value();
}

inline AsymptoticBreakdown massive_asymptotic_logdet(double m2, std::size_t n, std::size_t m) {
    if (!(m2 > 0.0)) throw DomainError("massive_asymptotic_logdet requires m2 > 0");
    if (n < 2 || m < 2) throw DomainError("massive_asymptotic_logdet requires N, M >= 2");
    const double nn = static_cast<double>(n);
    const double mm = static_cast<double>(m);
    AsymptoticBreakdown b;
    b.area_term = nn * mm * quad_I1(m2);
    b.perimeter_term = -0.5 * (nn + mm) * g_of_m(m2);
    b.constant_term = 0.25 * (std::log(m2) + 2.0 * std::log(m2 + 4.0) + std::log(m2 + 8.0));
    return with_total(b);
}

inline AsymptoticBreakdown massless_asymptotic_logdet(std::size_t n, std::size_t m) {
    if (n < 2 || m < 2) throw DomainError("massless_asymptotic_logdet requires N, M >= 2");
    const double nn = static_cast<double>(n);
    const double mm = static_cast<double>(m);
    const double ratio = nn / mm;
    const double log_q = -2.0 * std::numbers::pi * ratio;
    AsymptoticBreakdown b;
    b.area_term = massless_area_density() * nn * mm;
    b.perimeter_term = -(nn + mm) * std::log1p(std::numbers::sqrt2);
    b.log_term = -0.25 * std::log(nn * mm);
    b.constant_term = 0.5 * std::log(4.0 * std::numbers::sqrt2);
    b.modular_term = log_q / 24.0 + 0.25 * std::log(ratio) + log_euler_product(std::exp(log_q));
    return with_total(b);
}

} // namespace gydet
