#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <queue>
#include <vector>

#include "gydet/errors.hpp"
#include "gydet/special.hpp"

namespace gydet {

struct QuadratureOptions {
    double abs_tol = 1e-12;
    int max_depth = 60;
    std::size_t max_intervals = 20000;
};

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    std::size_t intervals = 0;
};

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss-Legendre rule (QUADPACK
// constants), nodes in descending order; odd indices are the Gauss nodes.
inline constexpr std::array<double, 8> gk15_nodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000,
};
inline constexpr std::array<double, 8> gk15_kronrod_weights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
};
inline constexpr std::array<double, 4> gk15_gauss_weights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
};

struct Panel {
    double a;
    double b;
    double value;
    double error;
    int depth;
    bool operator<(const Panel& o) const { return error < o.error; }
};

template <class F>
Panel gk15(F& f, double a, double b, int depth) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double fc = f(c);
    double kron = fc * gk15_kronrod_weights[7];
    double gauss = fc * gk15_gauss_weights[3];
    for (int i = 0; i < 7; ++i) {
        const double dx = h * gk15_nodes[i];
        const double s = f(c - dx) + f(c + dx);
        kron += gk15_kronrod_weights[i] * s;
        if (i % 2 == 1) gauss += gk15_gauss_weights[i / 2] * s;
    }
    return Panel{a, b, kron * h, std::fabs((kron - gauss) * h), depth};
}

} // namespace detail

/// Globally adaptive Gauss-Kronrod (7-15) integration of f over [a, b]:
/// the panel with the largest error estimate is bisected until the summed
/// estimate is below `abs_tol`. Throws QuadratureError when the depth or
/// panel budget runs out first.
template <class F>
QuadratureResult integrate(F&& f, double a, double b, const QuadratureOptions& opt = {}) {
    std::priority_queue<detail::Panel> heap;
    std::vector<detail::Panel> frozen;
    const auto first = detail::gk15(f, a, b, 0);
    double total_err = first.error;
    heap.push(first);
    std::size_t count = 1;
    while (total_err > opt.abs_tol && !heap.empty()) {
        const detail::Panel p = heap.top();
        heap.pop();
        if (p.depth >= opt.max_depth) {
            frozen.push_back(p);
            continue;
        }
        if (count >= opt.max_intervals) {
            heap.push(p);
            break;
        }
        const double mid = 0.5 * (p.a + p.b);
        const auto left = detail::gk15(f, p.a, mid, p.depth + 1);
        const auto right = detail::gk15(f, mid, p.b, p.depth + 1);
        total_err += left.error + right.error - p.error;
        heap.push(left);
        heap.push(right);
        ++count;
    }
    CompensatedSum value, err;
    for (const auto& p : frozen) {
        value += p.value;
        err += p.error;
    }
    while (!heap.empty()) {
        value += heap.top().value;
        err += heap.top().error;
        heap.pop();
    }
    QuadratureResult out{value.value(), err.value(), count};
    if (!std::isfinite(out.value)) throw QuadratureError("integrand produced a non-finite value", out.error_estimate);
    if (out.error_estimate > opt.abs_tol)
        throw QuadratureError("adaptive quadrature did not converge", out.error_estimate);
    return out;
}

} // namespace gydet
