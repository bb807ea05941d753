#pragma once

#include <algorithm>
#include <limits>
#include <cmath>
#include <cstddef>
#include <string>

#include <Eigen/Dense>

#include "gydet/errors.hpp"

namespace gydet {

struct OdeOptions {
    /// Local error target per accepted step, in the units of the error norm.
    double tol = 1e-10;
    /// Step size never exceeds (x1 - x0) / min_steps.
    std::size_t min_steps = 64;
    /// Optional first step; defaults to the maximum step.
    double first_step = 0.0;
    std::size_t max_steps = 5'000'000;
};

struct OdeResult {
    Eigen::VectorXd y;
    std::size_t steps = 0;
    std::size_t rejected = 0;
    /// Sum of the accepted local error estimates.
    double error_estimate = 0.0;
};

/// Classical fourth-order Runge-Kutta with step doubling: each step is taken
/// once with h and twice with h/2, the difference estimates the local error,
/// and the two-half-step result is Richardson-extrapolated.
///
/// `norm(diff, y)` maps a difference vector to a scalar error;
/// `post(x, y)` runs after every accepted step (renormalization hooks) and
/// may modify y.
template <class Rhs, class Norm, class Post>
OdeResult integrate_rk4(Rhs&& f, double x0, double x1, Eigen::VectorXd y, const OdeOptions& opt,
                        Norm&& norm, Post&& post) {
    auto rk4 = [&f](double x, const Eigen::VectorXd& u, double h) {
        const Eigen::VectorXd k1 = f(x, u);
        const Eigen::VectorXd k2 = f(x + 0.5 * h, u + (0.5 * h) * k1);
        const Eigen::VectorXd k3 = f(x + 0.5 * h, u + (0.5 * h) * k2);
        const Eigen::VectorXd k4 = f(x + h, u + h * k3);
        return Eigen::VectorXd(u + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
    };

    OdeResult out;
    const double span = x1 - x0;
    const double h_max = span / static_cast<double>(opt.min_steps);
    double h = opt.first_step > 0.0 ? std::min(opt.first_step, h_max) : h_max;
    double x = x0;
    while (x < x1) {
        const bool last = x + h >= x1 - 1e-14 * span;
        const double step = last ? x1 - x : h;
        const Eigen::VectorXd full = rk4(x, y, step);
        const Eigen::VectorXd mid = rk4(x, y, 0.5 * step);
        const Eigen::VectorXd halves = rk4(x + 0.5 * step, mid, 0.5 * step);
        const Eigen::VectorXd diff = (halves - full) / 15.0;
        double err = norm(diff, halves);
        if (!std::isfinite(err)) err = std::numeric_limits<double>::infinity();

        if (err <= opt.tol) {
            y = halves + diff;
            x = last ? x1 : x + step;
            out.error_estimate += err;
            ++out.steps;
            post(x, y);
            const double grow = err > 0.0 ? 0.9 * std::pow(opt.tol / err, 0.2) : 4.0;
            h = std::min(h_max, step * std::clamp(grow, 0.2, 4.0));
        } else {
            ++out.rejected;
            h = step * std::clamp(0.9 * std::pow(opt.tol / err, 0.2), 0.1, 0.5);
            if (h < 1e-15 * std::max(1.0, std::fabs(x)))
                throw NonFinite("integrator step size underflow at x = " + std::to_string(x));
        }
        if (out.steps + out.rejected > opt.max_steps)
            throw Error("integrator exceeded " + std::to_string(opt.max_steps) + " steps");
    }
    out.y = std::move(y);
    return out;
}

} // namespace gydet
