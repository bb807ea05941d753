#pragma once

// Discrete Gelfand-Yaglom recursions for det(-Δ_d + V) with Dirichlet
// boundaries.
//
// Scalar (d = 1):  a_{n+1} = V_{n+1} + 1 - 1/(a_n + 1),  det H = ∏ (a_k + 1)
//                  y_{n+2} = (2 + V_{n+1}) y_{n+1} - y_n, det H = y_N
// Matrix (K×K):    A_{n+1} = I - (A_n + I)^{-1} + T_{n+1},  det H = ∏ det(A_k + I)
//                  Y_{n+2} = (2I + T_{n+1}) Y_{n+1} - Y_n,  det H = det Y_N
// with T_i = -Δ_{d-1} + V_i. The A_0 = ∞ start is the first step
// A_1 = T_1 + I (a_1 = V_1 + 1); Y_0 = 0, Y_1 = I.
//
// The linear term of the Gaussian ansatz vanishes identically for these
// initial conditions, so it is not propagated.

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gydet/errors.hpp"
#include "gydet/lattice.hpp"
#include "gydet/linalg.hpp"
#include "gydet/logdet.hpp"
#include "gydet/special.hpp"

namespace gydet {

struct GYOptions {
    /// |pivot| below this declares a singular crossing.
    double eps_pivot = 1e-300;
    /// Y-form renormalizes once an entry exceeds this magnitude.
    double rescale_threshold = 1e100;
};

/// State after step n of the A-form: `a` is A_n and the accumulators hold
/// log|∏_{k≤n} det(A_k + I)| and its sign.
struct GYState {
    std::size_t n = 0;
    Eigen::MatrixXd a;
    double acc_log = 0.0;
    int acc_sign = 1;
};

/// Y-form progress after Y_{n+1} has been formed. Both matrices carry the
/// common factor exp(-log_scale).
struct YFormStep {
    std::size_t n;
    const Eigen::MatrixXd& y_next;
    const Eigen::MatrixXd& y;
    double log_scale;
};

using GYObserver = std::function<void(const GYState&)>;
using YFormObserver = std::function<void(const YFormStep&)>;

/// y_0..y_N for the potential V_1..V_{N-1}, in plain arithmetic. Meant for
/// small N; throws NonFinite on overflow.
inline std::vector<double> scalar_y_solution(std::span<const double> v) {
    const std::size_t n = v.size() + 1;
    std::vector<double> y(n + 1);
    y[0] = 0.0;
    y[1] = 1.0;
    for (std::size_t k = 0; k + 2 <= n; ++k) {
        if (!std::isfinite(v[k])) throw NonFinite("potential value is not finite");
        y[k + 2] = (2.0 + v[k]) * y[k + 1] - y[k];
        if (!std::isfinite(y[k + 2]))
            throw NonFinite("y_n overflowed at n = " + std::to_string(k + 2) + "; use scalar_logdet");
    }
    return y;
}

/// Scalar a_n recursion with sign-tracked log accumulation.
inline LogDet scalar_logdet(std::span<const double> v, const GYOptions& opt = {}) {
    if (v.empty()) throw DomainError("scalar_logdet requires at least one interior site");
    LogDet out;
    out.method = Method::scalar_a;
    // a_{n+1} = V_{n+1} + 1 - 1/(a_n + 1) is evaluated as V_{n+1} + a_n/(a_n + 1)
    // and the factor as log1p(a_n): a_n ~ 1/n for small V, and this keeps its
    // relative precision instead of rounding against 1 at every step.
    CompensatedSum acc;
    double a = v[0] + 1.0;
    for (std::size_t k = 1; k <= v.size(); ++k) {
        const double p = a + 1.0;
        if (!std::isfinite(p)) throw NonFinite("a_n left the finite range at slice " + std::to_string(k));
        const double mag = std::fabs(p);
        out.min_pivot = std::fmin(out.min_pivot, mag);
        if (mag < opt.eps_pivot) throw SingularCrossing(k, mag);
        acc += a > -1.0 ? std::log1p(a) : std::log(mag);
        if (p < 0) out.sign = -out.sign;
        if (k < v.size()) a = v[k] + a / p;
    }
    out.log_abs = acc.value();
    return out;
}

/// Matrix A_n recursion. Each A_n + I is factored with symmetric
/// (Bunch-Kaufman) pivoting; a non-symmetric iterate falls back to LU.
inline LogDet matrix_logdet_Aform(const PotentialField& pot, const GYOptions& opt = {},
                                  const GYObserver& observer = {}) {
    const LatticeSpec& spec = pot.spec();
    const auto k = static_cast<Eigen::Index>(spec.k());
    const Eigen::MatrixXd lap = transverse_laplacian(spec);
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(k, k);

    LogDet out;
    out.method = Method::matrix_a;
    GYState st;
    st.a = transverse_slice(lap, pot, 1) + id;
    for (std::size_t n = 1; n <= spec.slices(); ++n) {
        Eigen::MatrixXd b = st.a + id;
        if (!b.allFinite()) throw NonFinite("A_n left the finite range at slice " + std::to_string(n));

        Eigen::MatrixXd binv;
        linalg::DetSummary det;
        const double scale = b.cwiseAbs().maxCoeff();
        if (linalg::asymmetry(b) <= 64.0 * std::numeric_limits<double>::epsilon() * scale) {
            linalg::BunchKaufman f(std::move(b));
            det = f.det();
            if (det.min_pivot < opt.eps_pivot) throw SingularCrossing(n, det.min_pivot);
            if (n < spec.slices()) binv = f.inverse();
        } else {
            linalg::PivotedLU f(b);
            det = f.det();
            if (det.min_pivot < opt.eps_pivot) throw SingularCrossing(n, det.min_pivot);
            if (n < spec.slices()) binv = f.solve(id);
        }
        out.min_pivot = std::fmin(out.min_pivot, det.min_pivot);
        st.n = n;
        st.acc_log += det.log_abs;
        st.acc_sign *= det.sign;
        if (observer) observer(st);

        if (n < spec.slices()) {
            Eigen::MatrixXd next = id - binv + transverse_slice(lap, pot, n + 1);
            st.a = 0.5 * (next + next.transpose());
        }
    }
    out.log_abs = st.acc_log;
    out.sign = st.acc_sign;
    return out;
}

/// Matrix solution Y_n of (H Y)_n = 0, renormalized by powers of two when it
/// grows past the threshold; det H = det Y_N · exp(K · log_scale).
inline LogDet matrix_logdet_Yform(const PotentialField& pot, const GYOptions& opt = {},
                                  const YFormObserver& observer = {}) {
    const LatticeSpec& spec = pot.spec();
    const auto k = static_cast<Eigen::Index>(spec.k());
    const Eigen::MatrixXd lap = transverse_laplacian(spec);

    LogDet out;
    out.method = Method::matrix_y;
    Eigen::MatrixXd y_prev = Eigen::MatrixXd::Zero(k, k);
    Eigen::MatrixXd y = Eigen::MatrixXd::Identity(k, k);
    double log_scale = 0.0;
    for (std::size_t n = 1; n <= spec.slices(); ++n) {
        Eigen::MatrixXd step = transverse_slice(lap, pot, n);
        step.diagonal().array() += 2.0;
        Eigen::MatrixXd y_next = step * y - y_prev;
        if (!y_next.allFinite()) throw NonFinite("Y_n left the finite range at n = " + std::to_string(n + 1));
        y_prev = std::move(y);
        y = std::move(y_next);

        const double big = y.cwiseAbs().maxCoeff();
        if (big > opt.rescale_threshold) {
            int e = 0;
            std::frexp(big, &e);
            y = std::ldexp(1.0, -e) * y;
            y_prev = std::ldexp(1.0, -e) * y_prev;
            log_scale += e * std::log(2.0);
            ++out.rescalings;
        }
        if (observer) observer(YFormStep{n, y, y_prev, log_scale});
    }
    linalg::PivotedLU f(y);
    const auto& det = f.det();
    out.min_pivot = det.min_pivot;
    if (det.sign == 0 || det.min_pivot < opt.eps_pivot) throw SingularCrossing(spec.slices(), det.min_pivot);
    const double total = det.log_abs + static_cast<double>(k) * log_scale;
    if (!std::isfinite(total)) throw NonFinite("rescale bookkeeping overflowed");
    out.log_abs = total;
    out.sign = det.sign;
    return out;
}

} // namespace gydet
