#pragma once

// Cross-method verification suite. Each check is one exit criterion with its
// tolerance fixed here; `verify` on the command line and the acceptance
// test binary both run this list.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <ostream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "gydet/asymptotics.hpp"
#include "gydet/bench.hpp"
#include "gydet/continuum.hpp"
#include "gydet/exact_oracle.hpp"
#include "gydet/gy_discrete.hpp"
#include "gydet/lattice.hpp"

namespace gydet {

struct VerifyOptions {
    /// Small-lattice subset only.
    bool quick = false;
    /// γ_k used by the sinh-product route; swapped out by fault-injection tests.
    GammaFunction gamma = gamma_k;
};

struct CheckOutcome {
    bool pass = true;
    std::string detail;
};

struct Check {
    std::string id;
    std::string name;
    bool in_quick;
    std::function<CheckOutcome(const VerifyOptions&)> run;
};

struct CheckResult {
    std::string id;
    std::string name;
    bool pass;
    std::string detail;
    double seconds;
};

namespace detail {

// Collects failures; the first few are kept for the report line.
class Tally {
public:
    void expect(bool ok, const std::string& what) {
        ++total_;
        if (ok) return;
        ++failed_;
        if (failed_ <= 3) msg_ << (failed_ > 1 ? "; " : "") << what;
    }
    void note(const std::string& s) { notes_ << (notes_.tellp() > 0 ? "; " : "") << s; }
    CheckOutcome outcome() const {
        CheckOutcome o;
        o.pass = failed_ == 0;
        std::ostringstream d;
        if (o.pass)
            d << total_ << " assertions";
        else
            d << failed_ << "/" << total_ << " failed: " << msg_.str();
        if (!notes_.str().empty()) d << " [" << notes_.str() << "]";
        o.detail = d.str();
        return o;
    }

private:
    std::size_t total_ = 0;
    std::size_t failed_ = 0;
    std::ostringstream msg_;
    std::ostringstream notes_;
};

inline std::string sci(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", x);
    return buf;
}

inline double rel_gap(double a, double b) { return std::fabs(a - b) / std::fmax(std::fabs(b), 1e-300); }

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

inline CheckOutcome free_laplacian_1d(const VerifyOptions&) {
    Tally t;
    for (std::size_t n : {2u, 10u, 1000u, 1000000u}) {
        const auto t0 = std::chrono::steady_clock::now();
        const std::vector<double> v(n - 1, 0.0);
        const LogDet r = scalar_logdet(v);
        const double dt = seconds_since(t0);
        const double want = std::log(static_cast<double>(n));
        t.expect(r.sign == 1 && rel_gap(r.log_abs, want) <= 1e-12,
                 "N=" + std::to_string(n) + " rel " + sci(rel_gap(r.log_abs, want)));
        if (n == 1000000u) {
            t.expect(dt < 1.0, "N=1e6 took " + sci(dt) + " s");
            t.note("N=1e6 in " + sci(dt) + " s");
        }
    }
    return t.outcome();
}

inline CheckOutcome fibonacci_1d(const VerifyOptions&) {
    Tally t;
    // det of the n×n tridiagonal (3, -1): d_n = 3 d_{n-1} - d_{n-2}
    std::vector<long long> d = {1, 3};
    for (int i = 2; i <= 9; ++i) d.push_back(3 * d[i - 1] - d[i - 2]);
    for (std::size_t n : {5u, 10u}) {
        const std::vector<double> v(n - 1, 1.0);
        const LogDet r = scalar_logdet(v);
        const double want = static_cast<double>(d[n - 1]);
        const double got = r.value();
        t.expect(rel_gap(got, want) <= 1e-12, "N=" + std::to_string(n) + " det " + std::to_string(got) +
                                                  " vs " + std::to_string(d[n - 1]));
    }
    t.expect(d[4] == 55, "recurrence anchor d_4 = 55");
    return t.outcome();
}

inline CheckOutcome four_way_2d(const VerifyOptions& opt) {
    Tally t;
    const auto t0 = std::chrono::steady_clock::now();
    const std::size_t hi = opt.quick ? 8 : 12;
    std::size_t negatives = 0;
    for (std::size_t n = 2; n <= hi; ++n) {
        for (std::size_t m = 2; m <= hi; ++m) {
            const LatticeSpec spec(2, n, m);
            const std::string tag = "(" + std::to_string(n) + "," + std::to_string(m) + ")";
            for (double m2 : {0.0, 1.0}) {
                const auto pot = PotentialField::constant(spec, m2);
                const LogDet all[] = {matrix_logdet_Aform(pot), matrix_logdet_Yform(pot), dense_logdet(pot),
                                      eigenproduct_logdet_2d(m2, n, m), sinh_product_logdet(m2, n, m, opt.gamma)};
                for (std::size_t a = 0; a < 5; ++a) {
                    t.expect(all[a].sign == 1, std::string(to_string(all[a].method)) + " sign at " + tag);
                    for (std::size_t b = a + 1; b < 5; ++b)
                        t.expect(agree(all[a], all[b], 1e-10),
                                 std::string(to_string(all[a].method)) + " vs " + std::string(to_string(all[b].method)) +
                                     " at " + tag + " m2=" + std::to_string(m2) + " gap " +
                                     sci(log_abs_gap(all[a], all[b])));
                }
            }
            const std::uint64_t seed = 1000 * n + m;
            for (double shift : {0.0, -5.0}) {
                const auto pot = PotentialField::random(spec, seed, -1.0, 1.0).shifted(shift);
                const LogDet a = matrix_logdet_Aform(pot);
                const LogDet y = matrix_logdet_Yform(pot);
                const LogDet d = dense_logdet(pot);
                if (d.sign < 0) ++negatives;
                const std::string w = "random" + tag + " shift " + std::to_string(shift);
                t.expect(agree(a, d, 1e-9), "gy-a vs dense " + w + " gap " + sci(log_abs_gap(a, d)));
                t.expect(agree(y, d, 1e-9), "gy-y vs dense " + w + " gap " + sci(log_abs_gap(y, d)));
                t.expect(agree(a, y, 1e-9), "gy-a vs gy-y " + w);
            }
        }
    }
    t.expect(negatives > 0, "no negative determinant was exercised");
    const double dt = seconds_since(t0);
    t.expect(dt < 30.0, "runtime " + sci(dt) + " s");
    t.note(std::to_string(negatives) + " negative-determinant cases, " + sci(dt) + " s");
    return t.outcome();
}

inline CheckOutcome sinh_anchors(const VerifyOptions& opt) {
    Tally t;
    struct Anchor {
        double m2;
        std::size_t n;
        double want;
    };
    for (const Anchor& a : {Anchor{0.0, 2, std::log(4.0)}, Anchor{0.0, 3, std::log(192.0)}, Anchor{1.0, 2, std::log(5.0)}}) {
        const LogDet r = sinh_product_logdet(a.m2, a.n, a.n, opt.gamma);
        t.expect(r.sign == 1 && std::fabs(r.log_abs - a.want) <= 1e-12 * std::fabs(a.want),
                 "sinh-product m2=" + std::to_string(a.m2) + " N=M=" + std::to_string(a.n) + " off by " +
                     sci(r.log_abs - a.want));
    }
    return t.outcome();
}

inline CheckOutcome i2_identity(const VerifyOptions&) {
    Tally t;
    for (double m2 : {0.01, 0.1, 1.0, 4.0, 25.0}) {
        const double gap = std::fabs(quad_I2(m2) + 0.5 * g_of_m(m2));
        t.expect(gap <= 1e-9, "m2=" + std::to_string(m2) + " gap " + sci(gap));
    }
    return t.outcome();
}

inline CheckOutcome massless_area_density_check(const VerifyOptions&) {
    Tally t;
    const double literal = 0.915965594177219015;
    t.expect(std::fabs(catalan_constant() - literal) <= 1e-14, "Catalan series off by " + sci(catalan_constant() - literal));
    const double density = massless_area_density();
    for (std::size_t n : {32u, 64u, 128u}) {
        const double per_site = eigenproduct_logdet_2d(0.0, n, n).log_abs / static_cast<double>(n * n);
        const double gap = std::fabs(per_site - density);
        t.expect(gap <= 3.0 / static_cast<double>(n), "N=" + std::to_string(n) + " gap " + sci(gap));
    }
    return t.outcome();
}

inline CheckOutcome massless_accuracy(const VerifyOptions&) {
    Tally t;
    double prev = INFINITY;
    for (std::size_t n : {3u, 8u, 16u, 32u, 64u}) {
        const double gap = std::fabs(massless_asymptotic_logdet(n, n).total - eigenproduct_logdet_2d(0.0, n, n).log_abs);
        if (n == 3) t.expect(gap <= 0.005, "N=M=3 gap " + sci(gap));
        if (n == 64) t.expect(gap < 1e-3, "N=M=64 gap " + sci(gap));
        t.expect(gap < prev, "not decreasing at N=" + std::to_string(n));
        t.note("N=" + std::to_string(n) + ":" + sci(gap));
        prev = gap;
    }
    return t.outcome();
}

inline CheckOutcome massive_accuracy(const VerifyOptions& opt) {
    Tally t;
    double prev = NAN;
    for (std::size_t n : {16u, 32u, 64u, 128u}) {
        const double gap = std::fabs(massive_asymptotic_logdet(1.0, n, n).total -
                                     sinh_product_logdet(1.0, n, n, opt.gamma).log_abs);
        if (!std::isnan(prev)) t.expect(gap <= 0.6 * prev, "N=" + std::to_string(n) + " ratio " + sci(gap / prev));
        t.note("N=" + std::to_string(n) + ":" + sci(gap));
        prev = gap;
    }
    return t.outcome();
}

inline CheckOutcome exchange_symmetry(const VerifyOptions& opt) {
    Tally t;
    for (auto [n, m] : {std::pair<std::size_t, std::size_t>{3, 7}, {4, 16}, {5, 9}}) {
        const std::string tag = "(" + std::to_string(n) + "," + std::to_string(m) + ")";
        const double gap = std::fabs(massless_asymptotic_logdet(n, m).total - massless_asymptotic_logdet(m, n).total);
        t.expect(gap <= 1e-12, "massless total " + tag + " gap " + sci(gap));
        for (double m2 : {0.0, 1.0}) {
            const LogDet s = sinh_product_logdet(m2, n, m, opt.gamma);
            const LogDet e = eigenproduct_logdet_2d(m2, m, n);
            t.expect(agree(s, e, 1e-10), "sinh-product" + tag + " vs swapped eigenproduct, m2=" + std::to_string(m2) +
                                             " gap " + sci(log_abs_gap(s, e)));
        }
    }
    return t.outcome();
}

inline CheckOutcome continuum_1d(const VerifyOptions&) {
    Tally t;
    for (double ml : {0.5, 1.0, 5.0}) {
        const auto pot = Potential1D::constant(ml * ml, 1.0);
        const double want = std::log(std::sinh(ml) / ml);
        const RatioResult lin = ratio_logdet_1d(pot, 1e-12);
        const RatioResult ric = ratio_logdet_1d_riccati(pot, 1e-12);
        t.expect(std::fabs(lin.log_ratio - want) <= 1e-8, "mL=" + std::to_string(ml) + " linear off " + sci(lin.log_ratio - want));
        t.expect(std::fabs(ric.log_ratio - lin.log_ratio) <= 1e-6,
                 "mL=" + std::to_string(ml) + " Riccati vs linear " + sci(ric.log_ratio - lin.log_ratio));
    }
    return t.outcome();
}

inline CheckOutcome continuum_2d(const VerifyOptions&) {
    Tally t;
    const double c = 3.0, len = 1.0, width = 1.0;
    const double w0 = std::numbers::pi / width;
    const double w = std::sqrt(c + w0 * w0);
    const double want = (log_sinh(w * len) - std::log(w)) - (log_sinh(w0 * len) - std::log(w0));
    const auto rank1 = TransversePotential2D::rank_one(c, 1, width);
    for (std::size_t k : {1u, 4u, 16u}) {
        const double got = ratio_logdet_2d_truncated(rank1, len, k, {.tol = 1e-11}).log_ratio;
        t.expect(std::fabs(got - want) <= 1e-8, "rank-1 K=" + std::to_string(k) + " off " + sci(got - want));
    }
    const double m2 = 1.0;
    const auto mass = TransversePotential2D::constant(m2, width);
    const double v64 = ratio_logdet_2d_truncated(mass, len, 64, {.tol = 1e-9}).log_ratio;
    const double v128 = ratio_logdet_2d_truncated(mass, len, 128, {.tol = 1e-9}).log_ratio;
    const double predicted = m2 * width * len / (2.0 * std::numbers::pi) * std::numbers::ln2;
    const double rel = std::fabs((v128 - v64) - predicted) / predicted;
    t.expect(rel <= 0.2, "truncation gap " + sci(v128 - v64) + " vs " + sci(predicted));
    t.note("gap " + sci(v128 - v64) + " predicted " + sci(predicted));
    return t.outcome();
}

inline CheckOutcome scaling_claim(const VerifyOptions&) {
    Tally t;
    BenchConfig gy{.dim = 2, .sizes = {16, 24, 32, 48, 64, 96, 128}, .methods = {"gy-a"}, .repeats = 3, .seed = 7};
    BenchConfig dense{.dim = 2, .sizes = {16, 24, 32, 40, 48}, .methods = {"gy-a", "dense"}, .repeats = 3, .seed = 7};
    const BenchReport rg = run_bench(gy);
    const BenchReport rd = run_bench(dense);
    const double sg = rg.slopes.at("gy-a");
    const double sd = rd.slopes.at("dense");
    t.expect(sg >= 3.0 && sg <= 4.5, "gy-a slope " + sci(sg));
    t.expect(sd >= 5.0 && sd <= 6.8, "dense slope " + sci(sd));
    for (const auto& a : rd.rows) {
        if (a.method != "dense" || !a.log_abs_det) continue;
        for (const auto& b : rd.rows)
            if (b.method == "gy-a" && b.n == a.n)
                t.expect(rel_gap(*b.log_abs_det, *a.log_abs_det) <= 1e-9, "N=" + std::to_string(a.n) + " values differ");
    }
    t.note("slope gy-a " + sci(sg) + ", dense " + sci(sd));
    return t.outcome();
}

} // namespace detail

inline std::vector<Check> acceptance_checks() {
    using namespace detail;
    return {
        {"C01", "free-laplacian-1d", true, free_laplacian_1d},
        {"C02", "fibonacci-1d", true, fibonacci_1d},
        {"C03", "four-way-agreement-2d", true, four_way_2d},
        {"C04", "sinh-product-anchors", true, sinh_anchors},
        {"C05", "i2-identity", true, i2_identity},
        {"C06", "massless-area-density", true, massless_area_density_check},
        {"C07", "massless-asymptotic-accuracy", true, massless_accuracy},
        {"C08", "massive-asymptotic-accuracy", false, massive_accuracy},
        {"C09", "exchange-symmetry", true, exchange_symmetry},
        {"C10", "continuum-1d", true, continuum_1d},
        {"C11", "continuum-2d", true, continuum_2d},
        {"C12", "scaling-claim", false, scaling_claim},
    };
}

/// Runs the selected checks; an empty `only` selects all (or the quick subset).
inline std::vector<CheckResult> run_checks(const VerifyOptions& opt, const std::vector<std::string>& only = {}) {
    std::vector<CheckResult> out;
    for (const auto& c : acceptance_checks()) {
        if (!only.empty()) {
            if (std::find(only.begin(), only.end(), c.id) == only.end()) continue;
        } else if (opt.quick && !c.in_quick) {
            continue;
        }
        const auto t0 = std::chrono::steady_clock::now();
        CheckOutcome o;
        try {
            o = c.run(opt);
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        out.push_back({c.id, c.name, o.pass, o.detail, detail::seconds_since(t0)});
    }
    return out;
}

inline void print_check(std::ostream& os, const CheckResult& r) {
    char head[96];
    std::snprintf(head, sizeof head, "%s  %s  %-30s %7.2fs  ", r.pass ? "PASS" : "FAIL", r.id.c_str(), r.name.c_str(),
                  r.seconds);
    os << head << r.detail << '\n';
}

} // namespace gydet
