#pragma once

// Wall-clock scaling benchmark of the A-form recursion against dense LU.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "gydet/errors.hpp"
#include "gydet/exact_oracle.hpp"
#include "gydet/gy_discrete.hpp"
#include "gydet/lattice.hpp"

namespace gydet {

struct BenchConfig {
    int dim = 2;
    std::vector<std::size_t> sizes;
    std::vector<std::string> methods = {"gy-a", "dense"};
    std::size_t repeats = 3;
    std::uint64_t seed = 1;
    /// Dense rows above this are reported as skipped rather than run.
    std::size_t dense_cap = 2500;
};

struct BenchRow {
    std::string method;
    std::size_t n;
    std::optional<double> median_seconds;
    std::optional<double> log_abs_det;
};

struct BenchReport {
    std::vector<BenchRow> rows;
    /// Least-squares slope of log(time) against log(N), per method.
    std::map<std::string, double> slopes;
};

inline double loglog_slope(const std::vector<std::pair<double, double>>& pts) {
    if (pts.size() < 2) return std::nan("");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& [n, t] : pts) {
        const double x = std::log(n), y = std::log(t);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double c = static_cast<double>(pts.size());
    return (c * sxy - sx * sy) / (c * sxx - sx * sx);
}

inline double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t h = v.size() / 2;
    return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

/// Runs every (method, size) pair on a seeded uniform [0, 1) potential over
/// an N×N×...×N lattice. Timings include operator assembly for dense LU.
inline BenchReport run_bench(const BenchConfig& cfg) {
    if (cfg.repeats < 1) throw DomainError("bench needs at least one repeat");
    BenchReport report;
    for (const auto& method : cfg.methods) {
        if (method != "gy-a" && method != "dense") throw DomainError("bench method must be gy-a or dense: " + method);
        std::vector<std::pair<double, double>> pts;
        for (std::size_t n : cfg.sizes) {
            const LatticeSpec spec(cfg.dim, n, n);
            BenchRow row{method, n, std::nullopt, std::nullopt};
            if (method == "dense" && spec.sites() > cfg.dense_cap) {
                report.rows.push_back(row);
                continue;
            }
            const auto pot = PotentialField::random(spec, cfg.seed, 0.0, 1.0);
            std::vector<double> times;
            for (std::size_t r = 0; r < cfg.repeats; ++r) {
                const auto t0 = std::chrono::steady_clock::now();
                const LogDet ld = method == "gy-a" ? matrix_logdet_Aform(pot) : dense_logdet(pot, cfg.dense_cap);
                times.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
                row.log_abs_det = ld.log_abs;
            }
            row.median_seconds = median(times);
            pts.emplace_back(static_cast<double>(n), *row.median_seconds);
            report.rows.push_back(row);
        }
        report.slopes[method] = loglog_slope(pts);
    }
    return report;
}

inline std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

/// CSV: method,N,median_seconds,log_abs_det, then one "# slope" line per method.
inline void write_bench_csv(std::ostream& out, const BenchReport& report) {
    out << "method,N,median_seconds,log_abs_det\n";
    for (const auto& r : report.rows) {
        out << r.method << ',' << r.n << ',';
        if (r.median_seconds)
            out << fmt17(*r.median_seconds) << ',' << fmt17(*r.log_abs_det) << '\n';
        else
            out << "skipped,skipped\n";
    }
    for (const auto& [method, slope] : report.slopes) out << "# slope " << method << ' ' << fmt17(slope) << '\n';
}

} // namespace gydet
