#pragma once

// Command-line front end: det / asym / bench / verify. Kept in a header so
// tests can drive it in-process through run_cli().

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <Eigen/Core>

#include "gydet/asymptotics.hpp"
#include "gydet/bench.hpp"
#include "gydet/errors.hpp"
#include "gydet/exact_oracle.hpp"
#include "gydet/gy_discrete.hpp"
#include "gydet/lattice.hpp"
#include "gydet/verification.hpp"

namespace gydet::cli {

enum ExitCode : int { ok = 0, usage = 1, singular = 2, verify_failed = 3 };

/// Ordered key/value writer for flat JSON objects. Values are emitted raw, so
/// callers pass already-encoded JSON (numbers, quoted strings, nested objects).
class JsonObject {
public:
    JsonObject& raw(const std::string& key, std::string value) {
        fields_.emplace_back(key, std::move(value));
        return *this;
    }
    JsonObject& num(const std::string& key, double v) { return raw(key, number(v)); }
    JsonObject& num(const std::string& key, std::size_t v) { return raw(key, std::to_string(v)); }
    JsonObject& num(const std::string& key, int v) { return raw(key, std::to_string(v)); }
    JsonObject& str(const std::string& key, const std::string& v) { return raw(key, quote(v)); }
    JsonObject& boolean(const std::string& key, bool v) { return raw(key, v ? "true" : "false"); }
    JsonObject& null(const std::string& key) { return raw(key, "null"); }

    std::string dump() const {
        std::string s = "{";
        for (std::size_t i = 0; i < fields_.size(); ++i) {
            if (i) s += ", ";
            s += quote(fields_[i].first) + ": " + fields_[i].second;
        }
        return s + "}";
    }

    static std::string number(double v) {
        if (!std::isfinite(v)) return "null";
        return fmt17(v);
    }

    static std::string quote(const std::string& s) {
        std::string out = "\"";
        for (char c : s) {
            switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
            }
        }
        return out + "\"";
    }

private:
    std::vector<std::pair<std::string, std::string>> fields_;
};

struct RunRecord {
    std::string method;
    JsonObject inputs;
    double log_abs_det = NAN;
    int sign = 0;
    double wall_time_seconds = 0.0;
    JsonObject diagnostics;

    std::string to_json() const {
        JsonObject o;
        o.str("method", method)
            .raw("inputs", inputs.dump())
            .num("log_abs_det", log_abs_det)
            .num("sign", sign)
            .num("wall_time_seconds", wall_time_seconds)
            .raw("diagnostics", diagnostics.dump());
        return o.dump();
    }
};

/// Thread count from GYDET_THREADS, or 1 when unset or malformed.
inline int default_threads() {
    const char* env = std::getenv("GYDET_THREADS");
    if (!env || !*env) return 1;
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    return (*end == '\0' && n >= 1 && n <= 4096) ? static_cast<int>(n) : 1;
}

class UsageError : public Error {
public:
    using Error::Error;
};

struct DetArgs {
    int dim = 2;
    std::size_t n = 0;
    std::size_t m = 0;
    std::optional<double> mass2;
    std::string potential_file;
    std::optional<std::uint64_t> seed;
    std::vector<double> range;
    std::string method = "gy-a";
};

inline RunRecord cmd_det(const DetArgs& a) {
    std::vector<std::string> conflicts;
    const int sources = (a.mass2 ? 1 : 0) + (a.potential_file.empty() ? 0 : 1) + (a.seed ? 1 : 0);
    if (sources > 1) conflicts.push_back("--mass2, --potential-file and --random-seed are mutually exclusive");
    if (!a.range.empty() && !a.seed) conflicts.push_back("--random-range requires --random-seed");
    const bool closed_form = a.method == "eigenproduct" || a.method == "sinh-product";
    if (closed_form && a.dim != 2) conflicts.push_back(a.method + " requires --dim 2");
    if (closed_form && (!a.potential_file.empty() || a.seed))
        conflicts.push_back(a.method + " requires a constant --mass2 potential");
    if (!conflicts.empty()) {
        std::string msg = "incompatible flags:";
        for (const auto& c : conflicts) msg += "\n  " + c;
        throw UsageError(msg);
    }

    const std::size_t m = a.m ? a.m : a.n;
    const double m2 = a.mass2.value_or(0.0);
    double lo = 0.0, hi = 1.0;
    if (a.range.size() == 2) {
        lo = a.range[0];
        hi = a.range[1];
    }

    RunRecord rec;
    rec.method = a.method;
    rec.inputs.num("d", a.dim).num("N", a.n).num("M", a.dim == 1 ? std::size_t{0} : m);
    if (!a.potential_file.empty())
        rec.inputs.str("potential", "file:" + a.potential_file);
    else if (a.seed)
        rec.inputs.str("potential", "uniform[" + fmt17(lo) + "," + fmt17(hi) + ")");
    else
        rec.inputs.str("potential", "constant:" + fmt17(m2));
    if (a.seed)
        rec.inputs.raw("seed", std::to_string(*a.seed));
    else
        rec.inputs.null("seed");

    const auto t0 = std::chrono::steady_clock::now();
    LogDet r;
    if (closed_form) {
        r = a.method == "eigenproduct" ? eigenproduct_logdet_2d(m2, a.n, m) : sinh_product_logdet(m2, a.n, m);
    } else {
        const LatticeSpec spec(a.dim, a.n, m);
        const PotentialField pot = !a.potential_file.empty() ? PotentialField::from_file(spec, a.potential_file)
                                   : a.seed                  ? PotentialField::random(spec, *a.seed, lo, hi)
                                                             : PotentialField::constant(spec, m2);
        if (a.method == "gy-a")
            r = matrix_logdet_Aform(pot);
        else if (a.method == "gy-y")
            r = matrix_logdet_Yform(pot);
        else
            r = dense_logdet(pot);
    }
    rec.wall_time_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    rec.log_abs_det = r.log_abs;
    rec.sign = r.sign;
    rec.diagnostics.str("route", std::string(to_string(r.method)));
    if (std::isfinite(r.min_pivot))
        rec.diagnostics.num("min_pivot", r.min_pivot);
    else
        rec.diagnostics.null("min_pivot");
    rec.diagnostics.num("rescalings", r.rescalings);
    return rec;
}

inline std::string cmd_asym(double m2, std::size_t n, std::size_t m, bool with_exact) {
    const AsymptoticBreakdown b = m2 == 0.0 ? massless_asymptotic_logdet(n, m) : massive_asymptotic_logdet(m2, n, m);
    JsonObject o;
    o.str("route", m2 == 0.0 ? "massless" : "massive")
        .num("mass2", m2)
        .num("N", n)
        .num("M", m)
        .num("area", b.area_term)
        .num("perimeter", b.perimeter_term)
        .num("log", b.log_term)
        .num("constant", b.constant_term)
        .num("modular", b.modular_term)
        .num("total", b.total);
    if (with_exact) {
        const LogDet e = m2 == 0.0 ? eigenproduct_logdet_2d(m2, n, m) : sinh_product_logdet(m2, n, m);
        o.str("exact_method", std::string(to_string(e.method))).num("exact", e.log_abs).num("discrepancy", b.total - e.log_abs);
    }
    return o.dump();
}

/// Parses argv and runs one subcommand. Data goes to `out`, messages to `err`.
inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Lattice determinants via Gelfand-Yaglom recursions", "gydet"};
    app.require_subcommand(1);
    int threads = default_threads();
    app.add_option("--threads", threads, "Eigen thread count (default $GYDET_THREADS or 1)")->check(CLI::PositiveNumber);

    DetArgs det;
    auto* det_cmd = app.add_subcommand("det", "Log-determinant of -Laplacian + V on a lattice");
    det_cmd->add_option("--dim", det.dim)->check(CLI::Range(1, 8));
    det_cmd->add_option("--size-n", det.n)->required()->check(CLI::Range(std::size_t{2}, std::size_t{1} << 40));
    det_cmd->add_option("--size-m", det.m, "transverse size (default: N)")->check(CLI::Range(std::size_t{2}, std::size_t{1} << 40));
    det_cmd->add_option("--mass2", det.mass2);
    det_cmd->add_option("--potential-file", det.potential_file);
    det_cmd->add_option("--random-seed", det.seed);
    det_cmd->add_option("--random-range", det.range)->expected(2)->delimiter(',');
    det_cmd->add_option("--method", det.method)
        ->check(CLI::IsMember({"gy-a", "gy-y", "dense", "eigenproduct", "sinh-product"}));

    double asym_m2 = 0.0;
    std::size_t asym_n = 0, asym_m = 0;
    bool with_exact = false;
    auto* asym_cmd = app.add_subcommand("asym", "Large-lattice asymptotic expansion of the 2D log-determinant");
    asym_cmd->add_option("--mass2", asym_m2)->required()->check(CLI::NonNegativeNumber);
    asym_cmd->add_option("--size-n", asym_n)->required()->check(CLI::Range(std::size_t{2}, std::size_t{1} << 30));
    asym_cmd->add_option("--size-m", asym_m)->required()->check(CLI::Range(std::size_t{2}, std::size_t{1} << 30));
    asym_cmd->add_flag("--with-exact", with_exact, "also report the exact value and discrepancy");

    BenchConfig bench;
    bench.sizes = {16, 24, 32, 48};
    std::size_t bench_threads = 0;
    auto* bench_cmd = app.add_subcommand("bench", "Timing sweep, CSV on stdout");
    bench_cmd->add_option("--dim", bench.dim)->check(CLI::Range(1, 4));
    bench_cmd->add_option("--sizes", bench.sizes)->delimiter(',');
    bench_cmd->add_option("--methods", bench.methods)->delimiter(',')->check(CLI::IsMember({"gy-a", "dense"}));
    bench_cmd->add_option("--repeats", bench.repeats)->check(CLI::PositiveNumber);
    bench_cmd->add_option("--seed", bench.seed);
    bench_cmd->add_option("--dense-cap", bench.dense_cap);
    bench_cmd->add_option("--threads", bench_threads)->check(CLI::PositiveNumber);

    bool quick = false, inject_fault = false;
    std::vector<std::string> only;
    auto* verify_cmd = app.add_subcommand("verify", "Run the cross-method verification suite");
    verify_cmd->add_flag("--quick", quick, "small-lattice subset");
    verify_cmd->add_option("--only", only, "check ids, e.g. C03")->delimiter(',');
    verify_cmd->add_flag("--inject-gamma-fault", inject_fault)->group("");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return ok;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help();
        return ok;
    } catch (const CLI::ParseError& e) {
        err << "gydet: " << e.what() << '\n';
        return usage;
    }

    if (bench_threads) threads = static_cast<int>(bench_threads);
    Eigen::setNbThreads(threads);

    try {
        if (*det_cmd) {
            out << cmd_det(det).to_json() << '\n';
        } else if (*asym_cmd) {
            out << cmd_asym(asym_m2, asym_n, asym_m, with_exact) << '\n';
        } else if (*bench_cmd) {
            write_bench_csv(out, run_bench(bench));
        } else if (*verify_cmd) {
            VerifyOptions opt;
            opt.quick = quick;
            if (inject_fault)
                opt.gamma = [](double m2, double lambda) {
                    GammaValue g = gamma_k(m2, lambda);
                    g.gamma *= 1.01;
                    return g;
                };
            bool all = true;
            for (const auto& r : run_checks(opt, only)) {
                print_check(out, r);
                if (!r.pass) {
                    all = false;
                    err << "gydet: check " << r.id << " (" << r.name << ") failed\n";
                }
            }
            return all ? ok : verify_failed;
        }
    } catch (const UsageError& e) {
        err << "gydet: " << e.what() << '\n';
        return usage;
    } catch (const SingularCrossing& e) {
        err << "gydet: " << e.what() << '\n';
        return singular;
    } catch (const DomainError& e) {
        err << "gydet: " << e.what() << '\n';
        return usage;
    } catch (const SizeError& e) {
        err << "gydet: " << e.what() << '\n';
        return usage;
    } catch (const std::exception& e) {
        err << "gydet: " << e.what() << '\n';
        return usage;
    }
    return ok;
}

} // namespace gydet::cli
