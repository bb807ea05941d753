#pragma once

// Lattice geometry, potentials and the Dirichlet operator -Δ_d + V on the
// interior sites of a rectangular lattice.
//
// Site ordering: the longitudinal index i = 1..N-1 is slowest; within a
// slice the transverse multi-index (x_1, ..., x_{d-1}), x_j = 1..M-1, is
// laid out row-major with x_{d-1} fastest.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "gydet/errors.hpp"

namespace gydet {

inline constexpr std::size_t default_dense_row_cap = 20000;

/// Dimensionality and extents: N-1 longitudinal interior sites, M-1 interior
/// sites per transverse direction, transverse block size K = (M-1)^(d-1).
class LatticeSpec {
public:
    LatticeSpec(int d, std::size_t n, std::size_t m) : d_(d), n_(n), m_(m) {
        if (d < 1) throw DomainError("lattice dimension must be >= 1");
        if (n < 2) throw DomainError("longitudinal extent N must be >= 2");
        if (m < 2) throw DomainError("transverse extent M must be >= 2");
        k_ = 1;
        for (int j = 1; j < d; ++j) {
            if (k_ > std::numeric_limits<std::size_t>::max() / (m - 1))
                throw SizeError("transverse block size (M-1)^(d-1) overflows");
            k_ *= m - 1;
        }
        if (k_ > std::numeric_limits<std::size_t>::max() / (n - 1))
            throw SizeError("interior site count (N-1)K overflows");
    }

    /// One-dimensional chain; the transverse extent is irrelevant.
    static LatticeSpec chain(std::size_t n) { return LatticeSpec(1, n, 2); }

    int d() const noexcept { return d_; }
    std::size_t n() const noexcept { return n_; }
    std::size_t m() const noexcept { return m_; }
    std::size_t k() const noexcept { return k_; }
    std::size_t slices() const noexcept { return n_ - 1; }
    std::size_t sites() const noexcept { return (n_ - 1) * k_; }

    /// Flat offset of transverse index t (0-based) in slice i (1-based).
    std::size_t site(std::size_t i, std::size_t t) const noexcept { return (i - 1) * k_ + t; }

    /// Stride of transverse direction j (0-based, j < d-1) in the slice layout.
    std::size_t transverse_stride(int j) const noexcept {
        std::size_t s = 1;
        for (int q = j + 1; q < d_ - 1; ++q) s *= m_ - 1;
        return s;
    }

    friend bool operator==(const LatticeSpec&, const LatticeSpec&) = default;

private:
    int d_;
    std::size_t n_;
    std::size_t m_;
    std::size_t k_ = 1;
};

struct ConstantSource {
    double m2;
};
struct SeededRandomSource {
    std::uint64_t seed;
    double lo;
    double hi;
};
struct FileSource {
    std::string path;
};
struct ExplicitSource {};

using PotentialSource = std::variant<ConstantSource, SeededRandomSource, FileSource, ExplicitSource>;

/// Potential values on the (N-1)K interior sites, in site order.
class PotentialField {
public:
    PotentialField(LatticeSpec spec, std::vector<double> values,
                   PotentialSource source = ExplicitSource{})
        : spec_(spec), values_(std::move(values)), source_(std::move(source)) {
        if (values_.size() != spec_.sites())
            throw DomainError("potential has " + std::to_string(values_.size()) +
                              " values, lattice needs " + std::to_string(spec_.sites()));
        for (double v : values_)
            if (!std::isfinite(v)) throw NonFinite("potential contains a non-finite value");
    }

    static PotentialField constant(LatticeSpec spec, double m2) {
        return PotentialField(spec, std::vector<double>(spec.sites(), m2), ConstantSource{m2});
    }

    /// Uniform on [lo, hi) from a 64-bit Mersenne twister, drawn in site order.
    static PotentialField random(LatticeSpec spec, std::uint64_t seed, double lo, double hi) {
        if (!(lo <= hi)) throw DomainError("random potential range requires lo <= hi");
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> dist(lo, hi);
        std::vector<double> v(spec.sites());
        for (double& x : v) x = lo == hi ? lo : dist(rng);
        return PotentialField(spec, std::move(v), SeededRandomSource{seed, lo, hi});
    }

    static PotentialField from_stream(LatticeSpec spec, std::istream& in, const std::string& name);

    static PotentialField from_file(LatticeSpec spec, const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ParseError("cannot open potential file '" + path + "'");
        auto field = from_stream(spec, in, path);
        field.source_ = FileSource{path};
        return field;
    }

    const LatticeSpec& spec() const noexcept { return spec_; }
    const PotentialSource& source() const noexcept { return source_; }
    std::span<const double> values() const noexcept { return values_; }

    /// The K values of longitudinal slice i (1-based).
    std::span<const double> slice(std::size_t i) const noexcept {
        return std::span<const double>(values_).subspan((i - 1) * spec_.k(), spec_.k());
    }

    /// New field with every value shifted by `delta`.
    PotentialField shifted(double delta) const {
        std::vector<double> v = values_;
        for (double& x : v) x += delta;
        return PotentialField(spec_, std::move(v));
    }

    bool is_constant() const noexcept { return std::holds_alternative<ConstantSource>(source_); }

private:
    LatticeSpec spec_;
    std::vector<double> values_;
    PotentialSource source_;
};

// Format: one record per line, "i x_1 ... x_{d-1} value", '#' starts a
// comment line. Every interior site must appear exactly once.
inline PotentialField PotentialField::from_stream(LatticeSpec spec, std::istream& in,
                                                  const std::string& name) {
    const int tdims = spec.d() - 1;
    std::vector<double> values(spec.sites(), 0.0);
    std::vector<char> seen(spec.sites(), 0);
    std::string line;
    std::size_t lineno = 0;
    auto fail = [&](const std::string& msg) {
        throw ParseError(name + ":" + std::to_string(lineno) + ": " + msg);
    };
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream rec(line);
        long long i = 0;
        if (!(rec >> i)) fail("expected longitudinal index");
        if (i < 1 || i > static_cast<long long>(spec.n()) - 1) fail("longitudinal index out of range");
        std::size_t t = 0;
        for (int j = 0; j < tdims; ++j) {
            long long x = 0;
            if (!(rec >> x)) fail("expected " + std::to_string(tdims) + " transverse indices");
            if (x < 1 || x > static_cast<long long>(spec.m()) - 1) fail("transverse index out of range");
            t += static_cast<std::size_t>(x - 1) * spec.transverse_stride(j);
        }
        double v = 0.0;
        if (!(rec >> v)) fail("expected potential value");
        std::string extra;
        if (rec >> extra) fail("trailing token '" + extra + "'");
        const std::size_t s = spec.site(static_cast<std::size_t>(i), t);
        if (seen[s]) fail("duplicate site");
        seen[s] = 1;
        values[s] = v;
    }
    for (std::size_t s = 0; s < seen.size(); ++s)
        if (!seen[s])
            throw ParseError(name + ": missing site " + std::to_string(s / spec.k() + 1) +
                             " (slice) / " + std::to_string(s % spec.k()) + " (transverse offset)");
    return PotentialField(spec, std::move(values));
}

/// Eigenvalues λ_k = -2(1 - cos(πk/M)) of the 1D Dirichlet Laplacian Δ_1,
/// k = 1..M-1, evaluated as -4 sin²(πk/2M).
inline std::vector<double> transverse_eigenvalues(std::size_t m) {
    if (m < 2) throw DomainError("transverse_eigenvalues requires M >= 2");
    std::vector<double> lam(m - 1);
    for (std::size_t k = 1; k < m; ++k) {
        const double s = std::sin(std::numbers::pi * static_cast<double>(k) / (2.0 * static_cast<double>(m)));
        lam[k - 1] = -4.0 * s * s;
    }
    return lam;
}

/// Dense -Δ_{d-1} on one transverse slice (K×K). Empty stencil (zero) for d = 1.
inline Eigen::MatrixXd transverse_laplacian(const LatticeSpec& spec) {
    const auto k = static_cast<Eigen::Index>(spec.k());
    Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(k, k);
    const int tdims = spec.d() - 1;
    if (tdims == 0) return lap;
    const std::size_t side = spec.m() - 1;
    for (std::size_t t = 0; t < spec.k(); ++t) {
        lap(t, t) = 2.0 * tdims;
        for (int j = 0; j < tdims; ++j) {
            const std::size_t stride = spec.transverse_stride(j);
            const std::size_t x = (t / stride) % side;
            if (x > 0) lap(t, t - stride) = -1.0;
            if (x + 1 < side) lap(t, t + stride) = -1.0;
        }
    }
    return lap;
}

/// -Δ_{d-1} + V_i for longitudinal slice i (1-based).
inline Eigen::MatrixXd transverse_slice(const Eigen::MatrixXd& lap, const PotentialField& pot,
                                        std::size_t i) {
    Eigen::MatrixXd t = lap;
    const auto v = pot.slice(i);
    for (std::size_t q = 0; q < v.size(); ++q) t(q, q) += v[q];
    return t;
}

/// Dense Dirichlet -Δ_d + V on the interior sites: block tridiagonal with
/// -I off the diagonal and 2I - Δ_{d-1} + V_i on it.
inline Eigen::MatrixXd build_interior_hamiltonian(const PotentialField& pot,
                                                  std::size_t max_rows = default_dense_row_cap) {
    const LatticeSpec& spec = pot.spec();
    if (spec.sites() > max_rows)
        throw SizeError("dense operator would have " + std::to_string(spec.sites()) +
                        " rows (cap " + std::to_string(max_rows) +
                        "); use the Gelfand-Yaglom recursion instead");
    const auto rows = static_cast<Eigen::Index>(spec.sites());
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(rows, rows);
    const Eigen::MatrixXd lap = transverse_laplacian(spec);
    const auto k = static_cast<Eigen::Index>(spec.k());
    for (std::size_t i = 1; i <= spec.slices(); ++i) {
        const auto b = static_cast<Eigen::Index>(spec.site(i, 0));
        h.block(b, b, k, k) = lap;
        const auto v = pot.slice(i);
        // same association order as apply_hamiltonian
        for (Eigen::Index q = 0; q < k; ++q) h(b + q, b + q) = (2.0 + 2.0 * (spec.d() - 1)) + v[q];
        if (i + 1 <= spec.slices()) {
            for (Eigen::Index q = 0; q < k; ++q) {
                h(b + q, b + k + q) = -1.0;
                h(b + k + q, b + q) = -1.0;
            }
        }
    }
    return h;
}

/// Matrix-free H ψ with implicit zero Dirichlet boundary values.
inline Eigen::VectorXd apply_hamiltonian(const PotentialField& pot, const Eigen::VectorXd& psi) {
    const LatticeSpec& spec = pot.spec();
    if (static_cast<std::size_t>(psi.size()) != spec.sites())
        throw DomainError("vector length " + std::to_string(psi.size()) + " does not match " +
                          std::to_string(spec.sites()) + " interior sites");
    const std::size_t k = spec.k();
    const std::size_t side = spec.m() - 1;
    const int tdims = spec.d() - 1;
    const auto v = pot.values();
    Eigen::VectorXd out(psi.size());
    for (std::size_t i = 1; i <= spec.slices(); ++i) {
        for (std::size_t t = 0; t < k; ++t) {
            const std::size_t s = spec.site(i, t);
            double acc = (2.0 + 2.0 * tdims + v[s]) * psi[s];
            if (i > 1) acc -= psi[s - k];
            if (i < spec.slices()) acc -= psi[s + k];
            for (int j = 0; j < tdims; ++j) {
                const std::size_t stride = spec.transverse_stride(j);
                const std::size_t x = (t / stride) % side;
                if (x > 0) acc -= psi[s - stride];
                if (x + 1 < side) acc -= psi[s + stride];
            }
            out[s] = acc;
        }
    }
    return out;
}

} // namespace gydet
