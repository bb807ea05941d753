#include <cmath>
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>

#include "gydet/continuum.hpp"
#include "gydet/gy_discrete.hpp"

using namespace gydet;

namespace {

// ln(sinh(ωL)/ω) - ln(sinh(ω0 L)/ω0) for one decoupled mode
double single_mode_ratio(double c, double w0, double len) {
    const double w = std::sqrt(c + w0 * w0);
    return (log_sinh(w * len) - std::log(w)) - (log_sinh(w0 * len) - std::log(w0));
}

} // namespace

TEST(Continuum1D, FreeIsExactlyZero) {
    EXPECT_EQ(ratio_logdet_1d(Potential1D::constant(0.0, 3.0)).log_ratio, 0.0);
}

TEST(Continuum1D, ConstantMassClosedForm) {
    EXPECT_NEAR(ratio_logdet_1d(Potential1D::constant(1.0, 1.0), 1e-12).log_ratio, 0.161439361571195633610, 1e-10);
    EXPECT_NEAR(ratio_logdet_1d(Potential1D::constant(25.0, 1.0), 1e-12).log_ratio, 2.69736950604558382677, 1e-9);
    EXPECT_NEAR(ratio_logdet_1d(Potential1D::constant(0.25, 1.0), 1e-12).log_ratio, 0.0413248546129181089784, 1e-10);
}

TEST(Continuum1D, RiccatiAgrees) {
    for (double m : {0.5, 1.0, 5.0}) {
        const auto pot = Potential1D::constant(m * m, 1.0);
        EXPECT_NEAR(ratio_logdet_1d_riccati(pot, 1e-12).log_ratio, ratio_logdet_1d(pot, 1e-12).log_ratio, 1e-6);
    }
}

TEST(Continuum1D, NegativeEigenvalueRaisesSignChange) {
    // -d²/dx² - 20 on [0, 1] has lowest eigenvalue π² - 20 < 0
    const auto pot = Potential1D::constant(-20.0, 1.0);
    EXPECT_THROW(ratio_logdet_1d(pot), SignChange);
}

TEST(Continuum1D, LatticeConvergesAtSecondOrder) {
    // ln det(-Δ + a²V) - ln N with a = L/N tends to the continuum ratio
    constexpr double m2 = 4.0, len = 1.0;
    const double exact = ratio_logdet_1d(Potential1D{[m2](double x) { return m2 * (1.0 + x * x); }, len}, 1e-12).log_ratio;
    double errs[3];
    const std::size_t sizes[] = {100, 200, 400};
    for (int i = 0; i < 3; ++i) {
        const std::size_t n = sizes[i];
        const double a = len / static_cast<double>(n);
        std::vector<double> v(n - 1);
        for (std::size_t j = 1; j < n; ++j) {
            const double x = a * static_cast<double>(j);
            v[j - 1] = a * a * m2 * (1.0 + x * x);
        }
        errs[i] = std::fabs(scalar_logdet(v).log_abs - std::log(static_cast<double>(n)) - exact);
    }
    EXPECT_GE(std::log2(errs[0] / errs[1]), 1.9);
    EXPECT_GE(std::log2(errs[1] / errs[2]), 1.9);
}

TEST(ModeProjection, ConstantAndLinear) {
    const Eigen::MatrixXd c = sine_basis_projection([](double) { return 2.5; }, 1.0, 4);
    EXPECT_LT((c - 2.5 * Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-12);

    const Eigen::MatrixXd r = sine_basis_projection([](double rho) { return rho; }, 1.0, 2);
    EXPECT_NEAR(r(0, 0), 0.5, 1e-12);
    EXPECT_NEAR(r(1, 1), 0.5, 1e-12);
    EXPECT_NEAR(r(0, 1), -16.0 / (9.0 * std::numbers::pi * std::numbers::pi), 1e-12);
    EXPECT_NEAR(r(1, 0), r(0, 1), 1e-12);
}

TEST(ModeProjection, SymmetricForGeneralPotential) {
    const auto pot = TransversePotential2D::callable([](double x, double rho) { return std::exp(x * rho) * rho * rho; }, 2.0);
    const Eigen::MatrixXd v = v_matrix_elements(pot, 0.3, 8);
    EXPECT_LT((v - v.transpose()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Continuum2D, FreeIsZeroForEveryK) {
    const auto zero = TransversePotential2D::constant(0.0, 1.0);
    for (std::size_t k : {1u, 4u, 16u}) {
        EXPECT_NEAR(ratio_logdet_2d_truncated(zero, 1.0, k).log_ratio, 0.0, 1e-12) << k;
        EXPECT_EQ(ratio_logdet_2d_truncated(zero, 1.0, k, {.route = ContinuumRoute::linear}).log_ratio, 0.0) << k;
    }
}

TEST(Continuum2D, RankOneClosedFormIndependentOfK) {
    const double want = single_mode_ratio(2.0, std::numbers::pi, 1.0);
    EXPECT_NEAR(want, 0.21222723867748039, 1e-15);
    const auto pot = TransversePotential2D::rank_one(2.0, 1, 1.0);
    for (std::size_t k : {1u, 4u, 16u}) {
        EXPECT_NEAR(ratio_logdet_2d_truncated(pot, 1.0, k, {.tol = 1e-11}).log_ratio, want, 1e-8) << k;
        EXPECT_NEAR(ratio_logdet_2d_truncated(pot, 1.0, k, {.tol = 1e-11, .route = ContinuumRoute::linear}).log_ratio,
                    want, 1e-8)
            << k;
    }
}

TEST(Continuum2D, HigherModeRankOne) {
    // coupling mode 3 of a strip of width 2
    const double w0 = 3.0 * std::numbers::pi / 2.0;
    const auto pot = TransversePotential2D::rank_one(5.0, 3, 2.0);
    EXPECT_NEAR(ratio_logdet_2d_truncated(pot, 0.7, 6, {.tol = 1e-11}).log_ratio, single_mode_ratio(5.0, w0, 0.7), 1e-8);
    EXPECT_NEAR(ratio_logdet_2d_truncated(pot, 0.7, 2).log_ratio, 0.0, 1e-12);
}

TEST(Continuum2D, SeparableConstantInRhoIsSumOfModes) {
    // V = f(x) with g = 1: every mode decouples with the same 1D potential
    const auto f = [](double x) { return 1.0 + std::sin(3.0 * x); };
    const auto pot = TransversePotential2D::separable(f, [](double) { return 1.0; }, 1.0, 5);
    double want = 0.0;
    for (int n = 1; n <= 5; ++n) {
        const double w2 = std::pow(std::numbers::pi * n, 2);
        const double full = ratio_logdet_1d(Potential1D{[&](double x) { return w2 + f(x); }, 1.0}, 1e-12).log_ratio;
        const double free = ratio_logdet_1d(Potential1D::constant(w2, 1.0), 1e-12).log_ratio;
        want += full - free;
    }
    EXPECT_NEAR(ratio_logdet_2d_truncated(pot, 1.0, 5, {.tol = 1e-11}).log_ratio, want, 1e-7);
}

TEST(Continuum2D, RoutesAgreeOnCoupledPotential) {
    const auto pot = TransversePotential2D::callable([](double x, double rho) { return 3.0 * rho * (1.0 + x); }, 1.0);
    const double ric = ratio_logdet_2d_truncated(pot, 1.0, 6).log_ratio;
    const double lin = ratio_logdet_2d_truncated(pot, 1.0, 6, {.route = ContinuumRoute::linear}).log_ratio;
    EXPECT_NEAR(ric, lin, 1e-7);
}

TEST(Continuum2D, ConstantMassGrowsLogarithmicallyInK) {
    const auto pot = TransversePotential2D::constant(1.0, 1.0);
    double prev = -INFINITY;
    for (std::size_t k : {4u, 8u, 16u, 32u}) {
        const auto r = ratio_logdet_2d_truncated(pot, 1.0, k, {.half_k_diagnostic = true});
        EXPECT_GT(r.log_ratio, prev);
        EXPECT_TRUE(r.nonconvergent_in_k);
        ASSERT_TRUE(r.half_k_value.has_value());
        prev = r.log_ratio;
    }
    const auto a = ratio_logdet_2d_truncated(pot, 1.0, 16).log_ratio;
    const auto b = ratio_logdet_2d_truncated(pot, 1.0, 32).log_ratio;
    EXPECT_NEAR((b - a) / (std::numbers::ln2 / (2.0 * std::numbers::pi)), 1.0, 0.2);
}

TEST(Continuum2D, GridFileMatchesConstant) {
    std::istringstream in("# constant table\n0 0 1\n0 1 1\n1 0 1\n1 1 1\n");
    const auto grid = GridPotential::from_stream(in, "mem", 1.0, 1.0);
    EXPECT_DOUBLE_EQ(grid(0.3, 0.7), 1.0);
    const auto pot = TransversePotential2D::grid(grid);
    const double got = ratio_logdet_2d_truncated(pot, 1.0, 3).log_ratio;
    const double want = ratio_logdet_2d_truncated(TransversePotential2D::constant(1.0, 1.0), 1.0, 3).log_ratio;
    EXPECT_NEAR(got, want, 1e-7);
}

TEST(Continuum2D, GridInterpolatesBilinearly) {
    std::istringstream in("0 0 0\n0 1 1\n1 0 2\n1 1 3\n");
    const auto grid = GridPotential::from_stream(in, "mem", 2.0, 1.0);
    EXPECT_DOUBLE_EQ(grid(1.0, 0.5), 1.5);
    EXPECT_DOUBLE_EQ(grid(2.0, 1.0), 3.0);
    std::istringstream bad("0 0 0\n0 1 1\n1 0 2\n");
    EXPECT_THROW(GridPotential::from_stream(bad, "mem", 1.0, 1.0), ParseError);
}

TEST(Continuum2D, Errors) {
    const auto pot = TransversePotential2D::constant(1.0, 1.0);
    EXPECT_THROW(ratio_logdet_2d_truncated(pot, 1.0, 0), DomainError);
    EXPECT_THROW(ratio_logdet_2d_truncated(pot, -1.0, 2), DomainError);
    EXPECT_THROW(TransversePotential2D::constant(1.0, 0.0), DomainError);
    const auto strong = TransversePotential2D::constant(-40.0, 1.0);
    EXPECT_THROW(ratio_logdet_2d_truncated(strong, 1.0, 2), SignChange);
}
