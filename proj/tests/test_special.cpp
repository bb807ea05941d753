#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "gydet/quadrature.hpp"
#include "gydet/special.hpp"

using namespace gydet;

// Reference values below were computed with 30-digit mpmath.

TEST(Special, Acosh1p) {
    EXPECT_EQ(acosh1p(0.0), 0.0);
    EXPECT_NEAR(acosh1p(0.5), 0.96242365011920689500, 1e-16);
    EXPECT_NEAR(acosh1p(2.0), 1.76274717403908605047, 4e-16);
    EXPECT_NEAR(acosh1p(1e-30) / std::sqrt(2e-30), 1.0, 1e-15);
}

TEST(Special, LogSinh) {
    EXPECT_NEAR(log_sinh(1.0), 0.16143936157119563361, 1e-15);
    EXPECT_NEAR(log_sinh(1e-8), std::log(1e-8), 1e-14);
    EXPECT_NEAR(log_sinh(1000.0), 1000.0 - std::numbers::ln2, 1e-12);
}

TEST(Special, CompensatedSumRecoversCancellation) {
    CompensatedSum s;
    s += 1e16;
    for (int i = 0; i < 1000; ++i) s += 1.0;
    s += -1e16;
    EXPECT_EQ(s.value(), 1000.0);
}

TEST(Catalan, AcceleratedSeries) {
    EXPECT_NEAR(catalan(), 0.915965594177219015054603514932, 1e-15);
}

TEST(Catalan, RawPartialSumsBracket) {
    // catalan_partial_sum(n) ends on term n; an even-length sum (odd n)
    // undershoots and an odd-length one overshoots
    const double g = catalan();
    for (std::size_t n : {1u, 5u, 50u, 500u}) {
        EXPECT_LT(catalan_partial_sum(2 * n - 1), g) << n;
        EXPECT_GT(catalan_partial_sum(2 * n), g) << n;
    }
}

TEST(EulerProduct, Values) {
    EXPECT_EQ(euler_product_P(0.0), 1.0);
    EXPECT_NEAR(euler_product_P(std::exp(-2.0 * std::numbers::pi)), 0.998129069925958513279962322245, 1e-15);
    EXPECT_NEAR(euler_product_P(0.5), 0.288788095086602421278899721929, 1e-14);
    EXPECT_THROW(log_euler_product(1.0), DomainError);
    EXPECT_THROW(log_euler_product(-0.1), DomainError);
}

TEST(Quadrature, PolynomialsAndSmoothFunctions) {
    EXPECT_NEAR(integrate([](double x) { return x * x * x; }, 0.0, 2.0).value, 4.0, 1e-14);
    EXPECT_NEAR(integrate([](double x) { return std::sin(x); }, 0.0, std::numbers::pi).value, 2.0, 1e-13);
    const auto r = integrate([](double x) { return std::exp(-x * x); }, -5.0, 5.0);
    EXPECT_NEAR(r.value, std::sqrt(std::numbers::pi) * std::erf(5.0), 1e-13);
    EXPECT_LE(r.error_estimate, 1e-12);
}

TEST(Quadrature, EndpointSingularityRefines) {
    // ∫_0^1 log(x) dx = -1 with an integrable log singularity
    const auto r = integrate([](double x) { return std::log(x); }, 0.0, 1.0, {.abs_tol = 1e-10});
    EXPECT_NEAR(r.value, -1.0, 1e-9);
    EXPECT_GT(r.intervals, 1u);
}

TEST(Quadrature, UnreachableToleranceThrows) {
    auto wild = [](double x) { return x > 0 ? 1.0 / std::sqrt(x) * std::sin(1.0 / x) : 0.0; };
    EXPECT_THROW(integrate(wild, 0.0, 1.0, {.abs_tol = 1e-15, .max_depth = 60, .max_intervals = 50}), QuadratureError);
}
