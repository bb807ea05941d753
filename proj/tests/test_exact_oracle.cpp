#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "gydet/exact_oracle.hpp"

using namespace gydet;

namespace {

double cofactor_det3(const Eigen::Matrix3d& a) {
    return a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) - a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0)) +
           a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
}

} // namespace

TEST(DenseLogdet, Anchors) {
    const LogDet one = dense_logdet(Eigen::MatrixXd::Constant(1, 1, 2.0));
    EXPECT_NEAR(one.log_abs, std::log(2.0), 1e-16);
    EXPECT_EQ(one.sign, 1);
    const LogDet sq = dense_logdet(PotentialField::constant(LatticeSpec(2, 3, 3), 0.0));
    EXPECT_NEAR(sq.log_abs, std::log(192.0), 1e-14);
}

TEST(DenseLogdet, MatchesCofactorExpansion) {
    std::mt19937 rng(8);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int t = 0; t < 50; ++t) {
        Eigen::Matrix3d a;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j <= i; ++j) a(i, j) = a(j, i) = u(rng);
        const double det = cofactor_det3(a);
        const LogDet r = dense_logdet(Eigen::MatrixXd(a));
        EXPECT_NEAR(r.log_abs, std::log(std::fabs(det)), 1e-13 * std::fmax(1.0, std::fabs(std::log(std::fabs(det)))));
        EXPECT_EQ(r.sign, det > 0 ? 1 : -1);
    }
}

TEST(DenseLogdet, Errors) {
    EXPECT_THROW(dense_logdet(Eigen::MatrixXd::Zero(2, 2)), SingularMatrix);
    EXPECT_THROW(dense_logdet(Eigen::MatrixXd::Identity(2, 3)), DomainError);
    EXPECT_THROW(dense_logdet(Eigen::MatrixXd::Identity(30, 30), 10), SizeError);
    Eigen::MatrixXd bad = Eigen::MatrixXd::Identity(2, 2);
    bad(0, 1) = NAN;
    EXPECT_THROW(dense_logdet(bad), NonFinite);
}

TEST(Eigenproduct, Anchors) {
    EXPECT_NEAR(eigenproduct_logdet_2d(0.0, 2, 2).log_abs, std::log(4.0), 1e-15);
    EXPECT_NEAR(eigenproduct_logdet_2d(0.0, 3, 3).log_abs, std::log(192.0), 1e-14);
    EXPECT_NEAR(eigenproduct_logdet_2d(1.0, 2, 2).log_abs, std::log(5.0), 1e-15);
}

TEST(GammaK, Values) {
    EXPECT_EQ(gamma_k(0.0, 0.0).gamma, 0.0);
    EXPECT_NEAR(gamma_k(1.0, 0.0).gamma, 0.9624236501192069, 1e-15);
    EXPECT_NEAR(gamma_k(0.0, -2.0).gamma, 1.3169578969248166, 1e-15);
    for (double m2 : {0.0, 1e-8, 0.3, 5.0})
        for (double lam : transverse_eigenvalues(40)) {
            const double g = gamma_k(m2, lam).gamma;
            EXPECT_NEAR(std::cosh(g), 1.0 + 0.5 * (m2 - lam), 1e-14 * (1.0 + 0.5 * (m2 - lam)));
        }
    EXPECT_THROW(gamma_k(0.0, 1.0), DomainError);
}

TEST(GammaK, TinyArgumentKeepsRelativePrecision) {
    // arccosh(1 + t) ≈ √(2t) for small t; the naive form loses all digits
    const double t = 1e-20;
    EXPECT_NEAR(gamma_k(2.0 * t, 0.0).gamma / std::sqrt(2.0 * t), 1.0, 1e-12);
}

TEST(GammaK, MonotoneInMode) {
    const auto lam = transverse_eigenvalues(30);
    for (std::size_t k = 1; k < lam.size(); ++k) EXPECT_GT(gamma_k(0.5, lam[k]).gamma, gamma_k(0.5, lam[k - 1]).gamma);
}

TEST(SinhProduct, Anchors) {
    EXPECT_NEAR(sinh_product_logdet(0.0, 2, 2).log_abs, std::log(4.0), 1e-14);
    EXPECT_NEAR(sinh_product_logdet(0.0, 3, 3).log_abs, std::log(192.0), 1e-14);
    EXPECT_NEAR(sinh_product_logdet(1.0, 2, 2).log_abs, std::log(5.0), 1e-14);
}

TEST(SinhProduct, LargeLatticeStaysFinite) {
    const LogDet r = sinh_product_logdet(1.0, 100000, 1000);
    EXPECT_TRUE(std::isfinite(r.log_abs));
    EXPECT_GT(r.log_abs, 1e8);
}

TEST(ClosedForms, ThreeWayAgreementAndSymmetry) {
    for (double m2 : {0.0, 0.25, 1.0, 7.0})
        for (std::size_t n : {2u, 3u, 5u, 11u, 20u})
            for (std::size_t m : {2u, 4u, 9u, 20u}) {
                const LogDet s = sinh_product_logdet(m2, n, m);
                const LogDet e = eigenproduct_logdet_2d(m2, n, m);
                const LogDet t = sinh_product_logdet(m2, m, n);
                EXPECT_LE(log_abs_gap(s, e), 1e-12) << m2 << " " << n << " " << m;
                EXPECT_LE(log_abs_gap(s, t), 1e-12) << m2 << " " << n << " " << m;
                if ((n - 1) * (m - 1) <= 400) {
                    const LogDet d = dense_logdet(PotentialField::constant(LatticeSpec(2, n, m), m2));
                    EXPECT_LE(log_abs_gap(d, e), 1e-12) << m2 << " " << n << " " << m;
                }
            }
}

TEST(SinhProduct, FaultyGammaIsDetected) {
    const GammaFunction bad = [](double m2, double lam) {
        GammaValue g = gamma_k(m2, lam);
        g.gamma *= 1.01;
        return g;
    };
    EXPECT_GT(std::fabs(sinh_product_logdet(0.0, 3, 3, bad).log_abs - std::log(192.0)), 1e-3);
}
