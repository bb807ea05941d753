#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "gydet/exact_oracle.hpp"
#include "gydet/gy_discrete.hpp"

using namespace gydet;

TEST(ScalarY, FreeAndFibonacci) {
    EXPECT_EQ(scalar_y_solution(std::vector<double>(4, 0.0)), (std::vector<double>{0, 1, 2, 3, 4, 5}));
    EXPECT_EQ(scalar_y_solution(std::vector<double>(4, 1.0)), (std::vector<double>{0, 1, 3, 8, 21, 55}));
    EXPECT_EQ(scalar_y_solution(std::vector<double>{-4.0}), (std::vector<double>{0, 1, -2}));
}

TEST(ScalarY, OverflowIsReported) {
    EXPECT_THROW(scalar_y_solution(std::vector<double>(2000, 10.0)), NonFinite);
}

TEST(ScalarA, Anchors) {
    const LogDet free10 = scalar_logdet(std::vector<double>(9, 0.0));
    EXPECT_NEAR(free10.log_abs, std::log(10.0), 1e-15);
    EXPECT_EQ(free10.sign, 1);

    const LogDet fib = scalar_logdet(std::vector<double>(4, 1.0));
    EXPECT_NEAR(fib.log_abs, std::log(55.0), 1e-14);

    const LogDet neg = scalar_logdet(std::vector<double>{-4.0});
    EXPECT_NEAR(neg.log_abs, std::log(2.0), 1e-15);
    EXPECT_EQ(neg.sign, -1);
}

TEST(ScalarA, AgreesWithYSolutionOnRandomPotentials) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> v(1 + trial % 20);
        for (double& x : v) x = u(rng);
        const double y = scalar_y_solution(v).back();
        if (std::fabs(y) < 1e-6) continue;
        const LogDet r = scalar_logdet(v);
        EXPECT_NEAR(r.log_abs, std::log(std::fabs(y)), 1e-9 * std::fmax(1.0, std::fabs(std::log(std::fabs(y)))));
        EXPECT_EQ(r.sign, y > 0 ? 1 : -1);
    }
}

TEST(ScalarA, ExactZeroCrossingThrows) {
    // V_1 = -2 makes the single interior entry zero
    try {
        scalar_logdet(std::vector<double>{-2.0});
        FAIL() << "expected SingularCrossing";
    } catch (const SingularCrossing& e) {
        EXPECT_EQ(e.slice(), 1u);
    }
    // y = (0, 1, 1, 0): V_1 = -1, V_2 = -1 gives det 0 at slice 2
    EXPECT_THROW(scalar_logdet(std::vector<double>{-1.0, -1.0}), SingularCrossing);
    EXPECT_THROW(scalar_logdet(std::vector<double>{}), DomainError);
}

TEST(MatrixAForm, Anchors) {
    auto run = [](int d, std::size_t n, std::size_t m, double m2) {
        return matrix_logdet_Aform(PotentialField::constant(LatticeSpec(d, n, m), m2));
    };
    EXPECT_NEAR(run(2, 2, 2, 0.0).log_abs, std::log(4.0), 1e-15);
    EXPECT_NEAR(run(2, 3, 3, 0.0).log_abs, std::log(192.0), 1e-14);
    EXPECT_NEAR(run(2, 2, 2, 1.0).log_abs, std::log(5.0), 1e-15);
    EXPECT_NEAR(run(3, 2, 2, 0.0).log_abs, std::log(6.0), 1e-15);
    EXPECT_NEAR(run(1, 10, 2, 0.0).log_abs, std::log(10.0), 1e-14);
}

TEST(MatrixAForm, SingleTransverseSiteReducesToScalar) {
    const LatticeSpec spec(2, 12, 2);
    const auto pot = PotentialField::random(spec, 3, -3.0, 1.0);
    std::vector<double> shifted(pot.values().begin(), pot.values().end());
    for (double& x : shifted) x += 2.0;
    const LogDet a = matrix_logdet_Aform(pot);
    const LogDet s = scalar_logdet(shifted);
    EXPECT_NEAR(a.log_abs, s.log_abs, 1e-12);
    EXPECT_EQ(a.sign, s.sign);
}

TEST(MatrixAForm, ObserverSeesPartialProducts) {
    // The accumulated product after step n is the determinant of the leading
    // n-slice block, i.e. the operator on the lattice with N = n + 1.
    const LatticeSpec spec(2, 7, 5);
    const auto pot = PotentialField::random(spec, 11, -0.5, 0.5);
    std::vector<GYState> states;
    matrix_logdet_Aform(pot, {}, [&](const GYState& s) { states.push_back(s); });
    ASSERT_EQ(states.size(), spec.slices());
    for (std::size_t n = 1; n <= spec.slices(); ++n) {
        const LatticeSpec sub(2, n + 1, 5);
        std::vector<double> v(pot.values().begin(), pot.values().begin() + static_cast<long>(sub.sites()));
        const LogDet d = dense_logdet(PotentialField(sub, v));
        EXPECT_NEAR(states[n - 1].acc_log, d.log_abs, 1e-11) << "n=" << n;
        EXPECT_EQ(states[n - 1].acc_sign, d.sign) << "n=" << n;
        EXPECT_EQ(states[n - 1].n, n);
    }
}

TEST(MatrixAForm, PositivePotentialKeepsPivotsPositive) {
    const auto pot = PotentialField::random(LatticeSpec(2, 15, 9), 2, 0.0, 2.0);
    matrix_logdet_Aform(pot, {}, [](const GYState& s) {
        const Eigen::MatrixXd b = s.a + Eigen::MatrixXd::Identity(s.a.rows(), s.a.cols());
        EXPECT_EQ(Eigen::LLT<Eigen::MatrixXd>(b).info(), Eigen::Success) << "n=" << s.n;
        EXPECT_EQ(s.acc_sign, 1);
    });
}

TEST(MatrixAForm, SingularCrossingNamesTheSlice) {
    // 2D, M=2 (K=1): slice values -4 make the first block 2 + 2 - 4 = 0
    const LatticeSpec spec(2, 4, 2);
    const PotentialField pot(spec, {-4.0, 0.0, 0.0});
    try {
        matrix_logdet_Aform(pot);
        FAIL() << "expected SingularCrossing";
    } catch (const SingularCrossing& e) {
        EXPECT_EQ(e.slice(), 1u);
        EXPECT_LT(e.pivot(), 1e-300);
    }
    // the full operator is regular (det = -4); only its leading block is
    // singular, which the Y-form never factors
    const LogDet y = matrix_logdet_Yform(pot);
    EXPECT_NEAR(y.log_abs, std::log(4.0), 1e-14);
    EXPECT_EQ(y.sign, -1);
    EXPECT_TRUE(agree(y, dense_logdet(pot), 1e-14));
}

TEST(MatrixYForm, Anchors) {
    auto run = [](int d, std::size_t n, std::size_t m, double m2) {
        return matrix_logdet_Yform(PotentialField::constant(LatticeSpec(d, n, m), m2));
    };
    EXPECT_NEAR(run(2, 2, 2, 0.0).log_abs, std::log(4.0), 1e-15);
    EXPECT_NEAR(run(2, 3, 3, 0.0).log_abs, std::log(192.0), 1e-14);
    EXPECT_NEAR(run(2, 2, 2, 1.0).log_abs, std::log(5.0), 1e-15);
    EXPECT_NEAR(run(3, 2, 2, 0.0).log_abs, std::log(6.0), 1e-15);
}

TEST(MatrixYForm, RescalingKeepsLargeEntriesFinite) {
    // growth ≈ (m² + 2) per slice, 1e600 overall: several renormalizations
    const auto pot = PotentialField::constant(LatticeSpec(2, 200, 5), 1000.0);
    std::size_t steps = 0;
    const LogDet y = matrix_logdet_Yform(pot, {}, [&](const YFormStep& s) {
        ++steps;
        EXPECT_LE(s.y_next.cwiseAbs().maxCoeff(), 1e100);
    });
    EXPECT_EQ(steps, 199u);
    EXPECT_GE(y.rescalings, 3u);
    EXPECT_LE(log_abs_gap(y, sinh_product_logdet(1000.0, 200, 5)), 1e-12);
}

TEST(MatrixYForm, WideLatticesLoseDigitsToColumnAlignment) {
    // Every column of Y_n aligns with the fastest-growing transverse mode,
    // so det Y_N cancels catastrophically once the mode growth rates spread
    // far apart. The A-form has no such loss.
    const auto pot = PotentialField::constant(LatticeSpec(2, 100, 100), 0.0);
    const LogDet e = eigenproduct_logdet_2d(0.0, 100, 100);
    EXPECT_LE(log_abs_gap(matrix_logdet_Aform(pot), e), 1e-11);
    EXPECT_GT(log_abs_gap(matrix_logdet_Yform(pot), e), 1e-8);
}

TEST(MatrixForms, AgreeWithDenseOracle) {
    for (int d : {2, 3}) {
        for (std::size_t n : {2u, 3u, 6u, 9u}) {
            for (std::size_t m : {2u, 4u, 7u}) {
                const LatticeSpec spec(d, n, m);
                if (spec.sites() > 512) continue;
                for (double shift : {0.0, -3.0, -6.0}) {
                    const auto pot = PotentialField::random(spec, 100 * n + m, -1.0, 1.0).shifted(shift);
                    LogDet dense;
                    try {
                        dense = dense_logdet(pot);
                    } catch (const SingularMatrix&) {
                        continue;
                    }
                    const LogDet a = matrix_logdet_Aform(pot);
                    const LogDet y = matrix_logdet_Yform(pot);
                    EXPECT_TRUE(agree(a, dense, 1e-9)) << d << " " << n << " " << m << " " << shift;
                    EXPECT_TRUE(agree(y, dense, 1e-9)) << d << " " << n << " " << m << " " << shift;
                }
            }
        }
    }
}

TEST(MatrixAForm, LargeLatticeIsFiniteAndMatchesClosedForm) {
    const LogDet a = matrix_logdet_Aform(PotentialField::constant(LatticeSpec(2, 128, 128), 1.0));
    const LogDet s = sinh_product_logdet(1.0, 128, 128);
    EXPECT_LE(log_abs_gap(a, s), 1e-11);
}
