#include "kolmo/bounds.hpp"
#include "kolmo/error.hpp"
#include "kolmo/gaussian.hpp"
#include "kolmo/quadrature.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace kolmo;

TEST(PlanExponents, KnownPlan) {
    const ExponentPlan p = plan_exponents(2.0, 1.5, 2.0, 10000);
    EXPECT_EQ(p.n0, 7);
    // Partial-sum oracle: sum_{n>=7} n^-2 < 1/6 < sum_{n>=6} n^-2.
    const double tail7 = std::numbers::pi * std::numbers::pi / 6.0 - (1 + 1 / 4. + 1 / 9. + 1 / 16. + 1 / 25. + 1 / 36.);
    EXPECT_NEAR(tail7, 0.15355, 1e-5);
    EXPECT_LT(tail7, 1.0 / 6.0);
    EXPECT_GT(tail7 + 1 / 36., 1.0 / 6.0);
    EXPECT_NEAR(p.tail_at_n0, tail7, 1e-6);

    EXPECT_EQ(p.q[0], 64.0);
    EXPECT_NEAR(p.p[1], 64.0 / 33.0, 1e-15);
    EXPECT_EQ(p.p[0], 2.0);
    for (std::size_t n = 1; n < p.p.size(); ++n) {
        EXPECT_NEAR(p.inv_p[n], p.inv_p[n - 1] + 1.0 / p.q[n - 1], 1e-14);
        EXPECT_NEAR(p.q[n - 1], std::pow(double(n) + 7.0, 2.0), 1e-9 * p.q[n - 1]);
        ASSERT_GT(p.p[n], 1.5);
        ASSERT_LT(p.p[n], p.p[n - 1]);
    }
}

TEST(PlanExponents, ZetaTailAndRefusals) {
    EXPECT_NEAR(zeta_tail(2.0, 1), std::numbers::pi * std::numbers::pi / 6.0, 1e-9);
    EXPECT_THROW(plan_exponents(2.0, 1.5, 1.0, 10), Error);
    EXPECT_THROW(plan_exponents(1.5, 2.0, 2.0, 10), Error);
    EXPECT_EQ(plan_exponents(2.0, 1.5, 1.5, 10).n0, 145);
}

TEST(SimplexTimeIntegral, Examples) {
    EXPECT_NEAR(simplex_time_integral(1, 0.5, 1.0, false), 2.0, 1e-14);
    EXPECT_NEAR(simplex_time_integral(2, 0.5, 1.0, false), std::numbers::pi, 1e-14);
    // 2-D nested quadrature oracle: int_0^1 int_0^{r2} (r2-r1)^{-1/2} (1-r2)^{-1/2} dr1 dr2 = int_0^1 2 sqrt(r2) (1-r2)^{-1/2} dr2.
    // Substitute r2 = 1 - s^2 to remove the endpoint singularity.
    const double oracle = testutil::simpson([](double s) { return 4.0 * std::sqrt(1.0 - s * s); }, 0.0, 1.0, 200000);
    EXPECT_NEAR(oracle, std::numbers::pi, 1e-8);
    for (int n : {1, 2, 3, 5})
        for (double d : {0.25, 0.5, 0.75}) {
            const double t = 2.7;
            EXPECT_LT(testutil::rel_err(simplex_time_integral(n, d, t, false),
                                        simplex_time_integral(n, d, 1.0, false) * std::pow(t, n * (1 - d))),
                      1e-13);
            EXPECT_NEAR(log_simplex_time_integral(n, d, t, true), std::log(simplex_time_integral(n, d, t, true)), 1e-12);
        }
}

TEST(SimplexTimeIntegral, AgreesWithNestedQuadrature) {
    for (int n = 1; n <= 3; ++n)
        for (double d : {0.25, 0.5, 0.75})
            for (bool ep : {false, true}) {
                const double closed = simplex_time_integral(n, d, 1.0, ep);
                const double quad = nested_simplex_quadrature(n, d, 1.0, ep);
                EXPECT_LT(testutil::rel_err(quad, closed), 1e-6) << n << " " << d << " " << ep;
            }
}

TEST(BetaChain, Examples) {
    EXPECT_EQ(beta_chain_identity(0, 0.5), 1.0);
    EXPECT_NEAR(beta_chain_identity(1, 0.5), 2.0, 1e-14);
    // Direct Beta evaluation oracle via lgamma.
    auto beta = [](double a, double b) { return std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b)); };
    const double d = 0.25;
    double prod = 1.0;
    for (int i = 1; i <= 3; ++i) prod *= beta(1 - d, 1 + (i - 1) * (1 - d));
    EXPECT_NEAR(beta_chain_identity(3, d), prod, 1e-13);
    for (int n = 0; n <= 30; ++n)
        for (double dd : {0.25, 0.5, 0.75})
            EXPECT_LT(testutil::rel_err(beta_chain_identity(n, dd),
                                        std::pow(std::tgamma(1 - dd), n) / std::tgamma(1 + n * (1 - dd))),
                      1e-12);
}

TEST(BProduct, Examples) {
    const BProductBound b0 = b_product_bound(5, 0.0, 1.5, 145, 3.7, 2.0);
    EXPECT_EQ(b0.value, 32.0);
    // (1 + n0)!^{beta kappa / 2} with n=1, n0=7, kappa=2, beta=0.5, Tr=1, c=1.
    const BProductBound b1 = b_product_bound(1, 0.5, 2.0, 7, 1.0, 1.0);
    EXPECT_NEAR(b1.value, std::pow(40320.0, 0.5), 1e-10);
    const BProductBound big = b_product_bound(100000, 0.5, 1.5, 145, 1.0);
    EXPECT_TRUE(big.overflow);
    EXPECT_TRUE(std::isfinite(big.log_value));
}

// Per-factor bound against the empirical L^{q_1} norm of |x|^beta under the invariant measure.
TEST(BProduct, PerFactorDominatesEmpiricalNorm) {
    const double beta = 0.5;
    const ExponentPlan p = plan_exponents(2.0, 1.5, 2.0, 2);
    const BProductBound b = b_product_bound(1, beta, 2.0, p.n0, 1.0, 2.0);
    const GaussianSpec mu{StateVector{0.0}, {1.0}};
    const Estimate e = lp_norm_estimate([&](const StateVector& x) { return std::pow(x.norm(), beta); }, p.q[0], mu,
                                        200000, 5);
    ASSERT_EQ(b.per_factor.size(), 1u);
    EXPECT_LE(e.mean, b.per_factor[0]);
}

TEST(VnBounds, RowsAndFactorization) {
    const ExponentPlan p = plan_exponents(2.0, 1.5, 1.5, 60);
    const BoundInputs in{0.8, 0.5, 1.0, 0.5, 2.0, 1.0};
    const auto rows = vn_norm_bound_rows(60, p, in);
    EXPECT_EQ(rows[0].vn_bound, 1.0);
    EXPECT_TRUE(std::isnan(rows[0].ratio));
    // Row 0 is pinned to 1, so the factor structure applies from n = 2.
    for (int n = 2; n <= 60; ++n) {
        // Algebraic prediction of the ratio from the factor structure.
        const double log_pred = (rows[n].log_b_product - rows[n - 1].log_b_product) + std::log(in.c_delta) +
                                std::log(std::tgamma(1 - in.delta)) + std::log(gamma_ratio(n, in.delta)) +
                                (1 - in.delta) * std::log(in.t);
        EXPECT_NEAR(std::log(rows[n].ratio), log_pred, 1e-10) << n;
    }
    // Homogeneity in t: the bound carries t^{n(1-delta)}, so it vanishes as t -> 0.
    BoundInputs small = in;
    small.t = 1e-8;
    for (int n = 1; n <= 5; ++n)
        EXPECT_NEAR(vn_norm_bounds(n, p, small).log_vn_bound - rows[n].log_vn_bound, n * 0.5 * std::log(1e-8), 1e-9);
}

TEST(VnBounds, BoundedDriftFactorialDecay) {
    const ExponentPlan p = plan_exponents(2.0, 1.5, 1.5, 80);
    const BoundInputs in{1.0, 0.5, 1.0, 0.0, 2.0, 1.0};
    const auto rows = vn_norm_bound_rows(80, p, in);
    std::vector<double> logs;
    for (const auto& r : rows) logs.push_back(r.log_vn_bound);
    EXPECT_TRUE(ratio_test_log(logs).converges);
    // beta = 0 rows: c^n Gamma(1/2)^n / Gamma(1 + n/2).
    for (int n = 0; n <= 80; ++n)
        EXPECT_NEAR(rows[n].log_vn_bound,
                    n * std::log(2.0 * std::sqrt(std::numbers::pi)) - std::lgamma(1 + 0.5 * n), 1e-9);
}

TEST(GammaRatio, Examples) {
    EXPECT_NEAR(gamma_ratio(2, 0.5), std::sqrt(std::numbers::pi) / 2.0, 1e-15);
    EXPECT_NEAR(gamma_ratio(1, 0.5), 2.0 / std::sqrt(std::numbers::pi), 1e-15);
    for (double d : {0.25, 0.5, 0.75}) {
        const GammaRatioScan s = gamma_ratio_bound_check(200, d);
        EXPECT_TRUE(s.bounded) << d;
        EXPECT_LT(s.relative_change, 0.01);
        ASSERT_EQ(s.scaled.size(), 200u);
        // Independent lgamma oracle for the scaled values.
        for (int n = 1; n <= 200; ++n)
            EXPECT_NEAR(s.scaled[n - 1],
                        std::exp(std::lgamma(1 + (n - 1) * (1 - d)) - std::lgamma(1 + n * (1 - d))) * std::pow(n, 1 - d),
                        1e-12);
        // Limit: s(n) -> (1-delta)^{-(1-delta)}.
        EXPECT_NEAR(s.scaled.back(), std::pow(1 - d, -(1 - d)), 0.01);
    }
}

TEST(RatioTest, Sequences) {
    std::vector<double> geo, harm;
    for (int n = 0; n < 200; ++n) {
        geo.push_back(std::pow(0.5, n));
        harm.push_back(1.0 / (n + 1));
    }
    const RatioTestResult g = ratio_test(geo);
    EXPECT_TRUE(g.converges);
    EXPECT_EQ(g.first_contractive_index, 0);
    EXPECT_NEAR(g.last_ratio, 0.5, 1e-15);
    EXPECT_FALSE(ratio_test(harm).converges);
    EXPECT_TRUE(ratio_test(std::vector<double>(10, 0.0)).converges);
    EXPECT_FALSE(ratio_test(std::vector<double>(10, 1.0)).converges);
}

TEST(RatioTest, BoundRowsForAdmissibleAndViolatingParameters) {
    const ExponentPlan p = plan_exponents(2.0, 1.5, 1.5, 1000000);
    // beta kappa / 2 = 0.375 < 1 - delta = 0.5: converges, with the default C_delta = 1.
    const RatioTestResult ok = scan_vn_bounds(p, BoundInputs{1.0, 0.5, 1.0, 0.5, 2.0, 1.0});
    EXPECT_TRUE(ok.converges);
    EXPECT_GT(ok.first_contractive_index, 0);
    // beta kappa / 2 = 0.75 >= 0.5: the rows grow without bound.
    const RatioTestResult bad = scan_vn_bounds(p, BoundInputs{1.0, 0.5, 1.0, 1.0, 2.0, 1.0});
    EXPECT_FALSE(bad.converges);
}

TEST(Quadrature, GaussRules) {
    const QuadratureRule gl = gauss_legendre(10, 0.0, 2.0);
    double s = 0.0;
    for (std::size_t i = 0; i < gl.size(); ++i) s += gl.weights[i] * std::pow(gl.nodes[i], 7);
    EXPECT_NEAR(s, 256.0 / 8.0, 1e-12);
    const QuadratureRule gh = gauss_hermite_normal(20);
    double m4 = 0.0, w = 0.0;
    for (std::size_t i = 0; i < gh.size(); ++i) {
        m4 += gh.weights[i] * std::pow(gh.nodes[i], 4);
        w += gh.weights[i];
    }
    EXPECT_NEAR(w, 1.0, 1e-13);
    EXPECT_NEAR(m4, 3.0, 1e-12);
}
