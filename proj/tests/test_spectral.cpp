#include "kolmo/error.hpp"
#include "kolmo/hypotheses.hpp"
#include "kolmo/spectral.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace kolmo;

namespace {

SpectralModel random_model(std::mt19937_64& g, std::size_t dim) {
    std::uniform_real_distribution<double> la(std::log(0.05), std::log(50.0)), lq(std::log(0.1), std::log(10.0));
    std::vector<double> a(dim), q(dim);
    for (std::size_t k = 0; k < dim; ++k) {
        a[k] = -std::exp(la(g));
        q[k] = std::exp(lq(g));
    }
    return SpectralModel(a, q);
}

}  // namespace

TEST(SpectralModel, RejectsInvalid) {
    EXPECT_THROW(SpectralModel({}, {}), Error);
    EXPECT_THROW(SpectralModel({-1.0}, {1.0, 2.0}), Error);
    EXPECT_THROW(SpectralModel({0.0}, {1.0}), Error);
    EXPECT_THROW(SpectralModel({-1.0}, {0.0}), Error);
    EXPECT_THROW(SpectralModel::from_json(nlohmann::json{{"dim", 2}, {"a", {-1.0}}, {"q", {1.0}}}), Error);
}

TEST(SpectralModel, JsonRoundTrip) {
    const SpectralModel m({-1.0, -4.0}, {2.0, 0.5});
    const SpectralModel r = SpectralModel::from_json(m.to_json());
    EXPECT_EQ(r.dim(), 2u);
    EXPECT_EQ(r.a(1), -4.0);
    EXPECT_EQ(r.q(1), 0.5);
}

TEST(SemigroupApply, Examples) {
    const SpectralModel m1({-1.0}, {1.0});
    EXPECT_EQ(semigroup_apply(m1, 0.0, StateVector{2.0})[0], 2.0);
    EXPECT_NEAR(semigroup_apply(m1, std::log(2.0), StateVector{1.0})[0], 0.5, 1e-15);

    const SpectralModel m2({-1.0, -4.0}, {1.0, 1.0});
    const StateVector y = semigroup_apply(m2, 0.25, StateVector{1.0, 1.0});
    EXPECT_NEAR(y[0], std::exp(-0.25), 1e-15);
    EXPECT_NEAR(y[1], std::exp(-1.0), 1e-15);

    EXPECT_THROW(semigroup_apply(m2, 0.1, StateVector{1.0}), Error);
    EXPECT_THROW(semigroup_apply(m2, -0.1, StateVector{1.0, 1.0}), Error);
}

TEST(QtEigenvalues, MatchesQuadratureOracle) {
    const SpectralModel m({-1.0}, {2.0});
    const double t = std::log(2.0);
    const double qt = qt_eigenvalues(m, t)[0];
    EXPECT_NEAR(qt, 0.75, 1e-15);
    const double oracle = testutil::simpson([](double s) { return 2.0 * std::exp(-2.0 * s); }, 0.0, t);
    EXPECT_NEAR(qt, oracle, 1e-12);
    EXPECT_THROW(qt_eigenvalues(m, 0.0), Error);
}

TEST(QtEigenvalues, SmallTimeLimitAndTaylorBranch) {
    const SpectralModel m({-3.0, -0.5}, {1.5, 4.0});
    for (double t : {1e-12, 1e-10, 1e-9, 2e-8, 1e-6}) {
        const auto v = qt_eigenvalues(m, t);
        for (std::size_t k = 0; k < 2; ++k) {
            const double a = m.a(k), q = m.q(k);
            // q t (1 + a t + 2 a^2 t^2 / 3) is exact to O(t^4).
            const double taylor = q * t * (1.0 + a * t + 2.0 * a * a * t * t / 3.0);
            EXPECT_LT(testutil::rel_err(v[k], taylor), 1e-12) << t;
        }
    }
}

TEST(QInfinity, Examples) {
    const QInfinity a = q_infinity(SpectralModel({-1.0}, {2.0}));
    EXPECT_EQ(a.eigenvalues[0], 1.0);
    EXPECT_EQ(a.trace, 1.0);
    const QInfinity b = q_infinity(SpectralModel({-1.0, -2.0}, {2.0, 2.0}));
    EXPECT_EQ(b.eigenvalues[1], 0.5);
    EXPECT_EQ(b.trace, 1.5);
}

TEST(QInfinity, TraceIsLongTimeLimitOfQt) {
    std::mt19937_64 g(11);
    for (int rep = 0; rep < 20; ++rep) {
        const SpectralModel m = random_model(g, 5);
        double amin = 1e300;
        for (std::size_t k = 0; k < m.dim(); ++k) amin = std::min(amin, std::fabs(m.a(k)));
        const auto qt = qt_eigenvalues(m, 50.0 / amin);
        double s = 0.0;
        for (double v : qt) s += v;
        EXPECT_LT(testutil::rel_err(s, q_infinity(m).trace), 1e-12);
    }
}

TEST(LambdaDiagonal, Examples) {
    const SpectralModel m({-1.0}, {2.0});
    const LambdaDiagonal l = lambda_diagonal(m, std::log(2.0));
    EXPECT_NEAR(l.entries[0], 0.5 / std::sqrt(0.75), 1e-15);
    EXPECT_EQ(l.operator_norm, l.entries[0]);

    // entry * sqrt(t) -> 1/sqrt(q) as t -> 0.
    const double t = 1e-6;
    const SpectralModel m2({-2.0, -7.0}, {0.5, 3.0});
    const LambdaDiagonal s = lambda_diagonal(m2, t);
    for (std::size_t k = 0; k < 2; ++k) EXPECT_NEAR(s.entries[k] * std::sqrt(t) * std::sqrt(m2.q(k)), 1.0, 1e-5);
    EXPECT_THROW(lambda_diagonal(m2, 0.0), Error);
}

// Property tests over random models.
TEST(SpectralProperties, LambdaIdentitySemigroupLawChapmanKolmogorovMonotone) {
    std::mt19937_64 g(2024);
    std::uniform_real_distribution<double> ut(1e-3, 3.0), ux(-2.0, 2.0);
    for (int rep = 0; rep < 200; ++rep) {
        const SpectralModel m = random_model(g, 4);
        const double t = ut(g), s = ut(g);
        StateVector x(4);
        for (std::size_t k = 0; k < 4; ++k) x[k] = ux(g);

        const LambdaDiagonal l = lambda_diagonal(m, t);
        const auto qt = qt_eigenvalues(m, t);
        const auto qs = qt_eigenvalues(m, s);
        const auto qts = qt_eigenvalues(m, t + s);
        const auto qinf = q_infinity(m).eigenvalues;
        const StateVector lhs = semigroup_apply(m, t + s, x);
        const StateVector rhs = semigroup_apply(m, t, semigroup_apply(m, s, x));
        for (std::size_t k = 0; k < 4; ++k) {
            EXPECT_LT(testutil::rel_err(l.entries[k] * l.entries[k] * qt[k], std::exp(2.0 * m.a(k) * t)), 1e-12);
            EXPECT_LE(std::fabs(lhs[k] - rhs[k]), 1e-12 * std::max(1.0, std::fabs(lhs[k])));
            EXPECT_LT(testutil::rel_err(qs[k] + std::exp(2.0 * m.a(k) * s) * qt[k], qts[k]), 1e-12);
            if (s > t) EXPECT_GE(qs[k], qt[k]);
            EXPECT_LE(qt[k], qinf[k]);
        }
    }
}

TEST(QtEigenvalues, StrictlyIncreasingBeforeSaturation) {
    const SpectralModel m({-1.0, -3.0}, {2.0, 0.5});
    std::vector<double> prev(2, 0.0);
    for (double t = 1e-6; t < 5.0; t *= 1.5) {
        const auto v = qt_eigenvalues(m, t);
        for (std::size_t k = 0; k < 2; ++k) {
            EXPECT_GT(v[k], prev[k]);
            EXPECT_LT(v[k], q_infinity(m).eigenvalues[k]);
        }
        prev = v;
    }
}

TEST(Hypotheses, DeltaFitOnOneDimensionalModel) {
    const SpectralModel m({-1.0}, {1.0});
    const auto r = check_hypotheses(m, DriftSpec::bounded_sin(0.4, 1.0), TestFunctionSpec::cosine({1.0}),
                                    log_time_grid(1e-4, 1e-1, 20));
    EXPECT_TRUE(r.fit_valid);
    EXPECT_NEAR(r.delta_fit, 0.5, 1e-3);
    EXPECT_GT(r.c_delta_fit, 0.0);
    EXPECT_TRUE(r.lambda_integrable);
    EXPECT_TRUE(r.beta_kappa_ok);  // beta = 0
    EXPECT_TRUE(r.drift_bounded);
    EXPECT_TRUE(r.phi_bounded);
    EXPECT_EQ(r.trace_qinf, 0.5);
    EXPECT_TRUE(violated_clauses(r, 3).empty());
}

TEST(Hypotheses, BetaKappaCondition) {
    for (double d : {0.1, 0.5, 0.9}) EXPECT_TRUE(beta_kappa_admissible(0.0, 1.5, d));
    for (double kappa : {1.0001, 1.5, 3.0}) EXPECT_FALSE(beta_kappa_admissible(0.8, kappa, 0.9));
    EXPECT_TRUE(beta_kappa_admissible(0.5, 1.5, 0.5));
}

TEST(Hypotheses, FlagsUnboundedInputs) {
    const SpectralModel m({-1.0}, {2.0});
    const auto r = check_hypotheses(m, DriftSpec::linear(0.5), TestFunctionSpec::linear({1.0}),
                                    log_time_grid(1e-6, 1.0, 60));
    EXPECT_FALSE(r.drift_admissible);
    EXPECT_FALSE(r.phi_bounded);
    EXPECT_FALSE(violated_clauses(r, 2).empty());
}

TEST(Hypotheses, LogTimeGrid) {
    const auto g = log_time_grid(1e-4, 1.0, 5);
    ASSERT_EQ(g.size(), 5u);
    EXPECT_NEAR(g.front(), 1e-4, 1e-18);
    EXPECT_NEAR(g.back(), 1.0, 1e-15);
    EXPECT_NEAR(g[1], 1e-3, 1e-15);
}
