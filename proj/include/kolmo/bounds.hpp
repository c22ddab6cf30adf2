#pragma once

#include <cstddef>
#include <vector>

namespace kolmo {

/// Hoelder exponents 1/p_n = 1/p_{n-1} + 1/q_n with q_n = (n + n0)^kappa,
/// where n0 is the smallest integer making sum_{n >= n0} n^{-kappa} smaller
/// than 1/bar_p - 1/p0, so every p_n stays above bar_p.
struct ExponentPlan {
    double p0 = 2.0;
    double bar_p = 1.5;
    double kappa = 2.0;
    int n0 = 1;
    double tail_at_n0 = 0.0;    // sum_{n >= n0} n^{-kappa} (upper estimate)
    std::vector<double> p;      // p_0 .. p_nmax
    std::vector<double> inv_p;  // 1/p_n as accumulated
    std::vector<double> q;      // q_1 .. q_nmax stored at index n - 1
};

/// sum_{n >= m} n^{-kappa}: partial sum up to 10^6 plus the integral bound
/// (10^6)^{1-kappa}/(kappa-1) on the rest.
double zeta_tail(double kappa, long m);

ExponentPlan plan_exponents(double p0, double bar_p, double kappa, int nmax);

/// Gamma(1-delta)^n / Gamma(1+n(1-delta)) t^{n(1-delta)}, or with the extra
/// r_1^{-delta} factor Gamma(1-delta)^{n+1} / Gamma((n+1)(1-delta)) t^{n(1-delta)-delta}.
double simplex_time_integral(int n, double delta, double t, bool include_endpoint);
double log_simplex_time_integral(int n, double delta, double t, bool include_endpoint);

/// prod_{i=1}^n Beta(1-delta, 1+(i-1)(1-delta)); 1 for n = 0.
double beta_chain_identity(int n, double delta);

struct BProductBound {
    double value = 0.0;      // +inf once it overflows
    double log_value = 0.0;
    bool overflow = false;
    std::vector<double> per_factor;  // c_beta Tr^{beta/2} q_i^{beta/2}, i = 1 .. n
};

/// c_beta^n Tr^{n beta/2} [(n+n0)!]^{beta kappa/2}.
BProductBound b_product_bound(int n, double beta, double kappa, int n0, double trace_qinf, double c_beta = 2.0);

struct BoundInputs {
    double c_delta = 1.0;  // ||Lambda(t)|| <= c_delta t^{-delta}
    double delta = 0.5;
    double trace = 1.0;    // Tr Q_inf
    double beta = 0.0;
    double c_beta = 2.0;
    double t = 1.0;
};

struct BoundRow {
    int n = 0;
    double b_product = 1.0;
    double log_b_product = 0.0;
    double simplex_integral = 1.0;
    double vn_bound = 1.0;
    double log_vn_bound = 0.0;
    double dvn_bound = 1.0;
    double log_dvn_bound = 0.0;
    double ratio = 0.0;  // vn_bound(n) / vn_bound(n-1); NaN for n = 0
};

/// v_n bound: b_product * c_delta^n * simplex(n, no endpoint).
/// Dv_n bound: b_product * c_delta^{n+1} * simplex(n, endpoint).
/// Both are in units of the test-function norm.
BoundRow vn_norm_bounds(int n, const ExponentPlan& plan, const BoundInputs& in);
std::vector<BoundRow> vn_norm_bound_rows(int nmax, const ExponentPlan& plan, const BoundInputs& in);

/// Gamma(1+(n-1)(1-delta)) / Gamma(1+n(1-delta)).
double gamma_ratio(int n, double delta);

struct GammaRatioScan {
    bool bounded = false;
    double max_scaled = 0.0;  // max_n gamma_ratio(n) n^{1-delta}
    int argmax = 0;
    double relative_change = 0.0;  // |s(nmax) - s(nmax/2)| / s(nmax)
    std::vector<double> scaled;    // s(n) for n = 1 .. nmax
};

/// Scans s(n) = gamma_ratio(n, delta) n^{1-delta} for n <= nmax. Reported
/// bounded when all values are finite and s has levelled off: the relative
/// change over the last doubling of n is below 1%.
GammaRatioScan gamma_ratio_bound_check(int nmax, double delta);

struct RatioTestResult {
    bool converges = false;
    int first_contractive_index = -1;  // smallest k with terms[j+1]/terms[j] < 1 - 1e-6 for all j >= k
    double last_ratio = 0.0;
};

/// Finite-sample ratio test. Converges when the successive ratios end up and
/// stay below 1 - 1e-6 and their gap to 1 is not shrinking: 1 - r_last is at
/// least 3/4 of 1 - r at the middle of the contractive tail. That second
/// condition rejects harmonic-like sequences whose ratios creep up to 1.
RatioTestResult ratio_test(const std::vector<double>& terms);
/// Same test on natural logs of the terms (for bounds that overflow).
RatioTestResult ratio_test_log(const std::vector<double>& log_terms);

/// ratio_test_log over the v_n bound rows n = 0 .. horizon. With large n0 the
/// rows only start contracting at n in the tens of thousands, hence the long
/// default horizon.
RatioTestResult scan_vn_bounds(const ExponentPlan& plan, const BoundInputs& in, int horizon = 1000000);

}  // namespace kolmo
