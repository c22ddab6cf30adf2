#include "kolmo/bounds.hpp"

#include "kolmo/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace kolmo {

namespace {

constexpr long kTailTerms = 1000000;

void require_delta(double delta, const char* what) {
    require(delta > 0.0 && delta < 1.0, ErrorCode::domain_error, what);
}

RatioTestResult ratio_test_from_log_ratios(const std::vector<double>& log_r) {
    RatioTestResult out;
    if (log_r.empty()) {
        out.converges = true;
        out.first_contractive_index = 0;
        return out;
    }
    const double log_cut = std::log1p(-1e-6);
    int k = static_cast<int>(log_r.size());
    while (k > 0 && log_r[k - 1] < log_cut) --k;
    out.last_ratio = std::exp(log_r.back());
    if (k == static_cast<int>(log_r.size())) return out;  // last ratio not contractive
    out.first_contractive_index = k;
    const std::size_t mid = (static_cast<std::size_t>(k) + log_r.size() - 1) / 2;
    const double gap_last = -std::expm1(log_r.back());
    const double gap_mid = -std::expm1(log_r[mid]);
    out.converges = gap_last >= 0.75 * gap_mid;
    return out;
}

double log_b_product(int n, double beta, double kappa, int n0, double trace_qinf, double c_beta) {
    return n * std::log(c_beta) + n * beta / 2.0 * std::log(trace_qinf) + beta * kappa / 2.0 * std::lgamma(n + n0 + 1.0);
}

void check_b_product_args(int n, double beta, double kappa, int n0, double trace_qinf, double c_beta) {
    require(n >= 0 && n0 >= 0, ErrorCode::invalid_argument, "b_product_bound: need n >= 0, n0 >= 0");
    require(beta >= 0.0 && beta <= 1.0, ErrorCode::domain_error, "b_product_bound: beta must be in [0, 1]");
    require(kappa > 1.0, ErrorCode::domain_error, "b_product_bound: kappa must be > 1");
    require(trace_qinf > 0.0 && c_beta > 0.0, ErrorCode::invalid_argument, "b_product_bound: need trace > 0, c_beta > 0");
}

}  // namespace

double zeta_tail(double kappa, long m) {
    require(kappa > 1.0, ErrorCode::domain_error, "zeta_tail: kappa must be > 1");
    require(m >= 1, ErrorCode::invalid_argument, "zeta_tail: m must be >= 1");
    double s = 0.0;
    // smallest terms first
    for (long n = kTailTerms; n >= m; --n) s += std::pow(static_cast<double>(n), -kappa);
    const double top = static_cast<double>(std::max(m - 1, kTailTerms));
    return s + std::pow(top, 1.0 - kappa) / (kappa - 1.0);
}

ExponentPlan plan_exponents(double p0, double bar_p, double kappa, int nmax) {
    require(kappa > 1.0, ErrorCode::domain_error, "plan_exponents: kappa must be > 1 for a summable sequence q_n");
    require(bar_p > 1.0 && p0 > bar_p && std::isfinite(p0), ErrorCode::domain_error,
            "plan_exponents: need p0 > bar_p > 1");
    require(nmax >= 0, ErrorCode::invalid_argument, "plan_exponents: nmax must be >= 0");
    const double budget = 1.0 / bar_p - 1.0 / p0;

    // suffix sums S(m) = sum_{n=m}^{N} n^{-kappa} plus the remainder bound
    const double remainder = std::pow(static_cast<double>(kTailTerms), 1.0 - kappa) / (kappa - 1.0);
    std::vector<double> suffix(static_cast<std::size_t>(kTailTerms) + 2, 0.0);
    for (long n = kTailTerms; n >= 1; --n) suffix[n] = suffix[n + 1] + std::pow(static_cast<double>(n), -kappa);
    long n0 = 1;
    while (n0 <= kTailTerms && suffix[n0] + remainder >= budget) ++n0;
    require(n0 <= kTailTerms, ErrorCode::domain_error, "plan_exponents: no n0 <= 10^6 satisfies the tail condition");

    ExponentPlan plan;
    plan.p0 = p0;
    plan.bar_p = bar_p;
    plan.kappa = kappa;
    plan.n0 = static_cast<int>(n0);
    plan.tail_at_n0 = suffix[n0] + remainder;
    plan.p.resize(static_cast<std::size_t>(nmax) + 1);
    plan.inv_p.resize(static_cast<std::size_t>(nmax) + 1);
    plan.q.resize(static_cast<std::size_t>(nmax));
    plan.inv_p[0] = 1.0 / p0;
    plan.p[0] = p0;
    for (int n = 1; n <= nmax; ++n) {
        plan.q[n - 1] = std::pow(static_cast<double>(n + plan.n0), kappa);
        plan.inv_p[n] = plan.inv_p[n - 1] + 1.0 / plan.q[n - 1];
        plan.p[n] = 1.0 / plan.inv_p[n];
    }
    return plan;
}

double log_simplex_time_integral(int n, double delta, double t, bool include_endpoint) {
    require(n >= 0, ErrorCode::invalid_argument, "simplex_time_integral: n must be >= 0");
    require_delta(delta, "simplex_time_integral: delta must be in (0, 1)");
    require(t > 0.0 && std::isfinite(t), ErrorCode::domain_error, "simplex_time_integral: t must be > 0");
    const double a = 1.0 - delta;
    if (include_endpoint)
        return (n + 1) * std::lgamma(a) - std::lgamma((n + 1) * a) + (n * a - delta) * std::log(t);
    return n * std::lgamma(a) - std::lgamma(1.0 + n * a) + n * a * std::log(t);
}

double simplex_time_integral(int n, double delta, double t, bool include_endpoint) {
    return std::exp(log_simplex_time_integral(n, delta, t, include_endpoint));
}

double beta_chain_identity(int n, double delta) {
    require(n >= 0, ErrorCode::invalid_argument, "beta_chain_identity: n must be >= 0");
    require_delta(delta, "beta_chain_identity: delta must be in (0, 1)");
    const double a = 1.0 - delta;
    double out = 1.0;
    for (int i = 1; i <= n; ++i) out *= std::beta(a, 1.0 + (i - 1) * a);
    return out;
}

BProductBound b_product_bound(int n, double beta, double kappa, int n0, double trace_qinf, double c_beta) {
    check_b_product_args(n, beta, kappa, n0, trace_qinf, c_beta);
    BProductBound out;
    const double fact_exp = beta * kappa / 2.0;
    out.log_value = log_b_product(n, beta, kappa, n0, trace_qinf, c_beta);
    out.value = std::pow(c_beta, n) * std::pow(trace_qinf, n * beta / 2.0) * std::exp(fact_exp * std::lgamma(n + n0 + 1.0));
    out.overflow = !std::isfinite(out.value);
    if (out.overflow) out.value = std::numeric_limits<double>::infinity();
    out.per_factor.resize(static_cast<std::size_t>(n));
    for (int i = 1; i <= n; ++i) {
        const double qi = std::pow(static_cast<double>(i + n0), kappa);
        out.per_factor[i - 1] = c_beta * std::pow(trace_qinf, beta / 2.0) * std::pow(qi, beta / 2.0);
    }
    return out;
}

BoundRow vn_norm_bounds(int n, const ExponentPlan& plan, const BoundInputs& in) {
    require(n >= 0, ErrorCode::invalid_argument, "vn_norm_bounds: n must be >= 0");
    require(in.c_delta > 0.0, ErrorCode::invalid_argument, "vn_norm_bounds: c_delta must be > 0");
    check_b_product_args(n, in.beta, plan.kappa, plan.n0, in.trace, in.c_beta);
    const double log_cd = std::log(in.c_delta);
    auto log_vn = [&](int k) {
        // v_0 = phi itself: its bound is the unit norm, not the k = 0 product
        if (k == 0) return 0.0;
        return log_b_product(k, in.beta, plan.kappa, plan.n0, in.trace, in.c_beta) + k * log_cd +
               log_simplex_time_integral(k, in.delta, in.t, false);
    };
    BoundRow row;
    row.n = n;
    row.log_b_product = log_b_product(n, in.beta, plan.kappa, plan.n0, in.trace, in.c_beta);
    row.b_product = std::exp(row.log_b_product);
    row.simplex_integral = simplex_time_integral(n, in.delta, in.t, false);
    row.log_vn_bound = log_vn(n);
    row.log_dvn_bound = row.log_b_product + (n + 1) * log_cd + log_simplex_time_integral(n, in.delta, in.t, true);
    row.vn_bound = std::exp(row.log_vn_bound);
    row.dvn_bound = std::exp(row.log_dvn_bound);
    row.ratio = n == 0 ? std::numeric_limits<double>::quiet_NaN() : std::exp(row.log_vn_bound - log_vn(n - 1));
    return row;
}

std::vector<BoundRow> vn_norm_bound_rows(int nmax, const ExponentPlan& plan, const BoundInputs& in) {
    require(nmax >= 0, ErrorCode::invalid_argument, "vn_norm_bound_rows: nmax must be >= 0");
    std::vector<BoundRow> rows;
    rows.reserve(static_cast<std::size_t>(nmax) + 1);
    for (int n = 0; n <= nmax; ++n) rows.push_back(vn_norm_bounds(n, plan, in));
    return rows;
}

double gamma_ratio(int n, double delta) {
    require(n >= 1, ErrorCode::invalid_argument, "gamma_ratio: n must be >= 1");
    require_delta(delta, "gamma_ratio: delta must be in (0, 1)");
    const double a = 1.0 - delta;
    return std::exp(std::lgamma(1.0 + (n - 1) * a) - std::lgamma(1.0 + n * a));
}

GammaRatioScan gamma_ratio_bound_check(int nmax, double delta) {
    require(nmax >= 2, ErrorCode::invalid_argument, "gamma_ratio_bound_check: nmax must be >= 2");
    GammaRatioScan scan;
    scan.scaled.resize(static_cast<std::size_t>(nmax));
    bool finite = true;
    for (int n = 1; n <= nmax; ++n) {
        const double s = gamma_ratio(n, delta) * std::pow(static_cast<double>(n), 1.0 - delta);
        scan.scaled[n - 1] = s;
        finite = finite && std::isfinite(s);
        if (s > scan.max_scaled) {
            scan.max_scaled = s;
            scan.argmax = n;
        }
    }
    const double last = scan.scaled.back();
    const double half = scan.scaled[nmax / 2 - 1];
    scan.relative_change = std::abs(last - half) / std::abs(last);
    scan.bounded = finite && scan.relative_change < 0.01;
    return scan;
}

RatioTestResult ratio_test(const std::vector<double>& terms) {
    for (double v : terms)
        require(v >= 0.0 && !std::isnan(v), ErrorCode::invalid_argument, "ratio_test: terms must be >= 0");
    std::vector<double> logs(terms.size());
    for (std::size_t i = 0; i < terms.size(); ++i) logs[i] = std::log(terms[i]);
    return ratio_test_log(logs);
}

RatioTestResult ratio_test_log(const std::vector<double>& log_terms) {
    const double ninf = -std::numeric_limits<double>::infinity();
    if (std::all_of(log_terms.begin(), log_terms.end(), [&](double v) { return v == ninf; }))
        return {true, 0, 0.0};
    std::vector<double> log_r;
    for (std::size_t i = 0; i + 1 < log_terms.size(); ++i) {
        const double a = log_terms[i], b = log_terms[i + 1];
        if (b == ninf) log_r.push_back(ninf);
        else if (a == ninf) log_r.push_back(std::numeric_limits<double>::infinity());
        else log_r.push_back(b - a);
    }
    return ratio_test_from_log_ratios(log_r);
}

RatioTestResult scan_vn_bounds(const ExponentPlan& plan, const BoundInputs& in, int horizon) {
    require(horizon >= 1, ErrorCode::invalid_argument, "scan_vn_bounds: horizon must be >= 1");
    std::vector<double> logs(static_cast<std::size_t>(horizon) + 1);
    for (int n = 0; n <= horizon; ++n) logs[n] = vn_norm_bounds(n, plan, in).log_vn_bound;
    return ratio_test_log(logs);
}

}  // namespace kolmo
