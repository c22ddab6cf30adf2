#include "kolmo/gaussian.hpp"

#include "kolmo/error.hpp"
#include "kolmo/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace kolmo {

void GaussianSpec::validate() const {
    require(mean.size() == var.size(), ErrorCode::dimension_mismatch, "gaussian: mean/var length mismatch");
    for (double v : var)
        require(std::isfinite(v) && v >= 0.0, ErrorCode::invalid_argument,
                "gaussian: variances must be finite and >= 0");
}

GaussianSpec ou_law(const SpectralModel& model, double t, const StateVector& x) {
    require(t >= 0.0, ErrorCode::domain_error, "ou_law: t must be >= 0");
    GaussianSpec spec{semigroup_apply(model, t, x), std::vector<double>(model.dim(), 0.0)};
    if (t > 0.0) spec.var = qt_eigenvalues(model, t);
    return spec;
}

GaussianSpec invariant_law(const SpectralModel& model) {
    return {StateVector(model.dim()), q_infinity(model).eigenvalues};
}

StateVector sample_gaussian(const GaussianSpec& spec, RandomStream& rng) {
    spec.validate();
    StateVector out(spec.mean.size());
    for (std::size_t k = 0; k < out.size(); ++k) {
        const double g = rng.normal();
        out[k] = spec.var[k] == 0.0 ? spec.mean[k] : spec.mean[k] + std::sqrt(spec.var[k]) * g;
    }
    return out;
}

TransitionCoefficients transition_coefficients(const SpectralModel& model, double dt) {
    require(dt > 0.0, ErrorCode::domain_error, "transition: dt must be > 0");
    TransitionCoefficients c;
    c.dt = dt;
    const std::size_t n = model.dim();
    c.decay.resize(n);
    c.stddev.resize(n);
    c.lambda.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        c.decay[k] = std::exp(model.a(k) * dt);
        c.stddev[k] = std::sqrt(qt_scalar(model.a(k), model.q(k), dt));
        c.lambda[k] = c.decay[k] / c.stddev[k];
    }
    return c;
}

OuStep ou_transition(const SpectralModel& model, const StateVector& z, double dt, RandomStream& rng) {
    model.check_dim(z.size(), "ou_transition");
    const TransitionCoefficients c = transition_coefficients(model, dt);
    OuStep step{StateVector(z.size()), StateVector(z.size())};
    for (std::size_t k = 0; k < z.size(); ++k) {
        step.g[k] = rng.normal();
        step.z_next[k] = c.decay[k] * z[k] + c.stddev[k] * step.g[k];
    }
    return step;
}

double trace_power(std::span<const double> eigs, int k) {
    double s = 0.0;
    for (double e : eigs) s += std::pow(e, k + 1);
    return s;
}

namespace {

// log Tr(Q^{k+1}) without underflow for large k.
double log_trace_power(std::span<const double> eigs, int k) {
    const double top = *std::max_element(eigs.begin(), eigs.end());
    if (top <= 0.0) return -std::numeric_limits<double>::infinity();
    double s = 0.0;
    for (double e : eigs) s += std::pow(e / top, k + 1);
    return (k + 1) * std::log(top) + std::log(s);
}

double log_binomial(int n, int k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

}  // namespace

MomentSeries exact_even_moments(std::span<const double> qinf_eigs, int n_max) {
    require(n_max >= 0, ErrorCode::invalid_argument, "exact_even_moments: n_max must be >= 0");
    require(!qinf_eigs.empty(), ErrorCode::invalid_argument, "exact_even_moments: empty spectrum");
    for (double e : qinf_eigs)
        require(std::isfinite(e) && e >= 0.0, ErrorCode::invalid_argument,
                "exact_even_moments: eigenvalues must be finite and >= 0");

    constexpr int kDirectOrders = 20;
    const auto n_total = static_cast<std::size_t>(n_max) + 1;
    MomentSeries out;
    out.values.assign(n_total, 0.0);
    out.log_values.assign(n_total, -std::numeric_limits<double>::infinity());
    out.values[0] = 1.0;
    out.log_values[0] = 0.0;

    // Direct recursion in doubles for low orders.
    const int direct_top = std::min(n_max, kDirectOrders);
    std::vector<double> tr(static_cast<std::size_t>(direct_top) + 1);
    for (int k = 0; k < direct_top; ++k) tr[k] = trace_power(qinf_eigs, k);
    for (int n = 0; n < direct_top; ++n) {
        double acc = 0.0;
        double binom = 1.0;
        double two_k_fact = 1.0;  // 2^k k!
        for (int k = 0; k <= n; ++k) {
            if (k > 0) {
                binom = binom * (n - k + 1) / k;
                two_k_fact *= 2.0 * k;
            }
            acc += two_k_fact * binom * out.values[n - k] * tr[k];
        }
        out.values[n + 1] = acc;
        out.log_values[n + 1] = std::log(acc);
    }

    // Log-space continuation.
    if (n_max > kDirectOrders) {
        std::vector<double> ltr(n_total);
        for (int k = 0; k < n_max; ++k) ltr[k] = log_trace_power(qinf_eigs, k);
        std::vector<double> terms;
        for (int n = kDirectOrders; n < n_max; ++n) {
            terms.clear();
            for (int k = 0; k <= n; ++k)
                terms.push_back(k * std::numbers::ln2 + std::lgamma(k + 1.0) + log_binomial(n, k) +
                                out.log_values[n - k] + ltr[k]);
            const double top = *std::max_element(terms.begin(), terms.end());
            double s = 0.0;
            if (std::isfinite(top))
                for (double t : terms) s += std::exp(t - top);
            out.log_values[n + 1] = std::isfinite(top) ? top + std::log(s) : top;
            out.values[n + 1] = std::exp(out.log_values[n + 1]);
        }
    }
    for (double v : out.values)
        if (std::isinf(v)) out.overflow = true;
    return out;
}

double log_moment_bound(double trace_qinf, int n) {
    require(n >= 0 && trace_qinf >= 0.0, ErrorCode::invalid_argument, "moment_bound: need n >= 0, trace >= 0");
    if (n == 0) return 0.0;
    return n * std::numbers::ln2 + std::lgamma(n + 1.0) + n * std::log(trace_qinf);
}

double moment_bound(double trace_qinf, int n) {
    require(n >= 0 && trace_qinf >= 0.0, ErrorCode::invalid_argument, "moment_bound: need n >= 0, trace >= 0");
    double out = 1.0;
    for (int i = 1; i <= n; ++i) out *= 2.0 * i * trace_qinf;
    return out;
}

double lp_moment_bound(double trace_qinf, double p, double c) {
    require(p > 1.0, ErrorCode::domain_error, "lp_moment_bound: p must be > 1");
    require(c > 0.0 && trace_qinf >= 0.0, ErrorCode::invalid_argument, "lp_moment_bound: need c > 0, trace >= 0");
    return c * std::sqrt(trace_qinf) * std::sqrt(p);
}

Estimate lp_norm_estimate(const std::function<double(const StateVector&)>& f, double p,
                          const GaussianSpec& spec, std::uint64_t nsamples, std::uint64_t seed,
                          unsigned workers) {
    require(p >= 1.0, ErrorCode::domain_error, "lp_norm_estimate: p must be >= 1");
    require(nsamples >= 2, ErrorCode::invalid_argument, "lp_norm_estimate: need at least 2 samples");
    spec.validate();
    std::vector<double> vals(nsamples);
    parallel_for(nsamples, workers, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            RandomStream rng(seed, i, domain::lp_norm);
            const double v = f(sample_gaussian(spec, rng));
            vals[i] = std::isfinite(v) ? std::pow(std::abs(v), p) : v;
        }
    });
    const bool degenerate =
        std::all_of(vals.begin(), vals.end(), [&](double v) { return v == vals.front(); });
    Estimate m = summarize(vals, seed);
    Estimate out = m;
    if (!m.valid) return out;
    if (degenerate) {
        // constant |f|: the norm is that constant, recovered without rounding
        out.mean = std::abs(f(spec.mean));
        out.std_error = 0.0;
        return out;
    }
    out.mean = std::pow(m.mean, 1.0 / p);
    out.std_error = m.mean > 0.0 ? std::pow(m.mean, 1.0 / p - 1.0) * m.std_error / p : 0.0;
    return out;
}

}  // namespace kolmo
