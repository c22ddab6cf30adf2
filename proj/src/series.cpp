#include "kolmo/series.hpp"

#include "kolmo/error.hpp"
#include "kolmo/gaussian.hpp"
#include "kolmo/parallel.hpp"
#include "kolmo/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>

namespace kolmo {

std::string to_string(TimeSampling mode) {
    return mode == TimeSampling::uniform ? "uniform" : "dirichlet";
}

TimeSampling time_sampling_from_string(const std::string& s) {
    if (s == "uniform") return TimeSampling::uniform;
    if (s == "dirichlet") return TimeSampling::dirichlet;
    fail(ErrorCode::config_error, "unknown time sampling mode '" + s + "' (expected uniform|dirichlet)");
}

namespace {

constexpr double kMinSpacing = 1e-12;

/// Draws ordered times into `times` (size n) and returns log(weight).
/// Reused buffers keep the per-sample loop allocation free.
class TimeSampler {
  public:
    TimeSampler(int n, double t, TimeSampling mode, double delta) : n_(n), t_(t), mode_(mode), delta_(delta) {
        require(n >= 1, ErrorCode::invalid_argument, "sample_ordered_times: n must be >= 1");
        require(t > 0.0, ErrorCode::domain_error, "sample_ordered_times: t must be > 0");
        if (mode == TimeSampling::dirichlet)
            require(delta > 0.0 && delta < 1.0, ErrorCode::domain_error,
                    "sample_ordered_times: dirichlet mode needs delta in (0,1)");
        alpha_ = 1.0 - delta;
        // log(t^n / n!)
        log_uniform_weight_ = n * std::log(t) - std::lgamma(n + 1.0);
        // log of the Dirichlet normalizer times the Jacobian t^n
        log_dirichlet_const_ = n * std::log(t) + (n + 1) * std::lgamma(alpha_) - std::lgamma((n + 1) * alpha_);
        gam_.resize(static_cast<std::size_t>(n) + 1);
    }

    double draw(RandomStream& rng, std::span<double> times, unsigned& resamples) {
        for (;;) {
            const double lw = mode_ == TimeSampling::uniform ? draw_uniform(rng, times) : draw_dirichlet(rng, times);
            if (spacings_ok(times)) return lw;
            ++resamples;
        }
    }

  private:
    double draw_uniform(RandomStream& rng, std::span<double> times) {
        for (int i = 0; i < n_; ++i) times[i] = t_ * rng.uniform();
        std::sort(times.begin(), times.end());
        return log_uniform_weight_;
    }

    double draw_dirichlet(RandomStream& rng, std::span<double> times) {
        double sum = 0.0;
        for (auto& g : gam_) {
            g = rng.gamma(alpha_);
            sum += g;
        }
        const double log_sum = std::log(sum);
        double log_prod = 0.0;  // sum_j log u_j
        double acc = 0.0;
        for (int i = 0; i < n_; ++i) {
            acc += gam_[i];
            times[i] = t_ * (acc / sum);
        }
        for (double g : gam_) log_prod += std::log(g) - log_sum;
        // weight = 1 / density(r) = C t^n prod u_j^{delta}
        return log_dirichlet_const_ + delta_ * log_prod;
    }

    bool spacings_ok(std::span<const double> times) const {
        const double guard = kMinSpacing * t_;
        double prev = 0.0;
        for (double r : times) {
            if (!(r - prev >= guard)) return false;
            prev = r;
        }
        return t_ - prev >= guard;
    }

    int n_;
    double t_;
    TimeSampling mode_;
    double delta_;
    double alpha_ = 1.0;
    double log_uniform_weight_ = 0.0;
    double log_dirichlet_const_ = 0.0;
    std::vector<double> gam_;
};

/// Per-thread scratch for one product-term sample.
struct TermScratch {
    explicit TermScratch(std::size_t dim, int n) : z(dim), b(dim), times(static_cast<std::size_t>(std::max(n, 1))) {}
    std::vector<double> z;
    std::vector<double> b;
    std::vector<double> times;
};

/// One sample of weight * prod_i <Lambda(dt_i) B(Z_{r_i}), g_i>, leaving
/// Z_t in scratch.z. n = 0 just draws Z_t.
double sample_product(const SpectralModel& model, const DriftSpec& drift, double t, const StateVector& x, int n,
                      TimeSampler* sampler, RandomStream& rng, TermScratch& s, unsigned& resamples) {
    const std::size_t dim = model.dim();
    std::copy(x.coords().begin(), x.coords().end(), s.z.begin());
    auto step = [&](double dt) {
        for (std::size_t k = 0; k < dim; ++k) {
            const double decay = std::exp(model.a(k) * dt);
            const double sd = std::sqrt(qt_scalar(model.a(k), model.q(k), dt));
            s.z[k] = decay * s.z[k] + sd * rng.normal();
        }
    };
    if (n == 0) {
        step(t);
        return 1.0;
    }
    std::span<double> times(s.times.data(), static_cast<std::size_t>(n));
    const double log_w = sampler->draw(rng, times, resamples);
    step(times[0]);
    double prod = 1.0;
    for (int i = 0; i < n; ++i) {
        const double next = i + 1 < n ? times[i + 1] : t;
        const double dt = next - times[i];
        drift.apply(s.z, s.b);
        double factor = 0.0;
        for (std::size_t k = 0; k < dim; ++k) {
            const double decay = std::exp(model.a(k) * dt);
            const double sd = std::sqrt(qt_scalar(model.a(k), model.q(k), dt));
            const double g = rng.normal();
            factor += (decay / sd) * s.b[k] * g;
            s.z[k] = decay * s.z[k] + sd * g;
        }
        prod *= factor;
    }
    return std::exp(log_w) * prod;
}

void check_inputs(const SpectralModel& model, const DriftSpec& drift, const TestFunctionSpec* phi, double t,
                  const StateVector& x, int n, const SeriesConfig& cfg) {
    model.check_dim(x.size(), "initial state");
    drift.check_model(model);
    if (phi) phi->check_model(model);
    require(t > 0.0, ErrorCode::domain_error, "series: t must be > 0");
    require(n >= 0, ErrorCode::invalid_argument, "series: order must be >= 0");
    require(cfg.nsamples >= 2, ErrorCode::invalid_argument, "series: need at least 2 samples");
    if (n >= 1 && !cfg.allow_unbounded) {
        if (phi && !phi->bounded())
            fail(ErrorCode::hypothesis_violation,
                 "series: phi '" + phi->name() + "' is unbounded; v_n for n >= 1 requires a bounded test "
                 "function (set allow_unbounded to override)");
        if (!drift.within_hypotheses())
            fail(ErrorCode::hypothesis_violation,
                 "series: drift '" + drift.name() + "' has linear growth; outside the admissible class "
                 "(set allow_unbounded to override)");
    }
}

void abort_on_nonfinite(const std::vector<double>& vals, const char* what, int n) {
    for (std::size_t i = 0; i < vals.size(); ++i) {
        if (!std::isfinite(vals[i])) {
            std::ostringstream os;
            os << what << ": non-finite sample at index " << i << " (order " << n << ", value " << vals[i] << ")";
            fail(ErrorCode::numeric_failure, os.str());
        }
    }
}

double gauss_hermite_expectation(const SpectralModel& model, const TestFunctionSpec& phi, double t,
                                 const StateVector& x, std::size_t nodes) {
    const QuadratureRule gh = gauss_hermite_normal(nodes);
    const double m = std::exp(model.a(0) * t) * x[0];
    const double sd = std::sqrt(qt_scalar(model.a(0), model.q(0), t));
    double acc = 0.0;
    for (std::size_t i = 0; i < gh.size(); ++i) {
        const double z = m + sd * gh.nodes[i];
        acc += gh.weights[i] * phi(std::span<const double>(&z, 1));
    }
    return acc;
}

}  // namespace

SimplexSample sample_ordered_times(int n, double t, TimeSampling mode, double delta, RandomStream& rng) {
    TimeSampler sampler(n, t, mode, delta);
    SimplexSample out;
    out.times.resize(static_cast<std::size_t>(n));
    out.weight = std::exp(sampler.draw(rng, out.times, out.resamples));
    return out;
}

double product_factor(const SpectralModel& model, const DriftSpec& drift, double dt, const StateVector& z,
                      const StateVector& g) {
    model.check_dim(z.size(), "product_factor state");
    model.check_dim(g.size(), "product_factor increment");
    const LambdaDiagonal lam = lambda_diagonal(model, dt);
    const StateVector b = drift(z);
    double s = 0.0;
    for (std::size_t k = 0; k < z.size(); ++k) s += lam.entries[k] * b[k] * g[k];
    return s;
}

Estimate estimate_vn(const SpectralModel& model, const DriftSpec& drift, const TestFunctionSpec& phi, double t,
                     const StateVector& x, int n, const SeriesConfig& cfg) {
    check_inputs(model, drift, &phi, t, x, n, cfg);

    if (n >= 1 && drift.kind() == DriftSpec::Kind::zero) {
        Estimate zero;
        zero.nsamples = cfg.nsamples;
        zero.seed = cfg.seed;
        return zero;
    }
    if (n == 0 && model.dim() == 1 && cfg.gauss_hermite_n0) {
        Estimate e;
        e.mean = gauss_hermite_expectation(model, phi, t, x, cfg.hermite_nodes);
        e.nsamples = cfg.hermite_nodes;
        e.seed = cfg.seed;
        return e;
    }

    std::vector<double> vals(cfg.nsamples);
    const std::uint32_t dom = domain::series_term + static_cast<std::uint32_t>(n);
    parallel_for(cfg.nsamples, cfg.workers, [&](std::size_t begin, std::size_t end) {
        TermScratch scratch(model.dim(), n);
        std::unique_ptr<TimeSampler> sampler;
        if (n >= 1) sampler = std::make_unique<TimeSampler>(n, t, cfg.mode, cfg.delta);
        unsigned resamples = 0;
        for (std::size_t i = begin; i < end; ++i) {
            RandomStream rng(cfg.seed, i, dom);
            const double w = sample_product(model, drift, t, x, n, sampler.get(), rng, scratch, resamples);
            vals[i] = w * phi(std::span<const double>(scratch.z));
        }
    });
    abort_on_nonfinite(vals, "estimate_vn", n);
    return summarize(vals, cfg.seed);
}

double quadrature_vn(const SpectralModel& model, const DriftSpec& drift, const TestFunctionSpec& phi, double t,
                     const StateVector& x, int n, const QuadratureConfig& qcfg) {
    if (model.dim() != 1) fail(ErrorCode::unsupported, "quadrature_vn: only one-dimensional models are supported");
    if (n < 1 || n > 2) fail(ErrorCode::unsupported, "quadrature_vn: only n = 1 and n = 2 are supported");
    model.check_dim(x.size(), "initial state");
    drift.check_model(model);
    phi.check_model(model);
    require(t > 0.0, ErrorCode::domain_error, "quadrature_vn: t must be > 0");
    if (drift.kind() == DriftSpec::Kind::zero) return 0.0;

    const double a = model.a(0), q = model.q(0);
    const QuadratureRule gl = gauss_legendre(qcfg.legendre_nodes, 0.0, 1.0);
    const QuadratureRule gh = gauss_hermite_normal(qcfg.hermite_nodes);
    auto decay = [a](double dt) { return std::exp(a * dt); };
    auto sd = [a, q](double dt) { return std::sqrt(qt_scalar(a, q, dt)); };
    auto B = [&drift](double z) {
        double out;
        drift.apply(std::span<const double>(&z, 1), std::span<double>(&out, 1));
        return out;
    };
    auto f = [&phi](double z) { return phi(std::span<const double>(&z, 1)); };

    // E over g of phi(m + s g) * g, then times Lambda = decay / s
    auto last_leg = [&](double z, double dt) {
        const double m = decay(dt) * z, s = sd(dt);
        double acc = 0.0;
        for (std::size_t j = 0; j < gh.size(); ++j) acc += gh.weights[j] * f(m + s * gh.nodes[j]) * gh.nodes[j];
        return acc * decay(dt) / s;
    };

    double total = 0.0;
    if (n == 1) {
        for (std::size_t i = 0; i < gl.size(); ++i) {
            const double r = t * gl.nodes[i];
            const double m0 = decay(r) * x[0], s0 = sd(r);
            double inner = 0.0;
            for (std::size_t j = 0; j < gh.size(); ++j) {
                const double z = m0 + s0 * gh.nodes[j];
                inner += gh.weights[j] * B(z) * last_leg(z, t - r);
            }
            total += t * gl.weights[i] * inner;
        }
        return total;
    }

    for (std::size_t i2 = 0; i2 < gl.size(); ++i2) {
        const double r2 = t * gl.nodes[i2];
        const double w2 = t * gl.weights[i2];
        for (std::size_t i1 = 0; i1 < gl.size(); ++i1) {
            const double r1 = r2 * gl.nodes[i1];
            const double w1 = r2 * gl.weights[i1];
            const double m0 = decay(r1) * x[0], s0 = sd(r1);
            const double d12 = r2 - r1;
            const double dec12 = decay(d12), s12 = sd(d12), lam12 = dec12 / s12;
            double acc = 0.0;
            for (std::size_t j0 = 0; j0 < gh.size(); ++j0) {
                const double z1 = m0 + s0 * gh.nodes[j0];
                const double b1 = B(z1);
                double acc1 = 0.0;
                for (std::size_t j1 = 0; j1 < gh.size(); ++j1) {
                    const double g1 = gh.nodes[j1];
                    const double z2 = dec12 * z1 + s12 * g1;
                    acc1 += gh.weights[j1] * lam12 * b1 * g1 * B(z2) * last_leg(z2, t - r2);
                }
                acc += gh.weights[j0] * acc1;
            }
            total += w2 * w1 * acc;
        }
    }
    return total;
}

SeriesResult estimate_series(const SpectralModel& model, const DriftSpec& drift, const TestFunctionSpec& phi,
                             double t, const StateVector& x, int n_max, const SeriesConfig& cfg) {
    require(n_max >= 0, ErrorCode::invalid_argument, "estimate_series: n_max must be >= 0");
    SeriesResult res;
    double sum = 0.0, var = 0.0;
    for (int n = 0; n <= n_max; ++n) {
        res.terms.push_back(estimate_vn(model, drift, phi, t, x, n, cfg));
        const Estimate& e = res.terms.back();
        sum += e.mean;
        var += e.std_error * e.std_error;
        Estimate ps = e;
        ps.mean = sum;
        ps.std_error = std::sqrt(var);
        res.partial_sums.push_back(ps);
    }
    for (int n = 0; n < n_max; ++n) {
        const double cur = std::abs(res.terms[n].mean);
        res.ratio_diagnostics.push_back(cur > 0.0 ? std::abs(res.terms[n + 1].mean) / cur
                                                  : std::numeric_limits<double>::quiet_NaN());
    }
    return res;
}

Estimate likelihood_weight_partial(const SpectralModel& model, const DriftSpec& drift, double t,
                                   const StateVector& x, int n_max, const SeriesConfig& cfg) {
    check_inputs(model, drift, nullptr, t, x, n_max, cfg);
    if (n_max == 0 || drift.kind() == DriftSpec::Kind::zero) {
        Estimate one;
        one.mean = 1.0;
        one.nsamples = cfg.nsamples;
        one.seed = cfg.seed;
        return one;
    }
    std::vector<double> vals(cfg.nsamples);
    parallel_for(cfg.nsamples, cfg.workers, [&](std::size_t begin, std::size_t end) {
        TermScratch scratch(model.dim(), n_max);
        std::vector<TimeSampler> samplers;
        for (int n = 1; n <= n_max; ++n) samplers.emplace_back(n, t, cfg.mode, cfg.delta);
        unsigned resamples = 0;
        for (std::size_t i = begin; i < end; ++i) {
            RandomStream rng(cfg.seed, i, domain::likelihood);
            double rho = 1.0;
            for (int n = 1; n <= n_max; ++n)
                rho += sample_product(model, drift, t, x, n, &samplers[n - 1], rng, scratch, resamples);
            vals[i] = rho;
        }
    });
    abort_on_nonfinite(vals, "likelihood_weight_partial", n_max);
    return summarize(vals, cfg.seed);
}

}  // namespace kolmo
