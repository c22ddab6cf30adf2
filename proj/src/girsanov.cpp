#include "kolmo/girsanov.hpp"

#include "kolmo/csv.hpp"
#include "kolmo/error.hpp"
#include "kolmo/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace kolmo {

void PathGrid::validate() const {
    require(std::isfinite(t_final) && t_final > 0.0, ErrorCode::domain_error, "path grid: t must be finite and > 0");
    require(steps >= 1, ErrorCode::invalid_argument, "path grid: steps must be >= 1");
}

namespace {

// e^u sinh(u)/u - (expm1(u)/u)^2: residual variance of the OU increment after
// regressing on dW, in units of q dt.
double residual_factor(double u) {
    if (std::abs(u) < 1e-3) return u * u / 12.0 + u * u * u / 12.0 + 17.0 * u * u * u * u / 360.0;
    const double e = std::expm1(u) / u;
    const double v = std::expm1(2.0 * u) / (2.0 * u) - e * e;
    return std::max(v, 0.0);
}

void require_girsanov_drift(const SpectralModel& model, const DriftSpec& drift) {
    drift.check_model(model);
    require(drift.qhalf_compatible(), ErrorCode::hypothesis_violation,
            "girsanov: drift range is not contained in the range of Q^{1/2}; psi = Q^{-1/2} B is undefined");
}

void check_inputs(const SpectralModel& model, const DriftSpec& drift, const TestFunctionSpec& phi, double t,
                  const StateVector& x, const GirsanovConfig& cfg) {
    require_girsanov_drift(model, drift);
    phi.check_model(model);
    model.check_dim(x.size(), "girsanov: x");
    PathGrid{t, cfg.steps}.validate();
    require(cfg.npaths >= 2, ErrorCode::invalid_argument, "girsanov: need at least 2 paths");
}

}  // namespace

CoupledStep coupled_step(const SpectralModel& model, double dt) {
    require(dt > 0.0 && std::isfinite(dt), ErrorCode::domain_error, "coupled_step: dt must be finite and > 0");
    const std::size_t n = model.dim();
    CoupledStep c;
    c.decay.resize(n);
    c.dw_gain.resize(n);
    c.corr_sd.resize(n);
    c.sqrt_dt = std::sqrt(dt);
    for (std::size_t k = 0; k < n; ++k) {
        const double u = model.a(k) * dt;
        c.decay[k] = std::exp(u);
        c.dw_gain[k] = std::sqrt(model.q(k)) * (std::abs(u) < 1e-12 ? 1.0 + 0.5 * u : std::expm1(u) / u);
        c.corr_sd[k] = std::sqrt(model.q(k) * dt * residual_factor(u));
    }
    return c;
}

OuPath simulate_ou_path(const SpectralModel& model, const StateVector& x, const PathGrid& grid, RandomStream& rng) {
    grid.validate();
    model.check_dim(x.size(), "simulate_ou_path");
    const CoupledStep c = coupled_step(model, grid.dt());
    const std::size_t n = model.dim();
    OuPath path;
    path.states.reserve(grid.steps + 1);
    path.dW.reserve(grid.steps);
    path.states.push_back(x);
    StateVector z = x;
    for (int j = 0; j < grid.steps; ++j) {
        StateVector dw(n);
        for (std::size_t k = 0; k < n; ++k) {
            dw[k] = c.sqrt_dt * rng.normal();
            const double corr = rng.normal();
            z[k] = c.decay[k] * z[k] + c.dw_gain[k] * dw[k] + c.corr_sd[k] * corr;
        }
        path.dW.push_back(std::move(dw));
        path.states.push_back(z);
    }
    return path;
}

StateVector psi_eval(const SpectralModel& model, const DriftSpec& drift, const StateVector& z) {
    require_girsanov_drift(model, drift);
    model.check_dim(z.size(), "psi_eval");
    StateVector out = drift(z);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] /= std::sqrt(model.q(k));
    return out;
}

MartingaleLadder accumulate_ladder(const OuPath& path, const DriftSpec& drift, const SpectralModel& model, int n,
                                   double dt) {
    require(n >= 0, ErrorCode::invalid_argument, "accumulate_ladder: n must be >= 0");
    require(dt > 0.0, ErrorCode::domain_error, "accumulate_ladder: dt must be > 0");
    require(path.states.size() == path.dW.size() + 1, ErrorCode::dimension_mismatch,
            "accumulate_ladder: path needs one more state than increments");
    MartingaleLadder out;
    out.order = n;
    out.values.assign(static_cast<std::size_t>(n) + 1, 0.0);
    out.values[0] = 1.0;
    for (std::size_t j = 0; j < path.dW.size(); ++j) {
        const StateVector psi = psi_eval(model, drift, path.states[j]);
        const double dl = dot(psi.span(), path.dW[j].span());
        for (int k = n; k >= 1; --k) out.values[k] += out.values[k - 1] * dl;
        out.log_martingale += dl;
        out.quadratic_variation += dot(psi.span(), psi.span()) * dt;
        if (!std::isfinite(out.log_martingale) || !std::isfinite(out.quadratic_variation) ||
            (n > 0 && !std::isfinite(out.values[n])))
            fail(ErrorCode::numeric_failure, "accumulate_ladder: non-finite value at step " + std::to_string(j));
    }
    out.exp_martingale = std::exp(out.log_martingale - 0.5 * out.quadratic_variation);
    return out;
}

GirsanovRun run_girsanov(const SpectralModel& model, const DriftSpec& drift, const TestFunctionSpec& phi, double t,
                         const StateVector& x, int n_max, const GirsanovConfig& cfg, int ladder_order) {
    check_inputs(model, drift, phi, t, x, cfg);
    require(n_max >= 0, ErrorCode::invalid_argument, "run_girsanov: n_max must be >= 0");
    const int order = std::max(n_max, ladder_order);
    const std::size_t dim = model.dim();
    const double dt = t / cfg.steps;
    const CoupledStep c = coupled_step(model, dt);
    std::vector<double> inv_sqrt_q(dim);
    for (std::size_t k = 0; k < dim; ++k) inv_sqrt_q[k] = 1.0 / std::sqrt(model.q(k));

    const std::size_t np = cfg.npaths;
    const std::size_t nterms = static_cast<std::size_t>(n_max) + 1;
    const std::size_t nladder = static_cast<std::size_t>(order) + 1;
    std::vector<std::vector<double>> phi_ladder(nterms, std::vector<double>(np));
    std::vector<std::vector<double>> ladder_sq(nladder, std::vector<double>(np));
    std::vector<double> mart(np), phi_mart(np), residual(np);

    parallel_for(np, cfg.workers, [&](std::size_t begin, std::size_t end) {
        std::vector<double> z(dim), b(dim), m(nladder);
        for (std::size_t i = begin; i < end; ++i) {
            RandomStream rng(cfg.seed, i, domain::girsanov);
            std::copy(x.coords().begin(), x.coords().end(), z.begin());
            std::fill(m.begin(), m.end(), 0.0);
            m[0] = 1.0;
            double l = 0.0, qv = 0.0;
            for (int j = 0; j < cfg.steps; ++j) {
                drift.apply(z, b);
                double dl = 0.0, psi2 = 0.0;
                for (std::size_t k = 0; k < dim; ++k) {
                    const double psi = b[k] * inv_sqrt_q[k];
                    const double dw = c.sqrt_dt * rng.normal();
                    const double corr = rng.normal();
                    dl += psi * dw;
                    psi2 += psi * psi;
                    z[k] = c.decay[k] * z[k] + c.dw_gain[k] * dw + c.corr_sd[k] * corr;
                }
                for (std::size_t k = nladder - 1; k >= 1; --k) m[k] += m[k - 1] * dl;
                l += dl;
                qv += psi2 * dt;
                if (!std::isfinite(l) || !std::isfinite(qv) || !std::isfinite(m[nladder - 1]))
                    fail(ErrorCode::numeric_failure, "girsanov: non-finite accumulation on path " + std::to_string(i) +
                                                         " at step " + std::to_string(j));
            }
            const double f = phi(z);
            const double mt = std::exp(l - 0.5 * qv);
            double partial = 0.0;
            for (std::size_t k = 0; k < nladder; ++k) {
                if (k < nterms) phi_ladder[k][i] = f * m[k];
                ladder_sq[k][i] = m[k] * m[k];
                partial += m[k];
            }
            mart[i] = mt;
            phi_mart[i] = f * mt;
            residual[i] = std::abs(mt - partial);
        }
    });

    GirsanovRun run;
    for (const auto& col : phi_ladder) run.terms.push_back(summarize(col, cfg.seed));
    for (const auto& col : ladder_sq) run.ladder_second_moment.push_back(summarize(col, cfg.seed));
    run.martingale_mean = summarize(mart, cfg.seed);
    run.u = summarize(phi_mart, cfg.seed);
    run.ladder_residual_l1 = summarize(residual, cfg.seed);
    run.min_martingale = *std::min_element(mart.begin(), mart.end());

    std::vector<double> sq(np);
    for (std::size_t i = 0; i < np; ++i) sq[i] = mart[i] * mart[i];
    const double s1 = pairwise_sum(mart);
    const double s2 = pairwise_sum(sq);
    WeightDiagnostics& w = run.weights;
    w.ess = s2 > 0.0 ? s1 * s1 / s2 : 0.0;
    w.ess_fraction = w.ess / static_cast<double>(np);
    w.max_weight_share = s1 > 0.0 ? *std::max_element(mart.begin(), mart.end()) / s1 : 0.0;
    w.psi_bounded = std::isfinite(drift.psi_sup_norm(model));
    if (w.ess_fraction < 0.01)
        w.warnings.push_back("effective sample size below 1% of paths (" + format_double(w.ess) + ")");
    if (!w.psi_bounded)
        w.warnings.push_back("psi is unbounded; the exponential moment condition is not verified");
    return run;
}

Estimate estimate_In(const SpectralModel& model, const DriftSpec& drift, const TestFunctionSpec& phi, double t,
                     const StateVector& x, int n, const GirsanovConfig& cfg) {
    require(n >= 0, ErrorCode::invalid_argument, "estimate_In: n must be >= 0");
    return run_girsanov(model, drift, phi, t, x, n, cfg).terms.back();
}

GirsanovEstimate estimate_girsanov_u(const SpectralModel& model, const DriftSpec& drift, const TestFunctionSpec& phi,
                                     double t, const StateVector& x, const GirsanovConfig& cfg) {
    GirsanovRun run = run_girsanov(model, drift, phi, t, x, 0, cfg);
    return {run.u, std::move(run.weights)};
}

DirectEstimate estimate_u_direct(const SpectralModel& model, const DriftSpec& drift, const TestFunctionSpec& phi,
                                 double t, const StateVector& x, const GirsanovConfig& cfg) {
    drift.check_model(model);
    phi.check_model(model);
    model.check_dim(x.size(), "direct: x");
    PathGrid{t, cfg.steps}.validate();
    require(cfg.npaths >= 2, ErrorCode::invalid_argument, "direct: need at least 2 paths");

    const std::size_t dim = model.dim();
    const double dt = t / cfg.steps;
    const bool halve = cfg.steps % 2 == 0;
    const CoupledStep c = coupled_step(model, dt);
    std::vector<double> gain_f(dim), decay_c(dim), gain_c(dim);
    for (std::size_t k = 0; k < dim; ++k) {
        const double a = model.a(k);
        gain_f[k] = std::expm1(a * dt) / a;
        decay_c[k] = std::exp(2.0 * a * dt);
        gain_c[k] = std::expm1(2.0 * a * dt) / a;
    }
    const std::uint32_t dom = cfg.share_noise ? domain::girsanov : domain::direct;

    const std::size_t np = cfg.npaths;
    std::vector<double> fine(np), diff(np);
    parallel_for(np, cfg.workers, [&](std::size_t begin, std::size_t end) {
        std::vector<double> zf(dim), zc(dim), bf(dim), bc(dim), held(dim);
        for (std::size_t i = begin; i < end; ++i) {
            RandomStream rng(cfg.seed, i, dom);
            std::copy(x.coords().begin(), x.coords().end(), zf.begin());
            std::copy(x.coords().begin(), x.coords().end(), zc.begin());
            for (int j = 0; j < cfg.steps; ++j) {
                const bool coarse_step = halve && j % 2 == 1;
                drift.apply(zf, bf);
                if (coarse_step) drift.apply(zc, bc);
                for (std::size_t k = 0; k < dim; ++k) {
                    const double dw = c.sqrt_dt * rng.normal();
                    const double noise = c.dw_gain[k] * dw + c.corr_sd[k] * rng.normal();
                    zf[k] = c.decay[k] * zf[k] + gain_f[k] * bf[k] + noise;
                    if (!halve) continue;
                    if (coarse_step)
                        zc[k] = decay_c[k] * zc[k] + gain_c[k] * bc[k] + c.decay[k] * held[k] + noise;
                    else
                        held[k] = noise;
                }
            }
            fine[i] = phi(zf);
            diff[i] = halve ? phi(zc) - fine[i] : 0.0;
            if (!std::isfinite(fine[i]) || !std::isfinite(diff[i]))
                fail(ErrorCode::numeric_failure, "direct: non-finite terminal value on path " + std::to_string(i));
        }
    });
    DirectEstimate out{summarize(fine, cfg.seed), summarize(diff, cfg.seed)};
    if (!halve) out.halving_difference.valid = false;
    return out;
}

void dump_paths(const SpectralModel& model, const DriftSpec& drift, double t, const StateVector& x,
                const GirsanovConfig& cfg, std::uint64_t npaths, std::ostream& out) {
    require_girsanov_drift(model, drift);
    model.check_dim(x.size(), "dump_paths: x");
    const PathGrid grid{t, cfg.steps};
    grid.validate();
    const double dt = grid.dt();
    out << "path_id,t";
    for (std::size_t k = 0; k < model.dim(); ++k) out << ",z" << k;
    out << ",L,M\n";
    for (std::uint64_t i = 0; i < npaths; ++i) {
        RandomStream rng(cfg.seed, i, domain::girsanov);
        const OuPath path = simulate_ou_path(model, x, grid, rng);
        double l = 0.0, qv = 0.0;
        for (int j = 0; j <= grid.steps; ++j) {
            out << i << ',' << format_double(grid.time(j));
            for (double v : path.states[j].coords()) out << ',' << format_double(v);
            out << ',' << format_double(l) << ',' << format_double(std::exp(l - 0.5 * qv)) << '\n';
            if (j == grid.steps) break;
            const StateVector psi = psi_eval(model, drift, path.states[j]);
            l += dot(psi.span(), path.dW[j].span());
            qv += dot(psi.span(), psi.span()) * dt;
        }
    }
}

}  // namespace kolmo
