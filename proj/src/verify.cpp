#include "kolmo/experiment.hpp"

#include "kolmo/bounds.hpp"
#include "kolmo/csv.hpp"
#include "kolmo/error.hpp"
#include "kolmo/gaussian.hpp"
#include "kolmo/girsanov.hpp"
#include "kolmo/hypotheses.hpp"
#include "kolmo/quadrature.hpp"
#include "kolmo/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

namespace kolmo {

namespace {

namespace fs = std::filesystem;

struct Checks {
    std::string suite;
    std::vector<CheckRow> rows;

    // |value - reference| <= tol
    void near(const std::string& name, double value, double reference, double tol) {
        rows.push_back({suite, name, value, reference, tol, std::abs(value - reference) <= tol});
    }
    // relative agreement
    void rel(const std::string& name, double value, double reference, double tol) {
        const double scale = std::max(std::abs(reference), std::numeric_limits<double>::min());
        rows.push_back({suite, name, value, reference, tol, std::abs(value - reference) / scale <= tol});
    }
    // value <= reference
    void at_most(const std::string& name, double value, double reference) {
        rows.push_back({suite, name, value, reference, 0.0, value <= reference});
    }
    void at_least(const std::string& name, double value, double reference) {
        rows.push_back({suite, name, value, reference, 0.0, value >= reference});
    }
    void truth(const std::string& name, bool ok) { rows.push_back({suite, name, ok ? 1.0 : 0.0, 1.0, 0.0, ok}); }
};

std::string fmt_delta(double d) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%g", d);
    return buf;
}

void identities(Checks& c) {
    for (double delta : {0.25, 0.5, 0.75}) {
        for (int n = 1; n <= 3; ++n) {
            for (bool ep : {false, true}) {
                const std::string name = "simplex_quadrature n=" + std::to_string(n) + " delta=" + fmt_delta(delta) +
                                         (ep ? " endpoint" : "");
                c.rel(name, simplex_time_integral(n, delta, 1.0, ep), nested_simplex_quadrature(n, delta, 1.0, ep),
                      1e-6);
            }
        }
        double worst = 0.0;
        for (int n = 0; n <= 30; ++n) {
            const double g = simplex_time_integral(n, delta, 1.0, false);
            worst = std::max(worst, std::abs(beta_chain_identity(n, delta) - g) / g);
        }
        c.near("beta_chain n<=30 delta=" + fmt_delta(delta), worst, 0.0, 1e-12);

        const GammaRatioScan scan = gamma_ratio_bound_check(200, delta);
        c.truth("gamma_ratio_scaled_bounded delta=" + fmt_delta(delta), scan.bounded);
    }

    const ExponentPlan plan = plan_exponents(2.0, 1.5, 2.0, 10000);
    c.near("exponent_plan n0", plan.n0, 7, 0.0);
    double worst_rec = 0.0, min_p = plan.p[0];
    for (std::size_t n = 1; n < plan.p.size(); ++n) {
        worst_rec = std::max(worst_rec, std::abs(1.0 / plan.p[n] - 1.0 / plan.p[n - 1] - 1.0 / plan.q[n - 1]));
        min_p = std::min(min_p, plan.p[n]);
    }
    c.near("exponent_recurrence", worst_rec, 0.0, 1e-14);
    c.at_least("exponent_p_above_bar_p", min_p, 1.5 + std::numeric_limits<double>::epsilon());

    // constants of the standard model: Tr Q_inf = 1, fitted C_delta
    const SpectralModel standard({-1.0}, {2.0});
    const HypothesisReport hyp = check_hypotheses(standard, DriftSpec::zero(), TestFunctionSpec::cosine({1.0}),
                                                  log_time_grid(1e-6, 1.0, 60));
    const ExponentPlan p15 = plan_exponents(2.0, 1.5, 1.5, 0);
    const BoundInputs in{hyp.c_delta_fit, 0.5, 1.0, 0.5, 2.0, 1.0};
    c.truth("bound_rows_ratio_test beta=0.5 delta=0.5 kappa=1.5", scan_vn_bounds(p15, in).converges);

    c.near("b_product beta=0", b_product_bound(5, 0.0, 2.0, 7, 3.0, 2.0).value, 32.0, 0.0);

    const SpectralModel m({-1.0, -0.3}, {2.0, 0.5});
    double worst_qt = 0.0;
    for (double t : {1e-9, 1e-3, 0.5, 2.0}) {
        const QuadratureRule rule = gauss_legendre(40, 0.0, t);
        for (std::size_t k = 0; k < m.dim(); ++k) {
            double s = 0.0;
            for (std::size_t i = 0; i < rule.size(); ++i)
                s += rule.weights[i] * m.q(k) * std::exp(2.0 * m.a(k) * rule.nodes[i]);
            worst_qt = std::max(worst_qt, std::abs(qt_scalar(m.a(k), m.q(k), t) - s) / s);
        }
    }
    c.near("qt_vs_quadrature", worst_qt, 0.0, 1e-12);
}

void moments(Checks& c, std::uint64_t seed) {
    for (double s2 : {1.0, 0.7}) {
        const std::vector<double> eig{s2};
        const MomentSeries ms = exact_even_moments(eig, 10);
        double worst = 0.0, dfact = 1.0;
        for (int n = 1; n <= 10; ++n) {
            dfact *= 2.0 * n - 1.0;
            const double ref = dfact * std::pow(s2, n);
            worst = std::max(worst, std::abs(ms.values[n] - ref) / ref);
        }
        c.near("double_factorial sigma2=" + fmt_delta(s2), worst, 0.0, 1e-12);
    }
    bool bound_ok = true, trace_ok = true;
    for (std::uint64_t i = 0; i < 100; ++i) {
        RandomStream rng(seed, i, domain::verify);
        const std::size_t dim = 1 + rng.next_u32() % 20;
        std::vector<double> eig(dim);
        for (auto& e : eig) e = rng.uniform();
        double tr = 0.0;
        for (double e : eig) tr += e;
        const MomentSeries ms = exact_even_moments(eig, 20);
        for (int n = 0; n <= 20; ++n)
            if (ms.log_values[n] > log_moment_bound(tr, n) + 1e-12) bound_ok = false;
        for (int k = 0; k <= 6; ++k)
            if (trace_power(eig, k) > std::pow(tr, k + 1) * (1.0 + 1e-14)) trace_ok = false;
    }
    c.truth("exact_le_moment_bound 100 models", bound_ok);
    c.truth("trace_power_inequality 100 models", trace_ok);

    // L^p norm of |x| against c sqrt(Tr) sqrt(p), exact from even moments
    const std::vector<double> eig{0.5, 0.3, 0.1};
    const MomentSeries ms = exact_even_moments(eig, 8);
    for (int n : {1, 2, 4, 8}) {
        const double p = 2.0 * n;
        c.at_most("lp_bound p=" + std::to_string(2 * n), std::exp(ms.log_values[n] / p), lp_moment_bound(0.9, p));
    }
}

void martingales(Checks& c, const ExperimentConfig& cfg, std::uint64_t seed, unsigned workers) {
    const std::size_t dim = cfg.model.dim();
    const std::vector<DriftSpec> drifts{DriftSpec::zero(), DriftSpec::constant(StateVector(dim, 0.5)),
                                        DriftSpec::bounded_sin(0.4, 1.0)};
    GirsanovConfig g;
    g.steps = cfg.mc.steps;
    g.npaths = cfg.mc.npaths;
    g.seed = seed;
    g.workers = workers;
    for (const auto& d : drifts) {
        const GirsanovRun run = run_girsanov(cfg.model, d, cfg.phi, cfg.t, cfg.x, 0, g, 8);
        const double tol = std::max(3.0 * run.martingale_mean.std_error, 1e-12);
        c.near("martingale_mean " + d.name(), run.martingale_mean.mean, 1.0, tol);
        c.at_least("martingale_positive " + d.name(), run.min_martingale, std::numeric_limits<double>::min());
        const double psi = d.psi_sup_norm(cfg.model);
        double fact = 1.0;
        for (int n = 1; n <= 4; ++n) {
            fact *= n;
            const double bound = std::pow(4.0, n) * std::pow(psi, 2 * n) * std::pow(cfg.t, n) / fact;
            c.at_most("ladder_second_moment " + d.name() + " n=" + std::to_string(n),
                      run.ladder_second_moment[n].mean, bound);
        }
        if (d.kind() == DriftSpec::Kind::bounded_sin)
            c.at_most("ladder_residual_l1 K=8 " + d.name(), run.ladder_residual_l1.mean, 1e-2);
    }
}

void equivalence(Checks& c, const ExperimentConfig& cfg, std::uint64_t seed, unsigned workers) {
    const int nmax = std::min(cfg.n_max, 2);
    const HypothesisReport hyp =
        check_hypotheses(cfg.model, cfg.drift, cfg.phi, log_time_grid(1e-6, 1.0, 60), cfg.kappa);
    SeriesConfig s;
    s.nsamples = cfg.mc.nsamples;
    s.mode = cfg.mc.mode;
    s.delta = cfg.mc.delta ? *cfg.mc.delta : (hyp.fit_valid ? hyp.delta_fit : 0.5);
    s.seed = seed;
    s.workers = workers;
    GirsanovConfig g;
    g.steps = cfg.mc.steps;
    g.npaths = cfg.mc.npaths;
    g.seed = seed;
    g.workers = workers;
    const GirsanovRun run = run_girsanov(cfg.model, cfg.drift, cfg.phi, cfg.t, cfg.x, nmax, g);
    for (int n = 0; n <= nmax; ++n) {
        const Estimate v = estimate_vn(cfg.model, cfg.drift, cfg.phi, cfg.t, cfg.x, n, s);
        const Estimate& i = run.terms[n];
        c.near("I_n_vs_v_n n=" + std::to_string(n), i.mean, v.mean, 3.0 * (i.std_error + v.std_error));
        if (cfg.model.dim() == 1 && n >= 1)
            c.near("v_n_vs_quadrature n=" + std::to_string(n), v.mean,
                   quadrature_vn(cfg.model, cfg.drift, cfg.phi, cfg.t, cfg.x, n), 3.0 * v.std_error + 1e-9);
    }
    if (nmax >= 1 && g.steps >= 1024) {
        GirsanovConfig half = g;
        half.steps = g.steps / 2;
        const Estimate coarse = run_girsanov(cfg.model, cfg.drift, cfg.phi, cfg.t, cfg.x, 1, half).terms[1];
        c.near("I_1_steps_halved", coarse.mean, run.terms[1].mean, 3.0 * (coarse.std_error + run.terms[1].std_error));
    }
}

}  // namespace

std::size_t VerifyReport::failures() const {
    return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](const CheckRow& r) { return !r.passed; }));
}

std::vector<std::string> verify_suites() { return {"identities", "moments", "martingales", "equivalence"}; }

VerifyReport run_verify(const std::string& suite, const ExperimentConfig& cfg, const RunOptions& opts) {
    const auto suites = verify_suites();
    if (std::find(suites.begin(), suites.end(), suite) == suites.end())
        fail(ErrorCode::config_error, "verify: unknown suite '" + suite +
                                          "' (expected identities, moments, martingales or equivalence)");
    const std::uint64_t seed = opts.seed ? *opts.seed : cfg.seed;
    Checks c{suite, {}};
    if (suite == "identities") identities(c);
    else if (suite == "moments") moments(c, seed);
    else if (suite == "martingales") martingales(c, cfg, seed, opts.workers);
    else equivalence(c, cfg, seed, opts.workers);

    fs::path dir = opts.out_dir ? *opts.out_dir : fs::path(cfg.outputs);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) fail(ErrorCode::io_error, "cannot create output directory " + dir.string() + ": " + ec.message());
    VerifyReport report{std::move(c.rows), dir / ("verify_" + suite + ".csv")};
    CsvWriter w(report.file, {"suite", "check", "value", "reference", "tolerance", "passed"});
    for (const auto& r : report.rows) {
        w.field(r.suite).field(r.check).field(r.value).field(r.reference).field(r.tolerance).field(r.passed);
        w.end_row();
    }
    w.close();
    return report;
}

}  // namespace kolmo
