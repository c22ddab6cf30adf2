#include "kolmo/kolmo.h"

#include "kolmo/bounds.hpp"
#include "kolmo/csv.hpp"
#include "kolmo/error.hpp"
#include "kolmo/experiment.hpp"
#include "kolmo/gaussian.hpp"
#include "kolmo/girsanov.hpp"
#include "kolmo/parallel.hpp"
#include "kolmo/series.hpp"
#include "kolmo/spectral.hpp"

#include <new>
#include <sstream>
#include <string>

struct kolmo_model {
    kolmo::SpectralModel m;
};
struct kolmo_drift {
    kolmo::DriftSpec d;
};
struct kolmo_phi {
    kolmo::TestFunctionSpec f;
};

namespace {

thread_local std::string g_error;
thread_local std::string g_report;

template <class F>
kolmo_status guard(F&& f) {
    try {
        f();
        g_error.clear();
        return KOLMO_OK;
    } catch (const kolmo::Error& e) {
        g_error = e.what();
        return static_cast<kolmo_status>(static_cast<int>(e.code()));
    } catch (const nlohmann::json::exception& e) {
        g_error = e.what();
        return KOLMO_ERR_CONFIG;
    } catch (const std::bad_alloc&) {
        g_error = "out of memory";
        return KOLMO_ERR_INTERNAL;
    } catch (const std::exception& e) {
        g_error = e.what();
        return KOLMO_ERR_INTERNAL;
    } catch (...) {
        g_error = "unknown error";
        return KOLMO_ERR_INTERNAL;
    }
}

void need(const void* p, const char* what) {
    if (!p) kolmo::fail(kolmo::ErrorCode::invalid_argument, std::string(what) + " must not be NULL");
}

kolmo_estimate to_c(const kolmo::Estimate& e) {
    return {e.mean, e.std_error, e.nsamples, e.nonfinite, e.valid ? 1 : 0};
}

kolmo::StateVector state(const kolmo_model* model, const double* x) {
    need(x, "x");
    return kolmo::StateVector(std::vector<double>(x, x + model->m.dim()));
}

kolmo::SeriesConfig series_cfg(const kolmo_series_config* c) {
    need(c, "config");
    kolmo::SeriesConfig s;
    s.nsamples = c->nsamples;
    s.mode = c->mode == KOLMO_SAMPLING_UNIFORM ? kolmo::TimeSampling::uniform : kolmo::TimeSampling::dirichlet;
    s.delta = c->delta;
    s.seed = c->seed;
    s.workers = kolmo::resolve_workers(c->workers);
    s.allow_unbounded = c->allow_unbounded != 0;
    return s;
}

kolmo::GirsanovConfig girsanov_cfg(const kolmo_girsanov_config* c) {
    need(c, "config");
    kolmo::GirsanovConfig g;
    g.steps = c->steps;
    g.npaths = c->npaths;
    g.seed = c->seed;
    g.workers = kolmo::resolve_workers(c->workers);
    g.share_noise = c->share_noise != 0;
    return g;
}

void check_handles(const kolmo_model* m, const kolmo_drift* d, const kolmo_phi* f) {
    need(m, "model");
    need(d, "drift");
    need(f, "phi");
}

struct CliSetup {
    kolmo::ExperimentConfig cfg;
    kolmo::RunOptions opts;
};

CliSetup setup(const kolmo_cli_options* o) {
    need(o, "options");
    CliSetup s;
    s.cfg = o->config_path ? kolmo::load_config(o->config_path) : kolmo::default_config();
    s.opts.workers = kolmo::resolve_workers(o->workers);
    s.opts.override_hypotheses = o->override_hypotheses != 0;
    if (o->has_seed) s.opts.seed = o->seed;
    if (o->out_dir) s.opts.out_dir = o->out_dir;
    return s;
}

}  // namespace

extern "C" {

const char* kolmo_last_error(void) { return g_error.c_str(); }
const char* kolmo_last_report(void) { return g_report.c_str(); }

const char* kolmo_status_string(kolmo_status status) {
    if (status == KOLMO_OK) return "ok";
    if (status < KOLMO_ERR_INVALID_ARGUMENT || status > KOLMO_ERR_INTERNAL) return "unknown status";
    return kolmo::to_string(static_cast<kolmo::ErrorCode>(static_cast<int>(status)));
}

kolmo_status kolmo_model_create(size_t dim, const double* a, const double* q, kolmo_model** out) {
    return guard([&] {
        need(a, "a");
        need(q, "q");
        need(out, "out");
        *out = new kolmo_model{kolmo::SpectralModel(std::vector<double>(a, a + dim), std::vector<double>(q, q + dim))};
    });
}

kolmo_status kolmo_model_from_json(const char* json, kolmo_model** out) {
    return guard([&] {
        need(json, "json");
        need(out, "out");
        *out = new kolmo_model{kolmo::SpectralModel::from_json(nlohmann::json::parse(json))};
    });
}

kolmo_status kolmo_model_load(const char* path, kolmo_model** out) {
    return guard([&] {
        need(path, "path");
        need(out, "out");
        *out = new kolmo_model{kolmo::SpectralModel::load(path)};
    });
}

void kolmo_model_free(kolmo_model* model) { delete model; }
size_t kolmo_model_dim(const kolmo_model* model) { return model ? model->m.dim() : 0; }

kolmo_status kolmo_qt_eigenvalues(const kolmo_model* model, double t, double* out) {
    return guard([&] {
        need(model, "model");
        need(out, "out");
        const auto v = kolmo::qt_eigenvalues(model->m, t);
        std::copy(v.begin(), v.end(), out);
    });
}

kolmo_status kolmo_semigroup_apply(const kolmo_model* model, double t, const double* x, double* out) {
    return guard([&] {
        need(model, "model");
        need(out, "out");
        const auto v = kolmo::semigroup_apply(model->m, t, state(model, x));
        std::copy(v.coords().begin(), v.coords().end(), out);
    });
}

kolmo_status kolmo_lambda_norm(const kolmo_model* model, double t, double* out) {
    return guard([&] {
        need(model, "model");
        need(out, "out");
        *out = kolmo::lambda_diagonal(model->m, t).operator_norm;
    });
}

kolmo_status kolmo_qinf_trace(const kolmo_model* model, double* out) {
    return guard([&] {
        need(model, "model");
        need(out, "out");
        *out = kolmo::q_infinity(model->m).trace;
    });
}

kolmo_status kolmo_drift_from_json(const char* json, kolmo_drift** out) {
    return guard([&] {
        need(json, "json");
        need(out, "out");
        *out = new kolmo_drift{kolmo::DriftSpec::from_json(nlohmann::json::parse(json))};
    });
}

void kolmo_drift_free(kolmo_drift* drift) { delete drift; }

kolmo_status kolmo_phi_from_json(const char* json, kolmo_phi** out) {
    return guard([&] {
        need(json, "json");
        need(out, "out");
        *out = new kolmo_phi{kolmo::TestFunctionSpec::from_json(nlohmann::json::parse(json))};
    });
}

void kolmo_phi_free(kolmo_phi* phi) { delete phi; }

kolmo_series_config kolmo_series_config_default(void) {
    const kolmo::SeriesConfig s;
    return {s.nsamples, KOLMO_SAMPLING_DIRICHLET, s.delta, s.seed, s.workers, 0};
}

kolmo_girsanov_config kolmo_girsanov_config_default(void) {
    const kolmo::GirsanovConfig g;
    return {g.steps, g.npaths, g.seed, g.workers, 0};
}

kolmo_status kolmo_estimate_vn(const kolmo_model* model, const kolmo_drift* drift, const kolmo_phi* phi, double t,
                               const double* x, int n, const kolmo_series_config* cfg, kolmo_estimate* out) {
    return guard([&] {
        check_handles(model, drift, phi);
        need(out, "out");
        *out = to_c(kolmo::estimate_vn(model->m, drift->d, phi->f, t, state(model, x), n, series_cfg(cfg)));
    });
}

kolmo_status kolmo_estimate_in(const kolmo_model* model, const kolmo_drift* drift, const kolmo_phi* phi, double t,
                               const double* x, int n, const kolmo_girsanov_config* cfg, kolmo_estimate* out) {
    return guard([&] {
        check_handles(model, drift, phi);
        need(out, "out");
        *out = to_c(kolmo::estimate_In(model->m, drift->d, phi->f, t, state(model, x), n, girsanov_cfg(cfg)));
    });
}

kolmo_status kolmo_estimate_girsanov_u(const kolmo_model* model, const kolmo_drift* drift, const kolmo_phi* phi,
                                       double t, const double* x, const kolmo_girsanov_config* cfg,
                                       kolmo_estimate* out, double* ess_fraction) {
    return guard([&] {
        check_handles(model, drift, phi);
        need(out, "out");
        const auto r = kolmo::estimate_girsanov_u(model->m, drift->d, phi->f, t, state(model, x), girsanov_cfg(cfg));
        *out = to_c(r.estimate);
        if (ess_fraction) *ess_fraction = r.weights.ess_fraction;
    });
}

kolmo_status kolmo_estimate_u_direct(const kolmo_model* model, const kolmo_drift* drift, const kolmo_phi* phi,
                                     double t, const double* x, const kolmo_girsanov_config* cfg,
                                     kolmo_estimate* out, kolmo_estimate* halving) {
    return guard([&] {
        check_handles(model, drift, phi);
        need(out, "out");
        const auto r = kolmo::estimate_u_direct(model->m, drift->d, phi->f, t, state(model, x), girsanov_cfg(cfg));
        *out = to_c(r.estimate);
        if (halving) *halving = to_c(r.halving_difference);
    });
}

kolmo_status kolmo_exact_even_moments(const double* eigs, size_t dim, int n_max, double* out_log) {
    return guard([&] {
        need(eigs, "eigs");
        need(out_log, "out_log");
        const auto ms = kolmo::exact_even_moments(std::span<const double>(eigs, dim), n_max);
        std::copy(ms.log_values.begin(), ms.log_values.end(), out_log);
    });
}

kolmo_status kolmo_simplex_time_integral(int n, double delta, double t, int include_endpoint, double* out) {
    return guard([&] {
        need(out, "out");
        *out = kolmo::simplex_time_integral(n, delta, t, include_endpoint != 0);
    });
}

kolmo_status kolmo_plan_exponents(double p0, double bar_p, double kappa, int nmax, int* n0, double* p_out) {
    return guard([&] {
        const auto plan = kolmo::plan_exponents(p0, bar_p, kappa, nmax);
        if (n0) *n0 = plan.n0;
        if (p_out) std::copy(plan.p.begin(), plan.p.end(), p_out);
    });
}

kolmo_status kolmo_run(const kolmo_cli_options* o) {
    return guard([&] {
        const CliSetup s = setup(o);
        const kolmo::RunSummary r = kolmo::run_experiment(s.cfg, s.opts);
        std::ostringstream os;
        os << "u_series   " << kolmo::format_double(r.u_series.mean) << " +- " << r.u_series.std_error << '\n'
           << "u_girsanov " << kolmo::format_double(r.u_girsanov.mean) << " +- " << r.u_girsanov.std_error << '\n'
           << "u_direct   " << kolmo::format_double(r.u_direct.mean) << " +- " << r.u_direct.std_error << '\n'
           << "max pairwise z " << r.max_z << '\n';
        for (const auto& w : r.warnings) os << "warning: " << w << '\n';
        for (const auto& f : r.files) os << "wrote " << f.string() << '\n';
        g_report = os.str();
    });
}

kolmo_status kolmo_verify(const char* suite, const kolmo_cli_options* o, size_t* failed_checks) {
    return guard([&] {
        need(suite, "suite");
        const CliSetup s = setup(o);
        const kolmo::VerifyReport r = kolmo::run_verify(suite, s.cfg, s.opts);
        std::ostringstream os;
        for (const auto& row : r.rows)
            os << (row.passed ? "PASS " : "FAIL ") << row.check << "  value=" << row.value
               << " reference=" << row.reference << " tol=" << row.tolerance << '\n';
        os << r.rows.size() - r.failures() << "/" << r.rows.size() << " checks passed\n";
        os << "wrote " << r.file.string() << '\n';
        g_report = os.str();
        if (failed_checks) *failed_checks = r.failures();
    });
}

kolmo_status kolmo_bounds(const kolmo_cli_options* o) {
    return guard([&] {
        const CliSetup s = setup(o);
        const kolmo::BoundsReport r = kolmo::run_bounds(s.cfg, s.opts);
        std::ostringstream os;
        os << "n0 " << r.n0 << "\nratio test " << (r.converges ? "converges" : "does not converge")
           << ", first contractive index " << r.first_contractive_index << "\nwrote " << r.file.string() << '\n';
        g_report = os.str();
    });
}

kolmo_status kolmo_paths(const kolmo_cli_options* o) {
    return guard([&] {
        const CliSetup s = setup(o);
        g_report = "wrote " + kolmo::run_paths(s.cfg, s.opts).string() + "\n";
    });
}

}  // extern "C"
