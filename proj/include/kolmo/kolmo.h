#ifndef KOLMO_KOLMO_H
#define KOLMO_KOLMO_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum kolmo_status {
    KOLMO_OK = 0,
    KOLMO_ERR_INVALID_ARGUMENT = 1,
    KOLMO_ERR_DIMENSION_MISMATCH = 2,
    KOLMO_ERR_DOMAIN = 3,
    KOLMO_ERR_HYPOTHESIS = 4,
    KOLMO_ERR_NUMERIC = 5,
    KOLMO_ERR_CONFIG = 6,
    KOLMO_ERR_IO = 7,
    KOLMO_ERR_UNSUPPORTED = 8,
    KOLMO_ERR_INTERNAL = 9
} kolmo_status;

/* Message of the last failed call on this thread; "" if none. */
const char* kolmo_last_error(void);
/* Human-readable report of the last successful run/verify/bounds/paths call on this thread. */
const char* kolmo_last_report(void);
const char* kolmo_status_string(kolmo_status status);

typedef struct kolmo_model kolmo_model;
typedef struct kolmo_drift kolmo_drift;
typedef struct kolmo_phi kolmo_phi;

/* ---- spectral model ---- */
kolmo_status kolmo_model_create(size_t dim, const double* a, const double* q, kolmo_model** out);
kolmo_status kolmo_model_from_json(const char* json, kolmo_model** out);
kolmo_status kolmo_model_load(const char* path, kolmo_model** out);
void kolmo_model_free(kolmo_model* model);
size_t kolmo_model_dim(const kolmo_model* model);

kolmo_status kolmo_qt_eigenvalues(const kolmo_model* model, double t, double* out);
kolmo_status kolmo_semigroup_apply(const kolmo_model* model, double t, const double* x, double* out);
kolmo_status kolmo_lambda_norm(const kolmo_model* model, double t, double* out);
kolmo_status kolmo_qinf_trace(const kolmo_model* model, double* out);

/* ---- drifts and test functions (JSON specs, e.g. {"kind":"bounded_sin","amplitude":0.4,"frequency":1}) ---- */
kolmo_status kolmo_drift_from_json(const char* json, kolmo_drift** out);
void kolmo_drift_free(kolmo_drift* drift);
kolmo_status kolmo_phi_from_json(const char* json, kolmo_phi** out);
void kolmo_phi_free(kolmo_phi* phi);

/* ---- estimators ---- */
typedef struct kolmo_estimate {
    double mean;
    double std_error;
    uint64_t nsamples;
    uint64_t nonfinite;
    int valid;
} kolmo_estimate;

typedef enum kolmo_time_sampling { KOLMO_SAMPLING_UNIFORM = 0, KOLMO_SAMPLING_DIRICHLET = 1 } kolmo_time_sampling;

typedef struct kolmo_series_config {
    uint64_t nsamples;
    kolmo_time_sampling mode;
    double delta;
    uint64_t seed;
    unsigned workers;
    int allow_unbounded;
} kolmo_series_config;

typedef struct kolmo_girsanov_config {
    int steps;
    uint64_t npaths;
    uint64_t seed;
    unsigned workers;
    int share_noise;
} kolmo_girsanov_config;

kolmo_series_config kolmo_series_config_default(void);
kolmo_girsanov_config kolmo_girsanov_config_default(void);

kolmo_status kolmo_estimate_vn(const kolmo_model* model, const kolmo_drift* drift, const kolmo_phi* phi, double t,
                               const double* x, int n, const kolmo_series_config* cfg, kolmo_estimate* out);
kolmo_status kolmo_estimate_in(const kolmo_model* model, const kolmo_drift* drift, const kolmo_phi* phi, double t,
                               const double* x, int n, const kolmo_girsanov_config* cfg, kolmo_estimate* out);
/* ess_fraction may be NULL. */
kolmo_status kolmo_estimate_girsanov_u(const kolmo_model* model, const kolmo_drift* drift, const kolmo_phi* phi,
                                       double t, const double* x, const kolmo_girsanov_config* cfg,
                                       kolmo_estimate* out, double* ess_fraction);
/* halving may be NULL. */
kolmo_status kolmo_estimate_u_direct(const kolmo_model* model, const kolmo_drift* drift, const kolmo_phi* phi,
                                     double t, const double* x, const kolmo_girsanov_config* cfg,
                                     kolmo_estimate* out, kolmo_estimate* halving);

/* ---- Gaussian moments and bounds ---- */
/* out_log has n_max + 1 entries: log F^(k)(0), k = 0..n_max. */
kolmo_status kolmo_exact_even_moments(const double* eigs, size_t dim, int n_max, double* out_log);
kolmo_status kolmo_simplex_time_integral(int n, double delta, double t, int include_endpoint, double* out);
kolmo_status kolmo_plan_exponents(double p0, double bar_p, double kappa, int nmax, int* n0, double* p_out);

/* ---- experiment entry points ---- */
typedef struct kolmo_cli_options {
    const char* config_path; /* NULL: built-in defaults */
    int has_seed;
    uint64_t seed;
    unsigned workers;        /* 0: all hardware threads */
    const char* out_dir;     /* NULL: the config's "outputs" */
    int override_hypotheses;
} kolmo_cli_options;

kolmo_status kolmo_run(const kolmo_cli_options* opts);
/* failed_checks receives the number of failing checks. */
kolmo_status kolmo_verify(const char* suite, const kolmo_cli_options* opts, size_t* failed_checks);
kolmo_status kolmo_bounds(const kolmo_cli_options* opts);
kolmo_status kolmo_paths(const kolmo_cli_options* opts);

#ifdef __cplusplus
}
#endif

#endif
