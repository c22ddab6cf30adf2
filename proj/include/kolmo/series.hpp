#pragma once

#include "kolmo/estimate.hpp"
#include "kolmo/functions.hpp"
#include "kolmo/rng.hpp"
#include "kolmo/spectral.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace kolmo {

enum class TimeSampling { uniform, dirichlet };

std::string to_string(TimeSampling mode);
TimeSampling time_sampling_from_string(const std::string& s);

/// Ordered times 0 < r_1 < ... < r_n < t with the importance weight that
/// makes weight * h(r) an unbiased estimate of the simplex integral of h.
struct SimplexSample {
    std::vector<double> times;
    double weight = 0.0;
    unsigned resamples = 0;  // draws rejected by the tiny-spacing guard
};

/// Uniform mode sorts n uniforms on [0, t] (weight t^n / n!). Dirichlet mode
/// draws the n+1 normalized spacings from Dirichlet(1-delta, ..., 1-delta),
/// matching the prod (r_{i+1} - r_i)^{-delta} singularity of the integrand.
/// Draws with a spacing below 1e-12 t are rejected and redrawn.
SimplexSample sample_ordered_times(int n, double t, TimeSampling mode, double delta, RandomStream& rng);

struct SeriesConfig {
    std::uint64_t nsamples = 100000;
    TimeSampling mode = TimeSampling::dirichlet;
    double delta = 0.5;  // Dirichlet exponent, normally the hypothesis-check fit
    std::uint64_t seed = 1;
    unsigned workers = 1;
    bool allow_unbounded = false;   // admit unbounded phi / linear drift for n >= 1
    bool gauss_hermite_n0 = true;   // 1-D models: exact n = 0 term by quadrature
    std::size_t hermite_nodes = 64;
};

/// <Lambda(dt) B(z), g>: one factor of the product in the iteration terms.
double product_factor(const SpectralModel& model, const DriftSpec& drift, double dt,
                      const StateVector& z, const StateVector& g);

/// Monte Carlo estimate of the iteration term v_n(t, x). For n >= 1 each
/// sample draws ordered times, advances the OU chain with exact transitions,
/// and averages weight * phi(Z_t) * prod_i <Lambda(r_{i+1}-r_i) B(Z_{r_i}), g_i>.
/// Sample i of term n uses stream (seed, i, series_term + n).
Estimate estimate_vn(const SpectralModel& model, const DriftSpec& drift, const TestFunctionSpec& phi,
                     double t, const StateVector& x, int n, const SeriesConfig& cfg);

struct QuadratureConfig {
    std::size_t legendre_nodes = 40;
    std::size_t hermite_nodes = 40;
};

/// Deterministic v_1 / v_2 for one-dimensional models: nested Gauss-Legendre
/// over the time simplex composed with Gauss-Hermite over each Gaussian
/// increment, evaluating the same integrand as estimate_vn.
double quadrature_vn(const SpectralModel& model, const DriftSpec& drift, const TestFunctionSpec& phi,
                     double t, const StateVector& x, int n, const QuadratureConfig& qcfg = {});

struct SeriesResult {
    std::vector<Estimate> terms;         // v_0 .. v_{n_max}
    std::vector<Estimate> partial_sums;  // sum_{n <= k} v_n, errors added in quadrature
    std::vector<double> ratio_diagnostics;  // |v_{n+1}| / |v_n|, NaN where v_n = 0
};

SeriesResult estimate_series(const SpectralModel& model, const DriftSpec& drift, const TestFunctionSpec& phi,
                             double t, const StateVector& x, int n_max, const SeriesConfig& cfg);

/// E[rho_{<= n_max}(t, x)]: the partial sum of the likelihood-weight series
/// (phi == 1). Converges to 1 as n_max grows.
Estimate likelihood_weight_partial(const SpectralModel& model, const DriftSpec& drift, double t,
                                   const StateVector& x, int n_max, const SeriesConfig& cfg);

}  // namespace kolmo
