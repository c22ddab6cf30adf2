#pragma once

#include "kolmo/estimate.hpp"
#include "kolmo/rng.hpp"
#include "kolmo/spectral.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace kolmo {

/// Gaussian law with diagonal covariance in the model eigenbasis.
struct GaussianSpec {
    StateVector mean;
    std::vector<double> var;

    void validate() const;
};

/// Law of Z^x_t: N(e^{tA} x, Q_t). t = 0 gives the point mass at x.
GaussianSpec ou_law(const SpectralModel& model, double t, const StateVector& x);

/// Invariant measure N(0, Q_inf).
GaussianSpec invariant_law(const SpectralModel& model);

/// mean + sqrt(var) * g, g standard normal, one draw per coordinate.
StateVector sample_gaussian(const GaussianSpec& spec, RandomStream& rng);

/// Per-coordinate constants of one exact OU step of length dt.
struct TransitionCoefficients {
    double dt = 0.0;
    std::vector<double> decay;   // e^{a_k dt}
    std::vector<double> stddev;  // sqrt((Q_dt)_k)
    std::vector<double> lambda;  // decay / stddev
};

TransitionCoefficients transition_coefficients(const SpectralModel& model, double dt);

struct OuStep {
    StateVector z_next;
    StateVector g;  // standardized increment Q_dt^{-1/2} (z_next - e^{dt A} z)
};

/// Exact OU transition z -> e^{dt A} z + Q_dt^{1/2} g.
OuStep ou_transition(const SpectralModel& model, const StateVector& z, double dt, RandomStream& rng);

struct MomentSeries {
    std::vector<double> values;      // F^{(k)}(0) = int |x|^{2k} dmu, +inf where it overflows
    std::vector<double> log_values;  // natural log of the same, always finite when Q != 0
    bool overflow = false;
};

/// Exact even moments of N(0, diag(eigs)) from the derivative recursion
/// F^{(n+1)}(0) = sum_k 2^k k! C(n,k) F^{(n-k)}(0) Tr(Q^{k+1}).
/// Orders above 20 are accumulated in log space.
MomentSeries exact_even_moments(std::span<const double> qinf_eigs, int n_max);

/// 2^n n! trace^n.
double moment_bound(double trace_qinf, int n);
double log_moment_bound(double trace_qinf, int n);

/// c sqrt(trace) sqrt(p); bound on (int |x|^p dmu)^{1/p}. The constant c is a
/// caller choice (default 2 in this library).
double lp_moment_bound(double trace_qinf, double p, double c = 2.0);

/// Tr(Q^{k+1}) = sum_i eig_i^{k+1}.
double trace_power(std::span<const double> eigs, int k);

/// Empirical (E|f(X)|^p)^{1/p}, X ~ spec, with a delta-method standard error.
/// Sample i draws from stream (seed, i) so the result is independent of the
/// worker count.
Estimate lp_norm_estimate(const std::function<double(const StateVector&)>& f, double p,
                          const GaussianSpec& spec, std::uint64_t nsamples, std::uint64_t seed,
                          unsigned workers = 1);

}  // namespace kolmo
