#pragma once

#include "kolmo/estimate.hpp"
#include "kolmo/functions.hpp"
#include "kolmo/rng.hpp"
#include "kolmo/spectral.hpp"

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace kolmo {

/// Uniform partition 0 = t_0 < ... < t_m = t_final.
struct PathGrid {
    double t_final = 1.0;
    int steps = 1024;

    double dt() const noexcept { return t_final / steps; }
    double time(int j) const noexcept { return j == steps ? t_final : j * dt(); }
    void validate() const;
};

struct OuPath {
    std::vector<StateVector> states;  // Z at t_0 .. t_m
    std::vector<StateVector> dW;      // Wiener increments over [t_j, t_{j+1}]
};

/// Per-coordinate constants of the exact OU step written jointly with its
/// driving Wiener increment:
///   z <- e^{a dt} z + gain dW + c,   gain = sqrt(q) (e^{a dt} - 1) / (a dt),
/// with c ~ N(0, (Q_dt) - gain^2 dt) independent of dW. The pair (z, dW) then
/// has exactly the joint law of the continuous-time process.
struct CoupledStep {
    std::vector<double> decay;     // e^{a dt}
    std::vector<double> dw_gain;
    std::vector<double> corr_sd;   // sqrt((Q_dt) - gain^2 dt)
    double sqrt_dt = 0.0;
};

CoupledStep coupled_step(const SpectralModel& model, double dt);

/// Draws one OU path on `grid`, returning the states and the driving Wiener
/// increments. Per step and coordinate it consumes two normals (dW first).
OuPath simulate_ou_path(const SpectralModel& model, const StateVector& x, const PathGrid& grid, RandomStream& rng);

/// psi(z) = Q^{-1/2} B(z).
StateVector psi_eval(const SpectralModel& model, const DriftSpec& drift, const StateVector& z);

struct MartingaleLadder {
    int order = 0;
    std::vector<double> values;  // M^(0)_t .. M^(order)_t
    double exp_martingale = 1.0; // M_t = exp(L_t - 0.5 int |psi|^2)
    double log_martingale = 0.0; // L_t
    double quadratic_variation = 0.0;
};

/// Left-point Ito accumulation of L, the ladder M^(k) = int M^(k-1) dL and
/// the exponential martingale along one path.
MartingaleLadder accumulate_ladder(const OuPath& path, const DriftSpec& drift, const SpectralModel& model,
                                   int n, double dt);

struct GirsanovConfig {
    int steps = 1024;
    std::uint64_t npaths = 100000;
    std::uint64_t seed = 1;
    unsigned workers = 1;
    bool share_noise = false;  // direct scheme reuses the Girsanov Wiener increments
};

struct WeightDiagnostics {
    double ess = 0.0;              // (sum M)^2 / sum M^2
    double ess_fraction = 0.0;     // ess / npaths
    double max_weight_share = 0.0; // max M / sum M
    bool psi_bounded = false;      // sufficient condition for E M_t = 1
    std::vector<std::string> warnings;
};

/// Everything a single batch of Girsanov paths yields.
struct GirsanovRun {
    std::vector<Estimate> terms;                // I_0 .. I_{n_max}: E[phi(Z_t) M^(n)_t]
    std::vector<Estimate> ladder_second_moment; // E[(M^(n)_t)^2], n = 0 .. ladder order
    Estimate martingale_mean;                   // E[M_t]
    Estimate u;                                 // E[phi(Z_t) M_t]
    Estimate ladder_residual_l1;                // E|M_t - sum_{k <= ladder order} M^(k)_t|
    double min_martingale = 0.0;                // smallest M_t over the paths
    WeightDiagnostics weights;
};

/// Simulates cfg.npaths paths once and accumulates every Girsanov quantity.
/// `ladder_order` >= n_max sets how deep the ladder is carried for the
/// second-moment and residual diagnostics. Path i uses stream (seed, i, girsanov).
GirsanovRun run_girsanov(const SpectralModel& model, const DriftSpec& drift, const TestFunctionSpec& phi, double t,
                         const StateVector& x, int n_max, const GirsanovConfig& cfg, int ladder_order = -1);

/// I_n(t, x) = E[phi(Z^x_t) M^(n)_t].
Estimate estimate_In(const SpectralModel& model, const DriftSpec& drift, const TestFunctionSpec& phi, double t,
                     const StateVector& x, int n, const GirsanovConfig& cfg);

struct GirsanovEstimate {
    Estimate estimate;
    WeightDiagnostics weights;
};

/// P_t phi(x) = E[phi(Z^x_t) M_t].
GirsanovEstimate estimate_girsanov_u(const SpectralModel& model, const DriftSpec& drift, const TestFunctionSpec& phi,
                                     double t, const StateVector& x, const GirsanovConfig& cfg);

struct DirectEstimate {
    Estimate estimate;            // exponential-integrator scheme at cfg.steps
    Estimate halving_difference;  // u(2 dt) - u(dt) on coupled noise; invalid if steps is odd
};

/// Drift-included weak simulation
///   z <- e^{dt A} z + (int_0^dt e^{sA} ds) B(z) + exact OU noise,
/// with a step-halving bias estimate from the coarse scheme driven by the
/// same noise. Path i uses stream (seed, i, direct), or the Girsanov stream
/// when cfg.share_noise is set.
DirectEstimate estimate_u_direct(const SpectralModel& model, const DriftSpec& drift, const TestFunctionSpec& phi,
                                 double t, const StateVector& x, const GirsanovConfig& cfg);

/// CSV rows "path_id,t,z0..z{N-1},L,M" for the first `npaths` Girsanov paths.
void dump_paths(const SpectralModel& model, const DriftSpec& drift, double t, const StateVector& x,
                const GirsanovConfig& cfg, std::uint64_t npaths, std::ostream& out);

}  // namespace kolmo
