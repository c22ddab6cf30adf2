#pragma once

#include "kolmo/functions.hpp"
#include "kolmo/spectral.hpp"

#include <string>
#include <vector>

namespace kolmo {

struct HypothesisReport {
    bool trace_qt_finite = false;
    double trace_qinf = 0.0;
    double delta_fit = 0.0;    // fitted exponent in ||Lambda(t)|| <= C_delta t^{-delta}
    double c_delta_fit = 0.0;  // fitted constant (diagnostic, not certified)
    bool fit_valid = false;    // delta_fit in (0,1)
    bool lambda_integrable = false;
    double kappa = 0.0;
    bool beta_kappa_ok = false;
    bool drift_admissible = false;  // bounded or sublinear registry drift
    bool drift_bounded = false;
    bool phi_bounded = false;
    std::vector<std::string> diagnostics;
};

/// `count` log-spaced times in [t_lo, t_hi].
std::vector<double> log_time_grid(double t_lo, double t_hi, std::size_t count);

/// beta * kappa < 2 (1 - delta).
bool beta_kappa_admissible(double beta, double kappa, double delta) noexcept;

/// Fits (delta, C_delta) by least squares of log ||Lambda(t)|| against
/// log(1/t) on the 10 smallest grid times and checks the remaining conditions.
/// Fit failures land in the diagnostics rather than throwing.
HypothesisReport check_hypotheses(const SpectralModel& model, const DriftSpec& drift,
                                  const TestFunctionSpec& phi, const std::vector<double>& tgrid,
                                  double kappa = 1.5);

/// Human-readable list of the clauses an estimator of order n_max would rely
/// on and that the report marks as violated. Empty means "go".
std::vector<std::string> violated_clauses(const HypothesisReport& report, int n_max);

}  // namespace kolmo
