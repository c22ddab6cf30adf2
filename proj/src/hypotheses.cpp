#include "kolmo/hypotheses.hpp"

#include "kolmo/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace kolmo {

std::vector<double> log_time_grid(double t_lo, double t_hi, std::size_t count) {
    require(t_lo > 0.0 && t_hi > t_lo && count >= 2, ErrorCode::invalid_argument,
            "log_time_grid: need 0 < t_lo < t_hi and count >= 2");
    std::vector<double> grid(count);
    const double step = std::log(t_hi / t_lo) / static_cast<double>(count - 1);
    for (std::size_t i = 0; i < count; ++i) grid[i] = t_lo * std::exp(step * static_cast<double>(i));
    grid.back() = t_hi;
    return grid;
}

bool beta_kappa_admissible(double beta, double kappa, double delta) noexcept {
    return beta * kappa < 2.0 * (1.0 - delta);
}

HypothesisReport check_hypotheses(const SpectralModel& model, const DriftSpec& drift,
                                  const TestFunctionSpec& phi, const std::vector<double>& tgrid,
                                  double kappa) {
    require(!tgrid.empty(), ErrorCode::invalid_argument, "check_hypotheses: empty time grid");
    for (std::size_t i = 0; i < tgrid.size(); ++i) {
        require(tgrid[i] > 0.0, ErrorCode::invalid_argument, "check_hypotheses: times must be > 0");
        if (i > 0)
            require(tgrid[i] > tgrid[i - 1], ErrorCode::invalid_argument,
                    "check_hypotheses: times must be strictly increasing");
    }
    drift.check_model(model);
    phi.check_model(model);

    HypothesisReport rep;
    rep.kappa = kappa;

    const QInfinity qinf = q_infinity(model);
    rep.trace_qinf = qinf.trace;
    rep.trace_qt_finite = true;
    for (double t : tgrid) {
        double tr = 0.0;
        for (double v : qt_eigenvalues(model, t)) tr += v;
        if (!std::isfinite(tr)) rep.trace_qt_finite = false;
    }
    if (!rep.trace_qt_finite) rep.diagnostics.push_back("Tr Q_t is not finite on the grid");

    const std::size_t m = std::min<std::size_t>(10, tgrid.size());
    if (m < 2) {
        rep.diagnostics.push_back("delta fit: need at least two grid times");
    } else {
        double sx = 0, sy = 0;
        std::vector<double> xs(m), ys(m);
        for (std::size_t i = 0; i < m; ++i) {
            xs[i] = std::log(1.0 / tgrid[i]);
            ys[i] = std::log(lambda_diagonal(model, tgrid[i]).operator_norm);
            sx += xs[i];
            sy += ys[i];
        }
        const double mx = sx / m, my = sy / m;
        double sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < m; ++i) {
            sxx += (xs[i] - mx) * (xs[i] - mx);
            sxy += (xs[i] - mx) * (ys[i] - my);
        }
        const double slope = sxy / sxx;
        rep.delta_fit = slope;
        rep.c_delta_fit = std::exp(my - slope * mx);
        if (!(slope > 0.0)) {
            std::ostringstream os;
            os << "delta fit failed: non-positive slope " << slope;
            rep.diagnostics.push_back(os.str());
        } else if (!(slope < 1.0)) {
            std::ostringstream os;
            os << "delta fit " << slope << " >= 1: ||Lambda|| is not integrable at 0";
            rep.diagnostics.push_back(os.str());
        } else {
            rep.fit_valid = true;
        }
    }
    rep.lambda_integrable = rep.fit_valid;

    const double beta = drift.declared_beta();
    rep.beta_kappa_ok = rep.fit_valid && kappa > 1.0 && beta_kappa_admissible(beta, kappa, rep.delta_fit);
    if (!rep.beta_kappa_ok) {
        std::ostringstream os;
        os << "beta*kappa = " << beta * kappa << " is not < 2(1-delta) = " << 2.0 * (1.0 - rep.delta_fit);
        rep.diagnostics.push_back(os.str());
    }

    rep.drift_admissible = drift.within_hypotheses();
    rep.drift_bounded = drift.bounded();
    rep.phi_bounded = phi.bounded();
    if (!rep.drift_admissible)
        rep.diagnostics.push_back("drift '" + drift.name() + "' has linear growth (outside the admissible class)");
    if (!rep.phi_bounded) rep.diagnostics.push_back("phi '" + phi.name() + "' is unbounded");
    if (!drift.qhalf_compatible()) rep.diagnostics.push_back("drift declared incompatible with Q^{-1/2}");
    return rep;
}

std::vector<std::string> violated_clauses(const HypothesisReport& report, int n_max) {
    std::vector<std::string> out;
    if (!report.trace_qt_finite) out.emplace_back("trace class Q_t");
    if (!report.lambda_integrable) out.emplace_back("integrability of ||Lambda(t)|| near 0 (delta < 1)");
    if (n_max >= 1) {
        if (!report.drift_admissible) out.emplace_back("drift growth: bounded or sublinear B required");
        if (!report.phi_bounded) out.emplace_back("bounded test function phi required for n >= 1");
        if (!report.drift_bounded && !report.beta_kappa_ok)
            out.emplace_back("beta*kappa < 2(1-delta) for the sublinear drift");
    }
    return out;
}

}  // namespace kolmo
