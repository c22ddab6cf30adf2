#include "kolmo/quadrature.hpp"

#include "kolmo/error.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include <cmath>
#include <algorithm>
#include <functional>
#include <string>
#include <memory>
#include <numbers>

namespace kolmo {

QuadratureRule gauss_legendre(std::size_t n, double a, double b) {
    require(n >= 1, ErrorCode::invalid_argument, "gauss_legendre: need at least one node");
    std::unique_ptr<gsl_integration_glfixed_table, decltype(&gsl_integration_glfixed_table_free)> table(
        gsl_integration_glfixed_table_alloc(n), &gsl_integration_glfixed_table_free);
    require(table != nullptr, ErrorCode::internal, "gauss_legendre: table allocation failed");
    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        gsl_integration_glfixed_point(a, b, i, &rule.nodes[i], &rule.weights[i], table.get());
    return rule;
}

QuadratureRule gauss_hermite_normal(std::size_t n) {
    require(n >= 1, ErrorCode::invalid_argument, "gauss_hermite_normal: need at least one node");
    // weight exp(-b (x-a)^2) with b = 1/2 is the unnormalized N(0,1) density
    std::unique_ptr<gsl_integration_fixed_workspace, decltype(&gsl_integration_fixed_free)> ws(
        gsl_integration_fixed_alloc(gsl_integration_fixed_hermite, n, 0.0, 0.5, 0.0, 0.0),
        &gsl_integration_fixed_free);
    require(ws != nullptr, ErrorCode::internal, "gauss_hermite_normal: workspace allocation failed");
    const double* x = gsl_integration_fixed_nodes(ws.get());
    const double* w = gsl_integration_fixed_weights(ws.get());
    const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi);
    QuadratureRule rule;
    rule.nodes.assign(x, x + n);
    rule.weights.resize(n);
    for (std::size_t i = 0; i < n; ++i) rule.weights[i] = w[i] * norm;
    return rule;
}

namespace {

using Workspace = std::unique_ptr<gsl_integration_workspace, decltype(&gsl_integration_workspace_free)>;
using QawsTable = std::unique_ptr<gsl_integration_qaws_table, decltype(&gsl_integration_qaws_table_free)>;

constexpr std::size_t kQawsLimit = 200;

double qaws_call(double x, void* params) {
    return (*static_cast<const std::function<double(double)>*>(params))(x);
}

struct SimplexLevel {
    double delta;
    bool endpoint;
    double rel_tol;

    // Left exponent of f_k(s) = int_0^s f_{k-1}(r) (s - r)^{-delta} dr: f_0 is
    // 1 or s^{-delta}, and each level adds 1 - delta by homogeneity.
    double left_exponent(int k) const { return k * (1.0 - delta) - (endpoint ? delta : 0.0); }

    // h_k(s) = f_k(s) s^{-alpha_k}, regular on [0, s]; QAWS also samples r = 0,
    // where the limit is taken at s = 1e-100 (small, but s^{+-alpha} stays
    // representable for the exponents met here).
    double regular(int k, double s) const {
        if (k == 0) return 1.0;
        s = std::max(s, 1e-100);
        return value(k, s) * std::pow(s, -left_exponent(k));
    }

    double value(int k, double s) const {
        if (k == 0) return endpoint ? std::pow(s, -delta) : 1.0;
        const double alpha = left_exponent(k - 1);
        std::function<double(double)> g = [&](double r) { return regular(k - 1, r); };
        gsl_function fn{&qaws_call, &g};
        QawsTable table(gsl_integration_qaws_table_alloc(alpha, -delta, 0, 0), &gsl_integration_qaws_table_free);
        Workspace ws(gsl_integration_workspace_alloc(kQawsLimit), &gsl_integration_workspace_free);
        require(table && ws, ErrorCode::internal, "nested_simplex_quadrature: allocation failed");
        double result = 0.0, abserr = 0.0;
        const int status =
            gsl_integration_qaws(&fn, 0.0, s, table.get(), 0.0, rel_tol, kQawsLimit, ws.get(), &result, &abserr);
        if (status != 0)
            fail(ErrorCode::numeric_failure, std::string("nested_simplex_quadrature: QAWS failed: ") +
                                                 gsl_strerror(status));
        return result;
    }
};

}  // namespace

double nested_simplex_quadrature(int n, double delta, double t, bool endpoint, double rel_tol) {
    require(n >= 0, ErrorCode::invalid_argument, "nested_simplex_quadrature: n must be >= 0");
    require(delta > 0.0 && delta < 1.0, ErrorCode::domain_error, "nested_simplex_quadrature: delta must be in (0, 1)");
    require(t > 0.0 && std::isfinite(t), ErrorCode::domain_error, "nested_simplex_quadrature: t must be > 0");
    gsl_set_error_handler_off();
    return SimplexLevel{delta, endpoint, rel_tol}.value(n, t);
}

}  // namespace kolmo
