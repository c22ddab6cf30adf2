#pragma once

#include <cstddef>
#include <vector>

namespace kolmo {

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;

    std::size_t size() const noexcept { return nodes.size(); }
};

/// n-point Gauss-Legendre rule on [a, b].
QuadratureRule gauss_legendre(std::size_t n, double a, double b);

/// n-point Gauss-Hermite rule normalized to the standard normal law:
/// sum_i w_i f(x_i) approximates E f(G), G ~ N(0, 1).
QuadratureRule gauss_hermite_normal(std::size_t n);

/// Integral over 0 < r_1 < ... < r_n < t of prod_{i=1}^n (r_{i+1} - r_i)^{-delta}
/// (r_{n+1} = t), times r_1^{-delta} when `endpoint` is set, computed by
/// nested adaptive QAWS integration one time variable at a time. Independent
/// of the closed Gamma form; used to check it.
double nested_simplex_quadrature(int n, double delta, double t, bool endpoint, double rel_tol = 1e-10);

}  // namespace kolmo
