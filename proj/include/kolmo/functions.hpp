#pragma once

#include "kolmo/spectral.hpp"

#include <span>
#include <string>

#include <json.hpp>

namespace kolmo {

/// Nonlinear drift B : H -> H drawn from a fixed registry.
///
///   zero                  B = 0
///   constant(b)           B = b
///   bounded_sin(A, w)     B(z)_k = A sin(w z_k)
///   sublinear(c, beta)    B(z) = c |z|^{beta-1} z, so |B(z)| = c |z|^beta
///   linear(s)             B(z) = s z   (outside the admissible class; oracle
///                                       experiments only)
class DriftSpec {
  public:
    enum class Kind { zero, constant, bounded_sin, sublinear, linear };

    static DriftSpec zero();
    static DriftSpec constant(StateVector b);
    static DriftSpec bounded_sin(double amplitude, double frequency);
    static DriftSpec sublinear(double coeff, double beta);
    static DriftSpec linear(double scale);

    static DriftSpec from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;

    Kind kind() const noexcept { return kind_; }
    std::string name() const;

    /// Growth exponent beta in |B(x)| <= C (1 + |x|^beta).
    double declared_beta() const noexcept;
    bool bounded() const noexcept;
    /// Q^{-1/2} B is declared defined with at most linear growth. Every
    /// registry drift is compatible on a diagonal model with q_k > 0; the flag
    /// can be cleared from config to exercise the refusal path.
    bool qhalf_compatible() const noexcept { return qhalf_compatible_; }
    DriftSpec& set_qhalf_compatible(bool v) noexcept {
        qhalf_compatible_ = v;
        return *this;
    }
    /// Satisfies the admissible-drift conditions (bounded, or sublinear growth).
    bool within_hypotheses() const noexcept { return kind_ != Kind::linear; }

    /// out = B(z).
    void apply(std::span<const double> z, std::span<double> out) const noexcept;
    StateVector operator()(const StateVector& z) const;

    /// sup_z |Q^{-1/2} B(z)|; +inf for unbounded drifts.
    double psi_sup_norm(const SpectralModel& model) const;
    /// A constant c with |Q^{-1/2} B(z)| <= c (1 + |z|) for all z.
    double psi_growth_constant(const SpectralModel& model) const;

    /// Throws dimension_mismatch if a constant drift does not match the model.
    void check_model(const SpectralModel& model) const;

  private:
    Kind kind_ = Kind::zero;
    StateVector b_;
    double amplitude_ = 0.0;
    double frequency_ = 0.0;
    double coeff_ = 0.0;
    double beta_ = 0.0;
    double scale_ = 0.0;
    bool qhalf_compatible_ = true;
};

/// Initial datum phi : H -> R drawn from a fixed registry.
///
///   cosine(h)            phi(z) = cos<h, z>
///   gaussian_bump(s)     phi(z) = exp(-|z|^2 / (2 s^2))
///   linear(h)            phi(z) = <h, z>   (unbounded; closed-form oracles only)
class TestFunctionSpec {
  public:
    enum class Kind { cosine, gaussian_bump, linear };

    static TestFunctionSpec cosine(StateVector h);
    static TestFunctionSpec gaussian_bump(double scale);
    static TestFunctionSpec linear(StateVector h);

    static TestFunctionSpec from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;

    Kind kind() const noexcept { return kind_; }
    std::string name() const;
    bool bounded() const noexcept { return kind_ != Kind::linear; }
    const StateVector& direction() const noexcept { return h_; }
    double scale() const noexcept { return scale_; }

    double operator()(std::span<const double> z) const noexcept;
    double operator()(const StateVector& z) const noexcept { return (*this)(z.span()); }

    void check_model(const SpectralModel& model) const;

  private:
    Kind kind_ = Kind::cosine;
    StateVector h_;
    double scale_ = 1.0;
};

}  // namespace kolmo
