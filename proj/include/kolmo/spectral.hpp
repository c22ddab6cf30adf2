#pragma once

#include <cstddef>
#include <filesystem>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace kolmo {

/// Coordinates of a point of the state space in the common eigenbasis of the
/// drift and noise operators.
class StateVector {
  public:
    StateVector() = default;
    explicit StateVector(std::size_t dim, double fill = 0.0) : coords_(dim, fill) {}
    explicit StateVector(std::vector<double> coords) : coords_(std::move(coords)) {}
    StateVector(std::initializer_list<double> coords) : coords_(coords) {}

    std::size_t size() const noexcept { return coords_.size(); }
    double& operator[](std::size_t k) noexcept { return coords_[k]; }
    double operator[](std::size_t k) const noexcept { return coords_[k]; }

    std::span<double> span() noexcept { return coords_; }
    std::span<const double> span() const noexcept { return coords_; }
    const std::vector<double>& coords() const noexcept { return coords_; }

    double norm() const noexcept;

    friend bool operator==(const StateVector&, const StateVector&) = default;

  private:
    std::vector<double> coords_;
};

double dot(std::span<const double> a, std::span<const double> b) noexcept;

/// Truncated operator pair (A, Q), simultaneously diagonal: A e_k = a_k e_k
/// with a_k < 0 and Q e_k = q_k e_k with q_k > 0.
class SpectralModel {
  public:
    SpectralModel(std::vector<double> drift_eigs, std::vector<double> noise_eigs);

    static SpectralModel from_json(const nlohmann::json& j);
    static SpectralModel load(const std::filesystem::path& path);
    nlohmann::json to_json() const;

    std::size_t dim() const noexcept { return a_.size(); }
    double a(std::size_t k) const noexcept { return a_[k]; }
    double q(std::size_t k) const noexcept { return q_[k]; }
    std::span<const double> drift_eigs() const noexcept { return a_; }
    std::span<const double> noise_eigs() const noexcept { return q_; }

    void check_dim(std::size_t n, const char* what) const;

  private:
    std::vector<double> a_;
    std::vector<double> q_;
};

/// Scalar (Q_t)_k = q (e^{2at} - 1) / (2a) for t >= 0, with a Taylor branch
/// when |a t| < 1e-8.
double qt_scalar(double a, double q, double t) noexcept;

/// e^{tA} x.
StateVector semigroup_apply(const SpectralModel& model, double t, const StateVector& x);

/// Eigenvalues of Q_t = int_0^t e^{sA} Q e^{sA*} ds, t > 0.
std::vector<double> qt_eigenvalues(const SpectralModel& model, double t);

struct LambdaDiagonal {
    std::vector<double> entries;  // e^{a_k t} / sqrt((Q_t)_k)
    double operator_norm = 0.0;
};

/// Lambda(t) = Q_t^{-1/2} e^{tA}, t > 0.
LambdaDiagonal lambda_diagonal(const SpectralModel& model, double t);

struct QInfinity {
    std::vector<double> eigenvalues;  // q_k / (2 |a_k|)
    double trace = 0.0;
};

QInfinity q_infinity(const SpectralModel& model);

}  // namespace kolmo
