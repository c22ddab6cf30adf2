#include "kolmo/spectral.hpp"

#include "kolmo/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace kolmo {

double StateVector::norm() const noexcept {
    return std::sqrt(dot(coords_, coords_));
}

double dot(std::span<const double> a, std::span<const double> b) noexcept {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s;
}

SpectralModel::SpectralModel(std::vector<double> drift_eigs, std::vector<double> noise_eigs)
    : a_(std::move(drift_eigs)), q_(std::move(noise_eigs)) {
    require(!a_.empty(), ErrorCode::invalid_argument, "spectral model: dimension must be positive");
    require(a_.size() == q_.size(), ErrorCode::dimension_mismatch,
            "spectral model: a and q must have the same length");
    for (std::size_t k = 0; k < a_.size(); ++k) {
        if (!(std::isfinite(a_[k]) && a_[k] < 0.0))
            fail(ErrorCode::invalid_argument,
                 "spectral model: drift eigenvalue a[" + std::to_string(k) + "] must be finite and < 0");
        if (!(std::isfinite(q_[k]) && q_[k] > 0.0))
            fail(ErrorCode::invalid_argument,
                 "spectral model: noise eigenvalue q[" + std::to_string(k) + "] must be finite and > 0");
    }
}

SpectralModel SpectralModel::from_json(const nlohmann::json& j) {
    if (!j.is_object()) fail(ErrorCode::config_error, "model: expected a JSON object");
    for (const char* key : {"dim", "a", "q"})
        if (!j.contains(key)) fail(ErrorCode::config_error, std::string("model: missing field '") + key + "'");
    if (!j.at("dim").is_number_integer()) fail(ErrorCode::config_error, "model: 'dim' must be an integer");
    if (!j.at("a").is_array() || !j.at("q").is_array())
        fail(ErrorCode::config_error, "model: 'a' and 'q' must be arrays");
    const auto dim = j.at("dim").get<long long>();
    std::vector<double> a, q;
    try {
        a = j.at("a").get<std::vector<double>>();
        q = j.at("q").get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::config_error, std::string("model: ") + e.what());
    }
    if (dim <= 0 || static_cast<std::size_t>(dim) != a.size() || a.size() != q.size())
        fail(ErrorCode::config_error, "model: 'dim' must equal the lengths of 'a' and 'q'");
    return SpectralModel(std::move(a), std::move(q));
}

SpectralModel SpectralModel::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::io_error, "cannot open model file " + path.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        fail(ErrorCode::config_error, path.string() + ": " + e.what());
    }
    return from_json(j);
}

nlohmann::json SpectralModel::to_json() const {
    return {{"dim", dim()}, {"a", a_}, {"q", q_}};
}

void SpectralModel::check_dim(std::size_t n, const char* what) const {
    if (n != dim())
        fail(ErrorCode::dimension_mismatch, std::string(what) + ": expected dimension " +
                                                std::to_string(dim()) + ", got " + std::to_string(n));
}

double qt_scalar(double a, double q, double t) noexcept {
    const double x = 2.0 * a * t;
    if (std::abs(a * t) < 1e-8) return q * t * (1.0 + x / 2.0 + x * x / 6.0);
    return q * std::expm1(x) / (2.0 * a);
}

StateVector semigroup_apply(const SpectralModel& model, double t, const StateVector& x) {
    model.check_dim(x.size(), "semigroup_apply");
    require(t >= 0.0, ErrorCode::domain_error, "semigroup_apply: t must be >= 0");
    if (t == 0.0) return x;
    StateVector out(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) out[k] = std::exp(model.a(k) * t) * x[k];
    return out;
}

std::vector<double> qt_eigenvalues(const SpectralModel& model, double t) {
    require(t > 0.0, ErrorCode::domain_error, "qt_eigenvalues: t must be > 0");
    std::vector<double> out(model.dim());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = qt_scalar(model.a(k), model.q(k), t);
    return out;
}

LambdaDiagonal lambda_diagonal(const SpectralModel& model, double t) {
    require(t > 0.0, ErrorCode::domain_error, "lambda_diagonal: t must be > 0");
    LambdaDiagonal out;
    out.entries.resize(model.dim());
    for (std::size_t k = 0; k < model.dim(); ++k) {
        out.entries[k] = std::exp(model.a(k) * t) / std::sqrt(qt_scalar(model.a(k), model.q(k), t));
        out.operator_norm = std::max(out.operator_norm, out.entries[k]);
    }
    return out;
}

QInfinity q_infinity(const SpectralModel& model) {
    QInfinity out;
    out.eigenvalues.resize(model.dim());
    for (std::size_t k = 0; k < model.dim(); ++k) {
        out.eigenvalues[k] = model.q(k) / (2.0 * std::abs(model.a(k)));
        out.trace += out.eigenvalues[k];
    }
    return out;
}

}  // namespace kolmo
