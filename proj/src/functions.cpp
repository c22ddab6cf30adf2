#include "kolmo/functions.hpp"

#include "kolmo/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace kolmo {

namespace {

double get_number(const nlohmann::json& j, const char* key, const char* ctx) {
    if (!j.contains(key) || !j.at(key).is_number())
        fail(ErrorCode::config_error, std::string(ctx) + ": missing or non-numeric field '" + key + "'");
    return j.at(key).get<double>();
}

StateVector get_vector(const nlohmann::json& j, const char* key, const char* ctx) {
    if (!j.contains(key) || !j.at(key).is_array())
        fail(ErrorCode::config_error, std::string(ctx) + ": missing or non-array field '" + key + "'");
    try {
        return StateVector(j.at(key).get<std::vector<double>>());
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::config_error, std::string(ctx) + ": field '" + key + "': " + e.what());
    }
}

std::string get_kind(const nlohmann::json& j, const char* ctx) {
    if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string())
        fail(ErrorCode::config_error, std::string(ctx) + ": expected an object with a string 'kind'");
    return j.at("kind").get<std::string>();
}

double min_noise(const SpectralModel& model) {
    const auto q = model.noise_eigs();
    return *std::min_element(q.begin(), q.end());
}

}  // namespace

// ---------------------------------------------------------------------------
// DriftSpec

DriftSpec DriftSpec::zero() {
    return DriftSpec{};
}

DriftSpec DriftSpec::constant(StateVector b) {
    for (std::size_t k = 0; k < b.size(); ++k)
        require(std::isfinite(b[k]), ErrorCode::invalid_argument, "constant drift: non-finite entry");
    DriftSpec d;
    d.kind_ = Kind::constant;
    d.b_ = std::move(b);
    return d;
}

DriftSpec DriftSpec::bounded_sin(double amplitude, double frequency) {
    require(std::isfinite(amplitude) && std::isfinite(frequency), ErrorCode::invalid_argument,
            "bounded_sin drift: non-finite parameter");
    DriftSpec d;
    d.kind_ = Kind::bounded_sin;
    d.amplitude_ = amplitude;
    d.frequency_ = frequency;
    return d;
}

DriftSpec DriftSpec::sublinear(double coeff, double beta) {
    require(std::isfinite(coeff), ErrorCode::invalid_argument, "sublinear drift: non-finite coefficient");
    require(beta > 0.0 && beta < 1.0, ErrorCode::invalid_argument, "sublinear drift: beta must lie in (0,1)");
    DriftSpec d;
    d.kind_ = Kind::sublinear;
    d.coeff_ = coeff;
    d.beta_ = beta;
    return d;
}

DriftSpec DriftSpec::linear(double scale) {
    require(std::isfinite(scale), ErrorCode::invalid_argument, "linear drift: non-finite scale");
    DriftSpec d;
    d.kind_ = Kind::linear;
    d.scale_ = scale;
    return d;
}

DriftSpec DriftSpec::from_json(const nlohmann::json& j) {
    const std::string kind = get_kind(j, "drift");
    DriftSpec d;
    if (kind == "zero")
        d = zero();
    else if (kind == "constant")
        d = constant(get_vector(j, "b", "drift"));
    else if (kind == "bounded_sin")
        d = bounded_sin(get_number(j, "amplitude", "drift"), get_number(j, "frequency", "drift"));
    else if (kind == "sublinear")
        d = sublinear(get_number(j, "coeff", "drift"), get_number(j, "beta", "drift"));
    else if (kind == "linear")
        d = linear(get_number(j, "scale", "drift"));
    else
        fail(ErrorCode::config_error, "drift: unknown kind '" + kind + "'");
    if (j.contains("qhalf_compatible")) {
        if (!j.at("qhalf_compatible").is_boolean())
            fail(ErrorCode::config_error, "drift: 'qhalf_compatible' must be a boolean");
        d.qhalf_compatible_ = j.at("qhalf_compatible").get<bool>();
    }
    return d;
}

nlohmann::json DriftSpec::to_json() const {
    nlohmann::json j;
    switch (kind_) {
    case Kind::zero: j = {{"kind", "zero"}}; break;
    case Kind::constant: j = {{"kind", "constant"}, {"b", b_.coords()}}; break;
    case Kind::bounded_sin:
        j = {{"kind", "bounded_sin"}, {"amplitude", amplitude_}, {"frequency", frequency_}};
        break;
    case Kind::sublinear: j = {{"kind", "sublinear"}, {"coeff", coeff_}, {"beta", beta_}}; break;
    case Kind::linear: j = {{"kind", "linear"}, {"scale", scale_}}; break;
    }
    if (!qhalf_compatible_) j["qhalf_compatible"] = false;
    return j;
}

std::string DriftSpec::name() const {
    switch (kind_) {
    case Kind::zero: return "zero";
    case Kind::constant: return "constant";
    case Kind::bounded_sin: return "bounded_sin";
    case Kind::sublinear: return "sublinear";
    case Kind::linear: return "linear";
    }
    return "?";
}

double DriftSpec::declared_beta() const noexcept {
    switch (kind_) {
    case Kind::sublinear: return beta_;
    case Kind::linear: return 1.0;
    default: return 0.0;
    }
}

bool DriftSpec::bounded() const noexcept {
    return kind_ == Kind::zero || kind_ == Kind::constant || kind_ == Kind::bounded_sin ||
           (kind_ == Kind::sublinear && coeff_ == 0.0) || (kind_ == Kind::linear && scale_ == 0.0);
}

void DriftSpec::apply(std::span<const double> z, std::span<double> out) const noexcept {
    const std::size_t n = z.size();
    switch (kind_) {
    case Kind::zero:
        std::fill(out.begin(), out.end(), 0.0);
        break;
    case Kind::constant:
        for (std::size_t k = 0; k < n; ++k) out[k] = b_[k];
        break;
    case Kind::bounded_sin:
        for (std::size_t k = 0; k < n; ++k) out[k] = amplitude_ * std::sin(frequency_ * z[k]);
        break;
    case Kind::sublinear: {
        const double r = std::sqrt(dot(z, z));
        const double f = r > 0.0 ? coeff_ * std::pow(r, beta_ - 1.0) : 0.0;
        for (std::size_t k = 0; k < n; ++k) out[k] = f * z[k];
        break;
    }
    case Kind::linear:
        for (std::size_t k = 0; k < n; ++k) out[k] = scale_ * z[k];
        break;
    }
}

StateVector DriftSpec::operator()(const StateVector& z) const {
    if (kind_ == Kind::constant && z.size() != b_.size())
        fail(ErrorCode::dimension_mismatch, "constant drift: dimension mismatch");
    StateVector out(z.size());
    apply(z.span(), out.span());
    return out;
}

double DriftSpec::psi_sup_norm(const SpectralModel& model) const {
    check_model(model);
    switch (kind_) {
    case Kind::zero: return 0.0;
    case Kind::constant: {
        double s = 0.0;
        for (std::size_t k = 0; k < model.dim(); ++k) s += b_[k] * b_[k] / model.q(k);
        return std::sqrt(s);
    }
    case Kind::bounded_sin: {
        double s = 0.0;
        for (std::size_t k = 0; k < model.dim(); ++k) s += 1.0 / model.q(k);
        return std::abs(amplitude_) * std::sqrt(s);
    }
    case Kind::sublinear:
        return coeff_ == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    case Kind::linear:
        return scale_ == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    }
    return std::numeric_limits<double>::infinity();
}

double DriftSpec::psi_growth_constant(const SpectralModel& model) const {
    check_model(model);
    switch (kind_) {
    case Kind::sublinear:
        // |z|^beta <= 1 + |z|
        return std::abs(coeff_) / std::sqrt(min_noise(model));
    case Kind::linear:
        return std::abs(scale_) / std::sqrt(min_noise(model));
    default:
        return psi_sup_norm(model);
    }
}

void DriftSpec::check_model(const SpectralModel& model) const {
    if (kind_ == Kind::constant) model.check_dim(b_.size(), "constant drift");
}

// ---------------------------------------------------------------------------
// TestFunctionSpec

TestFunctionSpec TestFunctionSpec::cosine(StateVector h) {
    TestFunctionSpec f;
    f.kind_ = Kind::cosine;
    f.h_ = std::move(h);
    return f;
}

TestFunctionSpec TestFunctionSpec::gaussian_bump(double scale) {
    require(scale > 0.0 && std::isfinite(scale), ErrorCode::invalid_argument,
            "gaussian_bump: scale must be finite and > 0");
    TestFunctionSpec f;
    f.kind_ = Kind::gaussian_bump;
    f.scale_ = scale;
    return f;
}

TestFunctionSpec TestFunctionSpec::linear(StateVector h) {
    TestFunctionSpec f;
    f.kind_ = Kind::linear;
    f.h_ = std::move(h);
    return f;
}

TestFunctionSpec TestFunctionSpec::from_json(const nlohmann::json& j) {
    const std::string kind = get_kind(j, "phi");
    if (kind == "cosine") return cosine(get_vector(j, "h", "phi"));
    if (kind == "gaussian_bump") return gaussian_bump(get_number(j, "scale", "phi"));
    if (kind == "linear") return linear(get_vector(j, "h", "phi"));
    fail(ErrorCode::config_error, "phi: unknown kind '" + kind + "'");
}

nlohmann::json TestFunctionSpec::to_json() const {
    switch (kind_) {
    case Kind::cosine: return {{"kind", "cosine"}, {"h", h_.coords()}};
    case Kind::gaussian_bump: return {{"kind", "gaussian_bump"}, {"scale", scale_}};
    case Kind::linear: return {{"kind", "linear"}, {"h", h_.coords()}};
    }
    return {};
}

std::string TestFunctionSpec::name() const {
    switch (kind_) {
    case Kind::cosine: return "cosine";
    case Kind::gaussian_bump: return "gaussian_bump";
    case Kind::linear: return "linear";
    }
    return "?";
}

double TestFunctionSpec::operator()(std::span<const double> z) const noexcept {
    switch (kind_) {
    case Kind::cosine: return std::cos(dot(h_.span(), z));
    case Kind::gaussian_bump: return std::exp(-dot(z, z) / (2.0 * scale_ * scale_));
    case Kind::linear: return dot(h_.span(), z);
    }
    return 0.0;
}

void TestFunctionSpec::check_model(const SpectralModel& model) const {
    if (kind_ != Kind::gaussian_bump) model.check_dim(h_.size(), "test function direction");
}

}  // namespace kolmo
