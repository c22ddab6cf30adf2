#pragma once

#include "kolmo/estimate.hpp"
#include "kolmo/functions.hpp"
#include "kolmo/series.hpp"
#include "kolmo/spectral.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace kolmo {

struct McSettings {
    std::uint64_t nsamples = 100000;  // simplex samples per series term
    std::uint64_t npaths = 100000;    // Girsanov and direct paths
    int steps = 1024;
    TimeSampling mode = TimeSampling::dirichlet;
    std::optional<double> delta;      // Dirichlet exponent; default is the fitted delta
};

struct BoundsSettings {
    double p0 = 2.0;
    double bar_p = 1.5;
    double kappa = 1.5;
    double beta = 0.5;
    double delta = 0.5;
    double c_delta = 1.0;
    double c_beta = 2.0;
    double trace = 1.0;
    double t = 1.0;
    int nmax = 40;             // dense rows 0 .. nmax
    int horizon = 1000000;     // ratio-test horizon; sparse rows beyond nmax
};

/// One experiment. The model is either a path to a model JSON file (relative
/// paths resolve against the config file's directory) or an inline object.
struct ExperimentConfig {
    std::string model_path;
    std::optional<nlohmann::json> model_inline;
    SpectralModel model{{-1.0}, {2.0}};
    DriftSpec drift = DriftSpec::bounded_sin(0.4, 1.0);
    TestFunctionSpec phi = TestFunctionSpec::cosine(StateVector{1.0});
    double t = 0.5;
    StateVector x{0.3};
    int n_max = 5;
    McSettings mc;
    std::uint64_t seed = 1;
    std::string outputs = "out";
    double kappa = 1.5;
    std::uint64_t path_count = 10;  // rows of the `paths` dump
    BoundsSettings bounds;
};

/// Built-in defaults: 1-D model a = -1, q = 2, bounded_sin(0.4, 1) drift,
/// cos(z) test function, t = 0.5, x = 0.3.
ExperimentConfig default_config();

/// Parses a config object. Field errors name the offending field.
ExperimentConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir = ".");

/// Reads and parses a config file. JSON syntax errors report line and column.
ExperimentConfig load_config(const std::filesystem::path& path);

/// Canonical JSON form; parse_config(serialize_config(c)) reproduces c.
nlohmann::json serialize_config(const ExperimentConfig& cfg);

struct RunOptions {
    unsigned workers = 1;
    bool override_hypotheses = false;
    std::optional<std::uint64_t> seed;
    std::optional<std::filesystem::path> out_dir;
};

struct RunSummary {
    Estimate u_series;
    Estimate u_girsanov;
    Estimate u_direct;
    double max_z = 0.0;
    std::vector<std::string> warnings;
    std::vector<std::filesystem::path> files;
};

/// Runs the iteration series, the Girsanov estimator and the direct scheme
/// and writes series_terms.csv, girsanov_terms.csv, direct_oracle.csv and
/// summary.csv. Refuses (hypothesis_violation) when a required hypothesis
/// fails unless overridden.
RunSummary run_experiment(const ExperimentConfig& cfg, const RunOptions& opts);

struct CheckRow {
    std::string suite;
    std::string check;
    double value = 0.0;
    double reference = 0.0;
    double tolerance = 0.0;
    bool passed = false;
};

struct VerifyReport {
    std::vector<CheckRow> rows;
    std::filesystem::path file;
    std::size_t failures() const;
};

/// Suites: identities, moments, martingales, equivalence. Writes verify_<suite>.csv.
VerifyReport run_verify(const std::string& suite, const ExperimentConfig& cfg, const RunOptions& opts);
std::vector<std::string> verify_suites();

struct BoundsReport {
    int n0 = 0;
    bool converges = false;
    int first_contractive_index = -1;
    std::filesystem::path file;
};

/// Writes bounds.csv: rows 0 .. nmax, then log-spaced rows up to the horizon.
/// Refuses when beta * kappa >= 2 (1 - delta).
BoundsReport run_bounds(const ExperimentConfig& cfg, const RunOptions& opts);

/// Writes paths.csv with cfg.path_count Girsanov paths.
std::filesystem::path run_paths(const ExperimentConfig& cfg, const RunOptions& opts);

}  // namespace kolmo
