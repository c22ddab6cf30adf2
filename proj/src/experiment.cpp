#include "kolmo/experiment.hpp"

#include "kolmo/bounds.hpp"
#include "kolmo/csv.hpp"
#include "kolmo/error.hpp"
#include "kolmo/girsanov.hpp"
#include "kolmo/hypotheses.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace kolmo {

namespace {

namespace fs = std::filesystem;

[[noreturn]] void field_error(const std::string& field, const std::string& what) {
    fail(ErrorCode::config_error, "config field '" + field + "': " + what);
}

void check_keys(const nlohmann::json& j, const std::string& where, const std::set<std::string>& allowed) {
    if (!j.is_object()) field_error(where.empty() ? "<root>" : where, "expected an object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key())) field_error(where.empty() ? it.key() : where + "." + it.key(), "unknown field");
}

double get_double(const nlohmann::json& j, const std::string& field) {
    if (!j.is_number()) field_error(field, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) field_error(field, "expected a finite number");
    return v;
}

std::int64_t get_int(const nlohmann::json& j, const std::string& field, std::int64_t lo) {
    if (!j.is_number_integer()) field_error(field, "expected an integer");
    const auto v = j.get<std::int64_t>();
    if (v < lo) field_error(field, "must be >= " + std::to_string(lo));
    return v;
}

std::uint64_t get_u64(const nlohmann::json& j, const std::string& field, std::uint64_t lo) {
    if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0))
        field_error(field, "expected a non-negative integer");
    const auto v = j.get<std::uint64_t>();
    if (v < lo) field_error(field, "must be >= " + std::to_string(lo));
    return v;
}

template <class F>
auto nested(const std::string& field, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const Error& e) {
        if (e.code() == ErrorCode::config_error && std::string(e.what()).rfind("config field", 0) == 0) throw;
        field_error(field, e.what());
    } catch (const nlohmann::json::exception& e) {
        field_error(field, e.what());
    }
}

std::pair<int, int> line_col(const std::string& text, std::size_t byte) {
    int line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

fs::path output_dir(const ExperimentConfig& cfg, const RunOptions& opts) {
    fs::path dir = opts.out_dir ? *opts.out_dir : fs::path(cfg.outputs);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) fail(ErrorCode::io_error, "cannot create output directory " + dir.string() + ": " + ec.message());
    return dir;
}

std::uint64_t effective_seed(const ExperimentConfig& cfg, const RunOptions& opts) {
    return opts.seed ? *opts.seed : cfg.seed;
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? sep : "") + parts[i];
    return out;
}

}  // namespace

ExperimentConfig default_config() { return ExperimentConfig{}; }

ExperimentConfig parse_config(const nlohmann::json& j, const fs::path& base_dir) {
    check_keys(j, "", {"model", "drift", "phi", "t", "x", "n_max", "mc", "seed", "outputs", "kappa", "paths",
                       "bounds"});
    ExperimentConfig cfg;
    if (!j.contains("model")) field_error("model", "missing");
    const auto& jm = j.at("model");
    if (jm.is_string()) {
        cfg.model_path = jm.get<std::string>();
        fs::path p(cfg.model_path);
        if (p.is_relative()) p = base_dir / p;
        if (!fs::exists(p)) field_error("model", "file not found: " + p.string());
        cfg.model = nested("model", [&] { return SpectralModel::load(p); });
    } else if (jm.is_object()) {
        cfg.model_inline = jm;
        cfg.model = nested("model", [&] { return SpectralModel::from_json(jm); });
    } else {
        field_error("model", "expected a file path or an object");
    }
    const std::size_t dim = cfg.model.dim();

    if (!j.contains("drift")) field_error("drift", "missing");
    cfg.drift = nested("drift", [&] { return DriftSpec::from_json(j.at("drift")); });
    nested("drift", [&] { cfg.drift.check_model(cfg.model); return 0; });
    if (!j.contains("phi")) field_error("phi", "missing");
    cfg.phi = nested("phi", [&] { return TestFunctionSpec::from_json(j.at("phi")); });
    nested("phi", [&] { cfg.phi.check_model(cfg.model); return 0; });

    if (!j.contains("t")) field_error("t", "missing");
    cfg.t = get_double(j.at("t"), "t");
    if (!(cfg.t > 0.0)) field_error("t", "must be > 0");

    if (j.contains("x")) {
        const auto& jx = j.at("x");
        if (!jx.is_array()) field_error("x", "expected an array");
        std::vector<double> xs;
        for (std::size_t i = 0; i < jx.size(); ++i) xs.push_back(get_double(jx[i], "x[" + std::to_string(i) + "]"));
        if (xs.size() != dim)
            field_error("x", "expected " + std::to_string(dim) + " coordinates, got " + std::to_string(xs.size()));
        cfg.x = StateVector(std::move(xs));
    } else {
        cfg.x = StateVector(dim);
    }

    if (j.contains("n_max")) cfg.n_max = static_cast<int>(get_int(j.at("n_max"), "n_max", 0));
    if (j.contains("seed")) cfg.seed = get_u64(j.at("seed"), "seed", 0);
    if (j.contains("outputs")) {
        if (!j.at("outputs").is_string()) field_error("outputs", "expected a directory path");
        cfg.outputs = j.at("outputs").get<std::string>();
    }
    if (j.contains("kappa")) {
        cfg.kappa = get_double(j.at("kappa"), "kappa");
        if (!(cfg.kappa > 1.0)) field_error("kappa", "must be > 1");
    }

    if (j.contains("mc")) {
        const auto& mc = j.at("mc");
        check_keys(mc, "mc", {"nsamples", "npaths", "steps", "mode", "delta"});
        if (mc.contains("nsamples")) cfg.mc.nsamples = get_u64(mc.at("nsamples"), "mc.nsamples", 2);
        if (mc.contains("npaths")) cfg.mc.npaths = get_u64(mc.at("npaths"), "mc.npaths", 2);
        if (mc.contains("steps")) cfg.mc.steps = static_cast<int>(get_int(mc.at("steps"), "mc.steps", 1));
        if (mc.contains("mode")) {
            if (!mc.at("mode").is_string()) field_error("mc.mode", "expected \"uniform\" or \"dirichlet\"");
            cfg.mc.mode = nested("mc.mode", [&] { return time_sampling_from_string(mc.at("mode").get<std::string>()); });
        }
        if (mc.contains("delta")) {
            const double d = get_double(mc.at("delta"), "mc.delta");
            if (!(d > 0.0 && d < 1.0)) field_error("mc.delta", "must be in (0, 1)");
            cfg.mc.delta = d;
        }
    }

    if (j.contains("paths")) {
        const auto& jp = j.at("paths");
        check_keys(jp, "paths", {"count"});
        if (jp.contains("count")) cfg.path_count = get_u64(jp.at("count"), "paths.count", 1);
    }

    if (j.contains("bounds")) {
        const auto& jb = j.at("bounds");
        check_keys(jb, "bounds", {"p0", "bar_p", "kappa", "beta", "delta", "c_delta", "c_beta", "trace", "t", "nmax",
                        "horizon"});
        BoundsSettings& b = cfg.bounds;
        auto num = [&](const char* key, double& dst) {
            if (jb.contains(key)) dst = get_double(jb.at(key), std::string("bounds.") + key);
        };
        num("p0", b.p0);
        num("bar_p", b.bar_p);
        num("kappa", b.kappa);
        num("beta", b.beta);
        num("delta", b.delta);
        num("c_delta", b.c_delta);
        num("c_beta", b.c_beta);
        num("trace", b.trace);
        num("t", b.t);
        if (jb.contains("nmax")) b.nmax = static_cast<int>(get_int(jb.at("nmax"), "bounds.nmax", 0));
        if (jb.contains("horizon")) b.horizon = static_cast<int>(get_int(jb.at("horizon"), "bounds.horizon", 1));
    }
    return cfg;
}

ExperimentConfig load_config(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::config_error, "cannot open config file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        const auto [line, col] = line_col(text, e.byte > 0 ? e.byte - 1 : 0);
        fail(ErrorCode::config_error, path.string() + ":" + std::to_string(line) + ":" + std::to_string(col) +
                                          ": JSON syntax error: " + e.what());
    }
    return parse_config(j, path.parent_path());
}

nlohmann::json serialize_config(const ExperimentConfig& cfg) {
    nlohmann::json j;
    if (!cfg.model_path.empty())
        j["model"] = cfg.model_path;
    else
        j["model"] = cfg.model.to_json();
    j["drift"] = cfg.drift.to_json();
    j["phi"] = cfg.phi.to_json();
    j["t"] = cfg.t;
    j["x"] = cfg.x.coords();
    j["n_max"] = cfg.n_max;
    nlohmann::json mc = {{"nsamples", cfg.mc.nsamples},
                         {"npaths", cfg.mc.npaths},
                         {"steps", cfg.mc.steps},
                         {"mode", to_string(cfg.mc.mode)}};
    if (cfg.mc.delta) mc["delta"] = *cfg.mc.delta;
    j["mc"] = mc;
    j["seed"] = cfg.seed;
    j["outputs"] = cfg.outputs;
    j["kappa"] = cfg.kappa;
    j["paths"] = {{"count", cfg.path_count}};
    const BoundsSettings& b = cfg.bounds;
    j["bounds"] = {{"p0", b.p0},           {"bar_p", b.bar_p},   {"kappa", b.kappa}, {"beta", b.beta},
                   {"delta", b.delta},     {"c_delta", b.c_delta}, {"c_beta", b.c_beta}, {"trace", b.trace},
                   {"t", b.t},             {"nmax", b.nmax},       {"horizon", b.horizon}};
    return j;
}

RunSummary run_experiment(const ExperimentConfig& cfg, const RunOptions& opts) {
    const std::uint64_t seed = effective_seed(cfg, opts);
    const HypothesisReport hyp =
        check_hypotheses(cfg.model, cfg.drift, cfg.phi, log_time_grid(1e-6, 1.0, 60), cfg.kappa);
    const std::vector<std::string> violated = violated_clauses(hyp, cfg.n_max);
    RunSummary summary;
    if (!violated.empty()) {
        if (!opts.override_hypotheses)
            fail(ErrorCode::hypothesis_violation, "hypothesis check failed: " + join(violated, "; "));
        summary.warnings.push_back("hypotheses overridden: " + join(violated, "; "));
    }
    const fs::path dir = output_dir(cfg, opts);

    SeriesConfig scfg;
    scfg.nsamples = cfg.mc.nsamples;
    scfg.mode = cfg.mc.mode;
    scfg.delta = cfg.mc.delta ? *cfg.mc.delta : (hyp.fit_valid ? hyp.delta_fit : 0.5);
    scfg.seed = seed;
    scfg.workers = opts.workers;
    scfg.allow_unbounded = opts.override_hypotheses;
    const SeriesResult series = estimate_series(cfg.model, cfg.drift, cfg.phi, cfg.t, cfg.x, cfg.n_max, scfg);

    GirsanovConfig gcfg;
    gcfg.steps = cfg.mc.steps;
    gcfg.npaths = cfg.mc.npaths;
    gcfg.seed = seed;
    gcfg.workers = opts.workers;
    const GirsanovRun gir = run_girsanov(cfg.model, cfg.drift, cfg.phi, cfg.t, cfg.x, cfg.n_max, gcfg);
    const DirectEstimate direct = estimate_u_direct(cfg.model, cfg.drift, cfg.phi, cfg.t, cfg.x, gcfg);
    for (const auto& w : gir.weights.warnings) summary.warnings.push_back(w);

    summary.u_series = series.partial_sums.back();
    summary.u_girsanov = gir.u;
    summary.u_direct = direct.estimate;
    const double z_sg = z_score(summary.u_series, summary.u_girsanov);
    const double z_sd = z_score(summary.u_series, summary.u_direct);
    const double z_gd = z_score(summary.u_girsanov, summary.u_direct);
    summary.max_z = std::max({z_sg, z_sd, z_gd});

    {
        CsvWriter w(dir / "series_terms.csv",
                    {"n", "v_n", "std_error", "nsamples", "partial_sum", "partial_std_error", "ratio"});
        for (int n = 0; n <= cfg.n_max; ++n) {
            const double ratio = n == 0 ? std::numeric_limits<double>::quiet_NaN() : series.ratio_diagnostics[n - 1];
            w.field(n).field(series.terms[n].mean).field(series.terms[n].std_error).field(series.terms[n].nsamples);
            w.field(series.partial_sums[n].mean).field(series.partial_sums[n].std_error).field(ratio);
            w.end_row();
        }
        w.close();
        summary.files.push_back(dir / "series_terms.csv");
    }
    {
        CsvWriter w(dir / "girsanov_terms.csv",
                    {"n", "I_n", "std_error", "npaths", "steps", "v_n", "z_vs_series", "ladder_second_moment"});
        for (int n = 0; n <= cfg.n_max; ++n) {
            const Estimate& e = gir.terms[n];
            w.field(n).field(e.mean).field(e.std_error).field(e.nsamples).field(cfg.mc.steps);
            w.field(series.terms[n].mean).field(z_score(e, series.terms[n]));
            w.field(gir.ladder_second_moment[n].mean);
            w.end_row();
        }
        w.close();
        summary.files.push_back(dir / "girsanov_terms.csv");
    }
    {
        CsvWriter w(dir / "direct_oracle.csv",
                    {"steps", "npaths", "u", "std_error", "halving_difference", "halving_std_error"});
        w.field(cfg.mc.steps).field(direct.estimate.nsamples).field(direct.estimate.mean);
        w.field(direct.estimate.std_error);
        const bool h = direct.halving_difference.valid;
        w.field(h ? direct.halving_difference.mean : std::numeric_limits<double>::quiet_NaN());
        w.field(h ? direct.halving_difference.std_error : std::numeric_limits<double>::quiet_NaN());
        w.end_row();
        w.close();
        summary.files.push_back(dir / "direct_oracle.csv");
    }
    {
        CsvWriter w(dir / "summary.csv",
                    {"t", "n_max", "seed", "u_series", "se_series", "u_girsanov", "se_girsanov", "u_direct",
                     "se_direct", "z_series_girsanov", "z_series_direct", "z_girsanov_direct", "max_pairwise_z",
                     "martingale_mean", "martingale_se", "ess_fraction", "max_weight_share", "sampling_delta"});
        w.field(cfg.t).field(cfg.n_max).field(seed);
        w.field(summary.u_series.mean).field(summary.u_series.std_error);
        w.field(summary.u_girsanov.mean).field(summary.u_girsanov.std_error);
        w.field(summary.u_direct.mean).field(summary.u_direct.std_error);
        w.field(z_sg).field(z_sd).field(z_gd).field(summary.max_z);
        w.field(gir.martingale_mean.mean).field(gir.martingale_mean.std_error);
        w.field(gir.weights.ess_fraction).field(gir.weights.max_weight_share).field(scfg.delta);
        w.end_row();
        w.close();
        summary.files.push_back(dir / "summary.csv");
    }
    return summary;
}

BoundsReport run_bounds(const ExperimentConfig& cfg, const RunOptions& opts) {
    const BoundsSettings& b = cfg.bounds;
    if (!beta_kappa_admissible(b.beta, b.kappa, b.delta)) {
        std::ostringstream os;
        os << "bounds: parameters violate the exponent condition beta*kappa < 2(1-delta): beta*kappa = "
           << b.beta * b.kappa << ", 2(1-delta) = " << 2.0 * (1.0 - b.delta);
        fail(ErrorCode::hypothesis_violation, os.str());
    }
    const int horizon = std::max(b.horizon, b.nmax);
    const ExponentPlan plan = plan_exponents(b.p0, b.bar_p, b.kappa, horizon);
    const BoundInputs in{b.c_delta, b.delta, b.trace, b.beta, b.c_beta, b.t};
    const RatioTestResult rt = scan_vn_bounds(plan, in, horizon);

    std::vector<int> ns;
    for (int n = 0; n <= b.nmax; ++n) ns.push_back(n);
    for (double n = std::max(b.nmax, 1) * 1.25; n < horizon; n *= 1.25)
        if (static_cast<int>(n) > ns.back()) ns.push_back(static_cast<int>(n));
    if (ns.back() < horizon) ns.push_back(horizon);

    const fs::path dir = output_dir(cfg, opts);
    CsvWriter w(dir / "bounds.csv", {"n", "n0", "p_n", "q_n", "b_product", "log_b_product", "simplex_integral",
                                     "vn_bound", "log_vn_bound", "dvn_bound", "log_dvn_bound", "ratio",
                                     "contractive"});
    for (int n : ns) {
        const BoundRow r = vn_norm_bounds(n, plan, in);
        const double qn = n == 0 ? std::numeric_limits<double>::quiet_NaN() : plan.q[n - 1];
        const bool contractive = rt.first_contractive_index >= 0 && n >= rt.first_contractive_index + 1;
        w.field(n).field(plan.n0).field(plan.p[n]).field(qn).field(r.b_product).field(r.log_b_product);
        w.field(r.simplex_integral).field(r.vn_bound).field(r.log_vn_bound).field(r.dvn_bound);
        w.field(r.log_dvn_bound).field(r.ratio).field(contractive);
        w.end_row();
    }
    w.close();
    return {plan.n0, rt.converges, rt.first_contractive_index, dir / "bounds.csv"};
}

fs::path run_paths(const ExperimentConfig& cfg, const RunOptions& opts) {
    GirsanovConfig gcfg;
    gcfg.steps = cfg.mc.steps;
    gcfg.npaths = cfg.path_count;
    gcfg.seed = effective_seed(cfg, opts);
    gcfg.workers = opts.workers;
    const fs::path dir = output_dir(cfg, opts);
    const fs::path file = dir / "paths.csv";
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::io_error, "cannot open " + file.string() + " for writing");
    dump_paths(cfg.model, cfg.drift, cfg.t, cfg.x, gcfg, cfg.path_count, out);
    out.close();
    if (!out) fail(ErrorCode::io_error, "error while writing " + file.string());
    return file;
}

}  // namespace kolmo
