// Exercises the library through the C header only, plus the CLI exit codes.
#include "kolmo/kolmo.h"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <sys/wait.h>
#include <unistd.h>

namespace fs = std::filesystem;

namespace {

struct Model {
    kolmo_model* p = nullptr;
    ~Model() { kolmo_model_free(p); }
};

int cli(const std::string& args) {
    const std::string cmd = std::string(KOLMO_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("kolmo_capi_" + name + "_" + std::to_string(::getpid()));
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

}  // namespace

TEST(CApi, ModelLifecycleAndSpectralOps) {
    const double a[] = {-1.0, -2.0}, q[] = {2.0, 2.0};
    Model m;
    ASSERT_EQ(kolmo_model_create(2, a, q, &m.p), KOLMO_OK);
    EXPECT_EQ(kolmo_model_dim(m.p), 2u);
    double qt[2];
    ASSERT_EQ(kolmo_qt_eigenvalues(m.p, std::log(2.0), qt), KOLMO_OK);
    EXPECT_NEAR(qt[0], 0.75, 1e-15);
    double tr = 0;
    ASSERT_EQ(kolmo_qinf_trace(m.p, &tr), KOLMO_OK);
    EXPECT_EQ(tr, 1.5);
    const double x[] = {1.0, 1.0};
    double y[2];
    ASSERT_EQ(kolmo_semigroup_apply(m.p, 0.0, x, y), KOLMO_OK);
    EXPECT_EQ(y[1], 1.0);
    double ln = 0;
    ASSERT_EQ(kolmo_lambda_norm(m.p, 0.5, &ln), KOLMO_OK);
    EXPECT_GT(ln, 0.0);
}

TEST(CApi, ErrorsAreReported) {
    const double a[] = {1.0}, q[] = {1.0};
    kolmo_model* m = nullptr;
    EXPECT_EQ(kolmo_model_create(1, a, q, &m), KOLMO_ERR_INVALID_ARGUMENT);
    EXPECT_EQ(m, nullptr);
    EXPECT_NE(std::string(kolmo_last_error()), "");
    EXPECT_EQ(kolmo_model_create(1, nullptr, q, &m), KOLMO_ERR_INVALID_ARGUMENT);
    EXPECT_EQ(kolmo_model_from_json("{\"dim\": 1", &m), KOLMO_ERR_CONFIG);
    EXPECT_EQ(kolmo_model_load("/nonexistent/model.json", &m), KOLMO_ERR_IO);
    Model ok;
    ASSERT_EQ(kolmo_model_from_json("{\"dim\":1,\"a\":[-1],\"q\":[2]}", &ok.p), KOLMO_OK);
    double out[1];
    EXPECT_EQ(kolmo_qt_eigenvalues(ok.p, 0.0, out), KOLMO_ERR_DOMAIN);
    EXPECT_STREQ(kolmo_status_string(KOLMO_ERR_HYPOTHESIS), kolmo_status_string(KOLMO_ERR_HYPOTHESIS));
    kolmo_model_free(nullptr);
}

TEST(CApi, EstimatorsAgree) {
    Model m;
    ASSERT_EQ(kolmo_model_from_json("{\"dim\":1,\"a\":[-1],\"q\":[2]}", &m.p), KOLMO_OK);
    kolmo_drift* d = nullptr;
    kolmo_phi* f = nullptr;
    ASSERT_EQ(kolmo_drift_from_json("{\"kind\":\"bounded_sin\",\"amplitude\":0.4,\"frequency\":1}", &d), KOLMO_OK);
    ASSERT_EQ(kolmo_phi_from_json("{\"kind\":\"cosine\",\"h\":[1]}", &f), KOLMO_OK);
    const double x[] = {0.3};

    kolmo_series_config sc = kolmo_series_config_default();
    sc.nsamples = 50000;
    sc.workers = 4;
    kolmo_girsanov_config gc = kolmo_girsanov_config_default();
    gc.npaths = 50000;
    gc.steps = 128;
    gc.workers = 4;
    kolmo_estimate v1, i1, u, ud, halving;
    ASSERT_EQ(kolmo_estimate_vn(m.p, d, f, 0.5, x, 1, &sc, &v1), KOLMO_OK);
    ASSERT_EQ(kolmo_estimate_in(m.p, d, f, 0.5, x, 1, &gc, &i1), KOLMO_OK);
    EXPECT_LT(std::fabs(v1.mean - i1.mean), 3.0 * (v1.std_error + i1.std_error));
    double ess = 0;
    ASSERT_EQ(kolmo_estimate_girsanov_u(m.p, d, f, 0.5, x, &gc, &u, &ess), KOLMO_OK);
    ASSERT_EQ(kolmo_estimate_u_direct(m.p, d, f, 0.5, x, &gc, &ud, &halving), KOLMO_OK);
    EXPECT_GT(ess, 0.9);
    EXPECT_LT(std::fabs(u.mean - ud.mean), 3.0 * std::hypot(u.std_error, ud.std_error));
    EXPECT_TRUE(halving.valid);

    kolmo_phi* lin = nullptr;
    ASSERT_EQ(kolmo_phi_from_json("{\"kind\":\"linear\",\"h\":[1]}", &lin), KOLMO_OK);
    EXPECT_EQ(kolmo_estimate_vn(m.p, d, lin, 0.5, x, 1, &sc, &v1), KOLMO_ERR_HYPOTHESIS);
    EXPECT_EQ(kolmo_drift_from_json("{\"kind\":\"warp\"}", &d), KOLMO_ERR_CONFIG);
    kolmo_phi_free(lin);
    kolmo_phi_free(f);
    kolmo_drift_free(d);
}

TEST(CApi, MomentsAndBounds) {
    const double e[] = {1.0};
    double lg[4];
    ASSERT_EQ(kolmo_exact_even_moments(e, 1, 3, lg), KOLMO_OK);
    EXPECT_NEAR(std::exp(lg[3]), 15.0, 1e-12);
    double s = 0;
    ASSERT_EQ(kolmo_simplex_time_integral(2, 0.5, 1.0, 0, &s), KOLMO_OK);
    EXPECT_NEAR(s, M_PI, 1e-14);
    int n0 = 0;
    double p[3];
    ASSERT_EQ(kolmo_plan_exponents(2.0, 1.5, 2.0, 2, &n0, p), KOLMO_OK);
    EXPECT_EQ(n0, 7);
    EXPECT_NEAR(p[1], 64.0 / 33.0, 1e-15);
    EXPECT_EQ(kolmo_plan_exponents(2.0, 1.5, 1.0, 2, &n0, p), KOLMO_ERR_DOMAIN);
}

TEST(CApi, EntryPoints) {
    const fs::path out = scratch("entry");
    const std::string cfg = std::string(KOLMO_CONFIG_DIR) + "/standard_1d.json";
    kolmo_cli_options o{};
    o.config_path = cfg.c_str();
    o.workers = 2;
    const std::string outs = out.string();
    o.out_dir = outs.c_str();
    size_t failed = 99;
    ASSERT_EQ(kolmo_verify("identities", &o, &failed), KOLMO_OK) << kolmo_last_error();
    EXPECT_EQ(failed, 0u);
    EXPECT_NE(std::string(kolmo_last_report()).find("identities"), std::string::npos);
    ASSERT_EQ(kolmo_bounds(&o), KOLMO_OK) << kolmo_last_error();
    EXPECT_NE(std::string(kolmo_last_report()).find("n0"), std::string::npos);
    ASSERT_EQ(kolmo_paths(&o), KOLMO_OK) << kolmo_last_error();
    EXPECT_TRUE(fs::exists(out / "paths.csv"));
    EXPECT_EQ(kolmo_verify("nope", &o, &failed), KOLMO_ERR_CONFIG);
    fs::remove_all(out);
}

TEST(Cli, ExitCodes) {
    const fs::path out = scratch("cli");
    const std::string cfgdir = KOLMO_CONFIG_DIR;
    EXPECT_EQ(cli("verify identities --out " + out.string()), 0);
    EXPECT_EQ(cli("verify moments --config " + cfgdir + "/standard_1d.json --out " + out.string()), 0);
    EXPECT_EQ(cli("bounds --out " + out.string()), 0);
    EXPECT_EQ(cli("verify nosuchsuite --out " + out.string()), 2);
    EXPECT_EQ(cli("frobnicate"), 2);
    EXPECT_EQ(cli(""), 2);

    std::ofstream(out / "bad.json") << "{ \"t\": 0.5,, }";
    EXPECT_EQ(cli("run --config " + (out / "bad.json").string() + " --out " + out.string()), 2);

    // model, drift and t are required; phi is overridden below where needed.
    const std::string model = R"("model": {"dim": 1, "a": [-1.0], "q": [2.0]},
        "drift": {"kind": "bounded_sin", "amplitude": 0.4, "frequency": 1.0}, "t": 0.5)";
    std::ofstream(out / "infeasible.json") << "{" << model << R"(, "phi": {"kind": "cosine", "h": [1.0]}, "bounds": {"beta": 1.0, "kappa": 1.5, "delta": 0.5}})";
    EXPECT_EQ(cli("bounds --config " + (out / "infeasible.json").string() + " --out " + out.string()), 2);
    std::ofstream(out / "feasible.json") << "{" << model << R"(, "phi": {"kind": "cosine", "h": [1.0]}, "bounds": {"beta": 0.5, "kappa": 1.5, "delta": 0.5}})";
    EXPECT_EQ(cli("bounds --config " + (out / "feasible.json").string() + " --out " + out.string()), 0);

    std::ofstream(out / "unbounded.json") << "{" << model << R"(, "phi": {"kind": "linear", "h": [1.0]}, "n_max": 1,
        "mc": {"nsamples": 200, "npaths": 200, "steps": 8}})";
    EXPECT_EQ(cli("run --config " + (out / "unbounded.json").string() + " --out " + out.string()), 2);
    EXPECT_EQ(cli("run --override-hypotheses --config " + (out / "unbounded.json").string() + " --out " +
                  out.string()),
              0);
    fs::remove_all(out);
}
