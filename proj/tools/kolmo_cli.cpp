#include "kolmo/kolmo.h"

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>

namespace {

enum Exit { exit_ok = 0, exit_check_failed = 1, exit_error = 2 };

struct Flags {
    std::string config;
    std::optional<std::uint64_t> seed;
    unsigned workers = 1;
    std::string out;
    bool override_hypotheses = false;
};

void add_flags(CLI::App* cmd, Flags& f) {
    cmd->add_option("--config", f.config, "experiment config JSON (defaults built in)")->check(CLI::ExistingFile);
    cmd->add_option("--seed", f.seed, "override the config seed");
    cmd->add_option("--workers", f.workers, "worker threads, 0 = all cores")->capture_default_str();
    cmd->add_option("--out", f.out, "output directory (default: config 'outputs')");
    cmd->add_flag("--override-hypotheses", f.override_hypotheses, "run even if a hypothesis check fails");
}

kolmo_cli_options to_options(const Flags& f) {
    kolmo_cli_options o{};
    o.config_path = f.config.empty() ? nullptr : f.config.c_str();
    o.has_seed = f.seed.has_value();
    o.seed = f.seed.value_or(0);
    o.workers = f.workers;
    o.out_dir = f.out.empty() ? nullptr : f.out.c_str();
    o.override_hypotheses = f.override_hypotheses ? 1 : 0;
    return o;
}

int report(kolmo_status st) {
    if (st != KOLMO_OK) {
        std::fprintf(stderr, "kolmo: %s: %s\n", kolmo_status_string(st), kolmo_last_error());
        return exit_error;
    }
    std::fputs(kolmo_last_report(), stdout);
    return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Kolmogorov-equation series vs Girsanov estimators for diagonal OU models"};
    app.require_subcommand(1);

    Flags run_f, verify_f, bounds_f, paths_f;
    std::string suite;
    auto* run = app.add_subcommand("run", "series, Girsanov and direct estimates; writes CSV reports");
    add_flags(run, run_f);
    auto* verify = app.add_subcommand("verify", "run a named check suite");
    verify->add_option("suite", suite, "identities | moments | martingales | equivalence")->required();
    add_flags(verify, verify_f);
    auto* bounds = app.add_subcommand("bounds", "tabulate the convergence bound rows");
    add_flags(bounds, bounds_f);
    auto* paths = app.add_subcommand("paths", "dump Girsanov paths to CSV");
    add_flags(paths, paths_f);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_error;
    }

    if (*run) {
        const auto o = to_options(run_f);
        return report(kolmo_run(&o));
    }
    if (*verify) {
        const auto o = to_options(verify_f);
        size_t failed = 0;
        const int rc = report(kolmo_verify(suite.c_str(), &o, &failed));
        if (rc != exit_ok) return rc;
        return failed == 0 ? exit_ok : exit_check_failed;
    }
    if (*bounds) {
        const auto o = to_options(bounds_f);
        return report(kolmo_bounds(&o));
    }
    const auto o = to_options(paths_f);
    return report(kolmo_paths(&o));
}
