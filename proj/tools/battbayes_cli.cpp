// Command-line front end for the battbayes library. Talks to the core
// exclusively through the C interface in battbayes.h.

#include <cstdint>
#include <cstdio>
#include <memory>
#include <string>

#include <CLI11.hpp>

#include "battbayes.h"

namespace {

struct Options {
    std::string config;
    std::string out_dir;
    std::string trained_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::uint64_t iterations = 0;
    bool iterations_set = false;
    double burn_in = 0.0;
    bool burn_in_set = false;
    std::uint64_t thinning = 0;
    bool thinning_set = false;
    double split_ratio = 0.0;
    bool split_set = false;
    std::string split_mode;
};

void add_common_flags(CLI::App* cmd, Options* opt) {
    cmd->add_option("--config,-c", opt->config, "JSON run configuration")->required();
    cmd->add_option("--out,-o", opt->out_dir, "output directory (overrides config)");
    cmd->add_option("--seed", opt->seed, "random seed (overrides config and BATT_BAYES_SEED)")
        ->each([opt](const std::string&) { opt->seed_set = true; });
    cmd->add_option("--iterations", opt->iterations, "MCMC iterations")
        ->each([opt](const std::string&) { opt->iterations_set = true; });
    cmd->add_option("--burn-in", opt->burn_in, "burn-in fraction in [0,1)")
        ->each([opt](const std::string&) { opt->burn_in_set = true; });
    cmd->add_option("--thinning", opt->thinning, "keep every Nth iteration")
        ->each([opt](const std::string&) { opt->thinning_set = true; });
}

void add_trained_flag(CLI::App* cmd, Options* opt) {
    cmd->add_option("--trained", opt->trained_dir,
                    "directory holding train outputs (defaults to --out)");
}

int run_mode(const char* mode, const Options& opt) {
    struct Deleter {
        void operator()(bb_run* r) const { bb_run_free(r); }
    };
    std::unique_ptr<bb_run, Deleter> run(bb_run_new(mode));
    if (!run) {
        std::fprintf(stderr, "error: out of memory\n");
        return BB_ERR_INTERNAL;
    }
    auto check = [&](bb_status st) {
        if (st != BB_OK) {
            std::fprintf(stderr, "error: %s\n", bb_run_last_error(run.get()));
        }
        return st;
    };
    bb_status st = check(bb_run_set_config(run.get(), opt.config.c_str()));
    if (st == BB_OK && !opt.out_dir.empty()) {
        st = check(bb_run_set_out_dir(run.get(), opt.out_dir.c_str()));
    }
    if (st == BB_OK && !opt.trained_dir.empty()) {
        st = check(bb_run_set_trained_dir(run.get(), opt.trained_dir.c_str()));
    }
    if (st == BB_OK && opt.seed_set) {
        st = check(bb_run_set_seed(run.get(), opt.seed));
    }
    if (st == BB_OK && opt.iterations_set) {
        st = check(bb_run_set_iterations(run.get(), opt.iterations));
    }
    if (st == BB_OK && opt.burn_in_set) {
        st = check(bb_run_set_burn_in(run.get(), opt.burn_in));
    }
    if (st == BB_OK && opt.thinning_set) {
        st = check(bb_run_set_thinning(run.get(), opt.thinning));
    }
    if (st == BB_OK && (opt.split_set || !opt.split_mode.empty())) {
        st = check(bb_run_set_split(run.get(), opt.split_set ? opt.split_ratio : 0.0,
                                    opt.split_mode.empty() ? nullptr
                                                           : opt.split_mode.c_str()));
    }
    if (st == BB_OK) {
        st = check(bb_run_execute(run.get()));
    }
    return st;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{std::string("battbayes ") + bb_version() +
                 " — Bayesian battery capacity-fade inference"};
    app.require_subcommand(1);

    Options train_opt, test_opt, estimate_opt, scenario_opt;

    CLI::App* train = app.add_subcommand(
        "train", "fit the hierarchical model to cycling data via MCMC");
    add_common_flags(train, &train_opt);
    train->add_option("--split", train_opt.split_ratio, "training fraction in (0,1)")
        ->each([&](const std::string&) { train_opt.split_set = true; });
    train->add_option("--split-mode", train_opt.split_mode,
                      "sequential or random hold-out selection")
        ->check(CLI::IsMember({"sequential", "random"}));

    CLI::App* test = app.add_subcommand(
        "test", "estimate fade on the held-out split with trained posteriors");
    add_common_flags(test, &test_opt);
    add_trained_flag(test, &test_opt);

    CLI::App* estimate = app.add_subcommand(
        "estimate", "infer the fade posterior for one usage schedule");
    add_common_flags(estimate, &estimate_opt);
    add_trained_flag(estimate, &estimate_opt);

    CLI::App* scenario = app.add_subcommand(
        "scenario", "sweep usage schedules and climates, writing per-case posteriors");
    add_common_flags(scenario, &scenario_opt);
    add_trained_flag(scenario, &scenario_opt);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);  // prints the diagnostic
        return BB_ERR_USAGE;
    }

    if (train->parsed()) return run_mode("train", train_opt);
    if (test->parsed()) return run_mode("test", test_opt);
    if (estimate->parsed()) return run_mode("estimate", estimate_opt);
    if (scenario->parsed()) return run_mode("scenario", scenario_opt);
    return BB_ERR_USAGE;
}
