#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <doctest.h>

#include "battbayes/data.hpp"
#include "battbayes/errors.hpp"
#include "battbayes/pipeline.hpp"
#include "battbayes/rng.hpp"
#include "battbayes/serialize.hpp"

using namespace battbayes;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() /
               ("battbayes_pipe_" + tag + "_" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in),
                       std::istreambuf_iterator<char>());
}

// Small but realistic corpus: two cells, five points each.
void write_small_corpus(const std::string& path) {
    auto records = generate_synthetic_training(501);
    records.resize(2);
    for (auto& r : records) {
        r.points.resize(10);  // replicate rows collapse to 5 (cell, Ah) points
    }
    write_training_set(path, records);
}

RunConfig small_run(const TempDir& dir, const std::string& out) {
    RunConfig cfg;
    cfg.training_csv = dir.file("train.csv");
    cfg.out_dir = dir.file(out);
    cfg.trained_dir = cfg.out_dir;
    cfg.sampler.iterations = 400;
    cfg.sampler.seed = 3;
    cfg.split_ratio = 0.8;
    cfg.split_mode = SplitMode::Random;
    return cfg;
}

}  // namespace

TEST_SUITE("pipeline") {

TEST_CASE("run configs parse with defaults, overrides, and path resolution") {
    TempDir dir("cfg");
    const std::string cfg_path = dir.file("run.json");
    write_text(cfg_path, R"({
      "training_csv": "cells.csv",
      "out_dir": "results",
      "seed": 9,
      "iterations": 123,
      "burn_in_fraction": 0.3,
      "split_ratio": 0.6,
      "split_mode": "sequential",
      "tuning": {"global_step_fraction": 0.05, "sds": {"alpha": 10.0}},
      "model": {"nominal_capacity_ah": 2.5,
                "param_priors": {"alpha": {"family": "gamma", "mean": 5.0, "sd": 2.0}}},
      "vehicle": {"mass_kg": 1600.0},
      "pack": {"cells_count": 2000},
      "estimate": {"name": "case1", "schedule": "sched.json", "temps_c": [20.0, 30.0]}
    })");
    const RunConfig cfg = load_run_config(cfg_path);
    CHECK(cfg.training_csv == (dir.path / "cells.csv").string());
    CHECK(cfg.out_dir == "results");  // outputs stay cwd-relative
    CHECK(cfg.sampler.seed == 9);
    CHECK(cfg.sampler.iterations == 123);
    CHECK(cfg.sampler.burn_in_fraction == 0.3);
    CHECK(cfg.sampler.global_step_fraction == 0.05);
    CHECK(cfg.sampler.tuning_sds.at("alpha") == 10.0);
    CHECK(cfg.split_ratio == 0.6);
    CHECK(cfg.split_mode == SplitMode::Sequential);
    CHECK(cfg.model.nominal_capacity_ah == 2.5);
    CHECK(cfg.model.param_priors.at("alpha").mean == 5.0);
    CHECK(cfg.vehicle.mass_kg == 1600.0);
    CHECK(cfg.pack.cells_count == 2000);
    CHECK(cfg.estimate.name == "case1");
    CHECK(cfg.estimate.schedule_path == (dir.path / "sched.json").string());
    REQUIRE(cfg.estimate.temps_c.size() == 2);
}

TEST_CASE("seed falls back to the environment, config wins") {
    TempDir dir("seed");
    const std::string with_seed = dir.file("a.json");
    const std::string without_seed = dir.file("b.json");
    write_text(with_seed, R"({"seed": 5})");
    write_text(without_seed, R"({})");
    ::setenv("BATT_BAYES_SEED", "77", 1);
    CHECK(load_run_config(with_seed).sampler.seed == 5);
    CHECK(load_run_config(without_seed).sampler.seed == 77);
    ::setenv("BATT_BAYES_SEED", "not_a_number", 1);
    CHECK_THROWS_AS(load_run_config(without_seed), ConfigError);
    ::unsetenv("BATT_BAYES_SEED");
    CHECK(load_run_config(without_seed).sampler.seed == 0);
}

TEST_CASE("malformed configs raise parse or schema errors") {
    TempDir dir("badcfg");
    const std::string path = dir.file("bad.json");
    write_text(path, "{ not json");
    CHECK_THROWS_AS(load_run_config(path), ParseError);
    write_text(path, R"(["not", "an", "object"])");
    CHECK_THROWS_AS(load_run_config(path), SchemaError);
    write_text(path, R"({"iterations": "many"})");
    CHECK_THROWS_AS(load_run_config(path), SchemaError);
    CHECK_THROWS_AS(load_run_config(dir.file("absent.json")), IoError);
}

TEST_CASE("schedules parse every entry type") {
    TempDir dir("sched");
    write_time_series(dir.file("cycle.csv"), TimeSeries{{0.0, 2.0, 4.0, 2.0, 0.0}, 1.0});
    const std::string path = dir.file("sched.json");
    write_text(path, R"({
      "soc_min": 0.15, "soc_max": 0.85, "soc_initial": 0.8,
      "topup_charger": "L1",
      "entries": [
        {"task": "driving", "cycle_csv": "cycle.csv"},
        {"task": "driving", "synth_seed": 4, "duration_s": 600, "aggressiveness": 1.1},
        {"task": "charge_l3", "duration_h": 0.01},
        {"task": "solar", "power_w": -1000.0, "duration_h": 0.5},
        {"task": "freq_reg", "square_w": 1500.0, "period_s": 60, "duration_h": 0.25, "repeat": "weekly"},
        {"task": "peak_shave", "power_w": 5000.0, "duration_h": 0.2, "repeat": "monthly"}
      ]
    })");
    const DailyTaskSchedule s = load_schedule(path);
    CHECK(s.soc_min == 0.15);
    CHECK(s.topup_charger == Charger::L1);
    REQUIRE(s.entries.size() == 6);
    const auto& drive = std::get<DriveSession>(s.entries[0].action);
    CHECK(drive.v.values.size() == 5);
    CHECK(drive.a.values.size() == 5);  // derived from the velocity trace
    const auto& charge = std::get<ChargingEvent>(s.entries[2].action);
    CHECK(charge.charger == Charger::L3);
    const auto& reg = std::get<ServiceTask>(s.entries[4].action);
    CHECK(reg.repeat == RepeatFrequency::Weekly);
    REQUIRE(reg.power_w.size() == 60);
    CHECK(reg.power_w.front() == 1500.0);
    CHECK(reg.power_w.back() == -1500.0);
    CHECK_THROWS_AS(load_schedule(dir.file("absent.json")), IoError);
    write_text(path, R"({"entries": [{"task": "diving"}]})");
    CHECK_THROWS_AS(load_schedule(path), ParseError);
}

TEST_CASE("observation reduction thins correlated channels and keeps pairing") {
    Observation raw;
    raw.id = "case";
    RandomStream rng(12);
    double x = 0.0;
    for (int i = 0; i < 4000; ++i) {
        x = 0.97 * x + rng.normal();
        raw.t.push_back(300.0 + x);
    }
    double a = 0.0;
    for (int i = 0; i < 1200; ++i) {
        a = 0.9 * a + 0.3 * rng.normal();
        raw.a.push_back(a);
        raw.v.push_back(10.0 + 0.5 * a + 0.01 * i);
    }
    const Observation reduced = reduce_observation(raw, 0.3);
    CHECK(reduced.t.size() < raw.t.size() / 4);
    CHECK(reduced.t.size() >= 1);
    CHECK(reduced.a.size() == reduced.v.size());
    CHECK(reduced.a.size() < raw.a.size());
    // short channels pass through untouched
    Observation tiny;
    tiny.t = {300.0};
    tiny.a = {0.1};
    tiny.v = {5.0};
    const Observation same = reduce_observation(tiny, 0.3);
    CHECK(same.t == tiny.t);
    CHECK(same.v == tiny.v);
}

TEST_CASE("train writes artifacts and is byte-deterministic; test consumes them") {
    TempDir dir("train");
    write_small_corpus(dir.file("train.csv"));

    const RunConfig cfg = small_run(dir, "out_a");
    run_train(cfg);
    for (const std::string name :
         {"parameters.csv", "train_points.csv", "test_points.csv", "train_fit.csv",
          "train_metrics.csv"}) {
        CHECK(fs::exists(fs::path(cfg.out_dir) / name));
    }
    CHECK(fs::exists(fs::path(cfg.out_dir) / "chains" / "index.csv"));
    const auto params = read_summaries((fs::path(cfg.out_dir) / "parameters.csv").string());
    CHECK(params.size() == 17);  // 6 fade + 7 weights + 3 wheel + delta
    for (const auto& row : params) {
        CHECK(std::isfinite(row.mean));
        CHECK(row.ci_low <= row.mean);
        CHECK(row.mean <= row.ci_high);
    }

    RunConfig cfg_b = small_run(dir, "out_b");
    run_train(cfg_b);
    CHECK(slurp(dir.file("out_a") + "/parameters.csv") ==
          slurp(dir.file("out_b") + "/parameters.csv"));
    CHECK(slurp(dir.file("out_a") + "/chains/index.csv") ==
          slurp(dir.file("out_b") + "/chains/index.csv"));
    CHECK(slurp(dir.file("out_a") + "/chains/alpha.csv") ==
          slurp(dir.file("out_b") + "/chains/alpha.csv"));

    run_test(cfg);
    for (const std::string name :
         {"test_summary.csv", "test_estimates.csv", "test_metrics.csv"}) {
        CHECK(fs::exists(fs::path(cfg.out_dir) / name));
    }
}

TEST_CASE("test without trained artifacts names the missing parameters") {
    TempDir dir("notrain");
    RunConfig cfg;
    cfg.out_dir = dir.file("out");
    cfg.trained_dir = dir.file("nothing");
    CHECK_THROWS_WITH_AS(run_test(cfg), doctest::Contains("missing trained parameters"),
                         ConfigError);
}

TEST_CASE("estimate runs a schedule against the trained posterior") {
    TempDir dir("estimate");
    write_small_corpus(dir.file("train.csv"));
    RunConfig cfg = small_run(dir, "trained");
    run_train(cfg);

    const std::string sched = dir.file("sched.json");
    write_text(sched, R"({
      "entries": [
        {"task": "driving", "synth_seed": 2, "duration_s": 900, "aggressiveness": 1.0},
        {"task": "peak_shave", "power_w": 4000.0, "duration_h": 0.3}
      ]
    })");
    cfg.out_dir = dir.file("est_out");
    cfg.sampler.iterations = 300;
    cfg.estimate.name = "micro";
    cfg.estimate.schedule_path = sched;
    cfg.estimate.temps_c = {23.0};
    cfg.estimate.days = 200.0;
    run_estimate(cfg);
    const auto rows = read_summaries(dir.file("est_out") + "/estimate_summary.csv");
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].variable == "micro");
    CHECK(rows[0].mean > 0.0);
    CHECK(std::isfinite(rows[0].mean));
    CHECK(fs::exists(dir.file("est_out") + "/estimate_shares.csv"));
}

}  // TEST_SUITE
