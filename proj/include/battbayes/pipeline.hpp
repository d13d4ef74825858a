#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "battbayes/data.hpp"
#include "battbayes/model.hpp"
#include "battbayes/sampler.hpp"
#include "battbayes/scenario.hpp"

namespace battbayes {

// One scenario/estimation case: a daily schedule plus a temperature input
// (explicit Celsius list or a climate time-series file).
struct CaseSpec {
    std::string name = "fade";
    std::string schedule_path;
    std::vector<double> temps_c;
    std::string climate_csv;
    double days = 365.0;
};

// Everything a run needs, loaded from a JSON file. Relative paths inside the
// file resolve against the file's own directory.
struct RunConfig {
    std::string training_csv;
    std::string out_dir = "out";
    std::string trained_dir;  // where test/estimate/scenario find train output
    SamplerConfig sampler;
    double split_ratio = 0.85;
    SplitMode split_mode = SplitMode::Random;
    ModelConfig model;
    VehicleSpec vehicle;
    PackSpec pack;
    int training_cells_count = 1;  // training rows are already per-cell
    bool write_latent_chains = false;
    CaseSpec estimate;
    std::vector<CaseSpec> scenarios;
};

// Throws IoError / ParseError / SchemaError. Seed precedence inside the
// config: explicit "seed" key, else the BATT_BAYES_SEED environment
// variable, else 0.
RunConfig load_run_config(const std::string& path);

// Daily schedule from JSON; driving entries may reference velocity CSVs or a
// seeded synthetic cycle.
DailyTaskSchedule load_schedule(const std::string& path);

// Shrinks 1 Hz observation channels (temperature and the paired
// acceleration/velocity channels) by block averaging at their measured
// decorrelation lag.
Observation reduce_observation(const Observation& raw, double autocorr_threshold = 0.3);

// Workflows. Each writes its artifacts under cfg.out_dir and throws on
// failure (the CLI maps exceptions to exit codes).
void run_train(const RunConfig& cfg);
void run_test(const RunConfig& cfg);
void run_estimate(const RunConfig& cfg);
void run_scenario(const RunConfig& cfg);

}  // namespace battbayes
