#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "battbayes/model.hpp"
#include "battbayes/scenario.hpp"

namespace battbayes {

// One fade measurement within a cell's cycling program.
struct FadePoint {
    double ah = 0.0;
    double fade_pct = 0.0;
    int replicate = 1;
};

// One cycled cell: constant test condition plus its fade-vs-throughput
// points. Temperature stays in Celsius and SOC in percent, as recorded;
// conversion to model units happens when observations are built.
struct TrainingRecord {
    std::string cell_id;
    double temp_c = 0.0;
    double c_rate = 0.0;
    double soc_avg = 0.0;  // percent
    double soc_min = 0.0;
    double soc_max = 0.0;
    std::vector<FadePoint> points;
};

// CSV with columns cell_id, temp_c, c_rate, soc_avg, soc_min, soc_max, ah,
// fade_pct, replicate. Throws IoError (unreadable), SchemaError (missing
// header/columns), ParseError with line numbers (bad values, range
// violations, inconsistent per-cell conditions). Non-monotone fade within a
// cell is only a warning, appended to `warnings` when given.
std::vector<TrainingRecord> load_training_set(const std::string& path,
                                              std::vector<std::string>* warnings = nullptr);

void write_training_set(const std::string& path, const std::vector<TrainingRecord>& records,
                        const std::string& comment = "");

// One (cell, Ah) point with its replicate fade measurements: the observation
// granularity used for training and splitting.
struct TrainingPoint {
    std::string cell_id;
    double temp_c = 0.0;
    double c_rate = 0.0;
    double soc_avg = 0.0;
    double soc_min = 0.0;
    double soc_max = 0.0;
    double ah = 0.0;
    std::vector<double> fades;
};

std::vector<TrainingPoint> flatten(const std::vector<TrainingRecord>& records);

double mean_fade(const TrainingPoint& point);

enum class SplitMode { Random, Sequential };
SplitMode split_mode_from_name(std::string_view name);  // throws ParseError
const char* split_mode_name(SplitMode mode) noexcept;

struct SplitResult {
    std::vector<TrainingPoint> train;
    std::vector<TrainingPoint> test;
};

// Disjoint, exhaustive partition. The held-out count is floor((1-ratio)*n);
// random mode shuffles indices seed-deterministically, sequential mode sorts
// by mean fade ascending and trains on the low-fade side. Throws DomainError
// (ratio outside (0,1)), TooFewPoints (either side empty).
SplitResult split(const std::vector<TrainingPoint>& points, double ratio, SplitMode mode,
                  std::uint64_t seed);

// Model-facing observations for cycling points: fade replicates as the q
// channel, temperature in kelvin, duty anchors from the test condition, and
// a steady-cruise driving channel consistent with the cycling power so the
// power chain starts on its own balance.
ObservationSet observations_from_points(const std::vector<TrainingPoint>& points,
                                        const ModelConfig& model_cfg,
                                        const VehicleSpec& vehicle, int cells_count);

// Rebuild records (grouped by cell in first-appearance order) from points.
std::vector<TrainingRecord> records_from_points(const std::vector<TrainingPoint>& points);

// Three-cell synthetic cycling program shaped like an LFP calendar of
// fade-vs-throughput measurements: 82 fade rows over 42 (cell, Ah) points,
// generated from the fade law with fixed ground-truth parameters and 0.3 %
// relative measurement noise.
struct SyntheticTruth {
    double alpha = 20000.0;
    double beta = 33000.0;
    double ea = 31700.0;
    double eta = 370.0;
    double zeta = 0.55;
    double epsilon = 0.0;
    double noise_rel = 0.003;
};

std::vector<TrainingRecord> generate_synthetic_training(std::uint64_t seed,
                                                        const SyntheticTruth& truth = {});

}  // namespace battbayes
