// Regenerates the bundled data tree: the synthetic cycling corpus, a drive
// cycle, hourly climate traces, usage schedules, and ready-to-run configs.
//
//   battbayes_datagen [root] [--seed N]
//
// Everything written here is synthetic and deterministic in the seed.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "battbayes/data.hpp"
#include "battbayes/errors.hpp"
#include "battbayes/scenario.hpp"
#include "battbayes/serialize.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace battbayes;

namespace {

void write_json(const fs::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    out << j.dump(2) << "\n";
}

json drive_entry(std::uint64_t seed, double duration_s, double aggressiveness) {
    return json{{"task", "driving"},
                {"synth_seed", seed},
                {"duration_s", duration_s},
                {"aggressiveness", aggressiveness}};
}

// Deterministic urban trapezoid: brisk launches to a city cruise with long
// coast-downs gentle enough that drag and rolling resistance absorb nearly
// all of the braking, so the day's gross and net amp-hours stay close.
TimeSeries fixture_urban_cycle() {
    constexpr double kCruise = 12.0;    // m/s
    constexpr double kAccel = 0.9;      // m/s^2 launch
    constexpr double kCoast = 0.13;     // m/s^2 coast-down
    constexpr double kCruiseS = 120.0;  // s per block
    constexpr double kIdleS = 15.0;
    constexpr double kSessionS = 1982.0;
    TimeSeries v;
    v.sample_period_s = 1.0;
    double speed = 0.0;
    int phase = 0;  // accel, cruise, coast, idle
    double phase_t = 0.0;
    while (v.values.size() < static_cast<std::size_t>(kSessionS)) {
        switch (phase) {
            case 0:
                speed = std::min(kCruise, speed + kAccel);
                if (speed >= kCruise) phase = 1, phase_t = 0.0;
                break;
            case 1:
                if (++phase_t >= kCruiseS) phase = 2;
                break;
            case 2:
                speed = std::max(0.0, speed - kCoast);
                if (speed <= 0.0) phase = 3, phase_t = 0.0;
                break;
            default:
                if (++phase_t >= kIdleS) phase = 0;
                break;
        }
        v.values.push_back(speed);
    }
    v.values.back() = 0.0;  // sessions chain from a stop
    return v;
}

json fixture_drive_entry() {
    return json{{"task", "driving"}, {"cycle_csv", "../cycles/fixture_urban.csv"}};
}

// One day mixing commuting, fast charging, and all three grid services.
// The urban cycle and service durations are tuned so that per-task daily
// amp-hours, C-rates and depths of discharge match the reference usage
// pattern and the seven duty shares land near
// (0.286, 0.123, 0.180, 0.021, 0.096, 0.093, 0.151).
json fixture_schedule() {
    json entries = json::array();
    entries.push_back(fixture_drive_entry());
    entries.push_back({{"task", "charge_l3"}, {"duration_h", 28.0 / 3600.0}});
    entries.push_back(fixture_drive_entry());
    entries.push_back({{"task", "solar"},
                       {"power_w", -1366.0},
                       {"duration_h", 1.174},
                       {"repeat", "daily"}});
    entries.push_back({{"task", "freq_reg"},
                       {"square_w", 1776.0},
                       {"period_s", 60.0},
                       {"duration_h", 0.87},
                       {"repeat", "daily"}});
    entries.push_back(fixture_drive_entry());
    entries.push_back({{"task", "peak_shave"},
                       {"power_w", 6600.0},
                       {"duration_h", 0.387},
                       {"repeat", "daily"}});
    entries.push_back({{"task", "charge_l1"}, {"duration_h", 1.51}});
    return json{{"soc_min", 0.1},
                {"soc_max", 0.9},
                {"soc_initial", 0.9},
                {"topup_charger", "L2"},
                {"entries", entries}};
}

// Commute-only days for the usage-style comparisons.
json commuter_schedule(double aggressiveness) {
    json entries = json::array();
    entries.push_back(drive_entry(21, 1800.0, aggressiveness));
    entries.push_back(drive_entry(22, 1800.0, aggressiveness));
    return json{{"soc_min", 0.1},
                {"soc_max", 0.9},
                {"soc_initial", 0.9},
                {"topup_charger", "L2"},
                {"entries", entries}};
}

// Matched-throughput grid-service days: the same daily amp-hours moved
// gently (solar absorption) or hard (peak shaving).
json service_schedule(const std::string& task, double power_w, double duration_h) {
    json entries = json::array();
    entries.push_back(drive_entry(31, 1200.0, 1.0));
    entries.push_back({{"task", task},
                       {"power_w", power_w},
                       {"duration_h", duration_h},
                       {"repeat", "daily"}});
    return json{{"soc_min", 0.05},
                {"soc_max", 0.9},
                {"soc_initial", 0.9},
                {"topup_charger", "L2"},
                {"entries", entries}};
}

// Hourly temperatures for one year: seasonal plus diurnal harmonics.
void write_climate(const fs::path& path, double mean_c, double seasonal_amp,
                   double diurnal_amp) {
    TimeSeries series;
    series.sample_period_s = 3600.0;
    series.values.reserve(365 * 24);
    constexpr double kTwoPi = 6.283185307179586;
    for (int day = 0; day < 365; ++day) {
        const double season =
            -seasonal_amp * std::cos(kTwoPi * (day - 15) / 365.0);
        for (int hour = 0; hour < 24; ++hour) {
            const double diurnal =
                -diurnal_amp * std::cos(kTwoPi * (hour - 15) / 24.0);
            series.values.push_back(mean_c + season + diurnal);
        }
    }
    write_time_series(path.string(), series);
}

json case_spec(const std::string& name, const std::string& schedule,
               const json& temps) {
    json c{{"name", name}, {"schedule", schedule}, {"days", 365.0}};
    if (temps.is_string()) {
        c["climate_csv"] = temps;
    } else {
        c["temps_c"] = temps;
    }
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    fs::path root = "data";
    std::uint64_t seed = 20260814;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--seed" && i + 1 < argc) {
            seed = std::stoull(argv[++i]);
        } else if (arg == "--help" || arg == "-h") {
            std::cout << "usage: battbayes_datagen [root] [--seed N]\n";
            return 0;
        } else {
            root = arg;
        }
    }

    try {
        fs::create_directories(root / "cycles");
        fs::create_directories(root / "climate");
        fs::create_directories(root / "schedules");
        fs::create_directories(root / "configs");

        // Cycling corpus: three cells at distinct temperature / C-rate /
        // SOC-window conditions, fades carrying small multiplicative noise.
        const auto records = generate_synthetic_training(seed);
        write_training_set((root / "synthetic_cycling.csv").string(), records,
                           "synthetic cycling corpus (battbayes_datagen, seed " +
                               std::to_string(seed) + ")");

        const DriveSession urban = synth_drive_cycle(7, 900.0, 1.0);
        write_time_series((root / "cycles" / "urban.csv").string(), urban.v);
        write_time_series((root / "cycles" / "fixture_urban.csv").string(),
                          fixture_urban_cycle());

        write_climate(root / "climate" / "phoenix.csv", 23.9, 11.0, 7.5);
        write_climate(root / "climate" / "seattle.csv", 11.5, 6.5, 4.0);

        write_json(root / "schedules" / "daily_tasks.json", fixture_schedule());
        write_json(root / "schedules" / "commuter_mild.json", commuter_schedule(0.7));
        write_json(root / "schedules" / "commuter_aggressive.json",
                   commuter_schedule(1.3));
        // 1366 W x 1.174 h and 6600 W x 0.243 h both move ~1604 Wh per day.
        write_json(root / "schedules" / "solar_heavy.json",
                   service_schedule("solar", -1366.0, 1.174));
        write_json(root / "schedules" / "peak_heavy.json",
                   service_schedule("peak_shave", 6600.0, 0.243));

        const json train{{"training_csv", "../synthetic_cycling.csv"},
                         {"out_dir", "out/train"},
                         {"seed", 42},
                         {"iterations", 10000},
                         {"burn_in_fraction", 0.2},
                         {"split_ratio", 0.85},
                         {"split_mode", "random"}};
        write_json(root / "configs" / "train.json", train);

        const json test{{"trained_dir", "out/train"},
                        {"out_dir", "out/test"},
                        {"seed", 42}};
        write_json(root / "configs" / "test.json", test);

        const json estimate{
            {"trained_dir", "out/train"},
            {"out_dir", "out/estimate"},
            {"seed", 42},
            {"iterations", 4000},
            {"estimate",
             case_spec("daily_fixture", "../schedules/daily_tasks.json",
                       json::array({23.0}))}};
        write_json(root / "configs" / "estimate.json", estimate);

        const json scenarios = json::array(
            {case_spec("commuter_mild", "../schedules/commuter_mild.json",
                       json::array({23.0})),
             case_spec("commuter_aggressive",
                       "../schedules/commuter_aggressive.json",
                       json::array({23.0})),
             case_spec("solar_heavy", "../schedules/solar_heavy.json",
                       json::array({23.0})),
             case_spec("peak_heavy", "../schedules/peak_heavy.json",
                       json::array({23.0})),
             case_spec("phoenix", "../schedules/daily_tasks.json",
                       json("../climate/phoenix.csv")),
             case_spec("seattle", "../schedules/daily_tasks.json",
                       json("../climate/seattle.csv"))});
        const json scenario{{"trained_dir", "out/train"},
                            {"out_dir", "out/scenario"},
                            {"seed", 42},
                            {"iterations", 3000},
                            {"scenarios", scenarios}};
        write_json(root / "configs" / "scenario.json", scenario);
    } catch (const std::exception& e) {
        std::cerr << "datagen failed: " << e.what() << "\n";
        return 1;
    }
    std::cout << "wrote data tree under " << root.string() << "\n";
    return 0;
}
