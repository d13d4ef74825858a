#pragma once

#include <array>
#include <string>
#include <variant>
#include <vector>

#include "battbayes/model.hpp"
#include "battbayes/preprocess.hpp"
#include "battbayes/rng.hpp"

namespace battbayes {

// Longitudinal-dynamics inputs for the wheel-power chain.
struct VehicleSpec {
    double mass_kg = 1400.0;
    double passenger_mass_kg = 70.0;
    double cx = 0.29;          // aero drag coefficient
    double af_m2 = 2.2;        // frontal area
    double fr = 0.012;         // rolling resistance coefficient
    double rho = 1.225;        // air density, kg/m^3
    double grade_theta = 0.0;  // road grade, radians (any sign)
    double gravity = 9.81;
};

// Throws IncompleteSpec when a required field is missing/non-positive.
void validate(const VehicleSpec& spec);

// 0.5 * rho * Cx * Af — the cubic velocity coefficient of wheel power.
double aero_coefficient(const VehicleSpec& spec);

// m*g*fr*cos(theta) + m*g*sin(theta) with m = mass + passenger_mass.
double rolling_grade_coefficient(const VehicleSpec& spec);

// Pack geometry and the pack-to-cell conversion boundary. All model-facing
// quantities are cell-level; schedules and vehicle dynamics are pack-level
// and get divided by cells_count during composition.
struct PackSpec {
    int cells_count = 1800;
    double cell_nominal_v = 3.3;    // V
    double cell_capacity_ah = 2.3;  // Ah
    double efficiency = 0.9;        // drivetrain efficiency for composition
    double regen_fraction = 1.0;    // share of recoverable braking power
    double aux_power_w = 500.0;     // pack-level accessory draw while driving
    double l1_power_w = 1400.0;
    double l2_power_w = 6600.0;
    double l3_power_w = 50000.0;
};

enum class Charger { L1, L2, L3 };
const char* charger_name(Charger c) noexcept;
Charger charger_from_name(std::string_view name);  // throws ParseError
double charger_rated_power_w(Charger c, const PackSpec& pack) noexcept;
Task charger_task(Charger c) noexcept;

enum class RepeatFrequency { Daily, EveryOtherDay, Weekly, Monthly, Never };
const char* repeat_name(RepeatFrequency r) noexcept;
RepeatFrequency repeat_from_name(std::string_view name);  // throws ParseError
// Expected occurrences per day: 1, 1/2, 1/7, 1/30, 0.
double repeat_weight(RepeatFrequency r) noexcept;

// One driving bout: paired velocity/acceleration traces (equal length).
// An empty acceleration series is derived by finite differences.
struct DriveSession {
    TimeSeries v;
    TimeSeries a;
};

// Central-difference acceleration from a velocity trace (one-sided at the
// ends); keeps the sample period.
TimeSeries derive_acceleration(const TimeSeries& v);

struct ChargingEvent {
    Charger charger = Charger::L2;
    double power_w = 0.0;  // pack-level; 0 means the charger's rated power
    double duration_h = 1.0;
};

// A grid service: pack-level signed battery power (positive = discharging
// into the grid), looped over `duration_h`, magnitude capped at the L2
// rating during composition.
struct ServiceTask {
    std::vector<double> power_w;
    double sample_period_s = 1.0;
    double duration_h = 1.0;
    RepeatFrequency repeat = RepeatFrequency::Daily;
};

using ScheduleAction = std::variant<DriveSession, ChargingEvent, ServiceTask>;

struct ScheduleEntry {
    Task task = Task::Driving;
    ScheduleAction action;
};

// One day's duty in execution order. The SOC trace runs through the entries
// as listed; an automatic top-up back to soc_initial is appended at the end
// of the day on the topup charger.
struct DailyTaskSchedule {
    std::vector<ScheduleEntry> entries;
    double soc_min = 0.1;
    double soc_max = 0.9;
    double soc_initial = 0.9;
    Charger topup_charger = Charger::L2;
};

void validate(const DailyTaskSchedule& schedule);  // throws IncompleteSpec/DomainError

struct TaskShares {
    std::array<double, kNumTasks> share{};
};

// Per-task duty intensities over one fully loaded day, cell level.
struct TaskStats {
    double ah = 0.0;            // |Ah| moved during the task
    double c_rate = 0.0;        // mean |I|/capacity while active, 1/h
    double dod = 0.0;           // sum of |SOC swing| per contiguous segment
    double active_hours = 0.0;
    double mean_power_w = 0.0;  // mean |power| while active
};

struct ComposedProfile {
    std::vector<double> power_w;  // per-cell battery power, + = discharge
    std::vector<int> task_tag;    // Task index per sample, -1 while idle
    std::vector<double> soc;
    double sample_period_s = 1.0;
    std::array<TaskStats, kNumTasks> day_stats{};
    // Horizon totals: day Ah scaled by each service's repeat weight and the
    // day count. Driving and charging repeat daily by definition.
    std::array<double, kNumTasks> horizon_ah{};
    double total_ah = 0.0;      // sum of horizon_ah
    double soc_time_avg = 0.0;  // over the representative day
    double ic_ref = 0.0;        // repeat-weighted mean active C-rate, 1/h
    double days = 1.0;
    double soc_initial = 0.9;   // carried to the observation's duty anchor
    TimeSeries drive_v;  // concatenated driving channels for the observation
    TimeSeries drive_a;
};

// Simulates one representative day at 1 Hz: driving through the wheel-power
// chain with the pack's efficiency, charging events at rated power, services
// capped at the L2 rating; coulomb-counts SOC inside [soc_min, soc_max] with
// automatic recharge insertion when the floor is hit and an end-of-day
// top-up to soc_initial. Horizon Ah applies repeat weights times `days`.
// Throws ScheduleInfeasible when the duty cannot fit inside 24 h.
ComposedProfile compose_profile(const DailyTaskSchedule& schedule, const VehicleSpec& vehicle,
                                const PackSpec& pack, double days);

// Per-task |Ah| divided by total |Ah|. Throws DegenerateData on zero total.
TaskShares task_shares(const ComposedProfile& profile);

// Builds the model-facing observation: duty anchors from the composed
// profile, drive channels from the schedule, temperature channel from
// `temps_kelvin` (at least one sample), no fade measurements.
Observation observation_from_profile(const ComposedProfile& profile,
                                     const std::vector<double>& temps_kelvin,
                                     const std::string& id);

// Clones the base observation once per location with that location's
// temperature samples (Celsius in, Kelvin out) as the T channel.
ObservationSet climate_observations(
    const std::vector<std::pair<std::string, TimeSeries>>& temps_celsius_by_location,
    const Observation& base);

// Seeded stop-and-go cycle: accelerate / cruise / decelerate / idle phases
// at 1 Hz. `aggressiveness` scales target speeds and acceleration
// magnitudes; 1.0 is a mild urban profile.
DriveSession synth_drive_cycle(std::uint64_t seed, double duration_s, double aggressiveness);

}  // namespace battbayes
