#include "battbayes/scenario.hpp"

#include <algorithm>
#include <cmath>

#include "battbayes/errors.hpp"

namespace battbayes {

namespace {

constexpr double kDt = 1.0;            // composition resolution, seconds
constexpr int kDaySamples = 86400;     // 24 h at 1 Hz
constexpr double kSocEps = 1e-12;

bool positive_finite(double x) {
    return std::isfinite(x) && x > 0.0;
}

}  // namespace

void validate(const VehicleSpec& spec) {
    if (!positive_finite(spec.mass_kg) || !positive_finite(spec.cx) ||
        !positive_finite(spec.af_m2) || !positive_finite(spec.fr) ||
        !positive_finite(spec.rho) || !positive_finite(spec.gravity) ||
        !(spec.passenger_mass_kg >= 0.0) || !std::isfinite(spec.passenger_mass_kg) ||
        !std::isfinite(spec.grade_theta)) {
        throw IncompleteSpec("vehicle spec needs positive mass, Cx, Af, fr, rho and gravity, "
                             "a non-negative passenger mass and a finite road grade");
    }
}

double aero_coefficient(const VehicleSpec& spec) {
    validate(spec);
    return 0.5 * spec.rho * spec.cx * spec.af_m2;
}

double rolling_grade_coefficient(const VehicleSpec& spec) {
    validate(spec);
    double m = spec.mass_kg + spec.passenger_mass_kg;
    return m * spec.gravity * spec.fr * std::cos(spec.grade_theta) +
           m * spec.gravity * std::sin(spec.grade_theta);
}

const char* charger_name(Charger c) noexcept {
    switch (c) {
        case Charger::L1:
            return "L1";
        case Charger::L2:
            return "L2";
        case Charger::L3:
            return "L3";
    }
    return "unknown";
}

Charger charger_from_name(std::string_view name) {
    if (name == "L1" || name == "l1") return Charger::L1;
    if (name == "L2" || name == "l2") return Charger::L2;
    if (name == "L3" || name == "l3") return Charger::L3;
    throw ParseError("unknown charger level: " + std::string(name));
}

double charger_rated_power_w(Charger c, const PackSpec& pack) noexcept {
    switch (c) {
        case Charger::L1:
            return pack.l1_power_w;
        case Charger::L2:
            return pack.l2_power_w;
        case Charger::L3:
            return pack.l3_power_w;
    }
    return pack.l2_power_w;
}

Task charger_task(Charger c) noexcept {
    switch (c) {
        case Charger::L1:
            return Task::ChargeL1;
        case Charger::L2:
            return Task::ChargeL2;
        case Charger::L3:
            return Task::ChargeL3;
    }
    return Task::ChargeL2;
}

const char* repeat_name(RepeatFrequency r) noexcept {
    switch (r) {
        case RepeatFrequency::Daily:
            return "daily";
        case RepeatFrequency::EveryOtherDay:
            return "every_other_day";
        case RepeatFrequency::Weekly:
            return "weekly";
        case RepeatFrequency::Monthly:
            return "monthly";
        case RepeatFrequency::Never:
            return "never";
    }
    return "unknown";
}

RepeatFrequency repeat_from_name(std::string_view name) {
    if (name == "daily") return RepeatFrequency::Daily;
    if (name == "every_other_day") return RepeatFrequency::EveryOtherDay;
    if (name == "weekly") return RepeatFrequency::Weekly;
    if (name == "monthly") return RepeatFrequency::Monthly;
    if (name == "never") return RepeatFrequency::Never;
    throw ParseError("unknown repeat frequency: " + std::string(name));
}

double repeat_weight(RepeatFrequency r) noexcept {
    switch (r) {
        case RepeatFrequency::Daily:
            return 1.0;
        case RepeatFrequency::EveryOtherDay:
            return 0.5;
        case RepeatFrequency::Weekly:
            return 1.0 / 7.0;
        case RepeatFrequency::Monthly:
            return 1.0 / 30.0;
        case RepeatFrequency::Never:
            return 0.0;
    }
    return 0.0;
}

void validate(const DailyTaskSchedule& schedule) {
    if (schedule.entries.empty()) {
        throw IncompleteSpec("schedule has no tasks");
    }
    if (!(schedule.soc_min > 0.0 && schedule.soc_min < schedule.soc_max &&
          schedule.soc_max < 1.0)) {
        throw DomainError("SOC window must satisfy 0 < soc_min < soc_max < 1");
    }
    if (!(schedule.soc_initial >= schedule.soc_min && schedule.soc_initial <= schedule.soc_max)) {
        throw DomainError("initial SOC must lie inside the SOC window");
    }
    for (const auto& entry : schedule.entries) {
        if (std::holds_alternative<DriveSession>(entry.action)) {
            if (entry.task != Task::Driving) {
                throw IncompleteSpec("drive session tagged with a non-driving task");
            }
            const auto& d = std::get<DriveSession>(entry.action);
            if (d.v.values.empty()) {
                throw IncompleteSpec("drive session has an empty velocity trace");
            }
            if (!d.a.values.empty() && d.a.values.size() != d.v.values.size()) {
                throw IncompleteSpec("drive session velocity/acceleration lengths differ");
            }
        } else if (std::holds_alternative<ChargingEvent>(entry.action)) {
            const auto& c = std::get<ChargingEvent>(entry.action);
            if (entry.task != charger_task(c.charger)) {
                throw IncompleteSpec("charging event task does not match its charger level");
            }
            if (!(c.duration_h > 0.0) || c.power_w < 0.0) {
                throw DomainError("charging event needs positive duration and power");
            }
        } else {
            const auto& s = std::get<ServiceTask>(entry.action);
            if (entry.task != Task::Solar && entry.task != Task::FreqReg &&
                entry.task != Task::PeakShave) {
                throw IncompleteSpec("service profile tagged with a non-service task");
            }
            if (s.power_w.empty() || !(s.duration_h > 0.0) || !(s.sample_period_s > 0.0)) {
                throw IncompleteSpec("service profile needs samples and a positive duration");
            }
        }
    }
}

TimeSeries derive_acceleration(const TimeSeries& v) {
    TimeSeries a;
    a.sample_period_s = v.sample_period_s;
    const auto& y = v.values;
    const std::size_t n = y.size();
    a.values.resize(n, 0.0);
    if (n < 2) {
        return a;
    }
    const double dt = v.sample_period_s;
    a.values[0] = (y[1] - y[0]) / dt;
    for (std::size_t k = 1; k + 1 < n; ++k) {
        a.values[k] = (y[k + 1] - y[k - 1]) / (2.0 * dt);
    }
    a.values[n - 1] = (y[n - 1] - y[n - 2]) / dt;
    return a;
}

namespace {

// Streaming day simulator: pack-level powers in, per-cell trace out, coulomb
// counting against the SOC window.
class Composer {
public:
    Composer(const DailyTaskSchedule& schedule, const PackSpec& pack)
        : schedule_(schedule), pack_(pack), soc_(schedule.soc_initial) {}

    double soc() const { return soc_; }
    std::size_t samples() const { return power_cell_.size(); }

    // SOC change produced by one dt of pack power (positive = discharge).
    double dsoc_of(double pb_pack_w) const {
        double i_cell = pb_pack_w / pack_.cells_count / pack_.cell_nominal_v;
        return -i_cell * kDt / 3600.0 / pack_.cell_capacity_ah;
    }

    double pack_power_for_dsoc(double dsoc) const {
        return -dsoc * 3600.0 * pack_.cell_capacity_ah / kDt * pack_.cell_nominal_v *
               pack_.cells_count;
    }

    void emit(double pb_pack_w, int tag) {
        if (samples() >= static_cast<std::size_t>(kDaySamples)) {
            throw ScheduleInfeasible(
                "daily tasks plus recharging do not fit inside 24 hours");
        }
        power_cell_.push_back(pb_pack_w / pack_.cells_count);
        tags_.push_back(tag);
        soc_ += dsoc_of(pb_pack_w);
        soc_trace_.push_back(soc_);
    }

    // Charge at the charger's rated power until target SOC, with an exact
    // partial-power final sample.
    void charge_until(double target_soc, Charger charger) {
        double p = charger_rated_power_w(charger, pack_);
        if (!(p > 0.0)) {
            throw DomainError("charger rated power must be positive");
        }
        int tag = static_cast<int>(charger_task(charger));
        while (soc_ < target_soc - kSocEps) {
            double ds = dsoc_of(-p);
            if (soc_ + ds > target_soc) {
                emit(pack_power_for_dsoc(target_soc - soc_), tag);
                break;
            }
            emit(-p, tag);
        }
    }

    // One discharge-capable sample with floor protection: when the sample
    // would cross the window floor, recharge to the ceiling first, then
    // apply it (the recharge-insertion rule).
    void emit_with_floor_recharge(double pb_pack_w, int tag) {
        if (soc_ + dsoc_of(pb_pack_w) < schedule_.soc_min - kSocEps) {
            charge_until(schedule_.soc_max, schedule_.topup_charger);
        }
        emit(pb_pack_w, tag);
    }

    void pad_idle_to_full_day() {
        while (samples() < static_cast<std::size_t>(kDaySamples)) {
            power_cell_.push_back(0.0);
            tags_.push_back(-1);
            soc_trace_.push_back(soc_);
        }
    }

    std::vector<double> take_power() { return std::move(power_cell_); }
    std::vector<int> take_tags() { return std::move(tags_); }
    std::vector<double> take_soc() { return std::move(soc_trace_); }

private:
    const DailyTaskSchedule& schedule_;
    const PackSpec& pack_;
    double soc_;
    std::vector<double> power_cell_;
    std::vector<int> tags_;
    std::vector<double> soc_trace_;
};

void run_drive_session(Composer& comp, const DriveSession& session, const VehicleSpec& vehicle,
                       const PackSpec& pack) {
    const double inertial = vehicle.mass_kg + vehicle.passenger_mass_kg;
    const double aero = aero_coefficient(vehicle);
    const double roll = rolling_grade_coefficient(vehicle);
    TimeSeries accel = session.a.values.empty() ? derive_acceleration(session.v) : session.a;
    for (std::size_t k = 0; k < session.v.values.size(); ++k) {
        double v = std::max(0.0, session.v.values[k]);
        double a = accel.values[k];
        double pw = inertial * a * v + aero * v * v * v + roll * v;
        double pb = (pw >= 0.0) ? pw / pack.efficiency + pack.aux_power_w
                                : pack.regen_fraction * pack.efficiency * pw + pack.aux_power_w;
        comp.emit_with_floor_recharge(pb, static_cast<int>(Task::Driving));
    }
}

void run_charging_event(Composer& comp, const ChargingEvent& event, const PackSpec& pack,
                        double soc_max) {
    double p = event.power_w > 0.0 ? event.power_w : charger_rated_power_w(event.charger, pack);
    int tag = static_cast<int>(charger_task(event.charger));
    auto n = static_cast<std::size_t>(std::llround(event.duration_h * 3600.0 / kDt));
    for (std::size_t k = 0; k < n; ++k) {
        double ds = comp.dsoc_of(-p);
        if (comp.soc() + ds > soc_max + kSocEps) {
            double room = soc_max - comp.soc();
            if (room > kSocEps) {
                comp.emit(comp.pack_power_for_dsoc(room), tag);
            }
            break;  // full: the event ends early
        }
        comp.emit(-p, tag);
    }
}

void run_service(Composer& comp, Task task, const ServiceTask& service, const PackSpec& pack,
                 double soc_min, double soc_max) {
    auto n = static_cast<std::size_t>(std::llround(service.duration_h * 3600.0 / kDt));
    int tag = static_cast<int>(task);
    for (std::size_t k = 0; k < n; ++k) {
        double t_s = static_cast<double>(k) * kDt;
        auto idx = static_cast<std::size_t>(t_s / service.sample_period_s) %
                   service.power_w.size();
        double p = std::clamp(service.power_w[idx], -pack.l2_power_w, pack.l2_power_w);
        double next = comp.soc() + comp.dsoc_of(p);
        if (next > soc_max + kSocEps || next < soc_min - kSocEps) {
            double bound = next > soc_max ? soc_max : soc_min;
            double room = bound - comp.soc();
            if (std::fabs(room) > kSocEps) {
                comp.emit(comp.pack_power_for_dsoc(room), tag);
            }
            if (task == Task::FreqReg) {
                continue;  // regulation keeps cycling from the bound
            }
            break;  // solar/peak-shave cannot proceed past the window
        }
        comp.emit(p, tag);
    }
}

}  // namespace

ComposedProfile compose_profile(const DailyTaskSchedule& schedule, const VehicleSpec& vehicle,
                                const PackSpec& pack, double days) {
    validate(schedule);
    validate(vehicle);
    if (!(days > 0.0)) {
        throw DomainError("day count must be positive");
    }
    if (pack.cells_count < 1 || !positive_finite(pack.cell_nominal_v) ||
        !positive_finite(pack.cell_capacity_ah) || !(pack.efficiency > 0.0) ||
        pack.efficiency > 1.0) {
        throw IncompleteSpec("pack spec needs cells, cell voltage/capacity and efficiency");
    }

    Composer comp(schedule, pack);
    // One repeat weight per service task; validated consistent across entries.
    std::array<double, kNumTasks> weight{};
    weight.fill(1.0);
    std::array<bool, kNumTasks> weight_seen{};
    for (const auto& entry : schedule.entries) {
        if (const auto* service = std::get_if<ServiceTask>(&entry.action)) {
            int t = static_cast<int>(entry.task);
            double w = repeat_weight(service->repeat);
            if (weight_seen[t] && weight[t] != w) {
                throw IncompleteSpec("conflicting repeat frequencies for one service task");
            }
            weight[t] = w;
            weight_seen[t] = true;
        }
    }

    ComposedProfile out;
    for (const auto& entry : schedule.entries) {
        if (const auto* drive = std::get_if<DriveSession>(&entry.action)) {
            run_drive_session(comp, *drive, vehicle, pack);
            auto& dv = out.drive_v.values;
            auto& da = out.drive_a.values;
            TimeSeries accel = drive->a.values.empty() ? derive_acceleration(drive->v) : drive->a;
            dv.insert(dv.end(), drive->v.values.begin(), drive->v.values.end());
            da.insert(da.end(), accel.values.begin(), accel.values.end());
            out.drive_v.sample_period_s = drive->v.sample_period_s;
            out.drive_a.sample_period_s = drive->v.sample_period_s;
        } else if (const auto* charge = std::get_if<ChargingEvent>(&entry.action)) {
            run_charging_event(comp, *charge, pack, schedule.soc_max);
        } else {
            const auto& service = std::get<ServiceTask>(entry.action);
            if (repeat_weight(service.repeat) == 0.0) {
                continue;  // a never-repeating service is absent
            }
            run_service(comp, entry.task, service, pack, schedule.soc_min, schedule.soc_max);
        }
    }
    comp.charge_until(schedule.soc_initial, schedule.topup_charger);
    if (comp.samples() > static_cast<std::size_t>(kDaySamples)) {
        throw ScheduleInfeasible("daily tasks plus recharging do not fit inside 24 hours");
    }
    comp.pad_idle_to_full_day();

    out.power_w = comp.take_power();
    out.task_tag = comp.take_tags();
    out.soc = comp.take_soc();
    out.sample_period_s = kDt;
    out.days = days;
    out.soc_initial = schedule.soc_initial;

    // Per-task intensities over the representative day.
    const double cap = pack.cell_capacity_ah;
    const double u = pack.cell_nominal_v;
    int prev_tag = -1;
    double seg_start_soc = schedule.soc_initial;
    double soc_sum = 0.0;
    double prev_soc = schedule.soc_initial;
    for (std::size_t s = 0; s < out.power_w.size(); ++s) {
        int tag = out.task_tag[s];
        if (tag != prev_tag) {
            if (prev_tag >= 0) {
                out.day_stats[prev_tag].dod += std::fabs(prev_soc - seg_start_soc);
            }
            seg_start_soc = prev_soc;
            prev_tag = tag;
        }
        if (tag >= 0) {
            auto& st = out.day_stats[tag];
            st.ah += std::fabs(out.power_w[s]) / u * kDt / 3600.0;
            st.active_hours += kDt / 3600.0;
            st.mean_power_w += std::fabs(out.power_w[s]);
        }
        soc_sum += out.soc[s];
        prev_soc = out.soc[s];
    }
    if (prev_tag >= 0) {
        out.day_stats[prev_tag].dod += std::fabs(prev_soc - seg_start_soc);
    }
    out.soc_time_avg = soc_sum / static_cast<double>(out.soc.size());

    double weighted_ah = 0.0;
    double weighted_hours = 0.0;
    for (int t = 0; t < kNumTasks; ++t) {
        auto& st = out.day_stats[t];
        if (st.active_hours > 0.0) {
            st.mean_power_w /= st.active_hours * 3600.0 / kDt;
            st.c_rate = st.ah / (cap * st.active_hours);
        }
        out.horizon_ah[t] = st.ah * weight[t] * days;
        out.total_ah += out.horizon_ah[t];
        weighted_ah += st.ah * weight[t];
        weighted_hours += st.active_hours * weight[t];
    }
    if (weighted_hours > 0.0) {
        out.ic_ref = weighted_ah / (cap * weighted_hours);
    }
    return out;
}

TaskShares task_shares(const ComposedProfile& profile) {
    double total = 0.0;
    for (double ah : profile.horizon_ah) {
        total += ah;
    }
    if (!(total > 0.0)) {
        throw DegenerateData("composed profile moved no charge");
    }
    TaskShares shares;
    for (int t = 0; t < kNumTasks; ++t) {
        shares.share[t] = profile.horizon_ah[t] / total;
    }
    return shares;
}

Observation observation_from_profile(const ComposedProfile& profile,
                                     const std::vector<double>& temps_kelvin,
                                     const std::string& id) {
    if (temps_kelvin.empty()) {
        throw IncompleteSpec("observation needs at least one temperature sample");
    }
    Observation o;
    o.id = id;
    o.t = temps_kelvin;
    // Keep only moving samples so the gamma velocity likelihood stays in
    // support; pairs are dropped together to preserve channel alignment.
    for (std::size_t k = 0; k < profile.drive_v.values.size(); ++k) {
        if (profile.drive_v.values[k] > 0.0) {
            o.v.push_back(profile.drive_v.values[k]);
            o.a.push_back(profile.drive_a.values[k]);
        }
    }
    if (o.v.empty()) {
        // No driving in this duty: neutral stub channel with negligible
        // influence (the driving share is ~0 so the power chain idles).
        o.v = {1.0};
        o.a = {0.0};
    }
    for (int t = 0; t < kNumTasks; ++t) {
        o.grid_powers[t] = profile.day_stats[t].mean_power_w;
    }
    o.duty.ic_ref = profile.ic_ref;
    o.duty.ah_ref = profile.total_ah;
    o.duty.soc_ref = profile.soc_time_avg;
    o.duty.soc_initial = profile.soc_initial;
    return o;
}

ObservationSet climate_observations(
    const std::vector<std::pair<std::string, TimeSeries>>& temps_celsius_by_location,
    const Observation& base) {
    if (temps_celsius_by_location.empty()) {
        throw IncompleteSpec("climate sweep needs at least one location");
    }
    ObservationSet set;
    for (const auto& [name, series] : temps_celsius_by_location) {
        if (series.values.empty()) {
            throw IncompleteSpec("temperature series for " + name + " is empty");
        }
        Observation o = base;
        o.id = name;
        o.t.clear();
        for (double c : series.values) {
            o.t.push_back(c + 273.15);
        }
        set.observations.push_back(std::move(o));
    }
    return set;
}

DriveSession synth_drive_cycle(std::uint64_t seed, double duration_s, double aggressiveness) {
    if (!(duration_s >= 10.0)) {
        throw DomainError("drive cycle needs at least 10 seconds");
    }
    if (!(aggressiveness > 0.0)) {
        throw DomainError("aggressiveness must be positive");
    }
    RandomStream rng = RandomStream::substream(seed, 0x00d51cec1eULL);
    const auto n = static_cast<std::size_t>(std::llround(duration_s));
    std::vector<double> v;
    v.reserve(n);
    double speed = 0.0;
    auto push = [&](double s) { v.push_back(std::max(0.0, s)); };
    while (v.size() < n) {
        double target = aggressiveness * (7.0 + 6.0 * rng.u01());
        double accel = aggressiveness * (0.6 + 0.5 * rng.u01());
        while (speed < target && v.size() < n) {
            speed = std::min(target, speed + accel);
            push(speed);
        }
        auto cruise_n = static_cast<std::size_t>(40.0 + 100.0 * rng.u01());
        for (std::size_t i = 0; i < cruise_n && v.size() < n; ++i) {
            speed += 0.15 * aggressiveness * rng.normal();
            speed = std::clamp(speed, 0.4 * target, 1.25 * target);
            push(speed);
        }
        double decel = aggressiveness * (0.8 + 0.6 * rng.u01());
        bool full_stop = rng.u01() < 0.35;
        double low = full_stop ? 0.0 : target * (0.25 + 0.25 * rng.u01());
        while (speed > low && v.size() < n) {
            speed = std::max(low, speed - decel);
            push(speed);
        }
        if (full_stop) {
            auto idle_n = static_cast<std::size_t>(5.0 + 25.0 * rng.u01());
            for (std::size_t i = 0; i < idle_n && v.size() < n; ++i) {
                push(0.0);
            }
        }
    }
    DriveSession session;
    session.v.values = std::move(v);
    session.v.sample_period_s = kDt;
    session.a = derive_acceleration(session.v);
    return session;
}

}  // namespace battbayes
