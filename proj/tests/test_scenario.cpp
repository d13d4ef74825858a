#include <cmath>
#include <numeric>
#include <vector>

#include <doctest.h>

#include "battbayes/errors.hpp"
#include "battbayes/scenario.hpp"

using namespace battbayes;

namespace {

DailyTaskSchedule drive_only_schedule(double aggressiveness = 1.0) {
    DailyTaskSchedule s;
    ScheduleEntry e;
    e.task = Task::Driving;
    e.action = synth_drive_cycle(5, 1200.0, aggressiveness);
    s.entries.push_back(e);
    return s;
}

double mean_abs(const std::vector<double>& xs) {
    double acc = 0.0;
    for (double x : xs) acc += std::fabs(x);
    return xs.empty() ? 0.0 : acc / static_cast<double>(xs.size());
}

}  // namespace

TEST_SUITE("scenario") {

TEST_CASE("vehicle coefficient initializers") {
    VehicleSpec v;
    v.mass_kg = 1500.0;
    v.passenger_mass_kg = 0.0;
    v.cx = 0.3;
    v.af_m2 = 2.0;
    v.fr = 0.01;
    v.rho = 1.225;
    v.grade_theta = 0.0;
    CHECK(aero_coefficient(v) == doctest::Approx(0.3675).epsilon(1e-12));
    CHECK(rolling_grade_coefficient(v) == doctest::Approx(147.15).epsilon(1e-12));
    v.grade_theta = 0.05;
    CHECK(rolling_grade_coefficient(v) == doctest::Approx(882.409576635151).epsilon(1e-12));
    v.cx = 0.0;
    CHECK_THROWS_AS(aero_coefficient(v), IncompleteSpec);
    v.cx = 0.3;
    v.af_m2 = 4.0;
    CHECK(aero_coefficient(v) == doctest::Approx(2 * 0.3675).epsilon(1e-12));
    v.mass_kg = -1.0;
    CHECK_THROWS_AS(validate(v), IncompleteSpec);
}

TEST_CASE("charger and repeat lookups") {
    PackSpec pack;
    CHECK(charger_rated_power_w(Charger::L1, pack) == doctest::Approx(1400.0));
    CHECK(charger_rated_power_w(Charger::L2, pack) == doctest::Approx(6600.0));
    CHECK(charger_rated_power_w(Charger::L3, pack) == doctest::Approx(50000.0));
    CHECK(charger_task(Charger::L1) == Task::ChargeL1);
    CHECK(charger_task(Charger::L3) == Task::ChargeL3);
    CHECK(charger_from_name("L2") == Charger::L2);
    CHECK_THROWS_AS(charger_from_name("L9"), ParseError);
    CHECK(repeat_weight(RepeatFrequency::Daily) == doctest::Approx(1.0));
    CHECK(repeat_weight(RepeatFrequency::EveryOtherDay) == doctest::Approx(0.5));
    CHECK(repeat_weight(RepeatFrequency::Weekly) == doctest::Approx(1.0 / 7.0));
    CHECK(repeat_weight(RepeatFrequency::Monthly) == doctest::Approx(1.0 / 30.0));
    CHECK(repeat_weight(RepeatFrequency::Never) == 0.0);
    CHECK(repeat_from_name(repeat_name(RepeatFrequency::Weekly)) ==
          RepeatFrequency::Weekly);
}

TEST_CASE("acceleration derivation uses central differences") {
    const TimeSeries a = derive_acceleration({{0.0, 1.0, 2.0, 3.0}, 1.0});
    REQUIRE(a.values.size() == 4);
    for (double x : a.values) CHECK(x == doctest::Approx(1.0).epsilon(1e-12));
    // quadratic ramp v = t^2 at dt = 0.5: central diff of t^2 is exact = 2t
    const TimeSeries q =
        derive_acceleration({{0.0, 0.25, 1.0, 2.25, 4.0}, 0.5});
    CHECK(q.values[1] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(q.values[2] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(q.sample_period_s == 0.5);
}

TEST_CASE("synthetic drive cycles are seeded and shaped by aggressiveness") {
    const DriveSession a = synth_drive_cycle(9, 900.0, 1.0);
    const DriveSession b = synth_drive_cycle(9, 900.0, 1.0);
    CHECK(a.v.values == b.v.values);
    CHECK(a.a.values == b.a.values);
    REQUIRE(a.v.values.size() == a.a.values.size());
    CHECK(std::fabs(static_cast<double>(a.v.values.size()) - 900.0) <= 60.0);
    for (double v : a.v.values) CHECK(v >= 0.0);

    const DriveSession mild = synth_drive_cycle(9, 3000.0, 0.7);
    const DriveSession hard = synth_drive_cycle(9, 3000.0, 1.3);
    CHECK(mean_abs(hard.a.values) > mean_abs(mild.a.values));
    CHECK(mean_abs(hard.v.values) > mean_abs(mild.v.values));
}

TEST_CASE("schedule validation") {
    DailyTaskSchedule empty;
    CHECK_THROWS_AS(validate(empty), IncompleteSpec);
    DailyTaskSchedule bad = drive_only_schedule();
    bad.soc_min = 0.9;
    bad.soc_max = 0.1;
    CHECK_THROWS_AS(validate(bad), DomainError);
    DailyTaskSchedule outside = drive_only_schedule();
    outside.soc_initial = 0.95;
    outside.soc_max = 0.9;
    CHECK_THROWS_AS(validate(outside), DomainError);
}

TEST_CASE("single-task schedule gives that task the whole share") {
    const auto profile =
        compose_profile(drive_only_schedule(), VehicleSpec{}, PackSpec{}, 30.0);
    const TaskShares shares = task_shares(profile);
    // the end-of-day top-up recharges through ChargeL2, so driving plus its
    // recharge split the Ah between exactly two tasks
    const double drive = shares.share[static_cast<int>(Task::Driving)];
    const double l2 = shares.share[static_cast<int>(Task::ChargeL2)];
    CHECK(drive + l2 == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(drive > 0.0);
    CHECK(l2 > 0.0);
}

TEST_CASE("composed profile conserves charge and respects the SOC window") {
    DailyTaskSchedule s = drive_only_schedule();
    ServiceTask solar;
    solar.power_w = {-1200.0};
    solar.duration_h = 0.8;
    s.entries.push_back({Task::Solar, solar});
    ServiceTask peak;
    peak.power_w = {5000.0};
    peak.duration_h = 0.3;
    s.entries.push_back({Task::PeakShave, peak});
    const auto profile = compose_profile(s, VehicleSpec{}, PackSpec{}, 10.0);

    REQUIRE(!profile.soc.empty());
    for (double soc : profile.soc) {
        CHECK(soc >= s.soc_min - 1e-9);
        CHECK(soc <= s.soc_max + 1e-9);
    }
    // day ends back at soc_initial: discharge and charge balance
    CHECK(profile.soc.back() == doctest::Approx(s.soc_initial).epsilon(1e-6));
    double discharge = 0.0, charge = 0.0;
    for (double p : profile.power_w) {
        const double dah = std::fabs(p) / 3.3 * profile.sample_period_s / 3600.0;
        (p >= 0.0 ? discharge : charge) += dah;
    }
    CHECK(discharge == doctest::Approx(charge).epsilon(1e-3));

    const TaskShares shares = task_shares(profile);
    const double total =
        std::accumulate(shares.share.begin(), shares.share.end(), 0.0);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("increasing a service's repeat frequency never decreases total Ah") {
    double previous = -1.0;
    for (RepeatFrequency r : {RepeatFrequency::Never, RepeatFrequency::Monthly,
                              RepeatFrequency::Weekly, RepeatFrequency::EveryOtherDay,
                              RepeatFrequency::Daily}) {
        DailyTaskSchedule s = drive_only_schedule();
        ServiceTask reg;
        reg.power_w = {1500.0, -1500.0};
        reg.sample_period_s = 30.0;
        reg.duration_h = 1.0;
        reg.repeat = r;
        s.entries.push_back({Task::FreqReg, reg});
        const auto profile = compose_profile(s, VehicleSpec{}, PackSpec{}, 365.0);
        CHECK(profile.total_ah >= previous);
        previous = profile.total_ah;
    }
}

TEST_CASE("services are capped at the L2 rating") {
    DailyTaskSchedule s = drive_only_schedule();
    ServiceTask peak;
    peak.power_w = {20000.0};  // above the 6.6 kW L2 rating
    peak.duration_h = 0.2;
    s.entries.push_back({Task::PeakShave, peak});
    PackSpec pack;
    const auto profile = compose_profile(s, VehicleSpec{}, pack, 1.0);
    const int tag = static_cast<int>(Task::PeakShave);
    double max_power = 0.0;
    for (std::size_t i = 0; i < profile.power_w.size(); ++i) {
        if (profile.task_tag[i] == tag) {
            max_power = std::max(max_power, std::fabs(profile.power_w[i]));
        }
    }
    CHECK(max_power <= pack.l2_power_w / pack.cells_count + 1e-9);
    CHECK(max_power > 0.0);
}

TEST_CASE("infeasible schedules are rejected") {
    // Solar/peak services truncate at the SOC window, so an overlong one
    // shrinks instead of overflowing; regulation keeps cycling inside the
    // window, so a 30 h block genuinely overruns the day.
    DailyTaskSchedule s = drive_only_schedule();
    ServiceTask forever;
    forever.power_w = {1000.0, -1000.0};
    forever.sample_period_s = 30.0;
    forever.duration_h = 30.0;
    s.entries.push_back({Task::FreqReg, forever});
    CHECK_THROWS_AS(compose_profile(s, VehicleSpec{}, PackSpec{}, 1.0),
                    ScheduleInfeasible);

    ServiceTask bounded;
    bounded.power_w = {1000.0};
    bounded.duration_h = 30.0;
    DailyTaskSchedule t = drive_only_schedule();
    t.entries.push_back({Task::PeakShave, bounded});
    CHECK_NOTHROW(compose_profile(t, VehicleSpec{}, PackSpec{}, 1.0));
}

TEST_CASE("observations from profiles carry duty anchors and drive channels") {
    const auto profile =
        compose_profile(drive_only_schedule(), VehicleSpec{}, PackSpec{}, 365.0);
    const Observation obs =
        observation_from_profile(profile, {296.15, 300.15}, "case");
    CHECK(obs.id == "case");
    CHECK(obs.q.empty());
    REQUIRE(obs.t.size() == 2);
    CHECK(obs.t[0] == doctest::Approx(296.15));
    REQUIRE(!obs.a.empty());
    CHECK(obs.a.size() == obs.v.size());
    for (double v : obs.v) CHECK(v > 0.0);
    CHECK(obs.duty.ah_ref == doctest::Approx(profile.total_ah));
    CHECK(obs.duty.ic_ref == doctest::Approx(profile.ic_ref));
    CHECK(obs.duty.soc_ref == doctest::Approx(profile.soc_time_avg));
    CHECK(obs.duty.ic_ref > 0.0);
    CHECK(obs.duty.ah_ref > 0.0);
    CHECK(obs.duty.soc_ref > 0.0);
    CHECK(obs.duty.soc_ref < 1.0);
}

TEST_CASE("climate observations convert Celsius and clone the base duty") {
    const auto profile =
        compose_profile(drive_only_schedule(), VehicleSpec{}, PackSpec{}, 365.0);
    const Observation base =
        observation_from_profile(profile, {296.15}, "base");
    const TimeSeries warm{{25.0, 25.0}, 3600.0};
    const auto set = climate_observations({{"phoenix", warm}, {"seattle", warm}}, base);
    REQUIRE(set.observations.size() == 2);
    CHECK(set.observations[0].id == "phoenix");
    CHECK(set.observations[1].id == "seattle");
    for (const auto& o : set.observations) {
        for (double t : o.t) CHECK(t == doctest::Approx(298.15));
        CHECK(o.duty.ah_ref == doctest::Approx(base.duty.ah_ref));
        CHECK(o.v == base.v);
    }
}

}  // TEST_SUITE
