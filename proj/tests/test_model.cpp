#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <doctest.h>

#include "battbayes/errors.hpp"
#include "battbayes/model.hpp"
#include "battbayes/sampler.hpp"
#include "helpers.hpp"

using namespace battbayes;
using battbayes::testing::tiny_init;
using battbayes::testing::tiny_set;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// A family-aware nudge that stays inside the variable's support.
double nudged(double x, Family family) {
    switch (family) {
        case Family::Beta:
            return x < 0.5 ? x + 0.013 : x - 0.013;
        case Family::Gamma:
        case Family::Rayleigh:
            return x * 1.07 + 1e-6;
        case Family::Normal:
            return x + 0.119 * (std::fabs(x) + 1.0);
    }
    return x;
}

}  // namespace

TEST_SUITE("model") {

TEST_CASE("fade law matches independent evaluations") {
    ParameterSet p;
    SUBCASE("zero throughput with positive exponent leaves only the offset") {
        p.zeta = 0.5;
        p.epsilon = 2.5;
        p.alpha = 7.0;
        p.beta = 3.0;
        p.ea = 31000.0;
        CHECK(fade_mean_f(p, 0.5, 1.0, 300.0, 0.0) == doctest::Approx(2.5).epsilon(1e-15));
    }
    SUBCASE("unit configuration isolates the Arrhenius factor") {
        p.alpha = 0.0;
        p.beta = 1.0;
        p.eta = 0.0;
        p.epsilon = 0.0;
        p.ea = 31000.0;
        p.zeta = 0.5;
        CHECK(fade_mean_f(p, 0.7, 1.0, 298.15, 1.0) ==
              doctest::Approx(3.704527074764382e-6).epsilon(1e-12));
    }
    SUBCASE("full parameter set") {
        p.alpha = 20000.0;
        p.beta = 33000.0;
        p.ea = 31700.0;
        p.eta = 370.0;
        p.zeta = 0.55;
        p.epsilon = 0.4;
        CHECK(fade_mean_f(p, 0.385, 2.82, 308.15, 1500.0) ==
              doctest::Approx(14.842532951722575).epsilon(1e-12));
    }
    SUBCASE("fade grows with temperature when ea dominates") {
        p.alpha = 20000.0;
        p.beta = 33000.0;
        p.ea = 31700.0;
        p.eta = 370.0;
        p.zeta = 0.55;
        CHECK(fade_mean_f(p, 0.4, 1.0, 310.0, 1000.0) >
              fade_mean_f(p, 0.4, 1.0, 296.0, 1000.0));
    }
}

TEST_CASE("battery current conversion") {
    CHECK(current_y(1000.0, 250.0, 2.3) == doctest::Approx(1.7391304347826089).epsilon(1e-14));
    CHECK(current_y(0.0, 250.0, 2.3) == 0.0);
    CHECK(current_y(-575.0, 250.0, 2.3) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK_THROWS_AS(current_y(100.0, 0.0, 2.3), DomainError);
    CHECK_THROWS_AS(current_y(100.0, 3.3, 0.0), DomainError);
}

TEST_CASE("battery power composition") {
    ParameterSet p;
    std::array<double, kNumTasks> pg{};
    SUBCASE("identity configuration returns the wheel power") {
        p.k[0] = 1.0;
        CHECK(battery_power_g(p, 123.0, 0.0, 1.0, pg) == doctest::Approx(123.0));
    }
    SUBCASE("single grid channel") {
        p.k[1] = 1.0;
        pg[1] = 3300.0;
        CHECK(battery_power_g(p, 0.0, 0.0, 1.0, pg) == doctest::Approx(3300.0));
    }
    SUBCASE("mixed channels") {
        p.k[0] = 0.286;
        p.k[2] = 0.18;
        pg[2] = 6600.0;
        CHECK(battery_power_g(p, 9000.0, 900.0, 0.9, pg) ==
              doctest::Approx(4305.4).epsilon(1e-12));
    }
    SUBCASE("zero efficiency is rejected") {
        CHECK_THROWS_AS(battery_power_g(p, 1.0, 1.0, 0.0, pg), DomainError);
    }
}

TEST_CASE("wheel power chain") {
    ParameterSet p;
    p.gamma_m = 1500.0;
    p.omega = 0.4;
    p.phi = 150.0;
    CHECK(wheel_power_h(p, 1.0, 10.0) == doctest::Approx(16900.0).epsilon(1e-12));
    CHECK(wheel_power_h(p, -1.0, 10.0) == doctest::Approx(-13100.0).epsilon(1e-12));
    CHECK(wheel_power_h(p, 5.0, 0.0) == 0.0);
}

TEST_CASE("variable names round-trip") {
    const std::size_t n_obs = 3;
    const std::vector<std::string> names = {
        "lambda[0]", "t_hat[2]", "a_hat[1]", "v_hat[0]", "ah[2]", "soc[1]",
        "ic[0]",     "u[1]",     "pb[2]",    "pw[0]",    "paux[1]", "delta",
        "alpha",     "beta",     "ea",       "eta",      "zeta",   "epsilon",
        "k1",        "k4",       "k7",       "gamma_m",  "omega",  "phi"};
    for (const auto& name : names) {
        CHECK(var_name(var_from_name(name, n_obs)) == name);
    }
    CHECK_THROWS_AS(var_from_name("lambda[3]", n_obs), UnknownVariable);
    CHECK_THROWS_AS(var_from_name("k0", n_obs), UnknownVariable);
    CHECK_THROWS_AS(var_from_name("k8", n_obs), UnknownVariable);
    CHECK_THROWS_AS(var_from_name("unknown_thing", n_obs), UnknownVariable);
}

TEST_CASE("globals and families are classified correctly") {
    CHECK(is_global(VarKind::Alpha));
    CHECK(is_global(VarKind::Delta));
    CHECK(is_global(VarKind::K));
    CHECK_FALSE(is_global(VarKind::Lambda));
    CHECK_FALSE(is_global(VarKind::Soc));
    CHECK(var_family(VarKind::Soc) == Family::Beta);
    CHECK(var_family(VarKind::Delta) == Family::Beta);
    CHECK(var_family(VarKind::Ic) == Family::Rayleigh);
    CHECK(var_family(VarKind::Lambda) == Family::Gamma);
    CHECK(var_family(VarKind::Pb) == Family::Normal);
    CHECK(var_family(VarKind::Epsilon) == Family::Normal);
}

TEST_CASE("state access by id") {
    const auto set = tiny_set();
    auto [lat, par] = tiny_init(set);
    const VarId lambda1{VarKind::Lambda, 1, -1};
    const double before = get_var(lambda1, lat, par);
    set_var(lambda1, before + 1.0, lat, par);
    CHECK(get_var(lambda1, lat, par) == before + 1.0);
    CHECK(lat.per_obs[1].lambda == before + 1.0);

    set_var({VarKind::K, -1, 3}, 0.25, lat, par);
    CHECK(par.k[3] == 0.25);

    CHECK_THROWS_AS(get_var({VarKind::Lambda, 5, -1}, lat, par), UnknownVariable);
    CHECK_THROWS_AS(get_var({VarKind::K, -1, 9}, lat, par), UnknownVariable);
}

TEST_CASE("observation sets are validated") {
    ObservationSet empty;
    CHECK_THROWS_AS(validate(empty, false), IncompleteSpec);
    ObservationSet bad = tiny_set();
    bad.observations[0].v.pop_back();  // unpair a/v
    CHECK_THROWS_AS(validate(bad, false), IncompleteSpec);
    ObservationSet no_fade = tiny_set();
    no_fade.observations[0].q.clear();
    CHECK_THROWS_AS(validate(no_fade, true), IncompleteSpec);
    CHECK_NOTHROW(validate(no_fade, false));
}

TEST_CASE("network construction and the initial state") {
    const auto set = tiny_set();
    auto [lat, par] = tiny_init(set);
    const BayesNet net(set, ModelConfig{}, par);

    SUBCASE("initial joint density is finite") {
        CHECK(std::isfinite(net.log_joint(lat, par)));
    }
    SUBCASE("initial fade mean reproduces the first observation") {
        const auto& o = set.observations[0];
        const double q_bar = (o.q[0] + o.q[1]) / 2.0;
        const double f = fade_mean_f(par, lat.per_obs[0].soc, lat.per_obs[0].ic,
                                     lat.per_obs[0].t_hat, lat.per_obs[0].ah);
        CHECK(f == doctest::Approx(q_bar).epsilon(1e-9));
    }
    SUBCASE("sampling order covers lambda..soc per observation, then globals") {
        const auto order = net.sampling_order();
        CHECK(order.size() == 11 * set.observations.size() + 1 + 6 + 7 + 3);
        CHECK(var_name(order.front()) == "lambda[0]");
        CHECK(var_name(order[11 * set.observations.size()]) == "delta");
        CHECK(var_name(order.back()) == "phi");
        // every id is unique
        std::vector<std::string> names;
        for (const auto& id : order) names.push_back(var_name(id));
        auto sorted = names;
        std::sort(sorted.begin(), sorted.end());
        CHECK(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end());
    }
    SUBCASE("reference specs are valid and family-consistent") {
        for (const auto& id : net.sampling_order()) {
            const DistSpec spec = net.reference_spec(id);
            CAPTURE(var_name(id));
            CHECK(spec_valid(spec));
            CHECK(spec.family == var_family(id.kind));
        }
    }
}

TEST_CASE("full conditionals track joint-density differences") {
    const auto set = tiny_set();
    auto [lat, par] = tiny_init(set);
    const BayesNet net(set, ModelConfig{}, par);
    const double lj0 = net.log_joint(lat, par);
    REQUIRE(std::isfinite(lj0));
    for (const auto& id : net.sampling_order()) {
        CAPTURE(var_name(id));
        const double x0 = get_var(id, lat, par);
        const double fc0 = net.log_full_conditional(id, lat, par);
        REQUIRE(std::isfinite(fc0));
        const double x1 = nudged(x0, var_family(id.kind));
        set_var(id, x1, lat, par);
        const double fc1 = net.log_full_conditional(id, lat, par);
        const double lj1 = net.log_joint(lat, par);
        const double d_fc = fc1 - fc0;
        const double d_lj = lj1 - lj0;
        CHECK(std::fabs(d_fc - d_lj) < 1e-8 * std::max(1.0, std::fabs(d_lj)));
        set_var(id, x0, lat, par);  // restore
    }
}

TEST_CASE("out-of-support states annihilate the density") {
    const auto set = tiny_set();
    auto [lat, par] = tiny_init(set);
    const BayesNet net(set, ModelConfig{}, par);
    LatentState bad = lat;
    bad.delta = 1.2;
    CHECK(net.log_full_conditional({VarKind::Delta, -1, -1}, bad, par) == -kInf);
    bad = lat;
    bad.per_obs[0].lambda = -1.0;
    CHECK(net.log_full_conditional({VarKind::Lambda, 0, -1}, bad, par) == -kInf);
}

TEST_CASE("fade-free observations still yield a usable network") {
    ObservationSet set = tiny_set();
    set.observations[0].q.clear();
    set.observations.resize(1);
    auto [lat, par] = tiny_init(set);
    const BayesNet net(set, ModelConfig{}, par);
    CHECK(std::isfinite(net.log_joint(lat, par)));
    CHECK(std::isfinite(
        net.log_full_conditional({VarKind::Lambda, 0, -1}, lat, par)));
}

TEST_CASE("parameter priors can be overridden by name") {
    ModelConfig cfg;
    cfg.param_priors["alpha"] = DistSpec{Family::Gamma, 5000.0, 1000.0};
    const auto set = tiny_set();
    auto [lat, par] = tiny_init(set, cfg);
    const BayesNet net(set, cfg, par);
    const DistSpec& prior = net.param_prior("alpha");
    CHECK(prior.mean == 5000.0);
    CHECK(prior.sd == 1000.0);
    CHECK_THROWS_AS(net.param_prior("nonexistent"), UnknownVariable);
}

}  // TEST_SUITE
