#include "battbayes/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>

#include <json.hpp>

#include "battbayes/errors.hpp"
#include "battbayes/posterior.hpp"
#include "battbayes/serialize.hpp"

namespace battbayes {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open JSON file: " + path);
    }
    try {
        return json::parse(in, nullptr, /*allow_exceptions=*/true, /*ignore_comments=*/true);
    } catch (const json::parse_error& e) {
        throw ParseError("bad JSON in " + path + ": " + e.what());
    }
}

// Paths inside a JSON file resolve against that file's directory.
std::string resolve(const fs::path& base_file, const std::string& maybe_rel) {
    if (maybe_rel.empty()) {
        return maybe_rel;
    }
    fs::path p(maybe_rel);
    if (p.is_absolute()) {
        return maybe_rel;
    }
    return (base_file.parent_path() / p).lexically_normal().string();
}

DistSpec parse_dist_spec(const json& j) {
    DistSpec spec;
    spec.family = family_from_name(j.at("family").get<std::string>());
    spec.mean = j.at("mean").get<double>();
    spec.sd = j.at("sd").get<double>();
    return spec;
}

CaseSpec parse_case(const json& j, const fs::path& base) {
    CaseSpec c;
    c.name = j.value("name", std::string{"fade"});
    c.schedule_path = resolve(base, j.value("schedule", std::string{}));
    if (j.contains("temps_c")) {
        for (const auto& t : j.at("temps_c")) {
            c.temps_c.push_back(t.get<double>());
        }
    }
    c.climate_csv = resolve(base, j.value("climate_csv", std::string{}));
    c.days = j.value("days", 365.0);
    return c;
}

void parse_model(const json& j, ModelConfig& m) {
    m.gas_constant = j.value("gas_constant", m.gas_constant);
    m.nominal_capacity_ah = j.value("nominal_capacity_ah", m.nominal_capacity_ah);
    m.initial_soc = j.value("initial_soc", m.initial_soc);
    if (j.contains("rayleigh_anchor")) {
        const auto anchor = j.at("rayleigh_anchor").get<std::string>();
        if (anchor == "mode") {
            m.rayleigh_anchor = RayleighAnchor::Mode;
        } else if (anchor == "mean") {
            m.rayleigh_anchor = RayleighAnchor::Mean;
        } else {
            throw SchemaError("rayleigh_anchor must be 'mode' or 'mean'");
        }
    }
    if (j.contains("sds")) {
        const auto& s = j.at("sds");
        auto& d = m.sds;
        d.q = s.value("q", d.q);
        d.lambda_rel = s.value("lambda_rel", d.lambda_rel);
        d.lambda_floor = s.value("lambda_floor", d.lambda_floor);
        d.t = s.value("t", d.t);
        d.a = s.value("a", d.a);
        d.v = s.value("v", d.v);
        d.pw_rel = s.value("pw_rel", d.pw_rel);
        d.pw_floor_w = s.value("pw_floor_w", d.pw_floor_w);
        d.pb_rel = s.value("pb_rel", d.pb_rel);
        d.pb_floor_w = s.value("pb_floor_w", d.pb_floor_w);
        d.ah_rel = s.value("ah_rel", d.ah_rel);
        d.ah_floor = s.value("ah_floor", d.ah_floor);
        d.ah_meter_rel = s.value("ah_meter_rel", d.ah_meter_rel);
        d.soc = s.value("soc", d.soc);
    }
    if (j.contains("priors")) {
        const auto& s = j.at("priors");
        auto& p = m.priors;
        p.t_hat_sd = s.value("t_hat_sd", p.t_hat_sd);
        p.a_hat_sd = s.value("a_hat_sd", p.a_hat_sd);
        p.v_hat_sd = s.value("v_hat_sd", p.v_hat_sd);
        p.v_hat_mean_floor = s.value("v_hat_mean_floor", p.v_hat_mean_floor);
        p.paux_frac = s.value("paux_frac", p.paux_frac);
        p.paux_sd_frac = s.value("paux_sd_frac", p.paux_sd_frac);
        p.paux_anchor_floor_w = s.value("paux_anchor_floor_w", p.paux_anchor_floor_w);
        p.delta_mean = s.value("delta_mean", p.delta_mean);
        p.delta_sd = s.value("delta_sd", p.delta_sd);
    }
    if (j.contains("param_priors")) {
        for (const auto& [name, spec] : j.at("param_priors").items()) {
            m.param_priors[name] = parse_dist_spec(spec);
        }
    }
}

void parse_vehicle(const json& j, VehicleSpec& v) {
    v.mass_kg = j.value("mass_kg", v.mass_kg);
    v.passenger_mass_kg = j.value("passenger_mass_kg", v.passenger_mass_kg);
    v.cx = j.value("cx", v.cx);
    v.af_m2 = j.value("af_m2", v.af_m2);
    v.fr = j.value("fr", v.fr);
    v.rho = j.value("rho", v.rho);
    v.grade_theta = j.value("grade_theta", v.grade_theta);
    v.gravity = j.value("gravity", v.gravity);
}

void parse_pack(const json& j, PackSpec& p) {
    p.cells_count = j.value("cells_count", p.cells_count);
    p.cell_nominal_v = j.value("cell_nominal_v", p.cell_nominal_v);
    p.cell_capacity_ah = j.value("cell_capacity_ah", p.cell_capacity_ah);
    p.efficiency = j.value("efficiency", p.efficiency);
    p.regen_fraction = j.value("regen_fraction", p.regen_fraction);
    p.aux_power_w = j.value("aux_power_w", p.aux_power_w);
    p.l1_power_w = j.value("l1_power_w", p.l1_power_w);
    p.l2_power_w = j.value("l2_power_w", p.l2_power_w);
    p.l3_power_w = j.value("l3_power_w", p.l3_power_w);
}

std::string sanitize(const std::string& name) {
    std::string out = name;
    for (char& c : out) {
        if (!std::isalnum(static_cast<unsigned char>(c))) {
            c = '_';
        }
    }
    return out.empty() ? std::string{"case"} : out;
}

// Summary that copes with short or frozen chains: falls back to raw moments
// with a min/max interval instead of refusing to write output files.
PosteriorSummary robust_summary(const Chain& chain) {
    try {
        return summarize(chain);
    } catch (const Error&) {
        PosteriorSummary s;
        s.variable = chain.variable;
        s.fitted.family = chain.family;
        const auto& xs = chain.samples;
        if (xs.empty()) {
            throw TooFewSamples("chain " + chain.variable + " is empty");
        }
        const std::size_t b = std::min(chain.burn_in_index, xs.size() - 1);
        std::vector<double> kept(xs.begin() + static_cast<std::ptrdiff_t>(b), xs.end());
        const double n = static_cast<double>(kept.size());
        s.mean = std::accumulate(kept.begin(), kept.end(), 0.0) / n;
        double ss = 0.0;
        for (double x : kept) {
            ss += (x - s.mean) * (x - s.mean);
        }
        s.sd = kept.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
        auto [lo, hi] = std::minmax_element(kept.begin(), kept.end());
        s.ci_low = *lo;
        s.ci_high = *hi;
        s.fitted.mean = s.mean;
        s.fitted.sd = s.sd;
        s.n_effective_samples = kept.size();
        return s;
    }
}

const std::vector<std::string>& parameter_names() {
    static const std::vector<std::string> names = {
        "alpha", "beta", "ea",      "eta", "zeta", "epsilon", "k1",   "k2", "k3", "k4",
        "k5",    "k6",   "k7",      "gamma_m",     "omega",   "phi",  "delta"};
    return names;
}

void write_fit_table(const std::string& path, const std::vector<std::string>& ids,
                     const std::vector<double>& measured, const std::vector<double>& estimated) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write fit table: " + path);
    }
    out << "id,measured,estimated\n";
    for (std::size_t i = 0; i < ids.size(); ++i) {
        out << ids[i] << ',' << fmt_full(measured[i]) << ',' << fmt_full(estimated[i]) << "\n";
    }
}

void write_metrics_file(const std::string& path, const FitMetrics& m) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write metrics: " + path);
    }
    out << "r_squared,rmsd_percent\n";
    out << fmt_full(m.r_squared) << ',' << fmt_full(m.rmsd_percent) << "\n";
}

}  // namespace

RunConfig load_run_config(const std::string& path) {
    const json j = load_json(path);
    if (!j.is_object()) {
        throw SchemaError("config root must be a JSON object: " + path);
    }
    RunConfig cfg;
    const fs::path base(path);
    try {
        cfg.training_csv = resolve(base, j.value("training_csv", std::string{}));
        // Output locations stay relative to the working directory so runs
        // from different places don't write into the config's directory.
        cfg.out_dir = j.value("out_dir", std::string{"out"});
        cfg.trained_dir = j.value("trained_dir", std::string{});

        cfg.sampler.iterations = j.value("iterations", cfg.sampler.iterations);
        cfg.sampler.burn_in_fraction = j.value("burn_in_fraction", cfg.sampler.burn_in_fraction);
        cfg.sampler.thinning = j.value("thinning", cfg.sampler.thinning);
        if (j.contains("seed")) {
            cfg.sampler.seed = j.at("seed").get<std::uint64_t>();
        } else if (const char* env = std::getenv("BATT_BAYES_SEED")) {
            try {
                cfg.sampler.seed = std::stoull(env);
            } catch (const std::exception&) {
                throw ConfigError("BATT_BAYES_SEED is not an integer");
            }
        }
        if (j.contains("tuning")) {
            const auto& t = j.at("tuning");
            cfg.sampler.global_step_fraction =
                t.value("global_step_fraction", cfg.sampler.global_step_fraction);
            cfg.sampler.latent_step_fraction =
                t.value("latent_step_fraction", cfg.sampler.latent_step_fraction);
            if (t.contains("sds")) {
                for (const auto& [name, sd] : t.at("sds").items()) {
                    cfg.sampler.tuning_sds[name] = sd.get<double>();
                }
            }
        }

        cfg.split_ratio = j.value("split_ratio", cfg.split_ratio);
        cfg.split_mode = split_mode_from_name(j.value("split_mode", std::string{"random"}));

        if (j.contains("model")) {
            parse_model(j.at("model"), cfg.model);
        }
        if (j.contains("vehicle")) {
            parse_vehicle(j.at("vehicle"), cfg.vehicle);
        }
        if (j.contains("pack")) {
            parse_pack(j.at("pack"), cfg.pack);
        }
        cfg.training_cells_count = j.value("training_cells_count", cfg.training_cells_count);
        cfg.write_latent_chains = j.value("write_latent_chains", cfg.write_latent_chains);

        if (j.contains("estimate")) {
            cfg.estimate = parse_case(j.at("estimate"), base);
        }
        if (j.contains("scenarios")) {
            for (const auto& s : j.at("scenarios")) {
                cfg.scenarios.push_back(parse_case(s, base));
            }
        }
    } catch (const json::exception& e) {
        throw SchemaError("config error in " + path + ": " + e.what());
    }
    if (cfg.trained_dir.empty()) {
        cfg.trained_dir = cfg.out_dir;
    }
    return cfg;
}

DailyTaskSchedule load_schedule(const std::string& path) {
    const json j = load_json(path);
    if (!j.is_object()) {
        throw SchemaError("schedule root must be a JSON object: " + path);
    }
    const fs::path base(path);
    DailyTaskSchedule s;
    try {
        s.soc_min = j.value("soc_min", s.soc_min);
        s.soc_max = j.value("soc_max", s.soc_max);
        s.soc_initial = j.value("soc_initial", s.soc_initial);
        s.topup_charger = charger_from_name(j.value("topup_charger", std::string{"L2"}));
        if (!j.contains("entries")) {
            throw SchemaError("schedule lacks an entries list: " + path);
        }
        for (const auto& e : j.at("entries")) {
            ScheduleEntry entry;
            entry.task = task_from_name(e.at("task").get<std::string>());
            switch (entry.task) {
                case Task::Driving: {
                    DriveSession d;
                    if (e.contains("cycle_csv")) {
                        d.v = read_time_series(resolve(base, e.at("cycle_csv")));
                        d.a = e.contains("accel_csv")
                                  ? read_time_series(resolve(base, e.at("accel_csv")))
                                  : derive_acceleration(d.v);
                    } else {
                        d = synth_drive_cycle(e.value("synth_seed", std::uint64_t{1}),
                                              e.value("duration_s", 900.0),
                                              e.value("aggressiveness", 1.0));
                    }
                    entry.action = std::move(d);
                    break;
                }
                case Task::ChargeL1:
                case Task::ChargeL2:
                case Task::ChargeL3: {
                    ChargingEvent c;
                    c.charger = entry.task == Task::ChargeL1   ? Charger::L1
                                : entry.task == Task::ChargeL2 ? Charger::L2
                                                               : Charger::L3;
                    c.power_w = e.value("power_w", 0.0);
                    c.duration_h = e.at("duration_h").get<double>();
                    entry.action = c;
                    break;
                }
                default: {
                    ServiceTask t;
                    t.duration_h = e.at("duration_h").get<double>();
                    t.repeat = repeat_from_name(e.value("repeat", std::string{"daily"}));
                    if (e.contains("power_csv")) {
                        TimeSeries ts = read_time_series(resolve(base, e.at("power_csv")));
                        t.power_w = std::move(ts.values);
                        t.sample_period_s = ts.sample_period_s;
                    } else if (e.contains("square_w")) {
                        // Symmetric square wave: +P for half a period, -P for
                        // the other half (frequency-regulation shape).
                        const double p = e.at("square_w").get<double>();
                        const auto period =
                            static_cast<std::size_t>(e.value("period_s", 60.0));
                        t.sample_period_s = 1.0;
                        t.power_w.resize(std::max<std::size_t>(period, 2));
                        for (std::size_t k = 0; k < t.power_w.size(); ++k) {
                            t.power_w[k] = (k < t.power_w.size() / 2) ? p : -p;
                        }
                    } else {
                        t.power_w = {e.at("power_w").get<double>()};
                    }
                    entry.action = std::move(t);
                    break;
                }
            }
            s.entries.push_back(std::move(entry));
        }
    } catch (const json::exception& e) {
        throw SchemaError("schedule error in " + path + ": " + e.what());
    }
    return s;
}

namespace {

std::vector<double> reduce_channel(const std::vector<double>& values, double threshold) {
    if (values.size() < 2) {
        return values;
    }
    TimeSeries series{values, 1.0};
    std::size_t lag;
    try {
        lag = decorrelation_lag(series, threshold);
    } catch (const Error&) {
        return values;  // constant or too-short series: nothing to reduce
    }
    if (lag <= 1) {
        return values;
    }
    return block_average(series, lag).values;
}

}  // namespace

Observation reduce_observation(const Observation& raw, double autocorr_threshold) {
    Observation o = raw;
    o.t = reduce_channel(raw.t, autocorr_threshold);
    // The acceleration lag governs the paired velocity channel so the two
    // stay aligned sample-for-sample.
    if (raw.a.size() >= 2 && raw.a.size() == raw.v.size()) {
        TimeSeries a{raw.a, 1.0};
        std::size_t lag = 1;
        try {
            lag = decorrelation_lag(a, autocorr_threshold);
        } catch (const Error&) {
            lag = 1;
        }
        if (lag > 1) {
            o.a = block_average(a, lag).values;
            o.v = block_average(TimeSeries{raw.v, 1.0}, lag).values;
        }
    }
    return o;
}

void run_train(const RunConfig& cfg) {
    if (cfg.training_csv.empty()) {
        throw ConfigError("config lacks training_csv");
    }
    std::vector<std::string> warnings;
    const auto records = load_training_set(cfg.training_csv, &warnings);
    for (const auto& w : warnings) {
        std::cerr << "warning: " << w << "\n";
    }
    const auto points = flatten(records);
    const auto parts = split(points, cfg.split_ratio, cfg.split_mode, cfg.sampler.seed);
    const auto train_obs = observations_from_points(parts.train, cfg.model, cfg.vehicle,
                                                    cfg.training_cells_count);
    TaskShares shares{};
    shares.share[static_cast<std::size_t>(Task::Driving)] = 1.0;
    auto [lat, par] = init_state(train_obs, cfg.vehicle, shares, cfg.model,
                                 cfg.training_cells_count);
    const BayesNet net(train_obs, cfg.model, par);
    const auto chains = run_mcmc(net, lat, par, cfg.sampler);

    fs::create_directories(cfg.out_dir);
    const fs::path out(cfg.out_dir);
    write_training_set((out / "train_points.csv").string(), records_from_points(parts.train),
                       "training-side split");
    write_training_set((out / "test_points.csv").string(), records_from_points(parts.test),
                       "held-out split");

    std::map<std::string, Chain> keep;
    for (const auto& [name, chain] : chains) {
        const bool global = name.find('[') == std::string::npos;
        const bool fade_latent = name.rfind("lambda[", 0) == 0;
        if (cfg.write_latent_chains || global || fade_latent) {
            keep.emplace(name, chain);
        }
    }
    write_chain_set((out / "chains").string(), keep);

    std::vector<PosteriorSummary> rows;
    for (const auto& name : parameter_names()) {
        rows.push_back(robust_summary(chains.at(name)));
    }
    write_summaries((out / "parameters.csv").string(), rows);

    // In-sample fade fit: posterior mean of each point's fade node against
    // the measured replicate mean.
    std::vector<std::string> ids;
    std::vector<double> measured;
    std::vector<double> estimated;
    for (std::size_t i = 0; i < parts.train.size(); ++i) {
        ids.push_back(train_obs.observations[i].id);
        measured.push_back(mean_fade(parts.train[i]));
        estimated.push_back(robust_summary(chains.at("lambda[" + std::to_string(i) + "]")).mean);
    }
    write_fit_table((out / "train_fit.csv").string(), ids, measured, estimated);
    try {
        write_metrics_file((out / "train_metrics.csv").string(),
                           metrics(estimated, measured));
    } catch (const DegenerateData&) {
        // single-point or constant training sets have no meaningful R^2
    }
}

namespace {

void require_trained(const fs::path& probe, const std::string& what) {
    if (!fs::exists(probe)) {
        throw ConfigError("missing trained parameters: expected " + probe.string() +
                          " — run train into this directory first (" + what + ")");
    }
}

}  // namespace

void run_test(const RunConfig& cfg) {
    const fs::path trained(cfg.trained_dir);
    require_trained(trained / "chains" / "index.csv", "parameter chains");
    require_trained(trained / "test_points.csv", "held-out split");
    const auto chains = read_chain_set((trained / "chains").string());
    static const char* kFadeParams[] = {"alpha", "beta", "ea", "eta", "zeta", "epsilon"};
    std::size_t n_draws = SIZE_MAX;
    for (const char* name : kFadeParams) {
        auto it = chains.find(name);
        if (it == chains.end()) {
            throw ConfigError("missing trained parameters: no chain for " + std::string(name));
        }
        const Chain& c = it->second;
        if (c.burn_in_index >= c.samples.size()) {
            throw TooFewSamples("trained chain for " + std::string(name) +
                                " has no retained samples");
        }
        n_draws = std::min(n_draws, c.samples.size() - c.burn_in_index);
    }
    auto draw_of = [&](const char* name, std::size_t s) {
        const Chain& c = chains.at(name);
        return c.samples[c.burn_in_index + s];
    };

    const auto test_points = flatten(load_training_set((trained / "test_points.csv").string()));
    RandomStream predictive = RandomStream::substream(cfg.sampler.seed, 4);

    fs::create_directories(cfg.out_dir);
    const fs::path out(cfg.out_dir);
    std::vector<PosteriorSummary> rows;
    std::vector<std::string> ids;
    std::vector<double> measured;
    std::vector<double> estimated;
    for (const auto& point : test_points) {
        Chain pc;
        pc.variable = point.cell_id + "@" + fmt_full(point.ah);
        pc.family = Family::Gamma;
        pc.seed = cfg.sampler.seed;
        pc.burn_in_index = 0;
        pc.samples.reserve(n_draws);
        const double t_k = point.temp_c + 273.15;
        const double soc = std::clamp(point.soc_avg / 100.0, 0.0, 1.0);
        for (std::size_t s = 0; s < n_draws; ++s) {
            ParameterSet p;
            p.alpha = draw_of("alpha", s);
            p.beta = draw_of("beta", s);
            p.ea = draw_of("ea", s);
            p.eta = draw_of("eta", s);
            p.zeta = draw_of("zeta", s);
            p.epsilon = draw_of("epsilon", s);
            const double f =
                fade_mean_f(p, soc, point.c_rate, t_k, point.ah, cfg.model.gas_constant);
            // Total predictive uncertainty: the fade node's process spread
            // around the fade-law mean, when that mean admits it.
            const DistSpec noise{
                Family::Gamma, f,
                std::max(cfg.model.sds.lambda_rel * f, cfg.model.sds.lambda_floor)};
            pc.samples.push_back(spec_valid(noise) ? draw(noise, predictive) : f);
        }
        rows.push_back(robust_summary(pc));
        ids.push_back(pc.variable);
        measured.push_back(mean_fade(point));
        estimated.push_back(rows.back().mean);
    }
    write_summaries((out / "test_summary.csv").string(), rows);
    write_fit_table((out / "test_estimates.csv").string(), ids, measured, estimated);
    try {
        write_metrics_file((out / "test_metrics.csv").string(), metrics(estimated, measured));
    } catch (const DegenerateData&) {
        // a single held-out point (or constant fades) has no meaningful R^2
    }
}

namespace {

struct TrainedPosterior {
    std::map<std::string, DistSpec> priors;  // duty-independent parameters
    ParameterSet means;
    double delta = 0.9;
};

TrainedPosterior load_trained(const std::string& trained_dir) {
    const fs::path path = fs::path(trained_dir) / "parameters.csv";
    require_trained(path, "parameter summaries");
    const auto rows = read_summaries(path.string());
    std::map<std::string, PosteriorSummary> by_name;
    for (const auto& r : rows) {
        by_name[r.variable] = r;
    }
    static const char* kReusable[] = {"alpha", "beta",    "ea",    "eta",  "zeta",
                                      "epsilon", "gamma_m", "omega", "phi", "delta"};
    TrainedPosterior out;
    for (const char* name : kReusable) {
        auto it = by_name.find(name);
        if (it == by_name.end()) {
            throw ConfigError("missing trained parameters: no summary row for " +
                              std::string(name));
        }
        DistSpec spec = it->second.fitted;
        if (!spec_valid(spec)) {
            // frozen chain: widen to a small fraction of the mean
            spec.sd = std::max(std::fabs(spec.mean) * 0.01, 1e-6);
        }
        out.priors[name] = spec;
    }
    out.means.alpha = out.priors.at("alpha").mean;
    out.means.beta = out.priors.at("beta").mean;
    out.means.ea = out.priors.at("ea").mean;
    out.means.eta = out.priors.at("eta").mean;
    out.means.zeta = out.priors.at("zeta").mean;
    out.means.epsilon = out.priors.at("epsilon").mean;
    out.means.gamma_m = out.priors.at("gamma_m").mean;
    out.means.omega = out.priors.at("omega").mean;
    out.means.phi = out.priors.at("phi").mean;
    out.delta = std::clamp(out.priors.at("delta").mean, 0.01, 0.99);
    return out;
}

// Full network re-inference of one composed duty against the trained
// posterior; returns the fade summary and writes the case's density table.
PosteriorSummary run_case(const RunConfig& cfg, const CaseSpec& c, const std::string& pdf_path,
                          TaskShares* shares_out) {
    if (c.schedule_path.empty()) {
        throw ConfigError("case '" + c.name + "' lacks a schedule");
    }
    const DailyTaskSchedule schedule = load_schedule(c.schedule_path);
    const ComposedProfile profile = compose_profile(schedule, cfg.vehicle, cfg.pack, c.days);
    const TaskShares shares = task_shares(profile);
    if (shares_out) {
        *shares_out = shares;
    }

    std::vector<double> temps_k;
    if (!c.climate_csv.empty()) {
        for (double t : read_time_series(c.climate_csv).values) {
            temps_k.push_back(t + 273.15);
        }
    } else if (!c.temps_c.empty()) {
        for (double t : c.temps_c) {
            temps_k.push_back(t + 273.15);
        }
    } else {
        temps_k.push_back(296.15);
    }

    Observation obs = reduce_observation(observation_from_profile(profile, temps_k, c.name));
    ObservationSet set;
    set.observations.push_back(std::move(obs));

    const TrainedPosterior trained = load_trained(cfg.trained_dir);
    ModelConfig mc = cfg.model;
    for (const auto& [name, spec] : trained.priors) {
        if (name != "delta") {
            mc.param_priors[name] = spec;
        }
    }
    mc.param_priors["delta"] = trained.priors.at("delta");

    auto [lat, par] = init_state(set, cfg.vehicle, shares, mc, cfg.pack.cells_count);
    par.alpha = trained.means.alpha;
    par.beta = trained.means.beta;
    par.ea = trained.means.ea;
    par.eta = trained.means.eta;
    par.zeta = trained.means.zeta;
    par.epsilon = trained.means.epsilon;
    par.gamma_m = trained.means.gamma_m;
    par.omega = trained.means.omega;
    par.phi = trained.means.phi;
    lat.delta = trained.delta;
    auto& ol = lat.per_obs[0];
    ol.lambda = std::max(
        fade_mean_f(par, ol.soc, ol.ic, ol.t_hat, ol.ah, mc.gas_constant), 0.05);

    const BayesNet net(set, mc, par);
    const auto chains = run_mcmc(net, lat, par, cfg.sampler);
    PosteriorSummary sum = robust_summary(chains.at("lambda[0]"));
    sum.variable = c.name;
    if (spec_valid(sum.fitted)) {
        write_pdf_curve(pdf_path, pdf_curve(sum.fitted, 257));
    }
    return sum;
}

void write_shares(const std::string& path,
                  const std::vector<std::pair<std::string, TaskShares>>& rows) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write task shares: " + path);
    }
    out << "case,task,share\n";
    for (const auto& [name, shares] : rows) {
        for (int t = 0; t < kNumTasks; ++t) {
            out << name << ',' << task_name(static_cast<Task>(t)) << ','
                << fmt_full(shares.share[static_cast<std::size_t>(t)]) << "\n";
        }
    }
}

}  // namespace

void run_estimate(const RunConfig& cfg) {
    fs::create_directories(cfg.out_dir);
    const fs::path out(cfg.out_dir);
    TaskShares shares{};
    const PosteriorSummary sum =
        run_case(cfg, cfg.estimate, (out / "estimate_pdf.csv").string(), &shares);
    write_summaries((out / "estimate_summary.csv").string(), {sum});
    write_shares((out / "estimate_shares.csv").string(), {{cfg.estimate.name, shares}});
}

void run_scenario(const RunConfig& cfg) {
    if (cfg.scenarios.empty()) {
        throw ConfigError("config lists no scenarios");
    }
    fs::create_directories(cfg.out_dir);
    const fs::path out(cfg.out_dir);
    std::vector<PosteriorSummary> rows;
    std::vector<std::pair<std::string, TaskShares>> shares_rows;
    for (const auto& c : cfg.scenarios) {
        TaskShares shares{};
        const std::string pdf =
            (out / ("scenario_" + sanitize(c.name) + "_pdf.csv")).string();
        rows.push_back(run_case(cfg, c, pdf, &shares));
        shares_rows.emplace_back(c.name, shares);
    }
    write_summaries((out / "scenario_summary.csv").string(), rows);
    write_shares((out / "scenario_shares.csv").string(), shares_rows);
}

}  // namespace battbayes
