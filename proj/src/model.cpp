#include "battbayes/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "battbayes/errors.hpp"
#include "battbayes/preprocess.hpp"

namespace battbayes {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kRayleighMeanPerScale = 1.2533141373155003;  // sqrt(pi/2)
constexpr double kRayleighSdPerMean = 0.5227232351330608;     // sqrt(4/pi - 1)

// log_pdf that folds state-induced invalid moments into -infinity instead of
// throwing; full conditionals use this everywhere.
double safe_lp(const DistSpec& spec, double x) {
    if (!spec_valid(spec)) {
        return -kInf;
    }
    return log_pdf(spec, x);
}

// Fade law without domain checks: returns NaN where the public op would
// throw, so conditionals can treat excursions as zero-density states.
double fade_mean_core(const ParameterSet& p, double soc, double ic, double t_kelvin, double ah,
                      double gas_constant) noexcept {
    if (!(t_kelvin > 0.0) || !(ah >= 0.0) || !(ic >= 0.0) || !(soc >= 0.0 && soc <= 1.0)) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    double stress = (p.alpha * soc + p.beta) *
                    std::exp(-(p.ea - p.eta * ic) / (gas_constant * t_kelvin));
    return stress * std::pow(ah, p.zeta) + p.epsilon;
}

double channel_normal(const std::vector<double>& xs, double center, double sd) {
    double acc = 0.0;
    DistSpec spec{Family::Normal, center, sd};
    for (double x : xs) {
        acc += safe_lp(spec, x);
    }
    return acc;
}

double channel_gamma(const std::vector<double>& xs, double center, double sd) {
    double acc = 0.0;
    DistSpec spec{Family::Gamma, center, sd};
    for (double x : xs) {
        acc += safe_lp(spec, x);
        if (acc == -kInf) {
            return acc;
        }
    }
    return acc;
}

DistSpec gamma_or_default(double center, double rel_sd, double floor_center = 1e-3) {
    double mean = std::max(center, floor_center);
    return DistSpec{Family::Gamma, mean, rel_sd * mean};
}

}  // namespace

const char* task_name(Task t) noexcept {
    switch (t) {
        case Task::Driving:
            return "driving";
        case Task::ChargeL1:
            return "charge_l1";
        case Task::ChargeL2:
            return "charge_l2";
        case Task::ChargeL3:
            return "charge_l3";
        case Task::Solar:
            return "solar";
        case Task::FreqReg:
            return "freq_reg";
        case Task::PeakShave:
            return "peak_shave";
    }
    return "unknown";
}

Task task_from_name(std::string_view name) {
    for (int i = 0; i < kNumTasks; ++i) {
        if (name == task_name(static_cast<Task>(i))) {
            return static_cast<Task>(i);
        }
    }
    throw ParseError("unknown task: " + std::string(name));
}

void validate(const ObservationSet& set, bool require_fade) {
    if (set.observations.empty()) {
        throw IncompleteSpec("observation set is empty");
    }
    for (const auto& o : set.observations) {
        auto all_finite = [](const std::vector<double>& xs) {
            return std::all_of(xs.begin(), xs.end(), [](double x) { return std::isfinite(x); });
        };
        if (o.t.empty() || o.a.empty() || o.v.empty()) {
            throw IncompleteSpec("observation " + o.id +
                                 " is missing a temperature/acceleration/velocity channel");
        }
        if (o.a.size() != o.v.size()) {
            throw IncompleteSpec("observation " + o.id +
                                 " has unpaired acceleration/velocity channels");
        }
        if (require_fade && o.q.empty()) {
            throw IncompleteSpec("observation " + o.id + " has no fade measurements");
        }
        if (!all_finite(o.q) || !all_finite(o.t) || !all_finite(o.a) || !all_finite(o.v)) {
            throw DomainError("observation " + o.id + " contains non-finite samples");
        }
        for (double qj : o.q) {
            if (qj < 0.0 || qj > 100.0) {
                throw DomainError("observation " + o.id + " has fade outside [0, 100] %");
            }
        }
        for (double tk : o.t) {
            if (tk <= 0.0) {
                throw DomainError("observation " + o.id + " has a non-positive temperature");
            }
        }
        for (double vs : o.v) {
            if (vs <= 0.0) {
                throw DomainError("observation " + o.id +
                                  " has a non-positive velocity sample");
            }
        }
        const auto& d = o.duty;
        if (!(d.ic_ref > 0.0) || !(d.ah_ref > 0.0)) {
            throw IncompleteSpec("observation " + o.id + " needs positive duty anchors");
        }
        if (!(d.soc_ref > 0.0 && d.soc_ref < 1.0) ||
            !(d.soc_initial > 0.0 && d.soc_initial < 1.0)) {
            throw DomainError("observation " + o.id + " has SOC anchors outside (0, 1)");
        }
        if (!(o.u_prior_mean > 0.0) || !(o.u_prior_sd > 0.0)) {
            throw DomainError("observation " + o.id + " has an invalid voltage prior");
        }
    }
}

double fade_mean_f(const ParameterSet& p, double soc, double ic, double t_kelvin, double ah,
                   double gas_constant) {
    if (!(t_kelvin > 0.0)) {
        throw DomainError("fade law needs a positive temperature");
    }
    if (!(ah >= 0.0)) {
        throw DomainError("fade law needs non-negative throughput");
    }
    if (!(ic >= 0.0)) {
        throw DomainError("fade law needs a non-negative C-rate");
    }
    if (!(soc >= 0.0 && soc <= 1.0)) {
        throw DomainError("fade law needs SOC in [0, 1]");
    }
    return fade_mean_core(p, soc, ic, t_kelvin, ah, gas_constant);
}

double current_y(double pb_w, double u_v, double nominal_capacity_ah) {
    if (!(u_v > 0.0)) {
        throw DomainError("C-rate conversion needs a positive voltage");
    }
    if (!(nominal_capacity_ah > 0.0)) {
        throw DomainError("C-rate conversion needs a positive capacity");
    }
    return std::fabs(pb_w) / u_v / nominal_capacity_ah;
}

double battery_power_g(const ParameterSet& p, double pw_w, double paux_w, double delta,
                       const std::array<double, kNumTasks>& grid_powers) {
    if (!(delta > 0.0)) {
        throw DomainError("battery power needs a positive drivetrain efficiency");
    }
    double g = p.k[0] * (pw_w / delta + paux_w);
    for (int n = 1; n < kNumTasks; ++n) {
        g += p.k[n] * grid_powers[n];
    }
    return g;
}

double wheel_power_h(const ParameterSet& p, double a_hat, double v_hat) {
    return p.gamma_m * a_hat * v_hat + p.omega * v_hat * v_hat * v_hat + p.phi * v_hat;
}

bool is_global(VarKind kind) noexcept {
    switch (kind) {
        case VarKind::Lambda:
        case VarKind::THat:
        case VarKind::AHat:
        case VarKind::VHat:
        case VarKind::Ah:
        case VarKind::Soc:
        case VarKind::Ic:
        case VarKind::U:
        case VarKind::Pb:
        case VarKind::Pw:
        case VarKind::Paux:
            return false;
        default:
            return true;
    }
}

Family var_family(VarKind kind) noexcept {
    switch (kind) {
        case VarKind::Lambda:
        case VarKind::VHat:
        case VarKind::Ah:
        case VarKind::U:
        case VarKind::Paux:
        case VarKind::Alpha:
        case VarKind::Beta:
        case VarKind::Ea:
        case VarKind::Eta:
        case VarKind::Zeta:
        case VarKind::K:
        case VarKind::GammaM:
        case VarKind::Omega:
        case VarKind::Phi:
            return Family::Gamma;
        case VarKind::THat:
        case VarKind::AHat:
        case VarKind::Pb:
        case VarKind::Pw:
        case VarKind::Epsilon:
            return Family::Normal;
        case VarKind::Soc:
        case VarKind::Delta:
            return Family::Beta;
        case VarKind::Ic:
            return Family::Rayleigh;
    }
    return Family::Normal;
}

namespace {

const char* kind_stem(VarKind kind) {
    switch (kind) {
        case VarKind::Lambda:
            return "lambda";
        case VarKind::THat:
            return "t_hat";
        case VarKind::AHat:
            return "a_hat";
        case VarKind::VHat:
            return "v_hat";
        case VarKind::Ah:
            return "ah";
        case VarKind::Soc:
            return "soc";
        case VarKind::Ic:
            return "ic";
        case VarKind::U:
            return "u";
        case VarKind::Pb:
            return "pb";
        case VarKind::Pw:
            return "pw";
        case VarKind::Paux:
            return "paux";
        case VarKind::Delta:
            return "delta";
        case VarKind::Alpha:
            return "alpha";
        case VarKind::Beta:
            return "beta";
        case VarKind::Ea:
            return "ea";
        case VarKind::Eta:
            return "eta";
        case VarKind::Zeta:
            return "zeta";
        case VarKind::Epsilon:
            return "epsilon";
        case VarKind::K:
            return "k";
        case VarKind::GammaM:
            return "gamma_m";
        case VarKind::Omega:
            return "omega";
        case VarKind::Phi:
            return "phi";
    }
    return "unknown";
}

}  // namespace

std::string var_name(const VarId& id) {
    if (id.kind == VarKind::K) {
        return "k" + std::to_string(id.task + 1);
    }
    if (is_global(id.kind)) {
        return kind_stem(id.kind);
    }
    return std::string(kind_stem(id.kind)) + "[" + std::to_string(id.obs) + "]";
}

VarId var_from_name(const std::string& name, std::size_t n_obs) {
    if (name.size() == 2 && name[0] == 'k' && name[1] >= '1' && name[1] <= '7') {
        return VarId{VarKind::K, -1, name[1] - '1'};
    }
    auto bracket = name.find('[');
    std::string stem = name.substr(0, bracket);
    static const std::pair<const char*, VarKind> kKinds[] = {
        {"lambda", VarKind::Lambda}, {"t_hat", VarKind::THat},   {"a_hat", VarKind::AHat},
        {"v_hat", VarKind::VHat},    {"ah", VarKind::Ah},        {"soc", VarKind::Soc},
        {"ic", VarKind::Ic},         {"u", VarKind::U},          {"pb", VarKind::Pb},
        {"pw", VarKind::Pw},         {"paux", VarKind::Paux},    {"delta", VarKind::Delta},
        {"alpha", VarKind::Alpha},   {"beta", VarKind::Beta},    {"ea", VarKind::Ea},
        {"eta", VarKind::Eta},       {"zeta", VarKind::Zeta},    {"epsilon", VarKind::Epsilon},
        {"gamma_m", VarKind::GammaM}, {"omega", VarKind::Omega}, {"phi", VarKind::Phi},
    };
    for (const auto& [text, kind] : kKinds) {
        if (stem == text) {
            if (is_global(kind)) {
                if (bracket != std::string::npos) {
                    throw UnknownVariable("global variable " + stem + " takes no index");
                }
                return VarId{kind, -1, -1};
            }
            if (bracket == std::string::npos || name.back() != ']') {
                throw UnknownVariable("per-observation variable " + stem + " needs an index");
            }
            int idx = std::stoi(name.substr(bracket + 1, name.size() - bracket - 2));
            if (idx < 0 || static_cast<std::size_t>(idx) >= n_obs) {
                throw UnknownVariable("observation index out of range in " + name);
            }
            return VarId{kind, idx, -1};
        }
    }
    throw UnknownVariable("unknown variable: " + name);
}

namespace {

double* var_slot(const VarId& id, LatentState& lat, ParameterSet& par) {
    if (!is_global(id.kind)) {
        if (id.obs < 0 || static_cast<std::size_t>(id.obs) >= lat.per_obs.size()) {
            throw UnknownVariable("observation index out of range for " + var_name(id));
        }
        auto& ol = lat.per_obs[static_cast<std::size_t>(id.obs)];
        switch (id.kind) {
            case VarKind::Lambda:
                return &ol.lambda;
            case VarKind::THat:
                return &ol.t_hat;
            case VarKind::AHat:
                return &ol.a_hat;
            case VarKind::VHat:
                return &ol.v_hat;
            case VarKind::Ah:
                return &ol.ah;
            case VarKind::Soc:
                return &ol.soc;
            case VarKind::Ic:
                return &ol.ic;
            case VarKind::U:
                return &ol.u;
            case VarKind::Pb:
                return &ol.pb;
            case VarKind::Pw:
                return &ol.pw;
            case VarKind::Paux:
                return &ol.paux;
            default:
                break;
        }
    }
    switch (id.kind) {
        case VarKind::Delta:
            return &lat.delta;
        case VarKind::Alpha:
            return &par.alpha;
        case VarKind::Beta:
            return &par.beta;
        case VarKind::Ea:
            return &par.ea;
        case VarKind::Eta:
            return &par.eta;
        case VarKind::Zeta:
            return &par.zeta;
        case VarKind::Epsilon:
            return &par.epsilon;
        case VarKind::K:
            if (id.task < 0 || id.task >= kNumTasks) {
                throw UnknownVariable("task index out of range for k weight");
            }
            return &par.k[static_cast<std::size_t>(id.task)];
        case VarKind::GammaM:
            return &par.gamma_m;
        case VarKind::Omega:
            return &par.omega;
        case VarKind::Phi:
            return &par.phi;
        default:
            break;
    }
    throw UnknownVariable("unaddressable variable kind");
}

}  // namespace

double get_var(const VarId& id, const LatentState& lat, const ParameterSet& par) {
    return *var_slot(id, const_cast<LatentState&>(lat), const_cast<ParameterSet&>(par));
}

void set_var(const VarId& id, double value, LatentState& lat, ParameterSet& par) {
    *var_slot(id, lat, par) = value;
}

BayesNet::BayesNet(ObservationSet data, ModelConfig cfg, const ParameterSet& init_centers)
    : data_(std::move(data)), cfg_(std::move(cfg)) {
    validate(data_, /*require_fade=*/false);
    const auto& pr = cfg_.priors;
    anchors_.reserve(data_.observations.size());
    for (const auto& o : data_.observations) {
        ObsAnchors an;
        an.t_prior = DistSpec{Family::Normal, mean_of(o.t), pr.t_hat_sd};
        an.a_prior = DistSpec{Family::Normal, mean_of(o.a), pr.a_hat_sd};
        an.v_prior = DistSpec{Family::Gamma, std::max(mean_of(o.v), pr.v_hat_mean_floor),
                              pr.v_hat_sd};
        an.u_prior = DistSpec{Family::Gamma, o.u_prior_mean, o.u_prior_sd};
        double drive_w = std::max(std::fabs(o.grid_powers[0]), pr.paux_anchor_floor_w);
        an.paux_prior = DistSpec{Family::Gamma, pr.paux_frac * drive_w,
                                 pr.paux_sd_frac * drive_w};
        an.soc_sd = cfg_.sds.soc;
        anchors_.push_back(an);
    }

    delta_prior_ = DistSpec{Family::Beta, pr.delta_mean, pr.delta_sd};
    if (auto it = cfg_.param_priors.find("delta"); it != cfg_.param_priors.end()) {
        delta_prior_ = it->second;
    }
    validate_spec(delta_prior_);

    // Complete the parameter priors: explicit config entries win, everything
    // else is centered on the initial value with a family-appropriate spread.
    auto put = [&](const std::string& name, DistSpec fallback) {
        auto it = cfg_.param_priors.find(name);
        DistSpec spec = (it != cfg_.param_priors.end()) ? it->second : fallback;
        validate_spec(spec);
        param_priors_[name] = spec;
    };
    // Prior confidence in the fade-law centers tracks what the duty design
    // can identify. Three or more distinct duties pin the prefactor constants
    // exactly, so the initializer's solve for (alpha, beta, ea, eta) deserves
    // tight spreads there; repeated throughput levels within a duty pin the
    // exponent the same way. Sparse designs keep wide spreads around the
    // fixed fallback centers instead of feigning confidence in them. Width
    // matters beyond honesty: a gamma's mode sits at (1 - cv^2) of its mean,
    // so a loose prior quietly drags weakly-identified chains well below
    // their centers.
    std::vector<std::array<double, 4>> duty_keys;  // (soc, ic, mean t, first ah)
    std::size_t slope_pairs = 0;
    for (const auto& o : data_.observations) {
        if (o.q.empty() || !(o.duty.ah_ref > 0.0) || !(mean_of(o.q) > 0.0)) {
            continue;
        }
        const double s = std::clamp(o.duty.soc_ref, 0.02, 0.98);
        const double tm = mean_of(o.t);
        bool found = false;
        for (const auto& key : duty_keys) {
            if (std::fabs(key[0] - s) < 1e-9 && std::fabs(key[1] - o.duty.ic_ref) < 1e-9 &&
                std::fabs(key[2] - tm) < 0.5) {
                found = true;
                if (std::fabs(key[3] - o.duty.ah_ref) > 1e-9) {
                    ++slope_pairs;
                }
                break;
            }
        }
        if (!found) {
            duty_keys.push_back({s, o.duty.ic_ref, tm, o.duty.ah_ref});
        }
    }
    const bool law_identified = duty_keys.size() >= 3;
    const bool slope_identified = slope_pairs > 0;
    put("alpha", gamma_or_default(init_centers.alpha, law_identified ? 0.25 : 1.0));
    put("beta", gamma_or_default(init_centers.beta, law_identified ? 0.25 : 0.75));
    put("ea", gamma_or_default(init_centers.ea, law_identified ? 0.05 : 0.26));
    put("eta", gamma_or_default(init_centers.eta, law_identified ? 0.08 : 1.0));
    put("zeta", gamma_or_default(init_centers.zeta, slope_identified ? 0.05 : 0.5));
    // A fresh cell has zero fade by definition, so the additive offset only
    // absorbs measurement bias and gets a tight zero-scale spread.
    put("epsilon", DistSpec{Family::Normal, init_centers.epsilon, 0.05});
    for (int n = 0; n < kNumTasks; ++n) {
        put("k" + std::to_string(n + 1), gamma_or_default(init_centers.k[n], 1.0, 0.01));
    }
    put("gamma_m", gamma_or_default(init_centers.gamma_m, 0.3));
    put("omega", gamma_or_default(init_centers.omega, 0.3));
    put("phi", gamma_or_default(init_centers.phi, 0.3));
}

double BayesNet::factor_fade_process(std::size_t i, const ObservationLatents& ol,
                                     const ParameterSet& par) const {
    double f = fade_mean_core(par, ol.soc, ol.ic, ol.t_hat, ol.ah, cfg_.gas_constant);
    if (!std::isfinite(f) || f <= 0.0) {
        return -kInf;
    }
    (void)i;
    const double sd = std::max(cfg_.sds.lambda_rel * f, cfg_.sds.lambda_floor);
    return safe_lp(DistSpec{Family::Gamma, f, sd}, ol.lambda);
}

double BayesNet::factor_ah(const Observation& o, const ObservationLatents& ol) const {
    if (!(ol.ic > 0.0)) {
        return -kInf;
    }
    double mean = o.duty.ah_ref * ol.ic / o.duty.ic_ref;
    // Width is set by the duty's metered throughput, not the moving mean.
    // A width that shrank with the mean would let (ic, ah) slide toward zero
    // together, the sharpening density paying for the C-rate displacement.
    double sd = std::max(cfg_.sds.ah_rel * o.duty.ah_ref, cfg_.sds.ah_floor);
    double lp = safe_lp(DistSpec{Family::Gamma, mean, sd}, ol.ah);
    // Metered-throughput channel: the duty's ah_ref is a coulomb-counter
    // reading, so the latent is additionally held to it directly.
    double meter_sd = std::max(cfg_.sds.ah_meter_rel * o.duty.ah_ref, cfg_.sds.ah_floor);
    return lp + safe_lp(DistSpec{Family::Gamma, o.duty.ah_ref, meter_sd}, ol.ah);
}

double BayesNet::factor_soc(const Observation& o, const ObsAnchors& an,
                            const ObservationLatents& ol) const {
    if (!(ol.ic > 0.0)) {
        return -kInf;
    }
    // Higher C-rate pulls the average SOC further from the resting value,
    // linearly in the scaled coulomb count around the composed reference.
    double soc0 = o.duty.soc_initial;
    double mean = soc0 - (soc0 - o.duty.soc_ref) * ol.ic / o.duty.ic_ref;
    mean = std::clamp(mean, 0.02, 0.98);
    double cap = 0.9 * std::sqrt(mean * (1.0 - mean));
    double sd = std::min(an.soc_sd, cap);
    return safe_lp(DistSpec{Family::Beta, mean, sd}, ol.soc);
}

double BayesNet::factor_ic(const Observation& o, const ObservationLatents& ol) const {
    if (!(ol.u > 0.0)) {
        return -kInf;
    }
    double y = std::fabs(ol.pb) / ol.u / cfg_.nominal_capacity_ah;
    if (!(y > 0.0) || !std::isfinite(y)) {
        return -kInf;
    }
    (void)o;
    double mean = (cfg_.rayleigh_anchor == RayleighAnchor::Mode) ? y * kRayleighMeanPerScale : y;
    return safe_lp(DistSpec{Family::Rayleigh, mean, kRayleighSdPerMean * mean}, ol.ic);
}

double BayesNet::factor_pb(const Observation& o, const ObservationLatents& ol,
                           const ParameterSet& par, double delta) const {
    if (!(delta > 0.0)) {
        return -kInf;
    }
    double g = par.k[0] * (ol.pw / delta + ol.paux);
    for (int n = 1; n < kNumTasks; ++n) {
        g += par.k[n] * o.grid_powers[n];
    }
    if (!std::isfinite(g)) {
        return -kInf;
    }
    // Width anchored to the duty's nominal power draw, not the moving
    // balance g: a width that tracked g would let the whole power chain
    // (k, pw, pb, ic) deflate together on normalization gains alone.
    double scale = o.duty.ic_ref * o.u_prior_mean * cfg_.nominal_capacity_ah;
    double sd = std::max(cfg_.sds.pb_rel * scale, cfg_.sds.pb_floor_w);
    return safe_lp(DistSpec{Family::Normal, g, sd}, ol.pb);
}

double BayesNet::factor_pw(const Observation& o, const ObservationLatents& ol,
                           const ParameterSet& par) const {
    double h = wheel_power_h(par, ol.a_hat, ol.v_hat);
    if (!std::isfinite(h)) {
        return -kInf;
    }
    // Same fixed-scale rule as factor_pb: the width comes from the duty's
    // nominal power, not from the state-dependent wheel power h.
    double scale = o.duty.ic_ref * o.u_prior_mean * cfg_.nominal_capacity_ah;
    double sd = std::max(cfg_.sds.pw_rel * scale, cfg_.sds.pw_floor_w);
    return safe_lp(DistSpec{Family::Normal, h, sd}, ol.pw);
}

double BayesNet::log_full_conditional(const VarId& id, const LatentState& lat,
                                      const ParameterSet& par) const {
    const auto& sds = cfg_.sds;
    auto obs_index = [&](const VarId& v) -> std::size_t {
        if (v.obs < 0 || static_cast<std::size_t>(v.obs) >= n_obs()) {
            throw UnknownVariable("observation index out of range for " + var_name(v));
        }
        return static_cast<std::size_t>(v.obs);
    };

    switch (id.kind) {
        case VarKind::Lambda: {
            std::size_t i = obs_index(id);
            const auto& o = data_.observations[i];
            const auto& ol = lat.per_obs[i];
            return channel_normal(o.q, ol.lambda, sds.q) + factor_fade_process(i, ol, par);
        }
        case VarKind::THat: {
            std::size_t i = obs_index(id);
            const auto& o = data_.observations[i];
            const auto& ol = lat.per_obs[i];
            return channel_normal(o.t, ol.t_hat, sds.t) +
                   safe_lp(anchors_[i].t_prior, ol.t_hat) + factor_fade_process(i, ol, par);
        }
        case VarKind::AHat: {
            std::size_t i = obs_index(id);
            const auto& o = data_.observations[i];
            const auto& ol = lat.per_obs[i];
            return channel_normal(o.a, ol.a_hat, sds.a) +
                   safe_lp(anchors_[i].a_prior, ol.a_hat) + factor_pw(o, ol, par);
        }
        case VarKind::VHat: {
            std::size_t i = obs_index(id);
            const auto& o = data_.observations[i];
            const auto& ol = lat.per_obs[i];
            if (!(ol.v_hat > 0.0)) {
                return -kInf;
            }
            return channel_gamma(o.v, ol.v_hat, sds.v) +
                   safe_lp(anchors_[i].v_prior, ol.v_hat) + factor_pw(o, ol, par);
        }
        case VarKind::Ah: {
            std::size_t i = obs_index(id);
            const auto& ol = lat.per_obs[i];
            return factor_ah(data_.observations[i], ol) + factor_fade_process(i, ol, par);
        }
        case VarKind::Soc: {
            std::size_t i = obs_index(id);
            const auto& ol = lat.per_obs[i];
            return factor_soc(data_.observations[i], anchors_[i], ol) +
                   factor_fade_process(i, ol, par);
        }
        case VarKind::Ic: {
            std::size_t i = obs_index(id);
            const auto& o = data_.observations[i];
            const auto& ol = lat.per_obs[i];
            return factor_ic(o, ol) + factor_ah(o, ol) + factor_soc(o, anchors_[i], ol) +
                   factor_fade_process(i, ol, par);
        }
        case VarKind::U: {
            std::size_t i = obs_index(id);
            const auto& ol = lat.per_obs[i];
            return safe_lp(anchors_[i].u_prior, ol.u) + factor_ic(data_.observations[i], ol);
        }
        case VarKind::Pb: {
            std::size_t i = obs_index(id);
            const auto& o = data_.observations[i];
            const auto& ol = lat.per_obs[i];
            return factor_pb(o, ol, par, lat.delta) + factor_ic(o, ol);
        }
        case VarKind::Pw: {
            std::size_t i = obs_index(id);
            const auto& ol = lat.per_obs[i];
            return factor_pw(data_.observations[i], ol, par) +
                   factor_pb(data_.observations[i], ol, par, lat.delta);
        }
        case VarKind::Paux: {
            std::size_t i = obs_index(id);
            const auto& ol = lat.per_obs[i];
            return safe_lp(anchors_[i].paux_prior, ol.paux) +
                   factor_pb(data_.observations[i], ol, par, lat.delta);
        }
        case VarKind::Delta: {
            double acc = safe_lp(delta_prior_, lat.delta);
            for (std::size_t i = 0; i < n_obs() && acc > -kInf; ++i) {
                acc += factor_pb(data_.observations[i], lat.per_obs[i], par, lat.delta);
            }
            return acc;
        }
        case VarKind::Alpha:
        case VarKind::Beta:
        case VarKind::Ea:
        case VarKind::Eta:
        case VarKind::Zeta:
        case VarKind::Epsilon: {
            double value = 0.0;
            switch (id.kind) {
                case VarKind::Alpha:
                    value = par.alpha;
                    break;
                case VarKind::Beta:
                    value = par.beta;
                    break;
                case VarKind::Ea:
                    value = par.ea;
                    break;
                case VarKind::Eta:
                    value = par.eta;
                    break;
                case VarKind::Zeta:
                    value = par.zeta;
                    break;
                default:
                    value = par.epsilon;
                    break;
            }
            double acc = safe_lp(param_priors_.at(var_name(id)), value);
            for (std::size_t i = 0; i < n_obs() && acc > -kInf; ++i) {
                acc += factor_fade_process(i, lat.per_obs[i], par);
            }
            return acc;
        }
        case VarKind::K: {
            if (id.task < 0 || id.task >= kNumTasks) {
                throw UnknownVariable("task channel out of range");
            }
            double acc = safe_lp(param_priors_.at(var_name(id)), par.k[id.task]);
            for (std::size_t i = 0; i < n_obs() && acc > -kInf; ++i) {
                acc += factor_pb(data_.observations[i], lat.per_obs[i], par, lat.delta);
            }
            return acc;
        }
        case VarKind::GammaM:
        case VarKind::Omega:
        case VarKind::Phi: {
            double value = id.kind == VarKind::GammaM ? par.gamma_m
                           : id.kind == VarKind::Omega ? par.omega
                                                       : par.phi;
            double acc = safe_lp(param_priors_.at(var_name(id)), value);
            for (std::size_t i = 0; i < n_obs() && acc > -kInf; ++i) {
                acc += factor_pw(data_.observations[i], lat.per_obs[i], par);
            }
            return acc;
        }
    }
    throw UnknownVariable("unhandled variable kind");
}

double BayesNet::log_joint(const LatentState& lat, const ParameterSet& par) const {
    const auto& sds = cfg_.sds;
    double acc = 0.0;
    for (std::size_t i = 0; i < n_obs(); ++i) {
        const auto& o = data_.observations[i];
        const auto& an = anchors_[i];
        const auto& ol = lat.per_obs[i];
        acc += channel_normal(o.q, ol.lambda, sds.q);
        acc += factor_fade_process(i, ol, par);
        acc += channel_normal(o.t, ol.t_hat, sds.t);
        acc += safe_lp(an.t_prior, ol.t_hat);
        acc += channel_normal(o.a, ol.a_hat, sds.a);
        acc += safe_lp(an.a_prior, ol.a_hat);
        acc += (ol.v_hat > 0.0) ? channel_gamma(o.v, ol.v_hat, sds.v) : -kInf;
        acc += safe_lp(an.v_prior, ol.v_hat);
        acc += factor_ah(o, ol);
        acc += factor_soc(o, an, ol);
        acc += factor_ic(o, ol);
        acc += safe_lp(an.u_prior, ol.u);
        acc += factor_pb(o, ol, par, lat.delta);
        acc += safe_lp(an.paux_prior, ol.paux);
        acc += factor_pw(o, ol, par);
        if (acc == -kInf) {
            return acc;
        }
    }
    acc += safe_lp(delta_prior_, lat.delta);
    acc += safe_lp(param_priors_.at("alpha"), par.alpha);
    acc += safe_lp(param_priors_.at("beta"), par.beta);
    acc += safe_lp(param_priors_.at("ea"), par.ea);
    acc += safe_lp(param_priors_.at("eta"), par.eta);
    acc += safe_lp(param_priors_.at("zeta"), par.zeta);
    acc += safe_lp(param_priors_.at("epsilon"), par.epsilon);
    for (int n = 0; n < kNumTasks; ++n) {
        acc += safe_lp(param_priors_.at("k" + std::to_string(n + 1)), par.k[n]);
    }
    acc += safe_lp(param_priors_.at("gamma_m"), par.gamma_m);
    acc += safe_lp(param_priors_.at("omega"), par.omega);
    acc += safe_lp(param_priors_.at("phi"), par.phi);
    return acc;
}

std::vector<VarId> BayesNet::sampling_order() const {
    std::vector<VarId> order;
    order.reserve(n_obs() * 11 + 1 + 17);
    const VarKind per_obs[] = {VarKind::Lambda, VarKind::THat, VarKind::AHat, VarKind::VHat,
                               VarKind::Pw,     VarKind::Paux, VarKind::Pb,   VarKind::U,
                               VarKind::Ic,     VarKind::Ah,   VarKind::Soc};
    for (std::size_t i = 0; i < n_obs(); ++i) {
        for (VarKind kind : per_obs) {
            order.push_back(VarId{kind, static_cast<int>(i), -1});
        }
    }
    order.push_back(VarId{VarKind::Delta, -1, -1});
    for (VarKind kind : {VarKind::Alpha, VarKind::Beta, VarKind::Ea, VarKind::Eta, VarKind::Zeta,
                         VarKind::Epsilon}) {
        order.push_back(VarId{kind, -1, -1});
    }
    for (int n = 0; n < kNumTasks; ++n) {
        order.push_back(VarId{VarKind::K, -1, n});
    }
    for (VarKind kind : {VarKind::GammaM, VarKind::Omega, VarKind::Phi}) {
        order.push_back(VarId{kind, -1, -1});
    }
    return order;
}

DistSpec BayesNet::reference_spec(const VarId& id) const {
    if (is_global(id.kind)) {
        if (id.kind == VarKind::Delta) {
            return delta_prior_;
        }
        return param_priors_.at(var_name(id));
    }
    std::size_t i = static_cast<std::size_t>(id.obs);
    if (id.obs < 0 || i >= n_obs()) {
        throw UnknownVariable("observation index out of range for " + var_name(id));
    }
    const auto& o = data_.observations[i];
    const auto& an = anchors_[i];
    const auto& sds = cfg_.sds;
    switch (id.kind) {
        case VarKind::Lambda: {
            double center = std::max(o.q.empty() ? 1.0 : mean_of(o.q), 0.1);
            return DistSpec{Family::Gamma, center,
                            std::max(sds.lambda_rel * center, sds.lambda_floor)};
        }
        case VarKind::THat:
            return an.t_prior;
        case VarKind::AHat:
            return an.a_prior;
        case VarKind::VHat:
            return an.v_prior;
        case VarKind::Ah: {
            double sd = std::max(sds.ah_rel * o.duty.ah_ref, sds.ah_floor);
            return DistSpec{Family::Gamma, o.duty.ah_ref, sd};
        }
        case VarKind::Soc: {
            double m = std::clamp(o.duty.soc_ref, 0.02, 0.98);
            double sd = std::min(an.soc_sd, 0.9 * std::sqrt(m * (1.0 - m)));
            return DistSpec{Family::Beta, m, sd};
        }
        case VarKind::Ic:
            return DistSpec{Family::Rayleigh, o.duty.ic_ref,
                            kRayleighSdPerMean * o.duty.ic_ref};
        case VarKind::U:
            return an.u_prior;
        case VarKind::Pb: {
            double anchor = o.duty.ic_ref * cfg_.nominal_capacity_ah * o.u_prior_mean;
            double sd = std::max(sds.pb_rel * anchor, sds.pb_floor_w);
            return DistSpec{Family::Normal, anchor, sd};
        }
        case VarKind::Pw: {
            double anchor = std::max(std::fabs(o.grid_powers[0]), 1.0);
            double sd = std::max(sds.pw_rel * anchor, sds.pw_floor_w);
            return DistSpec{Family::Normal, anchor, sd};
        }
        case VarKind::Paux:
            return an.paux_prior;
        default:
            break;
    }
    throw UnknownVariable("no reference spec for " + var_name(id));
}

const DistSpec& BayesNet::param_prior(const std::string& name) const {
    if (name == "delta") {
        return delta_prior_;
    }
    auto it = param_priors_.find(name);
    if (it == param_priors_.end()) {
        throw UnknownVariable("no prior recorded for " + name);
    }
    return it->second;
}

}  // namespace battbayes
