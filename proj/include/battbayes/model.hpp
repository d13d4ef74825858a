#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "battbayes/dist.hpp"

namespace battbayes {

// Battery duty tasks. Driving enters battery power through the wheel-power
// chain; the other six are grid-side power channels with their own weights.
enum class Task : int {
    Driving = 0,
    ChargeL1,
    ChargeL2,
    ChargeL3,
    Solar,
    FreqReg,
    PeakShave,
};
inline constexpr int kNumTasks = 7;

const char* task_name(Task t) noexcept;
Task task_from_name(std::string_view name);  // throws ParseError

// How an observation's duty cycle couples the C-rate node to throughput and
// state of charge: coulomb counting scaled linearly in C-rate around the
// composed reference point.
struct DutyAnchor {
    double ic_ref = 0.0;       // C-rate of the composed duty (1/h)
    double ah_ref = 0.0;       // cumulative |Ah| per cell over the horizon at ic_ref
    double soc_ref = 0.0;      // time-averaged SOC at ic_ref
    double soc_initial = 0.9;  // SOC the duty starts from
};

// One cell's worth of evidence. Channels q/t/a/v are sample vectors (fade %,
// kelvin, m/s^2, m/s); q may be empty when estimating fade for a duty with
// no capacity measurements. grid_powers are mean active per-cell powers in
// watts per task; index Task::Driving carries the mean driving battery power
// and is used only as a prior anchor, not in the grid-power sum.
struct Observation {
    std::string id;
    std::vector<double> q;
    std::vector<double> t;
    std::vector<double> a;
    std::vector<double> v;
    std::array<double, kNumTasks> grid_powers{};
    DutyAnchor duty;
    double u_prior_mean = 3.3;  // V, per cell
    double u_prior_sd = 0.2;
};

struct ObservationSet {
    std::vector<Observation> observations;
};

// Structural invariants: at least one observation; every observation has
// t/a/v channels with at least one sample; duty anchors positive where
// required; q finite when present. Throws IncompleteSpec / DomainError.
void validate(const ObservationSet& set, bool require_fade);

// Per-observation latent nodes.
struct ObservationLatents {
    double lambda = 0.0;  // capacity fade, %
    double t_hat = 0.0;   // temperature, K
    double a_hat = 0.0;   // representative acceleration, m/s^2
    double v_hat = 0.0;   // representative velocity, m/s
    double ah = 0.0;      // charge throughput per cell, Ah
    double soc = 0.0;     // average state of charge, fraction
    double ic = 0.0;      // C-rate, 1/h
    double u = 0.0;       // cell voltage, V
    double pb = 0.0;      // battery power per cell, W
    double pw = 0.0;      // wheel power per cell, W
    double paux = 0.0;    // auxiliary power per cell, W
};

struct LatentState {
    std::vector<ObservationLatents> per_obs;
    double delta = 0.9;  // drivetrain efficiency, shared across observations
};

// Global model parameters. gamma_m/omega/phi are per-cell wheel-power
// coefficients (vehicle-level values divided by the pack cell count, so that
// every power node in the network lives on the cell scale).
struct ParameterSet {
    double alpha = 0.0;
    double beta = 0.0;
    double ea = 0.0;       // activation energy, J/mol
    double eta = 0.0;      // C-rate correction to ea, J/mol per 1/h
    double zeta = 0.0;     // throughput exponent
    double epsilon = 0.0;  // additive fade offset, %
    std::array<double, kNumTasks> k{};
    double gamma_m = 0.0;  // inertial coefficient, kg per cell
    double omega = 0.0;    // aero coefficient, kg/m per cell
    double phi = 0.0;      // rolling + grade force, N per cell
};

// Measurement / process noise widths. Relative entries are fractions of the
// factor mean with an absolute floor.
struct LikelihoodSds {
    double q = 0.5;  // % fade
    // Slack between the fade law and lambda. Relative so the factor keeps a
    // constant coefficient of variation: a fixed absolute width would make
    // the gamma skew shrink as the mean grows, handing every chain a steady
    // uphill pull on predicted fade.
    double lambda_rel = 0.05;
    double lambda_floor = 0.05;  // % fade
    // Cycling chambers hold set-points to a few tenths of a kelvin; a loose
    // temperature channel would hand every observation an Arrhenius dial
    // worth several percent of predicted fade.
    double t = 0.2;  // K
    double a = 0.3;         // m/s^2
    double v = 1.0;         // m/s
    double pw_rel = 0.05;
    double pw_floor_w = 1.0;
    double pb_rel = 0.05;
    double pb_floor_w = 1.0;
    double ah_rel = 0.05;
    double ah_floor = 1e-3;
    // Coulomb counters meter cumulative throughput to well under a percent;
    // this channel ties the latent throughput to the duty's metered value so
    // the C-rate/throughput pair cannot wander off the recorded duty.
    double ah_meter_rel = 0.01;
    double soc = 0.05;      // capped at 0.9*sqrt(m(1-m)) per observation
};

// Data-independent knobs for the per-observation priors.
struct PriorRules {
    double t_hat_sd = 10.0;        // K around the observed mean temperature
    double a_hat_sd = 0.5;         // m/s^2 around the observed mean acceleration
    double v_hat_sd = 1.0;         // m/s around the observed mean velocity
    double v_hat_mean_floor = 0.05;
    double paux_frac = 0.10;       // prior mean as a fraction of driving power
    double paux_sd_frac = 0.025;
    double paux_anchor_floor_w = 1.0;
    double delta_mean = 0.9;
    double delta_sd = 0.05;
};

// Where the Rayleigh C-rate factor pins its single parameter: scale chosen
// so the current battery-power C-rate sits at the mode, or at the mean.
enum class RayleighAnchor { Mode, Mean };

struct ModelConfig {
    double gas_constant = 8.314;       // J/(mol K)
    double nominal_capacity_ah = 2.3;  // cell nominal capacity
    double initial_soc = 0.9;
    LikelihoodSds sds;
    PriorRules priors;
    RayleighAnchor rayleigh_anchor = RayleighAnchor::Mode;
    // Parameter priors by name ("alpha", "beta", "ea", "eta", "zeta",
    // "epsilon", "k1".."k7", "gamma_m", "omega", "phi", "delta"). Entries
    // left unset are completed from the initial parameter values when the
    // network is built.
    std::map<std::string, DistSpec> param_priors;
};

// ---- deterministic sub-models -------------------------------------------

// Mean capacity fade (%) after `ah` amp-hours:
//   (alpha*soc + beta) * exp(-(ea - eta*ic) / (R*t)) * ah^zeta + epsilon
// Throws DomainError for t <= 0, ah < 0, ic < 0 or soc outside [0, 1].
double fade_mean_f(const ParameterSet& p, double soc, double ic, double t_kelvin, double ah,
                   double gas_constant = 8.314);

// C-rate implied by battery power: |pb| / u / capacity. Throws DomainError
// for u <= 0 or capacity <= 0.
double current_y(double pb_w, double u_v, double nominal_capacity_ah);

// Battery power from the task channels:
//   k[0]*(pw/delta + paux) + sum_{n>=1} k[n]*grid_powers[n]
// Throws DomainError for delta <= 0.
double battery_power_g(const ParameterSet& p, double pw_w, double paux_w, double delta,
                       const std::array<double, kNumTasks>& grid_powers);

// Wheel power: gamma_m*a*v + omega*v^3 + phi*v.
double wheel_power_h(const ParameterSet& p, double a_hat, double v_hat);

// ---- variable addressing -------------------------------------------------

enum class VarKind {
    Lambda,
    THat,
    AHat,
    VHat,
    Ah,
    Soc,
    Ic,
    U,
    Pb,
    Pw,
    Paux,
    Delta,
    Alpha,
    Beta,
    Ea,
    Eta,
    Zeta,
    Epsilon,
    K,
    GammaM,
    Omega,
    Phi,
};

struct VarId {
    VarKind kind = VarKind::Lambda;
    int obs = -1;   // observation index for per-observation latents
    int task = -1;  // channel index for VarKind::K
};

bool is_global(VarKind kind) noexcept;
Family var_family(VarKind kind) noexcept;
std::string var_name(const VarId& id);            // "lambda[3]", "k2", "alpha", ...
VarId var_from_name(const std::string& name, std::size_t n_obs);  // throws UnknownVariable

// State access by variable id. Throw UnknownVariable on out-of-range
// observation/task indices.
double get_var(const VarId& id, const LatentState& lat, const ParameterSet& par);
void set_var(const VarId& id, double value, LatentState& lat, ParameterSet& par);

// ---- the network ----------------------------------------------------------

// Factorized joint density over the battery network. Priors that depend on
// the data (temperature, velocity, auxiliary-power anchors) and on the
// initial parameter values are frozen at construction.
class BayesNet {
public:
    BayesNet(ObservationSet data, ModelConfig cfg, const ParameterSet& init_centers);

    std::size_t n_obs() const { return data_.observations.size(); }
    const ObservationSet& data() const { return data_; }
    const ModelConfig& config() const { return cfg_; }

    // Log full conditional of one variable given the rest of the state: the
    // sum of exactly the factors that mention it. Invalid factor means
    // arising from the state (for example a non-positive fade-law mean with
    // a Gamma factor) contribute -infinity, never an exception.
    double log_full_conditional(const VarId& id, const LatentState& lat,
                                const ParameterSet& par) const;

    // Sum of every factor once; log_joint differences equal full-conditional
    // differences for single-variable changes.
    double log_joint(const LatentState& lat, const ParameterSet& par) const;

    // Fixed sweep order: per observation lambda, t_hat, a_hat, v_hat, pw,
    // paux, pb, u, ic, ah, soc; then delta; then alpha, beta, ea, eta, zeta,
    // epsilon, k1..k7, gamma_m, omega, phi.
    std::vector<VarId> sampling_order() const;

    // The prior (or process-factor) spec anchoring a variable; its sd is the
    // reference width that proposal tuning fractions scale.
    DistSpec reference_spec(const VarId& id) const;

    const DistSpec& param_prior(const std::string& name) const;

private:
    struct ObsAnchors {
        DistSpec t_prior;
        DistSpec a_prior;
        DistSpec v_prior;
        DistSpec u_prior;
        DistSpec paux_prior;
        double soc_sd = 0.05;  // after the feasibility cap
    };

    double factor_fade_process(std::size_t i, const ObservationLatents& ol,
                               const ParameterSet& par) const;
    double factor_ah(const Observation& o, const ObservationLatents& ol) const;
    double factor_soc(const Observation& o, const ObsAnchors& an,
                      const ObservationLatents& ol) const;
    double factor_ic(const Observation& o, const ObservationLatents& ol) const;
    double factor_pb(const Observation& o, const ObservationLatents& ol,
                     const ParameterSet& par, double delta) const;
    double factor_pw(const Observation& o, const ObservationLatents& ol,
                     const ParameterSet& par) const;

    ObservationSet data_;
    ModelConfig cfg_;
    std::vector<ObsAnchors> anchors_;
    DistSpec delta_prior_;
    std::map<std::string, DistSpec> param_priors_;
};

}  // namespace battbayes
