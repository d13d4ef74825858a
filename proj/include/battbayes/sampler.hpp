#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "battbayes/dist.hpp"
#include "battbayes/model.hpp"
#include "battbayes/rng.hpp"
#include "battbayes/scenario.hpp"

namespace battbayes {

struct SamplerConfig {
    std::size_t iterations = 10000;
    double burn_in_fraction = 0.2;  // in [0, 1); 0 keeps everything
    std::uint64_t seed = 0;
    std::size_t thinning = 1;  // stride between stored samples
    // Absolute proposal spread per variable name. Names not listed fall back
    // to a fraction of the variable's reference (prior) sd. Every effective
    // spread must stay at or below the reference sd.
    std::map<std::string, double> tuning_sds;
    double global_step_fraction = 0.10;
    double latent_step_fraction = 0.50;
};

struct Chain {
    std::string variable;
    Family family = Family::Normal;
    std::vector<double> samples;   // one per stored iteration, burn-in included
    std::size_t burn_in_index = 0;  // first index retained after burn-in
    std::uint64_t accepted = 0;
    std::uint64_t proposed = 0;
    std::uint64_t seed = 0;
};

struct Proposal {
    double value = 0.0;
    double log_forward = 0.0;  // log q(value | current)
    double log_reverse = 0.0;  // log q(current | value)
};

// Draws from the variable's own family re-centered at `current` with spread
// sigma_t. When (center, spread) violates the family's moment constraints the
// spread is halved and retried, up to 10 times, before ProposalFailure; the
// reverse spread is shrunk by the same deterministic rule from the proposed
// value, which keeps the pair of densities a consistent Hastings correction.
// When no reverse spread is repairable (the draw landed where the kernel
// cannot run) the reverse density is zero, so accept_prob rejects the move.
Proposal propose(double current, Family family, double sigma_t, RandomStream& rng);

// min(1, exp((log_fc_proposal - log_fc_current) + (log_q_reverse -
// log_q_forward))). -inf at the proposal gives 0; -inf at the current state
// with a finite proposal gives 1.
double accept_prob(double log_fc_proposal, double log_fc_current, double log_q_reverse,
                   double log_q_forward);

// Deterministic starting point for the chain. Wheel-power coefficients come
// from the vehicle spec divided by `cells_count` (per-cell scale), the task
// weights from the duty's charge shares (floored at 0.01), the fade
// parameters from solving the fade law against the first observation's mean
// fade, and the latents from a coulomb-counting pass over the duty anchors.
std::pair<LatentState, ParameterSet> init_state(const ObservationSet& data,
                                                const VehicleSpec& vehicle,
                                                const TaskShares& shares,
                                                const ModelConfig& model_cfg,
                                                int cells_count = 1);

// Metropolis-Hastings-within-Gibbs over the battery network: every variable
// is visited once per iteration in the network's fixed sweep order; proposal
// randomness and accept uniforms run on two independent substreams of
// cfg.seed. Throws ConfigError on bad sampler settings, DomainError when the
// initial state has zero posterior density, ProposalFailure (tagged with
// variable and iteration) when a proposal spread cannot be repaired.
std::map<std::string, Chain> run_mcmc(const BayesNet& net, const LatentState& init_latents,
                                      const ParameterSet& init_params,
                                      const SamplerConfig& cfg);

// Convenience overload that assembles the network from data + model config,
// centering data-independent priors on the initial parameter values.
std::map<std::string, Chain> run_mcmc(const ObservationSet& data, const LatentState& init_latents,
                                      const ParameterSet& init_params, const SamplerConfig& cfg,
                                      const ModelConfig& model_cfg);

// The same kernel on a free-standing scalar log density; used for closed-form
// checks of the chain machinery.
Chain run_scalar_chain(const std::function<double(double)>& log_target, Family family,
                       double init, double sigma_t, const SamplerConfig& cfg,
                       const std::string& name = "x");

}  // namespace battbayes
