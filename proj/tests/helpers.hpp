// Shared fixtures for the unit suites: a small two-cell observation set with
// every channel populated, plus its matching shares and config.
#pragma once

#include <string>
#include <utility>

#include "battbayes/model.hpp"
#include "battbayes/sampler.hpp"
#include "battbayes/scenario.hpp"

namespace battbayes::testing {

inline Observation make_obs(std::string id, double fade, double ic = 2.0,
                            double ah = 1000.0) {
    Observation o;
    o.id = std::move(id);
    o.q = {fade, fade * 1.02};
    o.t = {308.0, 308.5, 307.8};
    o.a = {0.3, -0.2, 0.5};
    o.v = {8.0, 9.0, 7.5};
    o.grid_powers[static_cast<int>(Task::Driving)] = 21.0;
    o.grid_powers[static_cast<int>(Task::ChargeL2)] = 4.0;
    o.duty.ic_ref = ic;
    o.duty.ah_ref = ah;
    o.duty.soc_ref = 0.4;
    o.duty.soc_initial = 0.9;
    return o;
}

inline ObservationSet tiny_set() {
    ObservationSet set;
    set.observations.push_back(make_obs("cellA@1000", 10.0, 2.0, 1000.0));
    set.observations.push_back(make_obs("cellB@2000", 16.0, 2.5, 2000.0));
    return set;
}

inline TaskShares tiny_shares() {
    TaskShares s{};
    s.share[static_cast<int>(Task::Driving)] = 0.9;
    s.share[static_cast<int>(Task::ChargeL2)] = 0.1;
    return s;
}

inline std::pair<LatentState, ParameterSet> tiny_init(const ObservationSet& set,
                                                      const ModelConfig& cfg = {}) {
    return init_state(set, VehicleSpec{}, tiny_shares(), cfg, 1);
}

}  // namespace battbayes::testing
