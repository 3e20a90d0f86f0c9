#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "camo/netlist.hpp"

namespace camo {

struct CcPair {
    int64_t cc0 = 0;
    int64_t cc1 = 0;
};

struct ScoapValues {
    int64_t cc0 = 0;
    int64_t cc1 = 0;
    int64_t obs = 0;
    int fanout_count = 0;
    int64_t metric_m = 0;  // always cc0 + cc1 + obs
};

struct ScoapResult {
    std::vector<ScoapValues> nets;  // indexed by NetId

    const ScoapValues& at(NetId id) const { return nets[id]; }
};

// Combinational SCOAP. Primary inputs start at cc0 = cc1 = 1; every gate rule
// adds +1 depth. Multi-input XOR/XNOR controllability folds left-associatively
// over the two-input rule. Rejects netlists containing camouflage muxes: the
// analysis runs before camouflaging.
std::vector<CcPair> compute_controllability(const Netlist& nl);

// Primary outputs get obs 0; a stem's observability is the minimum over its
// fan-out branches.
std::vector<int64_t> compute_observability(const Netlist& nl,
                                           const std::vector<CcPair>& cc);

ScoapResult annotate(const Netlist& nl);

// Observability cost of one fan-out branch: the pin `pin` of gate `g`.
// A primary-output tap is a branch with cost 0 and is not represented here.
int64_t branch_observability(const Netlist& nl, const ScoapResult& scoap,
                             GateId g, uint32_t pin);

// CSV: net,cc0,cc1,obs,fanout,metric_m — one row per net, sorted by net name.
std::string scoap_csv(const Netlist& nl, const ScoapResult& scoap);

}  // namespace camo
