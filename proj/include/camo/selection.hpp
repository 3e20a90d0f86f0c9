#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "camo/netlist.hpp"
#include "camo/rng.hpp"
#include "camo/scoap.hpp"

namespace camo {

enum class Strategy { Metric, Random };

const char* strategy_name(Strategy s);
Strategy strategy_from_name(const std::string& s);  // throws on unknown

struct SelectionConfig {
    double percent = 5.0;  // x% of all nets, in (0, 100]
    int mux_width = 2;     // one of 2, 4, 8, 16
    Strategy target_strategy = Strategy::Metric;
    Strategy fake_strategy = Strategy::Metric;
    uint64_t seed = 1;
};

void validate_config(const SelectionConfig& cfg);

struct PlanEntry {
    NetId target;
    GateId sink_gate;
    uint32_t sink_pin;
    std::vector<NetId> fakes;      // mux_width − 1 nets, selection order
    int selected_index;            // position of target among the mux inputs
    std::vector<NetId> mux_inputs; // fakes with target inserted at selected_index
};

struct CamouflagePlan {
    std::vector<PlanEntry> entries;
    std::vector<std::string> warnings;
};

// Nets eligible for camouflaging: fan-out count >= 2. A single-sink net is
// excluded because its lone connection cannot float and so cannot hide.
std::vector<NetId> qualified_nets(const Netlist& nl, const ScoapResult& scoap);

// Sort by fan-out descending, then metric M descending, then name ascending.
std::vector<NetId> rank_nets(const Netlist& nl,
                             const std::vector<NetId>& qualified,
                             const ScoapResult& scoap);

// k = ceil(percent/100 × total nets). Metric strategy takes the ranked
// prefix; random draws without replacement from the qualified set. A
// shortfall (k > |qualified|) takes everything and records a warning.
std::vector<NetId> select_targets(const Netlist& nl,
                                  const std::vector<NetId>& ranked,
                                  const ScoapResult& scoap,
                                  const SelectionConfig& cfg, Rng& rng,
                                  std::vector<std::string>* warnings);

// Tracks reachability over the netlist plus the virtual edges added by
// already-planned muxes, so later fake choices cannot close a combinational
// loop through earlier insertions.
class PlanGraph {
public:
    explicit PlanGraph(const Netlist& nl);

    // Nets that may NOT serve as fake inputs to a mux feeding the given sink
    // gate: the gate's output and everything reachable from it.
    std::vector<char> forbidden_for_sink(GateId sink_gate) const;

    // Register a planned mux: every mux input gains an edge to the sink
    // gate's output.
    void add_mux(const std::vector<NetId>& mux_inputs, GateId sink_gate);

private:
    const Netlist& nl_;
    std::vector<std::vector<NetId>> extra_;  // net -> extra reachable nets
};

// Legal fake candidates for one mux, ranked/drawn per the fake strategy.
// The pool is every net except the target and the forbidden set above.
std::vector<NetId> select_fakes(const Netlist& nl, NetId target,
                                GateId sink_gate, const ScoapResult& scoap,
                                const SelectionConfig& cfg, Rng& rng,
                                const PlanGraph& graph);

// Full plan: targets in selection order; per target the sink branch with the
// highest observability cost (ties by gate instance name, then pin); fakes
// and the real-input position drawn per entry. Random draws come from a
// single seeded stream: target draws first, then per entry fake draws
// followed by one position draw.
CamouflagePlan build_plan(const Netlist& nl, const ScoapResult& scoap,
                          const SelectionConfig& cfg);

}  // namespace camo
