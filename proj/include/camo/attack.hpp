#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "camo/camouflage.hpp"
#include "camo/netlist.hpp"
#include "camo/simulation.hpp"

namespace camo {

enum class AttackMethod { Justify, Guess, Brute };

const char* attack_method_name(AttackMethod m);
AttackMethod attack_method_from_name(const std::string& s);  // throws

struct AttackBudgets {
    uint64_t nodes_per_mux = 1000000;   // search decisions per mux, lifetime
    uint64_t oracle_queries = 100000;   // pattern budget for the whole run
    uint64_t guess_vectors = 256;       // elimination vectors per mux attempt
    uint64_t brute_bound = uint64_t(1) << 24;  // 2^|PI| × Π widths cap
};

// Black-box access to the functioning chip: input assignment in, output
// bits back. Implementations count queries.
class Oracle {
public:
    virtual ~Oracle() = default;
    virtual OutputMap query(const InputVector& v) = 0;
    uint64_t queries() const { return queries_; }

protected:
    uint64_t queries_ = 0;
};

class SimOracle : public Oracle {
public:
    explicit SimOracle(const Netlist& nl, const CamoKey* key = nullptr);
    OutputMap query(const InputVector& v) override;

private:
    const Netlist* nl_;
    const CamoKey* key_;
};

// Mux instance -> selected data pin, for muxes the attacker has already
// worked out. They behave as buffers in every attacker-side analysis.
using ResolvedMap = std::map<std::string, int>;

enum class JustifyStatus {
    Found,    // vector below one-hot-justifies and propagates
    None,     // search space exhausted: no such vector exists
    Blocked,  // exhausted, but unresolved muxes interfered with the search
    Budget,   // node budget ran out first
};

struct JustifyResult {
    JustifyStatus status = JustifyStatus::None;
    InputVector vector;     // covers every primary input (unasked bits at 0)
    std::string po;         // observation output
    bool inverted = false;  // odd inversion parity from mux output to po
    uint64_t nodes = 0;     // decision nodes spent
    // Blocked only: the unresolved foreign muxes that touched the search
    // region. Resolving one of them is the only event that can change the
    // outcome of a rerun, so callers key retries on this set.
    std::vector<GateId> blockers;
};

// Search for a primary-input vector that drives the candidate data input to
// 1, every other data input of the mux to 0, and makes the outputs differ
// depending on whether the mux selects the candidate. Branch-and-bound over
// primary-input assignments; already-resolved muxes act as buffers, other
// unresolved muxes as unknowns.
JustifyResult justify_and_propagate(const Netlist& av, const std::string& mux,
                                    int candidate, const ResolvedMap& resolved,
                                    uint64_t node_budget = 1000000);

struct ResolveOutcome {
    std::optional<int> resolved_index;
    uint64_t patterns = 0;  // oracle queries issued
    uint64_t nodes = 0;     // search decisions spent
};

// Resolve one mux. Justify mode queries the oracle with one-hot vectors (at
// most one per candidate; a confirming answer ends the scan and a lone
// non-eliminated candidate wins by elimination). Guess mode eliminates
// hypotheses with seeded random vectors: a hypothesis dies only when a
// definite simulated output contradicts the oracle.
ResolveOutcome resolve_mux(const Netlist& av, Oracle& oracle,
                           const std::string& mux, AttackMethod method,
                           const ResolvedMap& resolved = {}, uint64_t seed = 1,
                           const AttackBudgets& budgets = {});

struct MuxEffort {
    std::string instance;
    int width = 2;
    std::optional<int> resolved_index;  // empty = UNRESOLVED
    uint64_t patterns_applied = 0;
    uint64_t search_nodes = 0;
    double wall_seconds = 0;
};

struct REEffortReport {
    std::vector<MuxEffort> per_mux;  // instance-name order
    uint64_t total_patterns = 0;
    uint64_t total_search_nodes = 0;
    uint64_t simulated_time_ns = 0;  // one pattern per nanosecond
    double total_wall_seconds = 0;
};

// Attack every mux: repeated justify passes in instance-name order, treating
// each resolution as a buffer from then on, until a fixpoint; muxes still
// standing fall back to guess mode (justify passes resume after any guess
// success). Guess method skips straight to hypothesis elimination; brute
// method derives per-mux answers from the consistent-key set where it is
// unanimous.
REEffortReport attack_all(const Netlist& av, Oracle& oracle,
                          AttackMethod method, uint64_t seed = 1,
                          const AttackBudgets& budgets = {});

// Ground truth: every complete key assignment consistent with the oracle on
// all 2^|PI| vectors. Throws if the bound is exceeded or nothing fits.
std::vector<CamoKey> brute_force_decamouflage(const Netlist& av,
                                              Oracle& oracle,
                                              uint64_t bound = uint64_t(1)
                                                               << 24);

// CSV: instance,width,resolved,true_index,correct,patterns,nodes,wall_ms.
// true_index/correct filled only when the true key is supplied; wall_ms is
// the lone nondeterministic column.
std::string re_effort_csv(const REEffortReport& report,
                          const CamoKey* truth = nullptr);

}  // namespace camo
