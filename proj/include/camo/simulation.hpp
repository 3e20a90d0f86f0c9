#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "camo/camouflage.hpp"
#include "camo/netlist.hpp"

namespace camo {

// Assignment of every primary input (or output) by name. std::map keeps
// printing deterministic.
using InputVector = std::map<std::string, bool>;
using OutputMap = std::map<std::string, bool>;

// Evaluate one vector with standard Boolean semantics; multi-input XOR/XNOR
// fold left, so a k-input XNOR is the input parity negated k−1 times. A
// netlist containing camouflaged muxes needs a key covering all of them;
// each mux forwards its selected input.
OutputMap evaluate(const Netlist& nl, const InputVector& v,
                   const CamoKey* key = nullptr);

// Selected data pin per gate (-1 for plain gates), validating that the key
// covers every camouflaged mux with a matching width and an in-range pin.
std::vector<int> selected_pins(const Netlist& nl, const CamoKey* key);

enum class EquivalenceKind {
    ExhaustiveEquivalent,
    SampledEquivalent,
    Counterexample,
};

struct EquivalenceVerdict {
    EquivalenceKind kind = EquivalenceKind::ExhaustiveEquivalent;
    uint64_t vectors = 0;  // vectors evaluated
    InputVector witness;   // first mismatching assignment, if any

    // "EQUIVALENT (exhaustive, 32 vectors)" / "EQUIVALENT (sampled, 10000
    // vectors)" / "MISMATCH at N1=0 N2=1 ..."
    std::string describe() const;
};

inline constexpr uint64_t kDefaultVectorBudget = uint64_t(1) << 22;

// Exhaustive sweep when 2^|PI| fits the budget, otherwise exactly `budget`
// seeded random vectors. Primary input and output NAME sets must match;
// declaration order may differ.
EquivalenceVerdict equivalence(const Netlist& a, const Netlist& b,
                               const CamoKey* key_a = nullptr,
                               const CamoKey* key_b = nullptr,
                               uint64_t budget = kDefaultVectorBudget,
                               uint64_t seed = 1);

// Bit-parallel engine packing 64 vectors per word; observationally identical
// to evaluate(). Words map bit j to vector j.
class BitSim {
public:
    explicit BitSim(const Netlist& nl, const CamoKey* key = nullptr);

    // One word per primary input, in declaration order; returns one word per
    // primary output, in declaration order.
    std::vector<uint64_t> run(const std::vector<uint64_t>& pi_words) const;

    const Netlist& netlist() const { return *nl_; }

private:
    const Netlist* nl_;
    std::vector<GateId> topo_;
    std::vector<int> mux_pick_;  // per gate: selected data pin, -1 for plain
};

}  // namespace camo
