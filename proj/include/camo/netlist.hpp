#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "camo/error.hpp"

namespace camo {

enum class GateKind : uint8_t {
    And,
    Nand,
    Or,
    Nor,
    Xor,
    Xnor,
    Not,
    Buf,
    CamoMux2,
    CamoMux4,
    CamoMux8,
    CamoMux16,
};

const char* kind_name(GateKind k);
std::optional<GateKind> kind_from_name(std::string_view s);  // case-insensitive

bool is_camomux(GateKind k);
int camomux_width(GateKind k);   // 2/4/8/16 for muxes, 0 otherwise
GateKind camomux_kind(int width);

// Valid input count for a gate kind. Multi-input gates accept >= 2 inputs,
// not/buf exactly 1, camomuxN exactly N.
bool arity_ok(GateKind k, size_t n_inputs);

using NetId = uint32_t;
using GateId = uint32_t;
inline constexpr NetId kNoNet = 0xffffffffu;

struct Gate {
    GateKind kind;
    std::string name;           // instance name, unique within the netlist
    std::vector<NetId> inputs;  // ordered pins
    NetId output = kNoNet;
};

struct NetSink {
    GateId gate;
    uint32_t pin;  // index into Gate::inputs
};

struct Net {
    std::string name;
    std::optional<GateId> driver;  // empty for primary inputs
    std::vector<NetSink> sinks;    // gate input pins fed by this net
    bool is_primary_input = false;
    bool is_primary_output = false;
};

// Immutable gate-level netlist. Nets and gates keep declaration order, which
// every downstream iteration relies on for determinism.
class Netlist {
public:
    const std::string& name() const { return name_; }
    const std::vector<Net>& nets() const { return nets_; }
    const std::vector<Gate>& gates() const { return gates_; }
    const std::vector<NetId>& primary_inputs() const { return inputs_; }
    const std::vector<NetId>& primary_outputs() const { return outputs_; }

    const Net& net(NetId id) const { return nets_[id]; }
    const Gate& gate(GateId id) const { return gates_[id]; }

    std::optional<NetId> find_net(std::string_view name) const;
    std::optional<GateId> find_gate(std::string_view instance) const;
    NetId net_id(std::string_view name) const;  // throws Error if absent

    // Gate input pins fed plus one if the net is a primary output.
    int fanout_count(NetId id) const {
        const Net& n = nets_[id];
        return static_cast<int>(n.sinks.size()) + (n.is_primary_output ? 1 : 0);
    }

private:
    friend class NetlistBuilder;
    std::string name_;
    std::vector<Net> nets_;
    std::vector<Gate> gates_;
    std::vector<NetId> inputs_;
    std::vector<NetId> outputs_;
    std::unordered_map<std::string, NetId> net_index_;
    std::unordered_map<std::string, GateId> gate_index_;
};

// Incremental construction with validation. finish() checks that every net
// is driven (or is a primary input), every net is read (or is a primary
// output), arities hold, and the gate graph is acyclic.
class NetlistBuilder {
public:
    explicit NetlistBuilder(std::string module_name);

    NetId add_primary_input(const std::string& name);
    NetId add_wire(const std::string& name);
    NetId add_primary_output(const std::string& name);
    GateId add_gate(GateKind kind, const std::string& instance,
                    const std::string& output,
                    const std::vector<std::string>& inputs);

    bool has_net(const std::string& name) const;

    Netlist finish();

private:
    NetId declare(const std::string& name, bool pi, bool po);
    NetId require(const std::string& name) const;
    Netlist nl_;
    bool finished_ = false;
};

// Flat structural Verilog subset. Keywords are case-insensitive, identifiers
// case-sensitive, // line comments only.
Netlist parse_netlist(std::string_view source);
Netlist read_netlist_file(const std::string& path);

// Deterministic: declarations in net declaration order, instances in
// topological order with ties broken by instance name. emit is idempotent
// across a parse round trip.
std::string emit_netlist(const Netlist& nl);
void write_netlist_file(const Netlist& nl, const std::string& path);

// Gate ids in dependency order (drivers before readers).
std::vector<GateId> topological_order(const Netlist& nl);

// All nets reachable from `from` through gate outputs, excluding `from`
// itself. Sorted by net id.
std::vector<NetId> transitive_fanout(const Netlist& nl, NetId from);

// Same nets, gates, connectivity, and port lists (names and pin order), with
// declaration order ignored for gates but not for ports.
bool structurally_identical(const Netlist& a, const Netlist& b);

}  // namespace camo
