#include "camo/camouflage.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "camo/error.hpp"

namespace camo {

namespace {

void check_entry(const Netlist& nl, const PlanEntry& e) {
    if (e.target >= nl.nets().size() || e.sink_gate >= nl.gates().size())
        throw ValidationError("plan does not match netlist: id out of range");
    const Gate& g = nl.gate(e.sink_gate);
    if (e.sink_pin >= g.inputs.size())
        throw ValidationError("plan does not match netlist: gate " + g.name +
                              " has no pin " + std::to_string(e.sink_pin));
    if (g.inputs[e.sink_pin] != e.target)
        throw ValidationError("plan does not match netlist: pin " +
                              std::to_string(e.sink_pin) + " of " + g.name +
                              " is not driven by " + nl.net(e.target).name);
    size_t width = e.mux_inputs.size();
    if (width != 2 && width != 4 && width != 8 && width != 16)
        throw ValidationError("plan entry for " + nl.net(e.target).name +
                              " has unsupported mux width " +
                              std::to_string(width));
    if (e.selected_index < 0 ||
        static_cast<size_t>(e.selected_index) >= width ||
        e.mux_inputs[e.selected_index] != e.target)
        throw ValidationError("plan entry for " + nl.net(e.target).name +
                              " does not place the target at its selected "
                              "position");
    std::unordered_set<NetId> seen;
    for (NetId in : e.mux_inputs) {
        if (in >= nl.nets().size())
            throw ValidationError("plan does not match netlist: id out of range");
        if (!seen.insert(in).second)
            throw ValidationError("plan entry for " + nl.net(e.target).name +
                                  " repeats mux input " + nl.net(in).name);
    }
}

std::string fresh_net_name(const NetlistBuilder& b, const std::string& target,
                           size_t k) {
    size_t j = k;
    std::string name = target + "_camo_" + std::to_string(j);
    while (b.has_net(name)) name = target + "_camo_" + std::to_string(++j);
    return name;
}

std::string fresh_instance_name(const std::unordered_set<std::string>& taken,
                                size_t k) {
    size_t j = k;
    char buf[32];
    std::snprintf(buf, sizeof buf, "camo_%04zu", j);
    while (taken.count(buf)) std::snprintf(buf, sizeof buf, "camo_%04zu", ++j);
    return buf;
}

void declare_net(NetlistBuilder& b, const Net& n) {
    if (n.is_primary_input)
        b.add_primary_input(n.name);
    else if (n.is_primary_output)
        b.add_primary_output(n.name);
    else
        b.add_wire(n.name);
}

}  // namespace

CamouflageResult camouflage_circuit(const Netlist& nl,
                                    const CamouflagePlan& plan) {
    for (const PlanEntry& e : plan.entries) check_entry(nl, e);

    NetlistBuilder b(nl.name());
    for (const Net& n : nl.nets()) declare_net(b, n);

    std::unordered_set<std::string> instances;
    for (const Gate& g : nl.gates()) instances.insert(g.name);

    // (gate, pin) -> fresh mux output net taking over that pin.
    std::unordered_map<uint64_t, std::string> rewired;
    auto pin_key = [](GateId g, uint32_t pin) {
        return (static_cast<uint64_t>(g) << 32) | pin;
    };

    CamoKey key;
    key.circuit = nl.name();
    for (size_t k = 0; k < plan.entries.size(); ++k) {
        const PlanEntry& e = plan.entries[k];
        std::string out = fresh_net_name(b, nl.net(e.target).name, k);
        b.add_wire(out);
        rewired[pin_key(e.sink_gate, e.sink_pin)] = out;

        KeyEntry ke;
        ke.instance = fresh_instance_name(instances, k);
        instances.insert(ke.instance);
        ke.width = static_cast<int>(e.mux_inputs.size());
        ke.output = out;
        for (NetId in : e.mux_inputs) ke.inputs.push_back(nl.net(in).name);
        ke.selected = e.selected_index;
        key.entries.push_back(std::move(ke));
    }

    for (GateId gid = 0; gid < nl.gates().size(); ++gid) {
        const Gate& g = nl.gate(gid);
        std::vector<std::string> inputs;
        for (uint32_t pin = 0; pin < g.inputs.size(); ++pin) {
            auto it = rewired.find(pin_key(gid, pin));
            inputs.push_back(it != rewired.end() ? it->second
                                                 : nl.net(g.inputs[pin]).name);
        }
        b.add_gate(g.kind, g.name, nl.net(g.output).name, inputs);
    }
    for (const KeyEntry& ke : key.entries)
        b.add_gate(camomux_kind(ke.width), ke.instance, ke.output, ke.inputs);

    return CamouflageResult{b.finish(), std::move(key)};
}

Netlist apply_key(const Netlist& attacker_view, const CamoKey& key) {
    std::unordered_map<std::string, const KeyEntry*> by_instance;
    for (const KeyEntry& ke : key.entries) by_instance[ke.instance] = &ke;

    for (const KeyEntry& ke : key.entries) {
        auto gid = attacker_view.find_gate(ke.instance);
        if (!gid)
            throw ValidationError("key names unknown instance " + ke.instance);
        const Gate& g = attacker_view.gate(*gid);
        if (!is_camomux(g.kind))
            throw ValidationError("key instance " + ke.instance +
                                  " is not a camouflaged mux");
        if (camomux_width(g.kind) != ke.width)
            throw ValidationError(
                "key width " + std::to_string(ke.width) + " for " +
                ke.instance + " does not match the netlist's " +
                std::to_string(camomux_width(g.kind)));
        if (ke.selected < 0 || ke.selected >= ke.width)
            throw ValidationError("key position " + std::to_string(ke.selected) +
                                  " for " + ke.instance + " is out of range");
        if (attacker_view.net(g.output).name != ke.output)
            throw ValidationError("key output net " + ke.output + " for " +
                                  ke.instance + " does not match the netlist");
        for (size_t i = 0; i < g.inputs.size(); ++i)
            if (attacker_view.net(g.inputs[i]).name != ke.inputs[i])
                throw ValidationError("key inputs for " + ke.instance +
                                      " do not match the netlist");
    }

    NetlistBuilder b(attacker_view.name());
    for (const Net& n : attacker_view.nets()) declare_net(b, n);
    for (const Gate& g : attacker_view.gates()) {
        if (is_camomux(g.kind)) {
            auto it = by_instance.find(g.name);
            if (it == by_instance.end())
                throw ValidationError("key leaves camouflaged mux " + g.name +
                                      " unresolved");
            const KeyEntry& ke = *it->second;
            b.add_gate(GateKind::Buf, g.name,
                       attacker_view.net(g.output).name,
                       {ke.inputs[ke.selected]});
        } else {
            std::vector<std::string> inputs;
            for (NetId in : g.inputs)
                inputs.push_back(attacker_view.net(in).name);
            b.add_gate(g.kind, g.name, attacker_view.net(g.output).name,
                       inputs);
        }
    }
    return b.finish();
}

std::string export_key(const CamoKey& key) {
    nlohmann::ordered_json doc;
    doc["circuit"] = key.circuit;
    doc["muxes"] = nlohmann::ordered_json::array();
    for (const KeyEntry& ke : key.entries) {
        nlohmann::ordered_json m;
        m["instance"] = ke.instance;
        m["width"] = ke.width;
        m["output"] = ke.output;
        m["inputs"] = ke.inputs;
        m["selected"] = ke.selected;
        doc["muxes"].push_back(std::move(m));
    }
    return doc.dump(2) + "\n";
}

CamoKey import_key(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("key file is not valid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("circuit") ||
        !doc["circuit"].is_string() || !doc.contains("muxes") ||
        !doc["muxes"].is_array())
        throw Error("key file must be an object with circuit and muxes");

    CamoKey key;
    key.circuit = doc["circuit"].get<std::string>();
    for (const auto& m : doc["muxes"]) {
        if (!m.is_object() || !m.contains("instance") ||
            !m["instance"].is_string() || !m.contains("width") ||
            !m["width"].is_number_integer() || !m.contains("output") ||
            !m["output"].is_string() || !m.contains("inputs") ||
            !m["inputs"].is_array() || !m.contains("selected") ||
            !m["selected"].is_number_integer())
        throw Error(
            "each mux needs instance, width, output, inputs, selected");
        KeyEntry ke;
        ke.instance = m["instance"].get<std::string>();
        ke.width = m["width"].get<int>();
        ke.output = m["output"].get<std::string>();
        for (const auto& in : m["inputs"]) {
            if (!in.is_string())
                throw Error("mux inputs must be net names");
            ke.inputs.push_back(in.get<std::string>());
        }
        ke.selected = m["selected"].get<int>();
        if (ke.width != 2 && ke.width != 4 && ke.width != 8 && ke.width != 16)
            throw Error("mux width must be one of 2, 4, 8, 16, got " +
                        std::to_string(ke.width));
        if (ke.inputs.size() != static_cast<size_t>(ke.width))
            throw Error("mux " + ke.instance + " lists " +
                        std::to_string(ke.inputs.size()) +
                        " inputs for width " + std::to_string(ke.width));
        if (ke.selected < 0 || ke.selected >= ke.width)
            throw Error("mux " + ke.instance + " selected position " +
                        std::to_string(ke.selected) + " is out of range");
        key.entries.push_back(std::move(ke));
    }
    return key;
}

CamoKey read_key_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open key file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return import_key(ss.str());
}

void write_key_file(const CamoKey& key, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write key file " + path);
    out << export_key(key);
}

}  // namespace camo
