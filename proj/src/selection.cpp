#include "camo/selection.hpp"

#include <algorithm>
#include <cmath>

#include "camo/error.hpp"

namespace camo {

const char* strategy_name(Strategy s) {
    return s == Strategy::Metric ? "metric" : "random";
}

Strategy strategy_from_name(const std::string& s) {
    if (s == "metric") return Strategy::Metric;
    if (s == "random") return Strategy::Random;
    throw Error("unknown strategy '" + s + "' (expected metric or random)");
}

void validate_config(const SelectionConfig& cfg) {
    if (!(cfg.percent > 0.0) || cfg.percent > 100.0)
        throw ValidationError("percent must be in (0, 100], got " +
                              std::to_string(cfg.percent));
    if (cfg.mux_width != 2 && cfg.mux_width != 4 && cfg.mux_width != 8 &&
        cfg.mux_width != 16)
        throw ValidationError("mux width must be one of 2, 4, 8, 16, got " +
                              std::to_string(cfg.mux_width));
}

std::vector<NetId> qualified_nets(const Netlist& nl, const ScoapResult& scoap) {
    std::vector<NetId> out;
    for (NetId id = 0; id < nl.nets().size(); ++id)
        if (scoap.at(id).fanout_count >= 2) out.push_back(id);
    return out;
}

std::vector<NetId> rank_nets(const Netlist& nl,
                             const std::vector<NetId>& qualified,
                             const ScoapResult& scoap) {
    std::vector<NetId> out = qualified;
    std::sort(out.begin(), out.end(), [&](NetId a, NetId b) {
        const ScoapValues& va = scoap.at(a);
        const ScoapValues& vb = scoap.at(b);
        if (va.fanout_count != vb.fanout_count)
            return va.fanout_count > vb.fanout_count;
        if (va.metric_m != vb.metric_m) return va.metric_m > vb.metric_m;
        return nl.net(a).name < nl.net(b).name;
    });
    return out;
}

namespace {

// ceil(percent/100 * n) with a guard against binary round-off pushing an
// exact product like 10% of 40 just above the integer it equals.
size_t target_count(double percent, size_t n) {
    double k = std::ceil(percent * static_cast<double>(n) / 100.0 - 1e-9);
    if (k < 1.0) k = 1.0;
    return static_cast<size_t>(k);
}

// First k entries of a uniform without-replacement draw over base.
std::vector<NetId> draw_without_replacement(std::vector<NetId> base, size_t k,
                                            Rng& rng) {
    for (size_t i = 0; i < k; ++i) {
        size_t j = i + static_cast<size_t>(
                           rng.next_below(static_cast<uint64_t>(base.size() - i)));
        std::swap(base[i], base[j]);
    }
    base.resize(k);
    return base;
}

}  // namespace

std::vector<NetId> select_targets(const Netlist& nl,
                                  const std::vector<NetId>& ranked,
                                  const ScoapResult& scoap,
                                  const SelectionConfig& cfg, Rng& rng,
                                  std::vector<std::string>* warnings) {
    (void)scoap;
    if (ranked.empty())
        throw ValidationError("no qualified nets to camouflage in module '" +
                              nl.name() + "'");
    size_t k = target_count(cfg.percent, nl.nets().size());
    if (k > ranked.size()) {
        if (warnings)
            warnings->push_back(
                "requested " + std::to_string(k) + " targets but only " +
                std::to_string(ranked.size()) +
                " nets are qualified; camouflaging all of them");
        return ranked;
    }
    if (cfg.target_strategy == Strategy::Metric)
        return std::vector<NetId>(ranked.begin(), ranked.begin() + k);
    return draw_without_replacement(ranked, k, rng);
}

PlanGraph::PlanGraph(const Netlist& nl)
    : nl_(nl), extra_(nl.nets().size()) {}

std::vector<char> PlanGraph::forbidden_for_sink(GateId sink_gate) const {
    std::vector<char> seen(nl_.nets().size(), 0);
    std::vector<NetId> stack{nl_.gate(sink_gate).output};
    seen[stack.back()] = 1;
    while (!stack.empty()) {
        NetId n = stack.back();
        stack.pop_back();
        for (const NetSink& s : nl_.net(n).sinks) {
            NetId out = nl_.gate(s.gate).output;
            if (!seen[out]) {
                seen[out] = 1;
                stack.push_back(out);
            }
        }
        for (NetId out : extra_[n]) {
            if (!seen[out]) {
                seen[out] = 1;
                stack.push_back(out);
            }
        }
    }
    return seen;
}

void PlanGraph::add_mux(const std::vector<NetId>& mux_inputs,
                        GateId sink_gate) {
    NetId out = nl_.gate(sink_gate).output;
    for (NetId in : mux_inputs) extra_[in].push_back(out);
}

std::vector<NetId> select_fakes(const Netlist& nl, NetId target,
                                GateId sink_gate, const ScoapResult& scoap,
                                const SelectionConfig& cfg, Rng& rng,
                                const PlanGraph& graph) {
    std::vector<char> forbidden = graph.forbidden_for_sink(sink_gate);
    std::vector<NetId> pool;
    for (NetId id = 0; id < nl.nets().size(); ++id)
        if (id != target && !forbidden[id]) pool.push_back(id);

    size_t need = static_cast<size_t>(cfg.mux_width) - 1;
    if (pool.size() < need)
        throw ValidationError(
            "net " + nl.net(target).name + ": mux width " +
            std::to_string(cfg.mux_width) + " needs " + std::to_string(need) +
            " fake inputs but only " + std::to_string(pool.size()) +
            " legal candidates exist (short by " +
            std::to_string(need - pool.size()) + ")");

    if (cfg.fake_strategy == Strategy::Metric) {
        std::sort(pool.begin(), pool.end(), [&](NetId a, NetId b) {
            const ScoapValues& va = scoap.at(a);
            const ScoapValues& vb = scoap.at(b);
            if (va.metric_m != vb.metric_m) return va.metric_m > vb.metric_m;
            return nl.net(a).name < nl.net(b).name;
        });
        pool.resize(need);
        return pool;
    }
    return draw_without_replacement(std::move(pool), need, rng);
}

namespace {

// Branch with the highest observability cost; ties broken by gate instance
// name, then pin index. Qualified nets always have at least one gate sink.
NetSink pick_sink(const Netlist& nl, const ScoapResult& scoap, NetId target) {
    const Net& net = nl.net(target);
    const NetSink* best = nullptr;
    int64_t best_obs = -1;
    for (const NetSink& s : net.sinks) {
        int64_t obs = branch_observability(nl, scoap, s.gate, s.pin);
        bool better = false;
        if (obs != best_obs) {
            better = obs > best_obs;
        } else {
            const std::string& an = nl.gate(s.gate).name;
            const std::string& bn = nl.gate(best->gate).name;
            if (an != bn)
                better = an < bn;
            else
                better = s.pin < best->pin;
        }
        if (better) {
            best = &s;
            best_obs = obs;
        }
    }
    if (!best)
        throw ValidationError("net " + net.name +
                              " has no gate branch to camouflage");
    return *best;
}

}  // namespace

CamouflagePlan build_plan(const Netlist& nl, const ScoapResult& scoap,
                          const SelectionConfig& cfg) {
    validate_config(cfg);
    CamouflagePlan plan;
    std::vector<NetId> qualified = qualified_nets(nl, scoap);
    std::vector<NetId> ranked = rank_nets(nl, qualified, scoap);
    Rng rng(cfg.seed);
    std::vector<NetId> targets =
        select_targets(nl, ranked, scoap, cfg, rng, &plan.warnings);

    PlanGraph graph(nl);
    for (NetId target : targets) {
        NetSink sink = pick_sink(nl, scoap, target);
        PlanEntry e;
        e.target = target;
        e.sink_gate = sink.gate;
        e.sink_pin = sink.pin;
        e.fakes = select_fakes(nl, target, sink.gate, scoap, cfg, rng, graph);
        e.selected_index =
            static_cast<int>(rng.next_below(static_cast<uint64_t>(cfg.mux_width)));
        e.mux_inputs = e.fakes;
        e.mux_inputs.insert(e.mux_inputs.begin() + e.selected_index, target);
        graph.add_mux(e.mux_inputs, sink.gate);
        plan.entries.push_back(std::move(e));
    }
    return plan;
}

}  // namespace camo
