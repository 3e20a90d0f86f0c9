#include "camo/simulation.hpp"

#include <algorithm>
#include <unordered_map>

#include "camo/error.hpp"
#include "camo/rng.hpp"

namespace camo {

std::vector<int> selected_pins(const Netlist& nl, const CamoKey* key) {
    std::unordered_map<std::string, const KeyEntry*> by_instance;
    if (key)
        for (const KeyEntry& ke : key->entries) by_instance[ke.instance] = &ke;

    std::vector<int> pick(nl.gates().size(), -1);
    for (GateId gid = 0; gid < nl.gates().size(); ++gid) {
        const Gate& g = nl.gate(gid);
        if (!is_camomux(g.kind)) continue;
        auto it = by_instance.find(g.name);
        if (it == by_instance.end())
            throw Error("camouflaged mux " + g.name + " needs a key entry");
        const KeyEntry& ke = *it->second;
        if (ke.width != camomux_width(g.kind))
            throw Error("key width " + std::to_string(ke.width) + " for " +
                        g.name + " does not match the netlist's " +
                        std::to_string(camomux_width(g.kind)));
        if (ke.selected < 0 || ke.selected >= ke.width)
            throw Error("key position " + std::to_string(ke.selected) +
                        " for " + g.name + " is out of range");
        pick[gid] = ke.selected;
    }
    return pick;
}

namespace {

template <typename Word>
Word eval_gate(GateKind kind, const std::vector<Word>& ins) {
    switch (kind) {
        case GateKind::And:
        case GateKind::Nand: {
            Word w = ~Word(0);
            for (Word in : ins) w &= in;
            return kind == GateKind::And ? w : ~w;
        }
        case GateKind::Or:
        case GateKind::Nor: {
            Word w = 0;
            for (Word in : ins) w |= in;
            return kind == GateKind::Or ? w : ~w;
        }
        case GateKind::Xor:
        case GateKind::Xnor: {
            Word w = 0;
            for (Word in : ins) w ^= in;
            // Left-folded XNOR negates the parity once per fold step, so the
            // negations cancel except when the input count is even.
            if (kind == GateKind::Xnor && ins.size() % 2 == 0) w = ~w;
            return w;
        }
        case GateKind::Not:
            return ~ins[0];
        case GateKind::Buf:
            return ins[0];
        default:
            throw Error("camouflaged mux reached plain gate evaluation");
    }
}

}  // namespace

OutputMap evaluate(const Netlist& nl, const InputVector& v,
                   const CamoKey* key) {
    std::vector<int> pick = selected_pins(nl, key);

    for (const auto& [name, bit] : v) {
        (void)bit;
        auto id = nl.find_net(name);
        if (!id || !nl.net(*id).is_primary_input)
            throw Error("input vector names unknown primary input " + name);
    }

    std::vector<uint64_t> value(nl.nets().size(), 0);
    for (NetId pi : nl.primary_inputs()) {
        auto it = v.find(nl.net(pi).name);
        if (it == v.end())
            throw Error("input vector is missing primary input " +
                        nl.net(pi).name);
        value[pi] = it->second ? ~uint64_t(0) : 0;
    }

    std::vector<uint64_t> ins;
    for (GateId gid : topological_order(nl)) {
        const Gate& g = nl.gate(gid);
        if (pick[gid] >= 0) {
            value[g.output] = value[g.inputs[pick[gid]]];
            continue;
        }
        ins.clear();
        for (NetId in : g.inputs) ins.push_back(value[in]);
        value[g.output] = eval_gate(g.kind, ins);
    }

    OutputMap out;
    for (NetId po : nl.primary_outputs())
        out[nl.net(po).name] = (value[po] & 1) != 0;
    return out;
}

BitSim::BitSim(const Netlist& nl, const CamoKey* key)
    : nl_(&nl), topo_(topological_order(nl)), mux_pick_(selected_pins(nl, key)) {}

std::vector<uint64_t> BitSim::run(const std::vector<uint64_t>& pi_words) const {
    const Netlist& nl = *nl_;
    if (pi_words.size() != nl.primary_inputs().size())
        throw Error("bit-parallel run needs one word per primary input");

    std::vector<uint64_t> value(nl.nets().size(), 0);
    for (size_t i = 0; i < pi_words.size(); ++i)
        value[nl.primary_inputs()[i]] = pi_words[i];

    std::vector<uint64_t> ins;
    for (GateId gid : topo_) {
        const Gate& g = nl.gate(gid);
        if (mux_pick_[gid] >= 0) {
            value[g.output] = value[g.inputs[mux_pick_[gid]]];
            continue;
        }
        ins.clear();
        for (NetId in : g.inputs) ins.push_back(value[in]);
        value[g.output] = eval_gate(g.kind, ins);
    }

    std::vector<uint64_t> out(nl.primary_outputs().size());
    for (size_t i = 0; i < out.size(); ++i)
        out[i] = value[nl.primary_outputs()[i]];
    return out;
}

std::string EquivalenceVerdict::describe() const {
    switch (kind) {
        case EquivalenceKind::ExhaustiveEquivalent:
            return "EQUIVALENT (exhaustive, " + std::to_string(vectors) +
                   " vectors)";
        case EquivalenceKind::SampledEquivalent:
            return "EQUIVALENT (sampled, " + std::to_string(vectors) +
                   " vectors)";
        case EquivalenceKind::Counterexample: {
            std::string s = "MISMATCH at";
            for (const auto& [name, bit] : witness)
                s += " " + name + "=" + (bit ? "1" : "0");
            return s;
        }
    }
    return "";
}

namespace {

// Bit j of word i enumerates counter bit i of vector (base + j) for i < 6;
// higher counter bits are constant within a 64-vector block.
constexpr uint64_t kCounterPattern[6] = {
    0xaaaaaaaaaaaaaaaaull, 0xccccccccccccccccull, 0xf0f0f0f0f0f0f0f0ull,
    0xff00ff00ff00ff00ull, 0xffff0000ffff0000ull, 0xffffffff00000000ull,
};

std::vector<std::string> sorted_names(const Netlist& nl,
                                      const std::vector<NetId>& ids) {
    std::vector<std::string> out;
    for (NetId id : ids) out.push_back(nl.net(id).name);
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

EquivalenceVerdict equivalence(const Netlist& a, const Netlist& b,
                               const CamoKey* key_a, const CamoKey* key_b,
                               uint64_t budget, uint64_t seed) {
    if (sorted_names(a, a.primary_inputs()) !=
        sorted_names(b, b.primary_inputs()))
        throw Error("primary input names differ; circuits are not comparable");
    if (sorted_names(a, a.primary_outputs()) !=
        sorted_names(b, b.primary_outputs()))
        throw Error("primary output names differ; circuits are not comparable");
    if (budget == 0) throw Error("vector budget must be positive");

    BitSim sim_a(a, key_a);
    BitSim sim_b(b, key_b);

    size_t n = a.primary_inputs().size();
    // b's PI i reads the word built for the same-named input of a.
    std::vector<size_t> b_pi_from_a(b.primary_inputs().size());
    for (size_t i = 0; i < b.primary_inputs().size(); ++i) {
        const std::string& name = b.net(b.primary_inputs()[i]).name;
        for (size_t j = 0; j < n; ++j)
            if (a.net(a.primary_inputs()[j]).name == name) b_pi_from_a[i] = j;
    }
    std::vector<size_t> b_po_of_a(a.primary_outputs().size());
    for (size_t i = 0; i < a.primary_outputs().size(); ++i) {
        const std::string& name = a.net(a.primary_outputs()[i]).name;
        for (size_t j = 0; j < b.primary_outputs().size(); ++j)
            if (b.net(b.primary_outputs()[j]).name == name) b_po_of_a[i] = j;
    }

    std::vector<uint64_t> words_a(n), words_b(b_pi_from_a.size());
    auto run_block = [&](uint64_t valid_mask) -> int {
        for (size_t i = 0; i < words_b.size(); ++i)
            words_b[i] = words_a[b_pi_from_a[i]];
        std::vector<uint64_t> po_a = sim_a.run(words_a);
        std::vector<uint64_t> po_b = sim_b.run(words_b);
        for (size_t i = 0; i < po_a.size(); ++i) {
            uint64_t diff = (po_a[i] ^ po_b[b_po_of_a[i]]) & valid_mask;
            if (diff) return __builtin_ctzll(diff);
        }
        return -1;
    };

    EquivalenceVerdict verdict;
    bool exhaustive = n <= 62 && (uint64_t(1) << n) <= budget;
    if (exhaustive) {
        uint64_t total = uint64_t(1) << n;
        for (uint64_t base = 0; base < total; base += 64) {
            uint64_t cnt = std::min<uint64_t>(64, total - base);
            for (size_t j = 0; j < n; ++j)
                words_a[j] = j < 6 ? kCounterPattern[j]
                                   : ((base >> j) & 1 ? ~uint64_t(0) : 0);
            uint64_t mask =
                cnt == 64 ? ~uint64_t(0) : (uint64_t(1) << cnt) - 1;
            int hit = run_block(mask);
            if (hit >= 0) {
                uint64_t vec = base + static_cast<uint64_t>(hit);
                verdict.kind = EquivalenceKind::Counterexample;
                verdict.vectors = vec + 1;
                for (size_t j = 0; j < n; ++j)
                    verdict.witness[a.net(a.primary_inputs()[j]).name] =
                        (vec >> j) & 1;
                return verdict;
            }
        }
        verdict.kind = EquivalenceKind::ExhaustiveEquivalent;
        verdict.vectors = total;
        return verdict;
    }

    Rng rng(seed);
    uint64_t done = 0;
    while (done < budget) {
        uint64_t cnt = std::min<uint64_t>(64, budget - done);
        for (size_t j = 0; j < n; ++j) words_a[j] = rng.next_u64();
        uint64_t mask = cnt == 64 ? ~uint64_t(0) : (uint64_t(1) << cnt) - 1;
        int hit = run_block(mask);
        if (hit >= 0) {
            verdict.kind = EquivalenceKind::Counterexample;
            verdict.vectors = done + static_cast<uint64_t>(hit) + 1;
            for (size_t j = 0; j < n; ++j)
                verdict.witness[a.net(a.primary_inputs()[j]).name] =
                    (words_a[j] >> hit) & 1;
            return verdict;
        }
        done += cnt;
    }
    verdict.kind = EquivalenceKind::SampledEquivalent;
    verdict.vectors = budget;
    return verdict;
}

}  // namespace camo
