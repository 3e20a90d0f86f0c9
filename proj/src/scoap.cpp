#include "camo/scoap.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

namespace camo {

namespace {

constexpr int64_t kUnset = std::numeric_limits<int64_t>::max() / 4;

void reject_camomux(const Netlist& nl) {
    for (const Gate& g : nl.gates()) {
        if (is_camomux(g.kind))
            throw Error("testability analysis requires a mux-free netlist; "
                        "found camouflage cell '" +
                        g.name + "'");
    }
}

CcPair xor2_cc(const CcPair& a, const CcPair& b) {
    return {std::min(a.cc0 + b.cc0, a.cc1 + b.cc1) + 1,
            std::min(a.cc0 + b.cc1, a.cc1 + b.cc0) + 1};
}

CcPair xnor2_cc(const CcPair& a, const CcPair& b) {
    return {std::min(a.cc0 + b.cc1, a.cc1 + b.cc0) + 1,
            std::min(a.cc0 + b.cc0, a.cc1 + b.cc1) + 1};
}

}  // namespace

std::vector<CcPair> compute_controllability(const Netlist& nl) {
    reject_camomux(nl);
    std::vector<CcPair> cc(nl.nets().size(), {kUnset, kUnset});
    for (NetId pi : nl.primary_inputs()) cc[pi] = {1, 1};

    for (GateId gid : topological_order(nl)) {
        const Gate& g = nl.gate(gid);
        auto in = [&](size_t i) -> const CcPair& { return cc[g.inputs[i]]; };
        CcPair out;
        switch (g.kind) {
            case GateKind::And: {
                int64_t sum1 = 0, min0 = kUnset;
                for (NetId n : g.inputs) {
                    sum1 += cc[n].cc1;
                    min0 = std::min(min0, cc[n].cc0);
                }
                out = {min0 + 1, sum1 + 1};
                break;
            }
            case GateKind::Nand: {
                int64_t sum1 = 0, min0 = kUnset;
                for (NetId n : g.inputs) {
                    sum1 += cc[n].cc1;
                    min0 = std::min(min0, cc[n].cc0);
                }
                out = {sum1 + 1, min0 + 1};
                break;
            }
            case GateKind::Or: {
                int64_t sum0 = 0, min1 = kUnset;
                for (NetId n : g.inputs) {
                    sum0 += cc[n].cc0;
                    min1 = std::min(min1, cc[n].cc1);
                }
                out = {sum0 + 1, min1 + 1};
                break;
            }
            case GateKind::Nor: {
                int64_t sum0 = 0, min1 = kUnset;
                for (NetId n : g.inputs) {
                    sum0 += cc[n].cc0;
                    min1 = std::min(min1, cc[n].cc1);
                }
                out = {min1 + 1, sum0 + 1};
                break;
            }
            case GateKind::Not:
                out = {in(0).cc1 + 1, in(0).cc0 + 1};
                break;
            case GateKind::Buf:
                out = {in(0).cc0 + 1, in(0).cc1 + 1};
                break;
            case GateKind::Xor: {
                CcPair acc = in(0);
                for (size_t i = 1; i < g.inputs.size(); ++i)
                    acc = xor2_cc(acc, in(i));
                out = acc;
                break;
            }
            case GateKind::Xnor: {
                CcPair acc = in(0);
                for (size_t i = 1; i < g.inputs.size(); ++i)
                    acc = xnor2_cc(acc, in(i));
                out = acc;
                break;
            }
            default:
                throw Error("unexpected gate kind in controllability pass");
        }
        cc[g.output] = out;
    }
    return cc;
}

namespace {

template <typename CcAt>
int64_t branch_obs_impl(const Gate& g, uint32_t pin, int64_t out_obs,
                        CcAt cc_at) {
    switch (g.kind) {
        case GateKind::And:
        case GateKind::Nand: {
            int64_t sum = 0;
            for (uint32_t j = 0; j < g.inputs.size(); ++j)
                if (j != pin) sum += cc_at(g.inputs[j]).cc1;
            return out_obs + sum + 1;
        }
        case GateKind::Or:
        case GateKind::Nor: {
            int64_t sum = 0;
            for (uint32_t j = 0; j < g.inputs.size(); ++j)
                if (j != pin) sum += cc_at(g.inputs[j]).cc0;
            return out_obs + sum + 1;
        }
        case GateKind::Xor:
        case GateKind::Xnor: {
            int64_t sum = 0;
            for (uint32_t j = 0; j < g.inputs.size(); ++j)
                if (j != pin) {
                    CcPair c = cc_at(g.inputs[j]);
                    sum += std::min(c.cc0, c.cc1);
                }
            return out_obs + sum + 1;
        }
        case GateKind::Not:
        case GateKind::Buf:
            return out_obs + 1;
        default:
            throw Error("unexpected gate kind in observability pass");
    }
}

}  // namespace

std::vector<int64_t> compute_observability(const Netlist& nl,
                                           const std::vector<CcPair>& cc) {
    reject_camomux(nl);
    std::vector<int64_t> obs(nl.nets().size(), kUnset);
    for (NetId po : nl.primary_outputs()) obs[po] = 0;

    auto order = topological_order(nl);
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const Gate& g = nl.gate(*it);
        int64_t out_obs = obs[g.output];
        if (out_obs == kUnset)
            throw Error("net '" + nl.net(g.output).name +
                        "' cannot reach any primary output");
        for (uint32_t pin = 0; pin < g.inputs.size(); ++pin) {
            int64_t b = branch_obs_impl(g, pin, out_obs,
                                        [&](NetId n) { return cc[n]; });
            obs[g.inputs[pin]] = std::min(obs[g.inputs[pin]], b);
        }
    }
    return obs;
}

ScoapResult annotate(const Netlist& nl) {
    auto cc = compute_controllability(nl);
    auto obs = compute_observability(nl, cc);
    ScoapResult r;
    r.nets.resize(nl.nets().size());
    for (NetId id = 0; id < nl.nets().size(); ++id) {
        ScoapValues& v = r.nets[id];
        v.cc0 = cc[id].cc0;
        v.cc1 = cc[id].cc1;
        v.obs = obs[id];
        v.fanout_count = nl.fanout_count(id);
        v.metric_m = v.cc0 + v.cc1 + v.obs;
    }
    return r;
}

int64_t branch_observability(const Netlist& nl, const ScoapResult& scoap,
                             GateId g, uint32_t pin) {
    const Gate& gate = nl.gate(g);
    if (pin >= gate.inputs.size())
        throw Error("pin index out of range for gate '" + gate.name + "'");
    return branch_obs_impl(gate, pin, scoap.nets[gate.output].obs,
                           [&](NetId n) {
                               return CcPair{scoap.nets[n].cc0,
                                             scoap.nets[n].cc1};
                           });
}

std::string scoap_csv(const Netlist& nl, const ScoapResult& scoap) {
    std::vector<NetId> ids(nl.nets().size());
    for (NetId id = 0; id < ids.size(); ++id) ids[id] = id;
    std::sort(ids.begin(), ids.end(), [&](NetId a, NetId b) {
        return nl.net(a).name < nl.net(b).name;
    });
    std::ostringstream out;
    out << "net,cc0,cc1,obs,fanout,metric_m\n";
    for (NetId id : ids) {
        const ScoapValues& v = scoap.nets[id];
        out << nl.net(id).name << ',' << v.cc0 << ',' << v.cc1 << ','
            << v.obs << ',' << v.fanout_count << ',' << v.metric_m << "\n";
    }
    return out.str();
}

}  // namespace camo
