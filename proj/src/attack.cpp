#include "camo/attack.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <limits>
#include <queue>
#include <set>
#include <utility>

#include "camo/error.hpp"
#include "camo/rng.hpp"

namespace camo {

namespace {

// Five-valued difference calculus. Every net carries a value in two planes
// at once: the "picked" plane, where the mux under attack forwards the
// candidate input, and the "other" plane, where it forwards one of the
// remaining inputs. Diff marks nets that are provably 1 picked / 0 other,
// DiffBar the inverse. X means unknown in at least one plane; a definite
// value never changes as more inputs get assigned, so definite conclusions
// hold in the real circuit no matter which input the mux actually selects.
enum V : uint8_t { kV0, kV1, kVX, kVD, kVB };

constexpr uint8_t kGoodPlane[5] = {0, 1, 2, 1, 0};
constexpr uint8_t kFaultPlane[5] = {0, 1, 2, 0, 1};

inline constexpr uint8_t plane_of(V v, int fault) {
    return fault ? kFaultPlane[v] : kGoodPlane[v];
}

inline constexpr uint8_t not3(uint8_t v) { return v == 2 ? 2 : v ^ 1; }

inline constexpr V combine(uint8_t good, uint8_t fault) {
    if (good == fault) return good == 0 ? kV0 : good == 1 ? kV1 : kVX;
    if (good == 1 && fault == 0) return kVD;
    if (good == 0 && fault == 1) return kVB;
    return kVX;  // one plane still unknown
}

// Binary composition tables over the five values, built from the per-plane
// three-valued operators so a table fold is exactly a plane-wise fold.
struct VTables {
    uint8_t land[5][5] = {};
    uint8_t lor[5][5] = {};
    uint8_t lxor[5][5] = {};
    uint8_t lnot[5] = {};
    constexpr VTables() {
        constexpr auto a3 = [](uint8_t p, uint8_t q) -> uint8_t {
            if (p == 0 || q == 0) return 0;
            if (p == 1 && q == 1) return 1;
            return 2;
        };
        constexpr auto o3 = [](uint8_t p, uint8_t q) -> uint8_t {
            if (p == 1 || q == 1) return 1;
            if (p == 0 && q == 0) return 0;
            return 2;
        };
        constexpr auto x3 = [](uint8_t p, uint8_t q) -> uint8_t {
            if (p == 2 || q == 2) return 2;
            return p ^ q;
        };
        for (int p = 0; p < 5; ++p) {
            V vp = (V)p;
            lnot[p] = combine(not3(plane_of(vp, 0)), not3(plane_of(vp, 1)));
            for (int q = 0; q < 5; ++q) {
                V vq = (V)q;
                uint8_t g0 = plane_of(vp, 0), g1 = plane_of(vq, 0);
                uint8_t f0 = plane_of(vp, 1), f1 = plane_of(vq, 1);
                land[p][q] = combine(a3(g0, g1), a3(f0, f1));
                lor[p][q] = combine(o3(g0, g1), o3(f0, f1));
                lxor[p][q] = combine(x3(g0, g1), x3(f0, f1));
            }
        }
    }
};

constexpr VTables kVT{};

// Three-valued fold shared by both planes of the search engine and the
// single-plane hypothesis simulator. `get` maps a net id to 0/1/2.
template <typename F>
uint8_t fold3(GateKind kind, const std::vector<NetId>& ins, F get) {
    switch (kind) {
        case GateKind::And:
        case GateKind::Nand: {
            uint8_t r = 1;
            for (NetId in : ins) {
                uint8_t p = get(in);
                if (p == 0) {
                    r = 0;
                    break;
                }
                if (p == 2) r = 2;
            }
            return kind == GateKind::Nand ? not3(r) : r;
        }
        case GateKind::Or:
        case GateKind::Nor: {
            uint8_t r = 0;
            for (NetId in : ins) {
                uint8_t p = get(in);
                if (p == 1) {
                    r = 1;
                    break;
                }
                if (p == 2) r = 2;
            }
            return kind == GateKind::Nor ? not3(r) : r;
        }
        case GateKind::Xor:
        case GateKind::Xnor: {
            uint8_t r = 0;
            for (NetId in : ins) {
                uint8_t p = get(in);
                if (p == 2) return 2;
                r ^= p;
            }
            // left-folded k-input xnor negates the parity once per stage
            if (kind == GateKind::Xnor && ins.size() % 2 == 0) r = not3(r);
            return r;
        }
        case GateKind::Not:
            return not3(get(ins[0]));
        case GateKind::Buf:
            return get(ins[0]);
        default:
            return 2;  // camouflaged muxes are handled by the caller
    }
}

constexpr int kFar = std::numeric_limits<int>::max() / 2;

// Branch-and-bound over primary-input assignments. Decisions are PI
// assignments chosen by backtracing an objective through X-valued nets;
// every assignment and every flip counts one node. The search succeeds when
// a primary output settles to Diff or DiffBar, which by construction of the
// mux model can only happen once the candidate input is 1 and every other
// data input is 0.
class Engine {
public:
    explicit Engine(const Netlist& nl)
        : nl_(nl),
          topo_(topological_order(nl)),
          rank_(nl.gates().size(), 0),
          po_dist_(nl.gates().size(), kFar),
          resolved_(nl.gates().size(), -1),
          val_(nl.nets().size(), kVX),
          po_flag_(nl.nets().size(), 0),
          cone_(nl.nets().size(), 0),
          gate_seen_(nl.gates().size(), 0),
          region_net_(nl.nets().size(), 0),
          region_gate_(nl.gates().size(), 0),
          pending_((nl.gates().size() + 63) / 64, 0),
          pend_lo_((int)((nl.gates().size() + 63) / 64)),
          seen_(nl.nets().size(), 0),
          in_frontier_(nl.gates().size(), 0) {
        bt_seen_[0].assign(nl.nets().size(), 0);
        bt_seen_[1].assign(nl.nets().size(), 0);
        for (size_t i = 0; i < topo_.size(); ++i) rank_[topo_[i]] = (int)i;
        for (size_t i = topo_.size(); i-- > 0;) {
            GateId g = topo_[i];
            NetId out = nl_.gate(g).output;
            if (nl_.net(out).is_primary_output) {
                po_dist_[g] = 0;
                continue;
            }
            int best = kFar;
            for (const NetSink& s : nl_.net(out).sinks)
                best = std::min(best, po_dist_[s.gate] >= kFar
                                          ? kFar
                                          : po_dist_[s.gate] + 1);
            po_dist_[g] = best;
        }
        for (NetId n = 0; n < nl_.nets().size(); ++n)
            po_flag_[n] = nl_.net(n).is_primary_output ? 1 : 0;
        // per-net sink gates with the nearest-to-output ones last, so the
        // reachability DFS below dives straight toward an output when one
        // is reachable at all
        sinks_by_dist_.resize(nl_.nets().size());
        for (NetId n = 0; n < nl_.nets().size(); ++n) {
            auto& v = sinks_by_dist_[n];
            for (const NetSink& s : nl_.net(n).sinks) v.push_back(s.gate);
            std::sort(v.begin(), v.end(), [&](GateId a, GateId b) {
                return po_dist_[a] > po_dist_[b];
            });
        }
    }

    void set_resolved(GateId g, int pin) { resolved_[g] = pin; }
    const std::vector<int>& resolved() const { return resolved_; }

    // Every camouflaged mux other than `mux` whose selection could influence
    // a justification for `mux`: it sits in the output cone, feeds a side
    // input along it, or drives the justification cone of a data input.
    // Purely structural, so callers can compute it once per mux.
    std::vector<GateId> region_muxes(GateId mux) {
        self_ = mux;
        build_cone();
        std::vector<GateId> out;
        for (GateId gid = 0; gid < nl_.gates().size(); ++gid) {
            if (gid == self_) continue;
            const Gate& g = nl_.gate(gid);
            if (!is_camomux(g.kind)) continue;
            if (region_gate_[gid] == region_epoch_) out.push_back(gid);
        }
        return out;
    }

    JustifyResult justify(GateId mux, int candidate, uint64_t node_budget) {
        self_ = mux;
        cand_ = candidate;
        budget_ = node_budget;
        nodes_ = 0;
        std::fill(val_.begin(), val_.end(), kVX);
        for (auto [dist, gid] : frontier_) in_frontier_[gid] = 0;
        frontier_.clear();
        diff_pos_ = 0;
        trail_.clear();
        frames_.clear();
        decisions_.clear();
        build_cone();

        JustifyResult out;
        for (;;) {
            if (diff_pos_ > 0) {
                auto hit = find_success();
                out.status = JustifyStatus::Found;
                out.po = nl_.net(hit.first).name;
                out.inverted = hit.second;
                for (NetId pi : nl_.primary_inputs())
                    out.vector[nl_.net(pi).name] = val_[pi] == kV1;
                out.nodes = nodes_;
                return out;
            }
            bool dead = fails();
            std::optional<std::pair<NetId, V>> dec;
            if (!dead) {
                dec = pick_decision();
                dead = !dec.has_value();
            }
            if (!dead) {
                decisions_.push_back({dec->first, false});
                if (!bump_node(out)) return out;
                assign(dec->first, dec->second);
                continue;
            }
            while (!decisions_.empty() && decisions_.back().flipped) {
                undo_frame();
                decisions_.pop_back();
            }
            if (decisions_.empty()) {
                out.blockers = collect_blockers();
                out.status = out.blockers.empty() ? JustifyStatus::None
                                                  : JustifyStatus::Blocked;
                out.nodes = nodes_;
                return out;
            }
            Decision& d = decisions_.back();
            V flipped = val_[d.pi] == kV1 ? kV0 : kV1;
            undo_frame();
            d.flipped = true;
            if (!bump_node(out)) return out;
            assign(d.pi, flipped);
        }
    }

private:
    struct Decision {
        NetId pi;
        bool flipped;
    };

    bool bump_node(JustifyResult& out) {
        if (nodes_ >= budget_) {
            out.status = JustifyStatus::Budget;
            out.nodes = nodes_;
            return false;
        }
        ++nodes_;
        return true;
    }

    void build_cone() {
        std::fill(cone_.begin(), cone_.end(), 0);
        std::fill(gate_seen_.begin(), gate_seen_.end(), 0);
        cone_gates_.clear();
        stack_.clear();
        NetId root = nl_.gate(self_).output;
        cone_[root] = 1;
        stack_.push_back(root);
        while (!stack_.empty()) {
            NetId n = stack_.back();
            stack_.pop_back();
            for (const NetSink& s : nl_.net(n).sinks) {
                if (!gate_seen_[s.gate]) {
                    gate_seen_[s.gate] = 1;
                    cone_gates_.push_back(s.gate);
                }
                NetId o = nl_.gate(s.gate).output;
                if (!cone_[o]) {
                    cone_[o] = 1;
                    stack_.push_back(o);
                }
            }
        }
        build_region();
    }

    // The search only ever reads values inside the fan-in closure of the
    // mux's data inputs and the cone gates' inputs. Propagating assignments
    // anywhere else is wasted motion, so implication stops at this boundary.
    void build_region() {
        ++region_epoch_;
        stack_.clear();
        auto visit = [&](NetId n) {
            if (region_net_[n] != region_epoch_) {
                region_net_[n] = region_epoch_;
                stack_.push_back(n);
            }
        };
        region_gate_[self_] = region_epoch_;
        for (NetId in : nl_.gate(self_).inputs) visit(in);
        for (GateId gid : cone_gates_) {
            region_gate_[gid] = region_epoch_;
            for (NetId in : nl_.gate(gid).inputs) visit(in);
        }
        while (!stack_.empty()) {
            NetId n = stack_.back();
            stack_.pop_back();
            const Net& net = nl_.net(n);
            if (!net.driver) continue;
            region_gate_[*net.driver] = region_epoch_;
            for (NetId in : nl_.gate(*net.driver).inputs) visit(in);
        }
    }

    V eval_gate(GateId gid) {
        const Gate& g = nl_.gate(gid);
        if (gid == self_) {
            // Difference source. Picked plane forwards the candidate; the
            // other plane is known only when every sibling agrees.
            uint8_t good = plane_of(val_[g.inputs[cand_]], 0);
            uint8_t fault = 3;
            for (size_t i = 0; i < g.inputs.size(); ++i) {
                if ((int)i == cand_) continue;
                uint8_t p = plane_of(val_[g.inputs[i]], 1);
                if (p == 2) {
                    fault = 2;
                    break;
                }
                if (fault == 3) {
                    fault = p;
                } else if (fault != p) {
                    fault = 2;
                    break;
                }
            }
            if (fault == 3) fault = 2;
            return combine(good, fault);
        }
        if (is_camomux(g.kind)) {
            int pin = resolved_[gid];
            if (pin >= 0) return val_[g.inputs[pin]];
            // unknown selection: a plane settles only by consensus of all
            // data inputs, which holds no matter which one is forwarded
            auto consensus = [&](int plane) -> uint8_t {
                uint8_t r = 3;
                for (NetId in : g.inputs) {
                    uint8_t p = plane_of(val_[in], plane);
                    if (p == 2) return 2;
                    if (r == 3)
                        r = p;
                    else if (r != p)
                        return 2;
                }
                return r == 3 ? 2 : r;
            };
            return combine(consensus(0), consensus(1));
        }
        uint8_t r = val_[g.inputs[0]];
        switch (g.kind) {
            case GateKind::And:
            case GateKind::Nand:
                for (size_t i = 1; i < g.inputs.size(); ++i)
                    r = kVT.land[r][val_[g.inputs[i]]];
                if (g.kind == GateKind::Nand) r = kVT.lnot[r];
                break;
            case GateKind::Or:
            case GateKind::Nor:
                for (size_t i = 1; i < g.inputs.size(); ++i)
                    r = kVT.lor[r][val_[g.inputs[i]]];
                if (g.kind == GateKind::Nor) r = kVT.lnot[r];
                break;
            case GateKind::Xor:
            case GateKind::Xnor:
                for (size_t i = 1; i < g.inputs.size(); ++i)
                    r = kVT.lxor[r][val_[g.inputs[i]]];
                // left-folded k-input xnor negates once per stage
                if (g.kind == GateKind::Xnor && g.inputs.size() % 2 == 0)
                    r = kVT.lnot[r];
                break;
            case GateKind::Not:
                r = kVT.lnot[r];
                break;
            default:  // Buf
                break;
        }
        return (V)r;
    }

    // Every value write funnels through here so two facts stay current at
    // O(fanout) cost instead of being rediscovered by whole-cone scans: the
    // count of outputs carrying the difference and the sensitization
    // frontier ordered by distance-to-output.
    void write_val(NetId n, V v) {
        V old = val_[n];
        val_[n] = v;
        bool was_diff = old == kVD || old == kVB;
        bool now_diff = v == kVD || v == kVB;
        if (po_flag_[n]) diff_pos_ += (int)now_diff - (int)was_diff;
        // frontier membership of the driver hinges on output X-ness, of the
        // sinks on an input carrying the difference; skip the rest
        const Net& net = nl_.net(n);
        if ((old == kVX) != (v == kVX) && net.driver)
            refresh_frontier(*net.driver);
        if (was_diff != now_diff)
            for (const NetSink& s : net.sinks) refresh_frontier(s.gate);
    }

    void refresh_frontier(GateId gid) {
        const Gate& g = nl_.gate(gid);
        bool want = !is_camomux(g.kind) && val_[g.output] == kVX &&
                    po_dist_[gid] < kFar;
        if (want) {
            want = false;
            for (NetId in : g.inputs)
                if (val_[in] == kVD || val_[in] == kVB) {
                    want = true;
                    break;
                }
        }
        if (want == (bool)in_frontier_[gid]) return;
        in_frontier_[gid] = want ? 1 : 0;
        if (want)
            frontier_.emplace(po_dist_[gid], gid);
        else
            frontier_.erase({po_dist_[gid], gid});
    }

    void set_val(NetId n, V v) {
        trail_.emplace_back(n, val_[n]);
        write_val(n, v);
    }

    void enqueue(GateId g) {
        if (region_gate_[g] != region_epoch_) return;
        int r = rank_[g];
        pending_[r >> 6] |= uint64_t(1) << (r & 63);
        if ((r >> 6) < pend_lo_) pend_lo_ = r >> 6;
    }

    // Pending evaluations keyed by topological rank. Every gate enqueued
    // during a drain ranks above the gate being processed, so one forward
    // sweep over the bitmap visits gates in exactly ascending rank order.
    void assign(NetId pi, V v) {
        frames_.push_back(trail_.size());
        set_val(pi, v);
        for (const NetSink& s : nl_.net(pi).sinks) enqueue(s.gate);
        for (int w = pend_lo_; w < (int)pending_.size(); ++w) {
            while (uint64_t bits = pending_[w]) {
                int b = __builtin_ctzll(bits);
                pending_[w] = bits & (bits - 1);
                GateId g = topo_[((size_t)w << 6) | (size_t)b];
                V nv = eval_gate(g);
                NetId out = nl_.gate(g).output;
                if (nv == val_[out]) continue;
                set_val(out, nv);
                for (const NetSink& s : nl_.net(out).sinks) enqueue(s.gate);
            }
        }
        pend_lo_ = (int)pending_.size();
    }

    void undo_frame() {
        size_t mark = frames_.back();
        frames_.pop_back();
        while (trail_.size() > mark) {
            write_val(trail_.back().first, trail_.back().second);
            trail_.pop_back();
        }
    }

    // only called when diff_pos_ says a hit exists
    std::pair<NetId, bool> find_success() const {
        for (NetId po : nl_.primary_outputs())
            if (val_[po] == kVD || val_[po] == kVB)
                return {po, val_[po] == kVB};
        throw Error("attack: difference bookkeeping out of sync");
    }

    bool fails() {
        const Gate& m = nl_.gate(self_);
        if (val_[m.inputs[cand_]] == kV0) return true;
        for (size_t i = 0; i < m.inputs.size(); ++i) {
            if ((int)i == cand_) continue;
            if (val_[m.inputs[i]] == kV1) return true;
        }
        return !difference_alive();
    }

    // The difference can still reach an output iff some path from the mux
    // output crosses only nets that are X or already carry the difference.
    // Sinks are walked nearest-output-last so the stack pops toward an
    // output first; a live region answers in about one path length.
    bool difference_alive() {
        NetId src = nl_.gate(self_).output;
        if (val_[src] == kV0 || val_[src] == kV1) return false;
        ++epoch_;
        stack_.clear();
        stack_.push_back(src);
        seen_[src] = epoch_;
        while (!stack_.empty()) {
            NetId n = stack_.back();
            stack_.pop_back();
            if (po_flag_[n]) return true;
            for (GateId g : sinks_by_dist_[n]) {
                NetId o = nl_.gate(g).output;
                if (seen_[o] == epoch_) continue;
                if (val_[o] == kV0 || val_[o] == kV1) continue;
                seen_[o] = epoch_;
                stack_.push_back(o);
            }
        }
        return false;
    }

    // An exhausted search proves nonexistence only if no foreign unresolved
    // mux could have hidden a solution: none may drive the justification
    // cones of the data inputs, sit in the output cone, or feed any side
    // input along it. Returns the offenders so the caller can skip reruns
    // until one of them is resolved; empty means the proof is final.
    std::vector<GateId> collect_blockers() {
        std::vector<GateId> blockers;
        for (GateId gid = 0; gid < nl_.gates().size(); ++gid) {
            if (gid == self_) continue;
            const Gate& g = nl_.gate(gid);
            if (!is_camomux(g.kind) || resolved_[gid] >= 0) continue;
            if (region_gate_[gid] == region_epoch_) blockers.push_back(gid);
        }
        return blockers;
    }

    std::optional<std::pair<NetId, V>> pick_decision() {
        const Gate& m = nl_.gate(self_);
        NetId cnet = m.inputs[cand_];
        // one-hot justification comes first: candidate to 1, siblings to 0
        if (val_[cnet] == kVX) return backtrace(cnet, true);
        for (size_t i = 0; i < m.inputs.size(); ++i) {
            if ((int)i == cand_) continue;
            if (val_[m.inputs[i]] == kVX) return backtrace(m.inputs[i], false);
        }
        // then sensitization: difference-frontier gates nearest an output,
        // kept current by write_val
        for (auto [dist, gid] : frontier_) {
            const Gate& g = nl_.gate(gid);
            bool side_want =
                g.kind == GateKind::And || g.kind == GateKind::Nand;
            for (NetId in : g.inputs) {
                if (val_[in] != kVX) continue;
                // every X side input of this gate is required eventually,
                // so a dead first one rules the whole gate out
                if (auto r = backtrace(in, side_want)) return r;
                break;
            }
        }
        return std::nullopt;
    }

    std::optional<std::pair<NetId, V>> backtrace(NetId n, bool want) {
        ++bt_epoch_;
        return bt_rec(n, want);
    }

    // Walk backward through X-valued nets to an unassigned primary input
    // that can move the objective net toward `want`. Returning empty prunes
    // the branch: an X net with no X-path to a free input keeps its value
    // for the rest of this subtree.
    std::optional<std::pair<NetId, V>> bt_rec(NetId n, bool want) {
        if (val_[n] != kVX) return std::nullopt;
        auto& seen = bt_seen_[want ? 1 : 0];
        if (seen[n] == bt_epoch_) return std::nullopt;
        seen[n] = bt_epoch_;
        const Net& net = nl_.net(n);
        if (!net.driver) return std::make_pair(n, want ? kV1 : kV0);
        GateId gid = *net.driver;
        if (gid == self_) return std::nullopt;  // opaque from below
        const Gate& g = nl_.gate(gid);
        if (is_camomux(g.kind)) {
            int pin = resolved_[gid];
            if (pin >= 0) return bt_rec(g.inputs[pin], want);
            // unknown selection: the output reaches `want` only when every
            // data input agrees on it, so drive them all there
            V stuck = want ? kV0 : kV1;
            for (NetId in : g.inputs)
                if (val_[in] == stuck || val_[in] == kVD || val_[in] == kVB)
                    return std::nullopt;
            for (NetId in : g.inputs)
                if (val_[in] == kVX) return bt_rec(in, want);
            return std::nullopt;
        }
        switch (g.kind) {
            case GateKind::Not:
                return bt_rec(g.inputs[0], !want);
            case GateKind::Buf:
                return bt_rec(g.inputs[0], want);
            case GateKind::And:
            case GateKind::Nand:
            case GateKind::Or:
            case GateKind::Nor: {
                bool and_core =
                    g.kind == GateKind::And || g.kind == GateKind::Nand;
                bool w = want;
                if (g.kind == GateKind::Nand || g.kind == GateKind::Nor)
                    w = !w;
                if (and_core ? w : !w) {
                    // all inputs must take the non-controlling value; a net
                    // already carrying the difference violates one plane
                    for (NetId in : g.inputs)
                        if (val_[in] == kVD || val_[in] == kVB)
                            return std::nullopt;
                    for (NetId in : g.inputs)
                        if (val_[in] == kVX) return bt_rec(in, and_core);
                    return std::nullopt;
                }
                // any single controlling input settles the output
                for (NetId in : g.inputs) {
                    if (val_[in] != kVX) continue;
                    if (auto r = bt_rec(in, !and_core)) return r;
                }
                return std::nullopt;
            }
            case GateKind::Xor:
            case GateKind::Xnor: {
                uint8_t parity = 0;
                NetId first_x = kNoNet;
                for (NetId in : g.inputs) {
                    V v = val_[in];
                    if (v == kVD || v == kVB) return std::nullopt;
                    if (v == kVX) {
                        if (first_x == kNoNet) first_x = in;
                    } else {
                        parity ^= v == kV1;
                    }
                }
                if (first_x == kNoNet) return std::nullopt;
                bool negate = g.kind == GateKind::Xnor &&
                              g.inputs.size() % 2 == 0;
                // aim the parity as if the remaining X inputs settle at 0
                bool need = want ^ (parity != 0) ^ negate;
                return bt_rec(first_x, need);
            }
            default:
                return std::nullopt;
        }
    }

    const Netlist& nl_;
    std::vector<GateId> topo_;
    std::vector<int> rank_;
    std::vector<int> po_dist_;
    std::vector<int> resolved_;

    GateId self_ = 0;
    int cand_ = 0;
    uint64_t budget_ = 0;
    uint64_t nodes_ = 0;
    std::vector<V> val_;
    std::vector<char> po_flag_;
    std::vector<std::vector<GateId>> sinks_by_dist_;
    std::vector<char> cone_;
    std::vector<char> gate_seen_;
    std::vector<GateId> cone_gates_;
    std::vector<uint32_t> region_net_;
    std::vector<uint32_t> region_gate_;
    uint32_t region_epoch_ = 0;
    std::vector<uint64_t> pending_;
    int pend_lo_;
    std::vector<std::pair<NetId, V>> trail_;
    std::vector<size_t> frames_;
    std::vector<Decision> decisions_;
    std::vector<uint32_t> seen_;
    uint32_t epoch_ = 0;
    std::vector<uint32_t> bt_seen_[2];
    uint32_t bt_epoch_ = 0;
    std::vector<NetId> stack_;
    std::set<std::pair<int, GateId>> frontier_;
    std::vector<char> in_frontier_;
    int diff_pos_ = 0;
};

// Single-plane three-valued simulator for hypothesis elimination. Unresolved
// muxes other than the one under test stay unknown except by input consensus,
// so a definite output disagreement with the oracle is grounds to kill a
// hypothesis no matter how those muxes eventually resolve.
class Sim3 {
public:
    explicit Sim3(const Netlist& nl)
        : nl_(nl),
          topo_(topological_order(nl)),
          val_(nl.nets().size(), 2),
          save_(nl.nets().size(), 2),
          in_cone_(nl.nets().size(), 0) {}

    // Base pass with the mux under test unknown. Hypotheses diverge only
    // inside the mux's fan-out cone, so run_hyp re-evaluates just that and
    // every other net keeps its base value.
    void prepare(const std::vector<int>& resolved, GateId self,
                 const std::vector<uint8_t>& pi_bits) {
        if (!have_cone_ || self != self_) {
            have_cone_ = true;
            self_ = self;
            build_cone();
        }
        resolved_ = &resolved;
        const auto& pis = nl_.primary_inputs();
        for (size_t i = 0; i < pis.size(); ++i) val_[pis[i]] = pi_bits[i];
        for (GateId gid : topo_) val_[nl_.gate(gid).output] = eval(gid, -1);
        for (NetId n : cone_nets_) save_[n] = val_[n];
    }

    // Primary-output values when the mux forwards data input `hyp`.
    const std::vector<uint8_t>& run_hyp(int hyp) {
        for (GateId gid : cone_topo_)
            val_[nl_.gate(gid).output] = eval(gid, hyp);
        po_.clear();
        for (NetId po : nl_.primary_outputs()) po_.push_back(val_[po]);
        for (NetId n : cone_nets_) val_[n] = save_[n];
        return po_;
    }

private:
    uint8_t eval(GateId gid, int hyp) const {
        const Gate& g = nl_.gate(gid);
        if (gid == self_) return hyp < 0 ? 2 : val_[g.inputs[(size_t)hyp]];
        if (is_camomux(g.kind)) {
            int pin = (*resolved_)[gid];
            if (pin >= 0) return val_[g.inputs[(size_t)pin]];
            // unknown selection still yields a definite value when all
            // data inputs agree on one
            uint8_t v = val_[g.inputs[0]];
            for (NetId in : g.inputs)
                if (val_[in] != v) return 2;
            return v;
        }
        return fold3(g.kind, g.inputs, [&](NetId n) { return val_[n]; });
    }

    void build_cone() {
        std::fill(in_cone_.begin(), in_cone_.end(), 0);
        NetId root = nl_.gate(self_).output;
        in_cone_[root] = 1;
        cone_nets_.assign(1, root);
        cone_topo_.assign(1, self_);
        // topo_ is dependency-ordered, so one forward sweep closes the cone
        for (GateId gid : topo_) {
            if (gid == self_) continue;
            const Gate& g = nl_.gate(gid);
            bool in = false;
            for (NetId x : g.inputs)
                if (in_cone_[x]) {
                    in = true;
                    break;
                }
            if (!in) continue;
            cone_topo_.push_back(gid);
            if (!in_cone_[g.output]) {
                in_cone_[g.output] = 1;
                cone_nets_.push_back(g.output);
            }
        }
    }

    const Netlist& nl_;
    std::vector<GateId> topo_;
    std::vector<uint8_t> val_;
    std::vector<uint8_t> save_;
    std::vector<char> in_cone_;
    std::vector<NetId> cone_nets_;
    std::vector<GateId> cone_topo_;
    std::vector<uint8_t> po_;
    const std::vector<int>* resolved_ = nullptr;
    GateId self_ = 0;
    bool have_cone_ = false;
};

enum CandState : uint8_t {
    kCandUntried,
    kCandDenied,   // oracle contradicted the one-hot prediction
    kCandNone,     // proven untestable; skipped but never eliminated
    kCandBlocked,  // retry once more muxes are resolved
    kCandBudget,
};

struct MuxWork {
    GateId gate = 0;
    std::string instance;
    int width = 2;
    std::vector<uint8_t> cand;
    std::vector<GateId> blockers;  // from the latest Blocked justification
    uint64_t nodes_left = 0;
    uint64_t patterns = 0;
    uint64_t nodes = 0;
    double wall = 0;
    std::optional<int> resolved;
    bool guess_tried = false;
};

MuxWork make_work(const Netlist& nl, GateId gid, const AttackBudgets& budgets) {
    MuxWork w;
    w.gate = gid;
    w.instance = nl.gate(gid).name;
    w.width = camomux_width(nl.gate(gid).kind);
    w.cand.assign(w.width, kCandUntried);
    w.nodes_left = budgets.nodes_per_mux;
    return w;
}

int lone_survivor(const MuxWork& w) {
    int alive = -1;
    for (int c = 0; c < w.width; ++c) {
        if (w.cand[c] == kCandDenied) continue;
        if (alive >= 0) return -1;
        alive = c;
    }
    return alive;
}

// One scan over the candidates. A confirming oracle answer resolves the mux
// outright; each denial may leave a lone survivor that wins by elimination,
// since denials rest on definite predictions and the true input can never
// be denied.
bool justify_round(Engine& eng, Oracle& oracle, MuxWork& w,
                   uint64_t& queries_left) {
    int lone = lone_survivor(w);
    if (lone >= 0) {
        w.resolved = lone;
        return true;
    }
    for (int c = 0; c < w.width; ++c) {
        uint8_t& st = w.cand[c];
        if (st == kCandDenied || st == kCandNone || st == kCandBudget)
            continue;
        if (w.nodes_left == 0) {
            st = kCandBudget;
            continue;
        }
        JustifyResult r = eng.justify(w.gate, c, w.nodes_left);
        w.nodes += r.nodes;
        w.nodes_left -= std::min<uint64_t>(r.nodes, w.nodes_left);
        switch (r.status) {
            case JustifyStatus::Found: {
                if (queries_left == 0) {
                    st = kCandBudget;
                    break;
                }
                OutputMap obs = oracle.query(r.vector);
                --queries_left;
                ++w.patterns;
                bool expected = !r.inverted;  // candidate forwards a 1
                if (obs.at(r.po) == expected) {
                    w.resolved = c;
                    return true;
                }
                st = kCandDenied;
                lone = lone_survivor(w);
                if (lone >= 0) {
                    w.resolved = lone;
                    return true;
                }
                break;
            }
            case JustifyStatus::None:
                st = kCandNone;
                break;
            case JustifyStatus::Blocked:
                st = kCandBlocked;
                // same region for every candidate, so last write is fine
                w.blockers = std::move(r.blockers);
                break;
            case JustifyStatus::Budget:
                st = kCandBudget;
                break;
        }
    }
    return false;
}

// Another justify pass can pay off only when untried candidates remain, a
// denial left a lone survivor, or one of the muxes that interfered with the
// last exhausted search has been resolved since; rerunning over an unchanged
// region merely repeats its answer at full node cost.
bool retry_worthy(const MuxWork& w, const std::vector<int>& resolved) {
    if (w.resolved) return false;
    if (lone_survivor(w) >= 0) return true;
    if (w.nodes_left == 0) return false;
    bool blocked = false;
    for (uint8_t s : w.cand) {
        if (s == kCandUntried) return true;
        blocked |= s == kCandBlocked;
    }
    if (!blocked) return false;
    for (GateId b : w.blockers)
        if (resolved[b] >= 0) return true;
    return false;
}

bool guess_round(const Netlist& av, Sim3& sim,
                 const std::vector<int>& resolved, Oracle& oracle, MuxWork& w,
                 Rng& rng, const AttackBudgets& budgets,
                 uint64_t& queries_left) {
    std::vector<int> alive;
    for (int c = 0; c < w.width; ++c)
        if (w.cand[c] != kCandDenied) alive.push_back(c);
    const auto& pis = av.primary_inputs();
    std::vector<uint8_t> bits(pis.size());
    for (uint64_t t = 0;
         t < budgets.guess_vectors && alive.size() > 1 && queries_left > 0;
         ++t) {
        InputVector v;
        for (size_t i = 0; i < pis.size(); ++i) {
            bits[i] = rng.next_bool() ? 1 : 0;
            v[av.net(pis[i]).name] = bits[i] != 0;
        }
        OutputMap obs = oracle.query(v);
        --queries_left;
        ++w.patterns;
        sim.prepare(resolved, w.gate, bits);
        for (auto it = alive.begin(); it != alive.end();) {
            const auto& po = sim.run_hyp(*it);
            bool dead = false;
            const auto& pos = av.primary_outputs();
            for (size_t j = 0; j < pos.size() && !dead; ++j) {
                if (po[j] == 2) continue;
                if ((po[j] != 0) != obs.at(av.net(pos[j]).name)) dead = true;
            }
            if (dead) {
                w.cand[*it] = kCandDenied;
                it = alive.erase(it);
            } else {
                ++it;
            }
        }
    }
    if (alive.size() == 1) {
        w.resolved = alive[0];
        return true;
    }
    return false;
}

GateId require_mux(const Netlist& nl, const std::string& instance) {
    auto gid = nl.find_gate(instance);
    if (!gid) throw Error("attack: no gate named '" + instance + "'");
    if (!is_camomux(nl.gate(*gid).kind))
        throw Error("attack: '" + instance + "' is not a camouflaged mux");
    return *gid;
}

void apply_resolved(Engine& eng, const Netlist& nl, const ResolvedMap& resolved) {
    for (const auto& [instance, pin] : resolved) {
        GateId gid = require_mux(nl, instance);
        int width = camomux_width(nl.gate(gid).kind);
        if (pin < 0 || pin >= width)
            throw Error("attack: resolved pin " + std::to_string(pin) +
                        " out of range for " + std::to_string(width) +
                        "-input mux '" + instance + "'");
        eng.set_resolved(gid, pin);
    }
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
}

}  // namespace

const char* attack_method_name(AttackMethod m) {
    switch (m) {
        case AttackMethod::Justify:
            return "justify";
        case AttackMethod::Guess:
            return "guess";
        case AttackMethod::Brute:
            return "brute";
    }
    return "justify";
}

AttackMethod attack_method_from_name(const std::string& s) {
    if (s == "justify") return AttackMethod::Justify;
    if (s == "guess") return AttackMethod::Guess;
    if (s == "brute") return AttackMethod::Brute;
    throw Error("unknown attack method '" + s +
                "' (expected justify, guess, or brute)");
}

SimOracle::SimOracle(const Netlist& nl, const CamoKey* key)
    : nl_(&nl), key_(key) {}

OutputMap SimOracle::query(const InputVector& v) {
    ++queries_;
    return evaluate(*nl_, v, key_);
}

JustifyResult justify_and_propagate(const Netlist& av, const std::string& mux,
                                    int candidate, const ResolvedMap& resolved,
                                    uint64_t node_budget) {
    GateId gid = require_mux(av, mux);
    int width = camomux_width(av.gate(gid).kind);
    if (candidate < 0 || candidate >= width)
        throw Error("attack: candidate " + std::to_string(candidate) +
                    " out of range for " + std::to_string(width) +
                    "-input mux '" + mux + "'");
    if (resolved.count(mux))
        throw Error("attack: mux '" + mux + "' is already resolved");
    Engine eng(av);
    apply_resolved(eng, av, resolved);
    return eng.justify(gid, candidate, node_budget);
}

ResolveOutcome resolve_mux(const Netlist& av, Oracle& oracle,
                           const std::string& mux, AttackMethod method,
                           const ResolvedMap& resolved, uint64_t seed,
                           const AttackBudgets& budgets) {
    GateId gid = require_mux(av, mux);
    if (resolved.count(mux))
        throw Error("attack: mux '" + mux + "' is already resolved");
    Engine eng(av);
    apply_resolved(eng, av, resolved);
    MuxWork w = make_work(av, gid, budgets);
    uint64_t queries_left = budgets.oracle_queries;
    switch (method) {
        case AttackMethod::Justify:
            justify_round(eng, oracle, w, queries_left);
            break;
        case AttackMethod::Guess: {
            Sim3 sim(av);
            Rng rng(seed);
            guess_round(av, sim, eng.resolved(), oracle, w, rng, budgets,
                        queries_left);
            break;
        }
        case AttackMethod::Brute:
            throw Error(
                "attack: brute force resolves the whole circuit at once; use "
                "attack_all");
    }
    return {w.resolved, w.patterns, w.nodes};
}

std::vector<CamoKey> brute_force_decamouflage(const Netlist& av,
                                              Oracle& oracle, uint64_t bound) {
    std::vector<GateId> muxes;
    for (GateId gid = 0; gid < av.gates().size(); ++gid)
        if (is_camomux(av.gate(gid).kind)) muxes.push_back(gid);
    std::sort(muxes.begin(), muxes.end(), [&](GateId a, GateId b) {
        return av.gate(a).name < av.gate(b).name;
    });

    size_t n_pi = av.primary_inputs().size();
    uint64_t combos = 1;
    for (GateId gid : muxes) {
        uint64_t w = (uint64_t)camomux_width(av.gate(gid).kind);
        if (combos > bound / w)
            throw Error("brute force bound exceeded: key space alone tops " +
                        std::to_string(bound));
        combos *= w;
    }
    if (n_pi >= 63 || (uint64_t(1) << n_pi) > bound / combos)
        throw Error("brute force bound exceeded: " + std::to_string(n_pi) +
                    " inputs x " + std::to_string(combos) +
                    " key combinations tops " + std::to_string(bound));
    uint64_t vecs = uint64_t(1) << n_pi;

    // one oracle sweep over every vector, shared by all key combinations
    const auto& pis = av.primary_inputs();
    const auto& pos = av.primary_outputs();
    size_t blocks = (size_t)((vecs + 63) / 64);
    std::vector<std::vector<uint64_t>> obs(pos.size(),
                                           std::vector<uint64_t>(blocks, 0));
    for (uint64_t idx = 0; idx < vecs; ++idx) {
        InputVector v;
        for (size_t j = 0; j < pis.size(); ++j)
            v[av.net(pis[j]).name] = (idx >> j) & 1;
        OutputMap o = oracle.query(v);
        for (size_t k = 0; k < pos.size(); ++k)
            if (o.at(av.net(pos[k]).name))
                obs[k][idx / 64] |= uint64_t(1) << (idx % 64);
    }

    std::vector<CamoKey> out;
    std::vector<uint64_t> pi_words(pis.size());
    for (uint64_t combo = 0; combo < combos; ++combo) {
        CamoKey key;
        key.circuit = av.name();
        uint64_t rest = combo;
        for (GateId gid : muxes) {
            const Gate& g = av.gate(gid);
            KeyEntry e;
            e.instance = g.name;
            e.width = camomux_width(g.kind);
            e.output = av.net(g.output).name;
            for (NetId in : g.inputs) e.inputs.push_back(av.net(in).name);
            e.selected = (int)(rest % (uint64_t)e.width);
            rest /= (uint64_t)e.width;
            key.entries.push_back(std::move(e));
        }
        BitSim sim(av, &key);
        bool ok = true;
        for (uint64_t base = 0; base < vecs && ok; base += 64) {
            uint64_t nb = std::min<uint64_t>(64, vecs - base);
            for (size_t j = 0; j < pis.size(); ++j) {
                uint64_t word = 0;
                for (uint64_t k = 0; k < nb; ++k)
                    if (((base + k) >> j) & 1) word |= uint64_t(1) << k;
                pi_words[j] = word;
            }
            std::vector<uint64_t> got = sim.run(pi_words);
            uint64_t mask =
                nb == 64 ? ~uint64_t(0) : (uint64_t(1) << nb) - 1;
            for (size_t k = 0; k < pos.size(); ++k)
                if ((got[k] ^ obs[k][base / 64]) & mask) {
                    ok = false;
                    break;
                }
        }
        if (ok) out.push_back(std::move(key));
    }
    if (out.empty())
        throw Error("no key assignment is consistent with the oracle");
    return out;
}

REEffortReport attack_all(const Netlist& av, Oracle& oracle,
                          AttackMethod method, uint64_t seed,
                          const AttackBudgets& budgets) {
    std::vector<MuxWork> works;
    for (GateId gid = 0; gid < av.gates().size(); ++gid)
        if (is_camomux(av.gate(gid).kind))
            works.push_back(make_work(av, gid, budgets));
    std::sort(works.begin(), works.end(),
              [](const MuxWork& a, const MuxWork& b) {
                  return a.instance < b.instance;
              });

    if (method == AttackMethod::Brute) {
        if (!works.empty()) {
            auto t0 = std::chrono::steady_clock::now();
            uint64_t q0 = oracle.queries();
            std::vector<CamoKey> keys =
                brute_force_decamouflage(av, oracle, budgets.brute_bound);
            double dt = seconds_since(t0);
            for (MuxWork& w : works) {
                std::optional<int> agreed;
                bool split = false;
                for (const CamoKey& key : keys) {
                    for (const KeyEntry& e : key.entries) {
                        if (e.instance != w.instance) continue;
                        if (!agreed) {
                            agreed = e.selected;
                        } else if (*agreed != e.selected) {
                            split = true;
                        }
                        break;
                    }
                }
                if (!split) w.resolved = agreed;
            }
            // the exhaustive sweep serves every mux at once; its pattern
            // count and wall time are billed to the first row
            works[0].patterns = oracle.queries() - q0;
            works[0].wall = dt;
        }
    } else {
        Engine eng(av);
        Sim3 sim(av);
        Rng rng(seed);
        uint64_t queries_left = budgets.oracle_queries;

        // Muxes whose search regions avoid other unresolved muxes go first;
        // a resolution can unblock anything that overlaps it, so the queue
        // is re-examined after every success. Regions are structural and do
        // not change when a mux resolves, only the pending counts do.
        std::vector<int> deps_left(works.size(), 0);
        std::vector<std::vector<size_t>> rdeps(av.gates().size());
        for (size_t i = 0; i < works.size(); ++i)
            for (GateId d : eng.region_muxes(works[i].gate)) {
                ++deps_left[i];
                rdeps[d].push_back(i);
            }
        auto resolve = [&](size_t i) {
            eng.set_resolved(works[i].gate, *works[i].resolved);
            for (size_t j : rdeps[works[i].gate]) --deps_left[j];
        };
        auto next_order = [&]() {
            std::vector<size_t> order;
            for (size_t i = 0; i < works.size(); ++i)
                if (!works[i].resolved) order.push_back(i);
            // works is instance-sorted, so stability breaks ties by name
            std::stable_sort(order.begin(), order.end(),
                             [&](size_t a, size_t b) {
                                 return deps_left[a] < deps_left[b];
                             });
            return order;
        };

        bool progress = true;
        while (progress) {
            progress = false;
            bool restart = true;
            while (restart) {
                restart = false;
                for (size_t i : next_order()) {
                    MuxWork& w = works[i];
                    bool ok = false;
                    auto t0 = std::chrono::steady_clock::now();
                    if (method == AttackMethod::Justify) {
                        if (!retry_worthy(w, eng.resolved())) continue;
                        ok = justify_round(eng, oracle, w, queries_left);
                    } else {
                        ok = guess_round(av, sim, eng.resolved(), oracle, w,
                                         rng, budgets, queries_left);
                    }
                    w.wall += seconds_since(t0);
                    if (ok) {
                        resolve(i);
                        progress = true;
                        restart = true;
                        break;
                    }
                }
            }
            if (!progress && method == AttackMethod::Justify) {
                for (size_t i : next_order()) {
                    MuxWork& w = works[i];
                    if (w.guess_tried) continue;
                    w.guess_tried = true;
                    auto t0 = std::chrono::steady_clock::now();
                    bool ok = guess_round(av, sim, eng.resolved(), oracle, w,
                                          rng, budgets, queries_left);
                    w.wall += seconds_since(t0);
                    if (ok) {
                        resolve(i);
                        progress = true;
                        break;
                    }
                }
            }
        }
    }

    REEffortReport rep;
    for (MuxWork& w : works) {
        MuxEffort e;
        e.instance = w.instance;
        e.width = w.width;
        e.resolved_index = w.resolved;
        e.patterns_applied = w.patterns;
        e.search_nodes = w.nodes;
        e.wall_seconds = w.wall;
        rep.total_patterns += w.patterns;
        rep.total_search_nodes += w.nodes;
        rep.total_wall_seconds += w.wall;
        rep.per_mux.push_back(std::move(e));
    }
    rep.simulated_time_ns = rep.total_patterns;  // one pattern per nanosecond
    return rep;
}

std::string re_effort_csv(const REEffortReport& report, const CamoKey* truth) {
    std::map<std::string, int> tru;
    if (truth)
        for (const KeyEntry& e : truth->entries) tru[e.instance] = e.selected;
    std::string out = "instance,width,resolved,true_index,correct,patterns,nodes,wall_ms\n";
    for (const MuxEffort& e : report.per_mux) {
        out += e.instance;
        out += ',';
        out += std::to_string(e.width);
        out += ',';
        out += e.resolved_index ? std::to_string(*e.resolved_index)
                                : std::string("UNRESOLVED");
        out += ',';
        auto it = tru.find(e.instance);
        bool known = truth && it != tru.end();
        if (known) out += std::to_string(it->second);
        out += ',';
        if (known && e.resolved_index)
            out += *e.resolved_index == it->second ? "1" : "0";
        out += ',';
        out += std::to_string(e.patterns_applied);
        out += ',';
        out += std::to_string(e.search_nodes);
        out += ',';
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3f", e.wall_seconds * 1000.0);
        out += buf;
        out += '\n';
    }
    return out;
}

}  // namespace camo
