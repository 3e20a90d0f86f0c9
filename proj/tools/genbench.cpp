// Deterministic generator for the combinational benchmark suite. Each
// circuit is rebuilt from scratch out of its name's hash, so regenerating
// always reproduces the committed files byte for byte.

#include <algorithm>
#include <cmath>
#include <deque>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "camo/netlist.hpp"
#include "camo/rng.hpp"

using namespace camo;

namespace {

struct SizeSpec {
    const char* name;
    int pis;
    int pos;
    int gates;
};

// Classic two-level-logic benchmark shapes: interface widths and gate counts
// follow the familiar c432..c7552 suite.
const SizeSpec kSuite[] = {
    {"c432", 36, 7, 160},    {"c499", 41, 32, 202},  {"c880", 60, 26, 383},
    {"c1355", 41, 32, 546},  {"c1908", 33, 25, 880}, {"c2670", 233, 140, 1193},
    {"c3540", 50, 22, 1669}, {"c5315", 178, 123, 2307},
    {"c6288", 32, 32, 2406}, {"c7552", 207, 108, 3512},
};

const char* kC17Source =
    "module c17 (N1, N2, N3, N6, N7, N22, N23);\n"
    "  input N1, N2, N3, N6, N7;\n"
    "  output N22, N23;\n"
    "  wire N10, N11, N16, N19;\n"
    "  nand NAND2_1 (N10, N1, N3);\n"
    "  nand NAND2_2 (N11, N3, N6);\n"
    "  nand NAND2_3 (N16, N2, N11);\n"
    "  nand NAND2_4 (N19, N11, N7);\n"
    "  nand NAND2_5 (N22, N10, N16);\n"
    "  nand NAND2_6 (N23, N16, N19);\n"
    "endmodule\n";

// Inverters and buffers thin, 2-input gates dominant, a sprinkle of wide
// gates; XOR/XNOR stay 2-input like the classic netlists.
int pick_arity(Rng& rng) {
    uint64_t r = rng.next_below(100);
    if (r < 12) return 1;
    if (r < 86) return 2;
    if (r < 96) return 3;
    return 4;
}

// Signal probability of a gate output under an input-independence
// assumption, used to keep generated logic lively instead of letting long
// AND/OR chains saturate nets to constants.
double out_prob(GateKind kind, const std::vector<double>& p) {
    switch (kind) {
        case GateKind::And:
        case GateKind::Nand: {
            double r = 1.0;
            for (double x : p) r *= x;
            return kind == GateKind::Nand ? 1.0 - r : r;
        }
        case GateKind::Or:
        case GateKind::Nor: {
            double r = 1.0;
            for (double x : p) r *= 1.0 - x;
            return kind == GateKind::Nor ? r : 1.0 - r;
        }
        case GateKind::Xor:
        case GateKind::Xnor: {
            double odd = 0.0;
            for (double x : p) odd = odd * (1.0 - x) + (1.0 - odd) * x;
            if (kind == GateKind::Xnor && p.size() % 2 == 0) odd = 1.0 - odd;
            return odd;
        }
        case GateKind::Not:
            return 1.0 - p[0];
        default:
            return p[0];
    }
}

// Choose the gate's function after its inputs are known: sample from the
// usual kind mix, but only among kinds whose output stays away from the
// constant rails. Without this filter random logic goes quiet a few levels
// in and nothing downstream is observable anymore.
GateKind choose_kind(Rng& rng, const std::vector<double>& p) {
    if (p.size() == 1)
        return rng.next_below(5) == 0 ? GateKind::Buf : GateKind::Not;
    struct Weighted {
        GateKind kind;
        uint64_t weight;
    };
    std::vector<Weighted> cands = {{GateKind::Nand, 22},
                                   {GateKind::And, 16},
                                   {GateKind::Or, 14},
                                   {GateKind::Nor, 12}};
    if (p.size() == 2) {
        cands.push_back({GateKind::Xor, 6});
        cands.push_back({GateKind::Xnor, 4});
    }
    std::vector<Weighted> lively;
    GateKind best = cands[0].kind;
    double best_d = 2.0;
    uint64_t total = 0;
    for (const Weighted& c : cands) {
        double q = out_prob(c.kind, p);
        double d = std::fabs(q - 0.5);
        if (d < best_d) {
            best_d = d;
            best = c.kind;
        }
        if (q >= 0.2 && q <= 0.8) {
            lively.push_back(c);
            total += c.weight;
        }
    }
    if (lively.empty()) return best;
    uint64_t r = rng.next_below(total);
    for (const Weighted& c : lively) {
        if (r < c.weight) return c.kind;
        r -= c.weight;
    }
    return lively.back().kind;
}

uint64_t word_eval(GateKind kind, const std::vector<uint64_t>& in) {
    uint64_t v = 0;
    switch (kind) {
        case GateKind::And:
        case GateKind::Nand:
            v = ~0ull;
            for (uint64_t x : in) v &= x;
            if (kind == GateKind::Nand) v = ~v;
            break;
        case GateKind::Or:
        case GateKind::Nor:
            v = 0;
            for (uint64_t x : in) v |= x;
            if (kind == GateKind::Nor) v = ~v;
            break;
        case GateKind::Xor:
        case GateKind::Xnor:
            v = 0;
            for (uint64_t x : in) v ^= x;
            if (kind == GateKind::Xnor && in.size() % 2 == 0) v = ~v;
            break;
        case GateKind::Not:
            v = ~in[0];
            break;
        default:
            v = in[0];
            break;
    }
    return v;
}

// Fraction of fan-out branches of multi-fanout nets whose value flip is
// visible at some primary output across a sampled vector set. Camouflage
// sites live on exactly these branches; a generated circuit has to keep
// them observable, or mux sites would be untestable dead ends that no
// oracle-guided attack could ever witness.
double branch_health(const Netlist& nl, int n_words) {
    std::vector<GateId> topo = topological_order(nl);
    std::vector<int> rank(nl.gates().size(), 0);
    for (size_t i = 0; i < topo.size(); ++i)
        rank[topo[i]] = static_cast<int>(i);

    struct Branch {
        GateId gate;
        uint32_t pin;
        bool seen;
    };
    std::vector<Branch> branches;
    for (NetId n = 0; n < nl.nets().size(); ++n) {
        if (nl.fanout_count(n) < 2) continue;
        for (const NetSink& s : nl.net(n).sinks)
            branches.push_back({s.gate, s.pin, false});
    }
    if (branches.empty()) return 1.0;
    std::sort(branches.begin(), branches.end(),
              [&](const Branch& a, const Branch& b) {
                  return std::pair(rank[a.gate], a.pin) <
                         std::pair(rank[b.gate], b.pin);
              });

    // downstream gates of a sink gate, topologically ordered, cached since
    // several audited pins share the same gate
    std::vector<std::vector<GateId>> cones(nl.gates().size());
    std::vector<char> cone_done(nl.gates().size(), 0);
    std::vector<char> mark(nl.gates().size(), 0);
    auto cone_of = [&](GateId g) -> const std::vector<GateId>& {
        if (cone_done[g]) return cones[g];
        std::vector<NetId> stack = {nl.gate(g).output};
        std::vector<GateId>& cone = cones[g];
        while (!stack.empty()) {
            NetId n = stack.back();
            stack.pop_back();
            for (const NetSink& s : nl.net(n).sinks) {
                if (mark[s.gate]) continue;
                mark[s.gate] = 1;
                cone.push_back(s.gate);
                stack.push_back(nl.gate(s.gate).output);
            }
        }
        for (GateId h : cone) mark[h] = 0;
        std::sort(cone.begin(), cone.end(),
                  [&](GateId a, GateId b) { return rank[a] < rank[b]; });
        cone_done[g] = 1;
        return cone;
    };

    Rng rng(fnv1a64(nl.name()) ^ 0x9e3779b97f4a7c15ull);
    std::vector<uint64_t> base(nl.nets().size(), 0);
    std::vector<uint64_t> over(nl.nets().size(), 0);
    std::vector<uint32_t> stamp(nl.nets().size(), 0);
    std::vector<uint64_t> ins;
    uint32_t epoch = 0;
    size_t observable = 0;
    for (int w = 0; w < n_words && observable < branches.size(); ++w) {
        for (NetId pi : nl.primary_inputs()) base[pi] = rng.next_u64();
        for (GateId gid : topo) {
            const Gate& g = nl.gate(gid);
            ins.clear();
            for (NetId in : g.inputs) ins.push_back(base[in]);
            base[g.output] = word_eval(g.kind, ins);
        }
        for (Branch& b : branches) {
            if (b.seen) continue;
            const Gate& g = nl.gate(b.gate);
            ins.clear();
            for (size_t i = 0; i < g.inputs.size(); ++i)
                ins.push_back(i == b.pin ? ~base[g.inputs[i]]
                                         : base[g.inputs[i]]);
            uint64_t o = word_eval(g.kind, ins);
            if (o == base[g.output]) continue;
            if (nl.net(g.output).is_primary_output) {
                b.seen = true;
                ++observable;
                continue;
            }
            ++epoch;
            stamp[g.output] = epoch;
            over[g.output] = o;
            auto get = [&](NetId x) {
                return stamp[x] == epoch ? over[x] : base[x];
            };
            for (GateId h : cone_of(b.gate)) {
                const Gate& hg = nl.gate(h);
                ins.clear();
                for (NetId in : hg.inputs) ins.push_back(get(in));
                uint64_t v = word_eval(hg.kind, ins);
                if (v == base[hg.output]) continue;
                stamp[hg.output] = epoch;
                over[hg.output] = v;
                if (nl.net(hg.output).is_primary_output) {
                    b.seen = true;
                    ++observable;
                    break;
                }
            }
        }
    }
    return static_cast<double>(observable) / branches.size();
}

// Grow a DAG gate by gate. A FIFO queue holds nets that no gate reads yet;
// a global pop budget of pis + gates - pos guarantees that exactly pos nets
// are never popped (they become the outputs) and, because pops run oldest
// first, that every primary input is consumed. The remaining input slots
// re-read existing nets with a bias toward recent ones, which creates both
// depth and multi-fanout stems.
Netlist generate(const std::string& name, int salt, int n_pi, int n_po,
                 int n_gates) {
    Rng rng(fnv1a64(salt == 0 ? name : name + "#" + std::to_string(salt)));

    std::vector<int> arities;
    long long slots = 0;
    for (int i = 0; i < n_gates; ++i) {
        arities.push_back(pick_arity(rng));
        slots += arities.back();
    }
    long long pops = static_cast<long long>(n_pi) + n_gates - n_po;
    if (pops < 0 || pops > slots)
        throw Error("circuit shape " + name + " is not generatable");

    int total = n_pi + n_gates;
    std::vector<std::vector<int>> gate_inputs(n_gates);
    std::deque<int> queue;
    std::vector<char> in_queue(total, 0);
    for (int i = 0; i < n_pi; ++i) {
        queue.push_back(i);
        in_queue[i] = 1;
    }

    long long r_budget = pops, s_rem = slots;
    std::vector<GateKind> kinds(n_gates);
    std::vector<double> prob(total, 0.5);
    for (int g = 0; g < n_gates; ++g) {
        int a = arities[g];
        std::vector<int>& ins = gate_inputs[g];
        auto taken = [&](int x) {
            return std::find(ins.begin(), ins.end(), x) != ins.end();
        };
        int created = n_pi + g;

        for (int slot = 0; slot < a; ++slot) {
            bool do_pop = r_budget == s_rem ||
                          (r_budget > 0 && !queue.empty() &&
                           rng.next_below(static_cast<uint64_t>(s_rem)) <
                               static_cast<uint64_t>(r_budget));
            if (do_pop) {
                auto it = queue.begin();
                while (it != queue.end() && taken(*it)) ++it;
                if (it == queue.end()) {
                    do_pop = false;  // queue exhausted by this gate's own pins
                } else {
                    int x = *it;
                    queue.erase(it);
                    in_queue[x] = 0;
                    ins.push_back(x);
                    --r_budget;
                }
            }
            if (!do_pop) {
                // Recency-biased re-read. The queue's front stays reserved
                // for pops, and small queues are avoided entirely so forced
                // pops always find an eligible net.
                int idx = -1;
                for (int attempt = 0; attempt < 8 && idx < 0; ++attempt) {
                    double lag = std::pow(rng.next_double(), 3.0) * (created - 1);
                    int cand = created - 1 - static_cast<int>(lag);
                    bool queued_guard =
                        in_queue[cand] &&
                        (queue.size() <= 2 * static_cast<size_t>(a) ||
                         std::find(queue.begin(),
                                   queue.begin() +
                                       std::min<size_t>(a, queue.size()),
                                   cand) !=
                             queue.begin() +
                                 std::min<size_t>(a, queue.size()));
                    if (!taken(cand) && !queued_guard) idx = cand;
                }
                for (int cand = created - 1; idx < 0 && cand >= 0; --cand)
                    if (!taken(cand) && !in_queue[cand]) idx = cand;
                if (idx < 0) throw Error("no eligible re-read net in " + name);
                ins.push_back(idx);
            }
            --s_rem;
        }
        std::vector<double> in_probs;
        for (int idx : ins) in_probs.push_back(prob[idx]);
        kinds[g] = choose_kind(rng, in_probs);
        prob[created] = out_prob(kinds[g], in_probs);
        queue.push_back(created);
        in_queue[created] = 1;
    }

    if (queue.size() != static_cast<size_t>(n_po))
        throw Error("generator accounting drifted for " + name + ": " +
                    std::to_string(queue.size()) + " outputs, expected " +
                    std::to_string(n_po));

    auto net_name = [](int idx) { return "N" + std::to_string(idx + 1); };
    std::vector<char> is_po(total, 0);
    for (int idx : queue) is_po[idx] = 1;


    NetlistBuilder b(name);
    for (int i = 0; i < n_pi; ++i) b.add_primary_input(net_name(i));
    for (int idx : queue) b.add_primary_output(net_name(idx));
    for (int i = n_pi; i < total; ++i)
        if (!is_po[i]) b.add_wire(net_name(i));
    for (int g = 0; g < n_gates; ++g) {
        std::vector<std::string> ins;
        for (int idx : gate_inputs[g]) ins.push_back(net_name(idx));
        b.add_gate(kinds[g], "G" + std::to_string(g + 1), net_name(n_pi + g),
                   ins);
    }
    return b.finish();
}

// Redraw a circuit until every audited branch is observable, keeping the
// best draw when none is perfect. Big circuits tolerate a handful of dead
// branches; the small ones used for exact attack checks come out clean.
Netlist generate_best(const std::string& name, int n_pi, int n_po,
                      int n_gates) {
    constexpr int kAttempts = 24;
    constexpr int kWords = 32;
    std::optional<Netlist> best;
    double best_health = -1.0;
    for (int salt = 0; salt < kAttempts; ++salt) {
        Netlist nl = generate(name, salt, n_pi, n_po, n_gates);
        double h = branch_health(nl, kWords);
        if (h > best_health) {
            best_health = h;
            best = std::move(nl);
            if (best_health == 1.0) break;
        }
    }
    return std::move(*best);
}

int depth_of(const Netlist& nl) {
    std::vector<int> level(nl.nets().size(), 0);
    int best = 0;
    for (GateId g : topological_order(nl)) {
        int m = 0;
        for (NetId in : nl.gate(g).inputs) m = std::max(m, level[in]);
        level[nl.gate(g).output] = m + 1;
        best = std::max(best, m + 1);
    }
    return best;
}

void print_stats(const Netlist& nl) {
    int qualified = 0;
    for (NetId i = 0; i < nl.nets().size(); ++i)
        if (nl.fanout_count(i) >= 2) ++qualified;
    std::cout << nl.name() << ": " << nl.primary_inputs().size() << " PI, "
              << nl.primary_outputs().size() << " PO, " << nl.gates().size()
              << " gates, " << nl.nets().size() << " nets, depth "
              << depth_of(nl) << ", qualified " << qualified << " ("
              << (100.0 * qualified / static_cast<double>(nl.nets().size()))
              << "%), branch health "
              << (100.0 * branch_health(nl, 32)) << "%\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"regenerate the combinational benchmark suite"};
    std::string out_dir = "benchmarks";
    std::string only;
    bool stats = false;
    app.add_option("--out-dir", out_dir, "directory for the .v files");
    app.add_option("--only", only, "generate a single circuit by name");
    app.add_flag("--stats", stats, "print size, depth, and fanout figures");
    CLI11_PARSE(app, argc, argv);

    try {
        std::filesystem::create_directories(out_dir);
        auto emit = [&](const Netlist& nl) {
            write_netlist_file(nl, out_dir + "/" + nl.name() + ".v");
            if (stats) print_stats(nl);
        };
        if (only.empty() || only == "c17") emit(parse_netlist(kC17Source));
        for (const SizeSpec& s : kSuite) {
            if (!only.empty() && only != s.name) continue;
            emit(generate_best(s.name, s.pis, s.pos, s.gates));
        }
    } catch (const std::exception& e) {
        std::cerr << "genbench: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
