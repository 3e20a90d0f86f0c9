#include <doctest.h>

#include "camo/simulation.hpp"

#include "fixtures.hpp"

using namespace camo;
using namespace fixtures;

namespace {

InputVector c17_vector(bool n1, bool n2, bool n3, bool n6, bool n7) {
    return {{"N1", n1}, {"N2", n2}, {"N3", n3}, {"N6", n6}, {"N7", n7}};
}

const char* mixed_source() {
    return R"(module mixed (a, b, c, d, y1, y2, y3, y4);
  input a, b, c, d;
  output y1, y2, y3, y4;
  wire n, o;
  and g1 (n, a, b);
  nor g2 (o, c, d);
  xor g3 (y1, n, o);
  xnor g4 (y2, a, d);
  nand g5 (y3, n, o, a);
  or g6 (y4, o, b, c, d);
endmodule
)";
}

Netlist wide_gate(const std::string& name, GateKind kind, int n_pis) {
    NetlistBuilder b(name);
    std::vector<std::string> ins;
    for (int i = 0; i < n_pis; ++i) {
        ins.push_back("x" + std::to_string(i));
        b.add_primary_input(ins.back());
    }
    b.add_primary_output("z");
    b.add_gate(kind, "g", "z", ins);
    return b.finish();
}

CamouflageResult one_mux_c17(const Netlist& nl) {
    CamouflagePlan plan;
    PlanEntry e;
    e.target = nl.net_id("N11");
    e.sink_gate = *nl.find_gate("NAND2_3");
    e.sink_pin = 1;
    e.fakes = {nl.net_id("N10")};
    e.selected_index = 0;
    e.mux_inputs = {nl.net_id("N11"), nl.net_id("N10")};
    plan.entries.push_back(e);
    return camouflage_circuit(nl, plan);
}

}  // namespace

TEST_CASE("hand-traced c17 vector") {
    Netlist nl = c17();
    OutputMap out = evaluate(nl, c17_vector(1, 1, 1, 0, 0));
    CHECK(out.at("N22") == 1);
    CHECK(out.at("N23") == 1);
}

TEST_CASE("all-zero inputs drive both c17 outputs low") {
    // First-level NANDs all output 1, so the second level sees ones.
    Netlist nl = c17();
    OutputMap out = evaluate(nl, c17_vector(0, 0, 0, 0, 0));
    CHECK(out.at("N22") == 0);
    CHECK(out.at("N23") == 0);
}

TEST_CASE("buffer netlist forwards its input") {
    NetlistBuilder b("feed");
    b.add_primary_input("a");
    b.add_primary_output("z");
    b.add_gate(GateKind::Buf, "g", "z", {"a"});
    Netlist nl = b.finish();
    CHECK(evaluate(nl, {{"a", 0}}).at("z") == 0);
    CHECK(evaluate(nl, {{"a", 1}}).at("z") == 1);
}

TEST_CASE("folded xnor is parity negated once per extra input") {
    NetlistBuilder b("fold");
    b.add_primary_input("a");
    b.add_primary_input("b");
    b.add_primary_input("c");
    b.add_primary_output("z3");
    b.add_primary_output("w2");
    b.add_gate(GateKind::Xnor, "g3", "z3", {"a", "b", "c"});
    b.add_gate(GateKind::Xnor, "g2", "w2", {"a", "b"});
    Netlist nl = b.finish();

    auto vec = [](bool a, bool bb, bool c) {
        return InputVector{{"a", a}, {"b", bb}, {"c", c}};
    };
    // Odd input count: the fold's negations cancel to plain parity.
    CHECK(evaluate(nl, vec(1, 1, 0)).at("z3") == 0);
    CHECK(evaluate(nl, vec(1, 0, 0)).at("z3") == 1);
    CHECK(evaluate(nl, vec(1, 1, 1)).at("z3") == 1);
    // Even input count: negated parity.
    CHECK(evaluate(nl, vec(1, 1, 0)).at("w2") == 1);
    CHECK(evaluate(nl, vec(1, 0, 0)).at("w2") == 0);
}

TEST_CASE("vectors must cover the primary inputs exactly") {
    Netlist nl = c17();
    InputVector missing = {{"N1", 1}, {"N2", 1}, {"N3", 1}, {"N6", 0}};
    CHECK_THROWS_WITH_AS(evaluate(nl, missing),
                         doctest::Contains("missing primary input N7"), Error);

    InputVector extra = c17_vector(1, 1, 1, 0, 0);
    extra["NX"] = 1;
    CHECK_THROWS_WITH_AS(evaluate(nl, extra),
                         doctest::Contains("unknown primary input"), Error);

    InputVector internal = c17_vector(1, 1, 1, 0, 0);
    internal["N10"] = 1;
    CHECK_THROWS_WITH_AS(evaluate(nl, internal),
                         doctest::Contains("unknown primary input"), Error);
}

TEST_CASE("camouflaged evaluation needs a covering key") {
    Netlist nl = c17();
    CamouflageResult res = one_mux_c17(nl);
    InputVector v = c17_vector(1, 1, 1, 0, 0);
    CHECK_THROWS_WITH_AS(evaluate(res.attacker_view, v),
                         doctest::Contains("needs a key entry"), Error);
    CHECK(evaluate(res.attacker_view, v, &res.key) == evaluate(nl, v));
}

TEST_CASE("c17 is exhaustively equivalent to itself") {
    Netlist nl = c17();
    EquivalenceVerdict v = equivalence(nl, nl);
    CHECK(v.kind == EquivalenceKind::ExhaustiveEquivalent);
    CHECK(v.vectors == 32);
    CHECK(v.describe() == "EQUIVALENT (exhaustive, 32 vectors)");
}

TEST_CASE("wrong key yields a counterexample that re-verifies") {
    Netlist nl = c17();
    CamouflageResult res = one_mux_c17(nl);

    CamoKey wrong = res.key;
    wrong.entries[0].selected = 1;  // picks the fake N10
    EquivalenceVerdict v =
        equivalence(nl, res.attacker_view, nullptr, &wrong);
    REQUIRE(v.kind == EquivalenceKind::Counterexample);
    CHECK(v.describe().rfind("MISMATCH at ", 0) == 0);
    CHECK(evaluate(nl, v.witness) !=
          evaluate(res.attacker_view, v.witness, &wrong));

    EquivalenceVerdict good =
        equivalence(nl, res.attacker_view, nullptr, &res.key);
    CHECK(good.kind == EquivalenceKind::ExhaustiveEquivalent);
}

TEST_CASE("sampling kicks in when the budget is too small") {
    Netlist nl = c17();
    EquivalenceVerdict v = equivalence(nl, nl, nullptr, nullptr, 16);
    CHECK(v.kind == EquivalenceKind::SampledEquivalent);
    CHECK(v.vectors == 16);
    CHECK(v.describe() == "EQUIVALENT (sampled, 16 vectors)");

    Netlist wide = wide_gate("wide", GateKind::And, 23);
    EquivalenceVerdict w = equivalence(wide, wide, nullptr, nullptr, 1000);
    CHECK(w.kind == EquivalenceKind::SampledEquivalent);
    CHECK(w.vectors == 1000);
}

TEST_CASE("sampled counterexamples re-verify") {
    Netlist a = wide_gate("wide", GateKind::Or, 23);
    Netlist b = wide_gate("wide", GateKind::Nor, 23);
    EquivalenceVerdict v = equivalence(a, b, nullptr, nullptr, 1000);
    REQUIRE(v.kind == EquivalenceKind::Counterexample);
    CHECK(evaluate(a, v.witness) != evaluate(b, v.witness));
}

TEST_CASE("equivalence requires matching port name sets") {
    Netlist nl = c17();
    Netlist other = wide_gate("wide", GateKind::And, 5);
    CHECK_THROWS_WITH_AS(equivalence(nl, other),
                         doctest::Contains("primary input names differ"),
                         Error);
}

TEST_CASE("port order permutations do not confuse equivalence") {
    const char* permuted = R"(module c17 (N7, N3, N1, N2, N6, N23, N22);
  input N7, N3, N1, N2, N6;
  output N23, N22;
  wire N10, N11, N16, N19;
  nand NAND2_1 (N10, N1, N3);
  nand NAND2_2 (N11, N3, N6);
  nand NAND2_3 (N16, N2, N11);
  nand NAND2_4 (N19, N11, N7);
  nand NAND2_5 (N22, N10, N16);
  nand NAND2_6 (N23, N16, N19);
endmodule
)";
    EquivalenceVerdict v = equivalence(c17(), parse_netlist(permuted));
    CHECK(v.kind == EquivalenceKind::ExhaustiveEquivalent);
    CHECK(v.vectors == 32);
}

TEST_CASE("scalar and bit-parallel evaluation agree") {
    for (const Netlist& nl : {c17(), parse_netlist(mixed_source())}) {
        size_t n = nl.primary_inputs().size();
        REQUIRE(n <= 6);
        BitSim sim(nl);

        // All 2^n assignments in one word.
        std::vector<uint64_t> words(n);
        for (size_t j = 0; j < n; ++j) {
            uint64_t w = 0;
            for (uint64_t v = 0; v < (uint64_t(1) << n); ++v)
                if ((v >> j) & 1) w |= uint64_t(1) << v;
            words[j] = w;
        }
        std::vector<uint64_t> po = sim.run(words);

        for (uint64_t v = 0; v < (uint64_t(1) << n); ++v) {
            InputVector in;
            for (size_t j = 0; j < n; ++j)
                in[nl.net(nl.primary_inputs()[j]).name] = (v >> j) & 1;
            OutputMap out = evaluate(nl, in);
            for (size_t i = 0; i < nl.primary_outputs().size(); ++i) {
                bool bit = (po[i] >> v) & 1;
                CHECK(bit ==
                      out.at(nl.net(nl.primary_outputs()[i]).name));
            }
        }
    }
}
