#include <doctest.h>

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "camo/attack.hpp"
#include "camo/camouflage.hpp"
#include "camo/scoap.hpp"
#include "camo/selection.hpp"
#include "camo/simulation.hpp"

#include "fixtures.hpp"

using namespace camo;
using namespace fixtures;

namespace {

PlanEntry entry(const Netlist& nl, const std::string& target,
                const std::string& sink_gate, uint32_t pin,
                const std::vector<std::string>& fakes, int sel) {
    PlanEntry e;
    e.target = nl.net_id(target);
    e.sink_gate = *nl.find_gate(sink_gate);
    e.sink_pin = pin;
    for (const std::string& f : fakes) e.fakes.push_back(nl.net_id(f));
    e.selected_index = sel;
    e.mux_inputs = e.fakes;
    e.mux_inputs.insert(e.mux_inputs.begin() + sel, e.target);
    return e;
}

CamouflageResult one_mux_c17(int sel) {
    Netlist nl = c17();
    CamouflagePlan plan;
    plan.entries.push_back(entry(nl, "N11", "NAND2_3", 1, {"N10"}, sel));
    return camouflage_circuit(nl, plan);
}

CamouflageResult two_mux_c17() {
    Netlist nl = c17();
    ScoapResult scoap = annotate(nl);
    SelectionConfig cfg;
    cfg.percent = 15.0;
    cfg.mux_width = 2;
    cfg.seed = 1;
    CamouflagePlan plan = build_plan(nl, scoap, cfg);
    REQUIRE(plan.entries.size() == 2);
    return camouflage_circuit(nl, plan);
}

// Opaque mux whose observation path is stuck at constant 0: there is no
// input vector separating the two selections, and the output cone holds no
// other mux to blame.
Netlist blocked_observation() {
    NetlistBuilder b("deadend");
    b.add_primary_input("a");
    b.add_primary_input("b");
    b.add_primary_input("c");
    b.add_wire("na");
    b.add_wire("z");
    b.add_wire("mo");
    b.add_primary_output("y");
    b.add_gate(GateKind::Not, "g_na", "na", {"a"});
    b.add_gate(GateKind::And, "g_z", "z", {"a", "na"});
    b.add_gate(GateKind::CamoMux2, "m", "mo", {"b", "c"});
    b.add_gate(GateKind::And, "g_y", "y", {"mo", "z"});
    return b.finish();
}

// Both data inputs carry the same signal, so the two selections are a
// single function and nothing can ever tell them apart.
Netlist mirror_inputs() {
    NetlistBuilder b("mirror");
    b.add_primary_input("x");
    b.add_wire("y");
    b.add_wire("mo");
    b.add_primary_output("o1");
    b.add_gate(GateKind::Buf, "g_y", "y", {"x"});
    b.add_gate(GateKind::CamoMux2, "m", "mo", {"x", "y"});
    b.add_gate(GateKind::Buf, "g_o", "o1", {"mo"});
    return b.finish();
}

int true_index(const CamoKey& key, const std::string& instance) {
    for (const KeyEntry& e : key.entries)
        if (e.instance == instance) return e.selected;
    REQUIRE(false);
    return -1;
}

}  // namespace

TEST_CASE("one-hot search reproduces the pinned c17 vector") {
    CamouflageResult res = one_mux_c17(0);
    JustifyResult r =
        justify_and_propagate(res.attacker_view, "camo_0000", 0, {});
    REQUIRE(r.status == JustifyStatus::Found);
    InputVector want = {
        {"N1", true}, {"N2", true}, {"N3", true}, {"N6", false}, {"N7", false}};
    CHECK(r.vector == want);
    CHECK(r.po == "N23");
    CHECK(r.inverted == false);
    CHECK(r.nodes >= 5);
    CHECK(r.nodes <= 32);

    // the vector must separate the two selections at the reported output
    CamoKey pick = res.key;
    CamoKey other = res.key;
    other.entries[0].selected = 1;
    OutputMap o_pick = evaluate(res.attacker_view, r.vector, &pick);
    OutputMap o_other = evaluate(res.attacker_view, r.vector, &other);
    CHECK(o_pick.at(r.po) == !r.inverted);
    CHECK(o_other.at(r.po) == r.inverted);
}

TEST_CASE("decoy candidate gets its own decisive vector") {
    CamouflageResult res = one_mux_c17(0);
    JustifyResult r =
        justify_and_propagate(res.attacker_view, "camo_0000", 1, {});
    REQUIRE(r.status == JustifyStatus::Found);

    CamoKey as_decoy = res.key;
    as_decoy.entries[0].selected = 1;
    OutputMap o_decoy = evaluate(res.attacker_view, r.vector, &as_decoy);
    OutputMap o_true = evaluate(res.attacker_view, r.vector, &res.key);
    CHECK(o_decoy.at(r.po) == !r.inverted);
    CHECK(o_true.at(r.po) == r.inverted);
}

TEST_CASE("justify resolves the single mux with one pattern either way") {
    for (int sel : {0, 1}) {
        CAPTURE(sel);
        CamouflageResult res = one_mux_c17(sel);
        SimOracle oracle(res.attacker_view, &res.key);
        ResolveOutcome out = resolve_mux(res.attacker_view, oracle,
                                         "camo_0000", AttackMethod::Justify);
        REQUIRE(out.resolved_index.has_value());
        CHECK(*out.resolved_index == sel);
        // confirming answer on one side, denial plus elimination on the other
        CHECK(out.patterns == 1);
        CHECK(out.nodes >= 1);
    }
}

TEST_CASE("hypothesis elimination resolves the single mux") {
    CamouflageResult res = one_mux_c17(0);
    SimOracle oracle(res.attacker_view, &res.key);
    AttackBudgets budgets;
    budgets.guess_vectors = 32;
    ResolveOutcome out =
        resolve_mux(res.attacker_view, oracle, "camo_0000",
                    AttackMethod::Guess, {}, 1, budgets);
    REQUIRE(out.resolved_index.has_value());
    CHECK(*out.resolved_index == 0);
    CHECK(out.patterns >= 1);
    CHECK(out.patterns <= 32);
    CHECK(out.nodes == 0);
}

TEST_CASE("inverting observation path flips the recorded parity") {
    NetlistBuilder b("invpath");
    b.add_primary_input("a");
    b.add_primary_input("b");
    b.add_wire("mo");
    b.add_primary_output("o1");
    b.add_gate(GateKind::CamoMux2, "m", "mo", {"a", "b"});
    b.add_gate(GateKind::Not, "g_o", "o1", {"mo"});
    Netlist nl = b.finish();

    JustifyResult r = justify_and_propagate(nl, "m", 0, {});
    REQUIRE(r.status == JustifyStatus::Found);
    CHECK(r.po == "o1");
    CHECK(r.inverted == true);
    CHECK(r.vector == InputVector{{"a", true}, {"b", false}});

    CamoKey key;
    key.circuit = "invpath";
    key.entries.push_back({"m", 2, "mo", {"a", "b"}, 0});
    SimOracle oracle(nl, &key);
    ResolveOutcome out = resolve_mux(nl, oracle, "m", AttackMethod::Justify);
    REQUIRE(out.resolved_index.has_value());
    CHECK(*out.resolved_index == 0);
    CHECK(out.patterns == 1);
}

TEST_CASE("tied data inputs are proven untestable") {
    NetlistBuilder b("tied");
    b.add_primary_input("a");
    b.add_primary_input("b");
    b.add_wire("mo");
    b.add_primary_output("y");
    b.add_gate(GateKind::CamoMux2, "m", "mo", {"a", "a"});
    b.add_gate(GateKind::And, "g_y", "y", {"mo", "b"});
    Netlist nl = b.finish();

    for (int cand : {0, 1}) {
        CAPTURE(cand);
        JustifyResult r = justify_and_propagate(nl, "m", cand, {});
        CHECK(r.status == JustifyStatus::None);
        CHECK(r.nodes <= 4);
    }

    CamoKey key;
    key.circuit = "tied";
    key.entries.push_back({"m", 2, "mo", {"a", "a"}, 0});
    SimOracle oracle(nl, &key);
    ResolveOutcome out = resolve_mux(nl, oracle, "m", AttackMethod::Justify);
    CHECK(!out.resolved_index.has_value());
    CHECK(out.patterns == 0);
}

TEST_CASE("constant-blocked observation is proven vectorless, not blamed") {
    Netlist nl = blocked_observation();
    for (int cand : {0, 1}) {
        CAPTURE(cand);
        JustifyResult r = justify_and_propagate(nl, "m", cand, {});
        CHECK(r.status == JustifyStatus::None);
        CHECK(r.nodes <= 16);
    }

    CamoKey key;
    key.circuit = "deadend";
    key.entries.push_back({"m", 2, "mo", {"b", "c"}, 0});
    SimOracle oracle(nl, &key);
    std::vector<CamoKey> keys = brute_force_decamouflage(nl, oracle);
    CHECK(keys.size() == 2);  // the dead cone makes both selections fit
}

TEST_CASE("mirrored data inputs stay unresolved under every method") {
    Netlist nl = mirror_inputs();
    CamoKey key;
    key.circuit = "mirror";
    key.entries.push_back({"m", 2, "mo", {"x", "y"}, 0});

    SimOracle o1(nl, &key);
    ResolveOutcome just = resolve_mux(nl, o1, "m", AttackMethod::Justify);
    CHECK(!just.resolved_index.has_value());
    CHECK(just.patterns == 0);

    AttackBudgets budgets;
    budgets.guess_vectors = 4;
    SimOracle o2(nl, &key);
    ResolveOutcome guess =
        resolve_mux(nl, o2, "m", AttackMethod::Guess, {}, 1, budgets);
    CHECK(!guess.resolved_index.has_value());
    CHECK(guess.patterns == 4);  // budget spent without a kill

    SimOracle o3(nl, &key);
    std::vector<CamoKey> keys = brute_force_decamouflage(nl, o3);
    REQUIRE(keys.size() == 2);
    CHECK(keys[0].entries[0].selected == 0);
    CHECK(keys[1].entries[0].selected == 1);

    SimOracle o4(nl, &key);
    REEffortReport rep = attack_all(nl, o4, AttackMethod::Brute);
    REQUIRE(rep.per_mux.size() == 1);
    CHECK(!rep.per_mux[0].resolved_index.has_value());
}

TEST_CASE("resolved muxes open a previously blocked path") {
    CamouflageResult res = two_mux_c17();
    const Netlist& av = res.attacker_view;
    int sel0 = true_index(res.key, "camo_0000");
    int sel1 = true_index(res.key, "camo_0001");

    // with its downstream mux opaque the true candidate cannot reach an
    // output: the only clean route needs the sibling forced to 0
    JustifyResult alone = justify_and_propagate(av, "camo_0000", sel0, {});
    CHECK(alone.status == JustifyStatus::Blocked);

    ResolvedMap resolved;
    resolved["camo_0001"] = sel1;
    JustifyResult opened =
        justify_and_propagate(av, "camo_0000", sel0, resolved);
    REQUIRE(opened.status == JustifyStatus::Found);

    CamoKey other = res.key;
    for (KeyEntry& e : other.entries)
        if (e.instance == "camo_0000") e.selected = 1 - e.selected;
    OutputMap o_true = evaluate(av, opened.vector, &res.key);
    OutputMap o_other = evaluate(av, opened.vector, &other);
    CHECK(o_true.at(opened.po) != o_other.at(opened.po));
}

TEST_CASE("attack_all recovers the two-mux chain and stays deterministic") {
    CamouflageResult res = two_mux_c17();
    const Netlist& av = res.attacker_view;

    SimOracle oracle(av, &res.key);
    REEffortReport rep = attack_all(av, oracle, AttackMethod::Justify, 1);
    REQUIRE(rep.per_mux.size() == 2);
    CHECK(rep.per_mux[0].instance == "camo_0000");
    CHECK(rep.per_mux[1].instance == "camo_0001");
    uint64_t patterns = 0, nodes = 0;
    for (const MuxEffort& e : rep.per_mux) {
        REQUIRE(e.resolved_index.has_value());
        CHECK(*e.resolved_index == true_index(res.key, e.instance));
        CHECK(e.patterns_applied <= 2);
        patterns += e.patterns_applied;
        nodes += e.search_nodes;
    }
    CHECK(rep.total_patterns == patterns);
    CHECK(rep.total_search_nodes == nodes);
    CHECK(rep.simulated_time_ns == rep.total_patterns);

    SimOracle oracle2(av, &res.key);
    REEffortReport again = attack_all(av, oracle2, AttackMethod::Justify, 1);
    REQUIRE(again.per_mux.size() == rep.per_mux.size());
    for (size_t i = 0; i < rep.per_mux.size(); ++i) {
        CHECK(again.per_mux[i].resolved_index == rep.per_mux[i].resolved_index);
        CHECK(again.per_mux[i].patterns_applied ==
              rep.per_mux[i].patterns_applied);
        CHECK(again.per_mux[i].search_nodes == rep.per_mux[i].search_nodes);
    }
    CHECK(again.total_patterns == rep.total_patterns);
    CHECK(again.total_search_nodes == rep.total_search_nodes);
}

TEST_CASE("hypothesis elimination also recovers the two-mux chain") {
    CamouflageResult res = two_mux_c17();
    const Netlist& av = res.attacker_view;
    AttackBudgets budgets;
    budgets.guess_vectors = 64;
    SimOracle oracle(av, &res.key);
    REEffortReport rep = attack_all(av, oracle, AttackMethod::Guess, 1, budgets);
    REQUIRE(rep.per_mux.size() == 2);
    for (const MuxEffort& e : rep.per_mux) {
        REQUIRE(e.resolved_index.has_value());
        CHECK(*e.resolved_index == true_index(res.key, e.instance));
        CHECK(e.search_nodes == 0);
    }
}

TEST_CASE("brute force agrees with the search attack") {
    CamouflageResult res = two_mux_c17();
    const Netlist& av = res.attacker_view;

    SimOracle oracle(av, &res.key);
    std::vector<CamoKey> keys = brute_force_decamouflage(av, oracle);
    REQUIRE(keys.size() == 1);  // uniquely recoverable
    CHECK(oracle.queries() == 32);
    for (const KeyEntry& e : keys[0].entries)
        CHECK(e.selected == true_index(res.key, e.instance));

    SimOracle oracle2(av, &res.key);
    REEffortReport rep = attack_all(av, oracle2, AttackMethod::Brute);
    REQUIRE(rep.per_mux.size() == 2);
    for (const MuxEffort& e : rep.per_mux) {
        REQUIRE(e.resolved_index.has_value());
        CHECK(*e.resolved_index == true_index(res.key, e.instance));
    }
    CHECK(rep.total_patterns == 32);
    CHECK(rep.simulated_time_ns == 32);
}

TEST_CASE("brute force reports when nothing fits and when bounds overflow") {
    Netlist nl = mirror_inputs();
    NetlistBuilder b("mirror");
    b.add_primary_input("x");
    b.add_primary_output("o1");
    b.add_gate(GateKind::Not, "g_o", "o1", {"x"});
    Netlist inverted = b.finish();

    SimOracle wrong(inverted);
    CHECK_THROWS_WITH_AS(brute_force_decamouflage(nl, wrong),
                         doctest::Contains("consistent"), Error);

    CamoKey key;
    key.circuit = "mirror";
    key.entries.push_back({"m", 2, "mo", {"x", "y"}, 0});
    SimOracle oracle(nl, &key);
    CHECK_THROWS_WITH_AS(brute_force_decamouflage(nl, oracle, 3),
                         doctest::Contains("bound"), Error);
}

TEST_CASE("node budget cuts the search off early") {
    CamouflageResult res = one_mux_c17(0);
    JustifyResult r =
        justify_and_propagate(res.attacker_view, "camo_0000", 0, {}, 1);
    CHECK(r.status == JustifyStatus::Budget);
    CHECK(r.nodes == 1);
}

TEST_CASE("five percent camouflage on a mid-size circuit is fully recovered") {
    Netlist nl = read_netlist_file(bench_path("c432.v"));
    ScoapResult scoap = annotate(nl);
    SelectionConfig cfg;
    cfg.percent = 5.0;
    cfg.mux_width = 2;
    cfg.seed = 1;
    CamouflagePlan plan = build_plan(nl, scoap, cfg);
    REQUIRE(plan.entries.size() >= 5);
    CamouflageResult res = camouflage_circuit(nl, plan);

    SimOracle oracle(res.attacker_view, &res.key);
    REEffortReport rep =
        attack_all(res.attacker_view, oracle, AttackMethod::Justify, 1);
    REQUIRE(rep.per_mux.size() == plan.entries.size());
    for (const MuxEffort& e : rep.per_mux) {
        CAPTURE(e.instance);
        REQUIRE(e.resolved_index.has_value());
        CHECK(*e.resolved_index == true_index(res.key, e.instance));
        CHECK(e.patterns_applied <= 2);
    }
}

TEST_CASE("wider muxes on the same target cost no fewer patterns") {
    Netlist nl = c17();
    ScoapResult scoap = annotate(nl);
    SelectionConfig cfg;
    cfg.percent = 9.0;  // exactly one target
    cfg.mux_width = 4;
    cfg.seed = 1;
    CamouflagePlan plan = build_plan(nl, scoap, cfg);
    REQUIRE(plan.entries.size() == 1);
    CamouflageResult res = camouflage_circuit(nl, plan);

    // forcing three siblings low blocks both output gates of this tiny
    // circuit, so the decisive-pattern search proves all four candidates
    // untestable and the simulation fallback does the work instead
    for (int c = 0; c < 4; ++c) {
        JustifyResult r =
            justify_and_propagate(res.attacker_view, "camo_0000", c, {});
        CHECK(r.status == JustifyStatus::None);
    }

    SimOracle oracle(res.attacker_view, &res.key);
    REEffortReport rep =
        attack_all(res.attacker_view, oracle, AttackMethod::Justify, 1);
    REQUIRE(rep.per_mux.size() == 1);
    REQUIRE(rep.per_mux[0].resolved_index.has_value());
    CHECK(*rep.per_mux[0].resolved_index ==
          true_index(res.key, rep.per_mux[0].instance));
    // more alternatives cost at least as many patterns as the 2:1 cases
    CHECK(rep.per_mux[0].patterns_applied >= 1);
    CHECK(rep.per_mux[0].patterns_applied <= 64);
}

TEST_CASE("effort csv carries scores only when the key is supplied") {
    CamouflageResult res = two_mux_c17();
    SimOracle oracle(res.attacker_view, &res.key);
    REEffortReport rep =
        attack_all(res.attacker_view, oracle, AttackMethod::Justify, 1);

    std::string blind = re_effort_csv(rep);
    std::string scored = re_effort_csv(rep, &res.key);
    CHECK(blind.rfind("instance,width,resolved,true_index,correct,patterns,"
                      "nodes,wall_ms\n",
                      0) == 0);
    CHECK(std::count(blind.begin(), blind.end(), '\n') == 3);
    for (const std::string& line : {blind, scored})
        CHECK(std::count(line.begin(), line.end(), ',') == 7 * 3);
    // blind rows leave the scoring columns empty
    CHECK(blind.find(",,,") != std::string::npos);
    CHECK(scored.find(",1,") != std::string::npos);

    // an unresolved mux prints UNRESOLVED and is never scored
    Netlist dead = blocked_observation();
    CamoKey key;
    key.circuit = "deadend";
    key.entries.push_back({"m", 2, "mo", {"b", "c"}, 0});
    AttackBudgets budgets;
    budgets.guess_vectors = 4;
    SimOracle o2(dead, &key);
    REEffortReport rep2 =
        attack_all(dead, o2, AttackMethod::Justify, 1, budgets);
    std::string csv = re_effort_csv(rep2, &key);
    CHECK(csv.find("m,2,UNRESOLVED,0,,") != std::string::npos);
}

TEST_CASE("a circuit without muxes yields an empty report") {
    Netlist nl = c17();
    SimOracle oracle(nl);
    REEffortReport rep = attack_all(nl, oracle, AttackMethod::Justify, 1);
    CHECK(rep.per_mux.empty());
    CHECK(rep.total_patterns == 0);
    CHECK(rep.total_search_nodes == 0);
    CHECK(rep.simulated_time_ns == 0);
    CHECK(re_effort_csv(rep) ==
          "instance,width,resolved,true_index,correct,patterns,nodes,wall_ms\n");

    // brute force degenerates to a consistency check of the lone "key"
    SimOracle o2(nl);
    std::vector<CamoKey> keys = brute_force_decamouflage(nl, o2);
    REQUIRE(keys.size() == 1);
    CHECK(keys[0].entries.empty());
}

TEST_CASE("attack entry points validate their arguments") {
    CamouflageResult res = one_mux_c17(0);
    const Netlist& av = res.attacker_view;
    SimOracle oracle(av, &res.key);

    CHECK_THROWS_WITH_AS(justify_and_propagate(av, "nosuch", 0, {}),
                         doctest::Contains("no gate named"), Error);
    CHECK_THROWS_WITH_AS(justify_and_propagate(av, "NAND2_1", 0, {}),
                         doctest::Contains("not a camouflaged mux"), Error);
    CHECK_THROWS_WITH_AS(justify_and_propagate(av, "camo_0000", 2, {}),
                         doctest::Contains("out of range"), Error);
    CHECK_THROWS_WITH_AS(
        justify_and_propagate(av, "camo_0000", 0, {{"camo_0000", 0}}),
        doctest::Contains("already resolved"), Error);
    CHECK_THROWS_WITH_AS(
        justify_and_propagate(av, "camo_0000", 0, {{"nosuch", 0}}),
        doctest::Contains("no gate named"), Error);
    CHECK_THROWS_WITH_AS(
        resolve_mux(av, oracle, "camo_0000", AttackMethod::Brute),
        doctest::Contains("attack_all"), Error);

    CHECK(attack_method_from_name("justify") == AttackMethod::Justify);
    CHECK(attack_method_from_name("guess") == AttackMethod::Guess);
    CHECK(attack_method_from_name("brute") == AttackMethod::Brute);
    CHECK(std::string(attack_method_name(AttackMethod::Guess)) == "guess");
    CHECK_THROWS_WITH_AS(attack_method_from_name("podem"),
                         doctest::Contains("unknown attack method"), Error);
}
