#include <doctest.h>

#include <algorithm>

#include "camo/netlist.hpp"
#include "fixtures.hpp"

using namespace camo;

TEST_CASE("c17 parses into the expected structure") {
    Netlist nl = fixtures::c17();
    CHECK(nl.name() == "c17");
    CHECK(nl.nets().size() == 11);
    CHECK(nl.gates().size() == 6);
    REQUIRE(nl.primary_inputs().size() == 5);
    REQUIRE(nl.primary_outputs().size() == 2);
    CHECK(nl.net(nl.primary_inputs()[0]).name == "N1");
    CHECK(nl.net(nl.primary_inputs()[4]).name == "N7");
    CHECK(nl.net(nl.primary_outputs()[0]).name == "N22");
    CHECK(nl.net(nl.primary_outputs()[1]).name == "N23");

    auto g = nl.find_gate("NAND2_3");
    REQUIRE(g.has_value());
    const Gate& gate = nl.gate(*g);
    CHECK(gate.kind == GateKind::Nand);
    CHECK(nl.net(gate.output).name == "N16");
    REQUIRE(gate.inputs.size() == 2);
    CHECK(nl.net(gate.inputs[0]).name == "N2");
    CHECK(nl.net(gate.inputs[1]).name == "N11");
}

TEST_CASE("fanout counts include gate pins and output ports") {
    Netlist nl = fixtures::c17();
    CHECK(nl.fanout_count(nl.net_id("N3")) == 2);
    CHECK(nl.fanout_count(nl.net_id("N11")) == 2);
    CHECK(nl.fanout_count(nl.net_id("N16")) == 2);
    CHECK(nl.fanout_count(nl.net_id("N10")) == 1);
    CHECK(nl.fanout_count(nl.net_id("N22")) == 1);  // output port only
    CHECK(nl.fanout_count(nl.net_id("N1")) == 1);
}

TEST_CASE("keywords are case-insensitive, identifiers are not") {
    Netlist nl = parse_netlist(
        "MODULE t (a, Y);\nINPUT a;\nOUTPUT Y;\nNOT g1 (Y, a);\nENDMODULE");
    CHECK(nl.name() == "t");
    CHECK(nl.find_net("Y").has_value());
    CHECK_FALSE(nl.find_net("y").has_value());
}

TEST_CASE("comments are stripped") {
    Netlist nl = parse_netlist(
        "// leading comment\n"
        "module t (a, y); // ports\n"
        "input a;\noutput y;\nbuf g (y, a); // copy\nendmodule\n// tail");
    CHECK(nl.gates().size() == 1);
}

TEST_CASE("parse errors carry line and column") {
    try {
        parse_netlist("module t (a, y);\ninput a;\noutput y;\nbuf g (y, b);\n"
                      "endmodule");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line == 4);
        CHECK(std::string(e.what()).find("undeclared net 'b'") !=
              std::string::npos);
    }
}

TEST_CASE("structural error taxonomy") {
    auto wrap = [](const char* body) {
        return std::string("module t (a, b, y);\ninput a, b;\noutput y;\n") +
               body + "endmodule";
    };
    // multiply driven
    CHECK_THROWS_WITH_AS(
        parse_netlist(wrap("and g1 (y, a, b);\nor g2 (y, a, b);\n")),
        doctest::Contains("multiply driven"), ParseError);
    // gate drives a primary input
    CHECK_THROWS_WITH_AS(parse_netlist(wrap("and g1 (y, a, b);\n"
                                            "not g2 (a, y);\n")),
                         doctest::Contains("primary input"), ParseError);
    // arity violation
    CHECK_THROWS_WITH_AS(parse_netlist(wrap("not g1 (y, a, b);\n")),
                         doctest::Contains("cannot take 2 inputs"),
                         ParseError);
    // dangling wire
    CHECK_THROWS_WITH_AS(
        parse_netlist("module t (a, y);\ninput a;\noutput y;\nwire w;\n"
                      "buf g1 (y, a);\nbuf g2 (w, a);\nendmodule"),
        doctest::Contains("never read"), ValidationError);
    // undriven wire
    CHECK_THROWS_WITH_AS(
        parse_netlist("module t (a, y);\ninput a;\noutput y;\nwire w;\n"
                      "and g1 (y, a, w);\nendmodule"),
        doctest::Contains("never driven"), ValidationError);
    // duplicate declaration
    CHECK_THROWS_WITH_AS(
        parse_netlist("module t (a, y);\ninput a;\noutput y;\nwire a;\n"
                      "buf g (y, a);\nendmodule"),
        doctest::Contains("duplicate declaration"), ParseError);
    // combinational cycle
    CHECK_THROWS_WITH_AS(
        parse_netlist("module t (a, y);\ninput a;\noutput y;\nwire w1, w2;\n"
                      "and g1 (w1, a, w2);\nnot g2 (w2, w1);\n"
                      "and g3 (y, w1, w2);\nendmodule"),
        doctest::Contains("combinational cycle"), ValidationError);
    // port without direction
    CHECK_THROWS_WITH_AS(
        parse_netlist("module t (a, y, z);\ninput a;\noutput y;\nwire z;\n"
                      "buf g (y, a);\nbuf g2 (z, a);\nendmodule"),
        doctest::Contains("no input or output declaration"), ParseError);
}

TEST_CASE("camomux arity is exact") {
    std::string head =
        "module t (a, b, c, y);\ninput a, b, c;\noutput y;\n";
    CHECK_THROWS_WITH_AS(
        parse_netlist(head + "camomux2 m (y, a, b, c);\nendmodule"),
        doctest::Contains("cannot take 3 inputs"), ParseError);
    Netlist ok = parse_netlist(
        "module t (a, b, y);\ninput a, b;\noutput y;\n"
        "camomux2 m (y, a, b);\nendmodule");
    CHECK(ok.gate(0).kind == GateKind::CamoMux2);
    CHECK(camomux_width(ok.gate(0).kind) == 2);
}

TEST_CASE("emission is deterministic and round-trips structurally") {
    Netlist nl = fixtures::c17();
    std::string text = emit_netlist(nl);
    Netlist back = parse_netlist(text);
    CHECK(structurally_identical(nl, back));
    // Emission reaches a fixed point after one round trip.
    CHECK(emit_netlist(back) == text);
    // And is stable across repeated emission.
    CHECK(emit_netlist(nl) == text);
}

TEST_CASE("emitted instances are topologically ordered") {
    Netlist nl = fixtures::c17();
    std::string text = emit_netlist(nl);
    // NAND2_5 reads N16 which NAND2_3 drives.
    CHECK(text.find("NAND2_3") < text.find("NAND2_5"));
    CHECK(text.find("NAND2_2") < text.find("NAND2_4"));
}

TEST_CASE("topological order puts drivers before readers") {
    Netlist nl = fixtures::c17();
    auto order = topological_order(nl);
    REQUIRE(order.size() == nl.gates().size());
    std::vector<size_t> rank(order.size());
    for (size_t i = 0; i < order.size(); ++i) rank[order[i]] = i;
    for (GateId g = 0; g < nl.gates().size(); ++g) {
        for (NetId in : nl.gate(g).inputs) {
            if (auto d = nl.net(in).driver) CHECK(rank[*d] < rank[g]);
        }
    }
}

TEST_CASE("transitive fanout walks through gates to the outputs") {
    Netlist nl = fixtures::c17();
    auto names = [&](NetId from) {
        std::vector<std::string> out;
        for (NetId id : transitive_fanout(nl, from))
            out.push_back(nl.net(id).name);
        std::sort(out.begin(), out.end());
        return out;
    };
    CHECK(names(nl.net_id("N16")) ==
          std::vector<std::string>{"N22", "N23"});
    CHECK(names(nl.net_id("N3")) ==
          std::vector<std::string>{"N10", "N11", "N16", "N19", "N22", "N23"});
    CHECK(names(nl.net_id("N22")).empty());
}

TEST_CASE("builder rejects invalid and reserved names") {
    NetlistBuilder b("t");
    CHECK_THROWS_AS(b.add_wire("2bad"), ValidationError);
    CHECK_THROWS_AS(b.add_wire("nand"), ValidationError);
    CHECK_THROWS_AS(b.add_wire("WIRE"), ValidationError);
    CHECK_NOTHROW(b.add_wire("nand2_ok$x"));
}

TEST_CASE("file round trip") {
    std::string dir = fixtures::scratch_dir("netlist_file");
    Netlist nl = fixtures::c17();
    write_netlist_file(nl, dir + "/c17.v");
    Netlist back = read_netlist_file(dir + "/c17.v");
    CHECK(structurally_identical(nl, back));
    CHECK_THROWS_AS(read_netlist_file(dir + "/missing.v"), Error);
}

TEST_CASE("benchmark suite files parse to their canonical shapes") {
    struct Shape {
        const char* name;
        size_t pis, pos, gates;
    };
    const Shape suite[] = {
        {"c17", 5, 2, 6},        {"c432", 36, 7, 160},
        {"c499", 41, 32, 202},   {"c880", 60, 26, 383},
        {"c1355", 41, 32, 546},  {"c1908", 33, 25, 880},
        {"c2670", 233, 140, 1193}, {"c3540", 50, 22, 1669},
        {"c5315", 178, 123, 2307}, {"c6288", 32, 32, 2406},
        {"c7552", 207, 108, 3512},
    };
    for (const Shape& s : suite) {
        CAPTURE(s.name);
        std::string path = fixtures::bench_path(std::string(s.name) + ".v");
        Netlist nl = read_netlist_file(path);
        CHECK(nl.name() == s.name);
        CHECK(nl.primary_inputs().size() == s.pis);
        CHECK(nl.primary_outputs().size() == s.pos);
        CHECK(nl.gates().size() == s.gates);
        // Committed files are in canonical emission form already.
        CHECK(emit_netlist(nl) == fixtures::slurp(path));
    }
}
