#include "doctest.h"
#include "fixtures.hpp"
#include "netlist.hpp"

using namespace mems;

TEST_CASE("empty input parses to an empty netlist") {
    Netlist n = parse_netlist("");
    CHECK(n.instances.empty());
    CHECK(n.materials.empty());
    CHECK(serialize_netlist(n) == "process \"\"\n");
}

TEST_CASE("the bundled rate-sensor netlist has the documented composition") {
    Netlist n = gyro_netlist();
    std::string text = serialize_netlist(n);
    Netlist parsed = parse_netlist(text);
    CHECK(parsed.instances.size() == 38);
    CHECK(parsed.count_kind(ComponentKind::Beam) == 16);
    CHECK(parsed.count_kind(ComponentKind::RigidMass) == 4);
    CHECK(parsed.count_kind(ComponentKind::LinearComb) == 6);
    CHECK(parsed.count_kind(ComponentKind::BiasComb) == 4);
    CHECK(parsed.count_kind(ComponentKind::Anchor) == 8);
}

TEST_CASE("parse then serialize is a fixpoint on the rate-sensor fixture") {
    Netlist n = gyro_netlist();
    std::string text = serialize_netlist(n);
    Netlist once = parse_netlist(text);
    CHECK(once == n);
    CHECK(serialize_netlist(once) == text);
    CHECK(parse_netlist(serialize_netlist(once)) == once);
}

TEST_CASE("missing required parameters name the first absent key") {
    try {
        parse_netlist("beam b1 l=200u\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        std::string msg = e.what();
        CHECK(msg.find("'w'") != std::string::npos);
        CHECK(msg.find("line 1") != std::string::npos);
    }
}

TEST_CASE("parse reports the documented error classes with line numbers") {
    std::string ok = "beam b1 node=(a,b) l=200u w=4u pos=(0u,0u) layer=STRUCT\n";
    CHECK_THROWS_AS(parse_netlist("widget w1 node=(a) pos=(0,0) layer=S\n"), ParseError);
    CHECK_THROWS_AS(parse_netlist(ok + ok), ParseError);  // duplicate name
    CHECK_THROWS_AS(parse_netlist("beam b1 node=(a) l=1u w=1u pos=(0u,0u) layer=S\n"),
                    ParseError);  // beam node count
    CHECK_THROWS_AS(parse_netlist("beam b1 node=(a,b) l=1u w=1u pos=(0u) layer=S\n"), ParseError);
    CHECK_THROWS_AS(parse_netlist("process soi\n"), ParseError);  // missing quotes
    try {
        parse_netlist("# comment\n\nmass m1 w=1u\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
}

TEST_CASE("positions serialize in micrometers with the u suffix") {
    Netlist n;
    n.process_ref = "p";
    ComponentInstance c;
    c.kind = ComponentKind::RigidMass;
    c.name = "m1";
    c.nodes = {"a"};
    c.w = 1000;
    c.h = 2000;
    c.position = {1500, 0};  // 1.5 um, 0
    c.layer = "STRUCT";
    n.instances.push_back(c);
    std::string text = serialize_netlist(n);
    CHECK(text.find("pos=(1.5u,0u)") != std::string::npos);
    CHECK(parse_netlist(text) == n);
}

TEST_CASE("length suffixes cover um, nm and meters") {
    Netlist n = parse_netlist(
        "beam b node=(a,b) l=200u w=250n pos=(2e-6,0u) layer=S\n");
    CHECK(n.instances[0].l == 200000);
    CHECK(n.instances[0].w == 250);
    CHECK(n.instances[0].position.x == 2000);
}

namespace {

ProcessStack small_stack() {
    ProcessStack s;
    s.name = "soi";
    s.materials = {{"si", 160e9, 0.28, 2330}};
    s.layers = {{"ANCHOR", 0, 2000, "si"}, {"STRUCT", 2000, 25000, "si"}};
    return s;
}

}  // namespace

TEST_CASE("a well-formed anchored chain validates clean") {
    std::string text =
        "process \"soi\"\n"
        "material si E=160e9 nu=0.28 rho=2330\n"
        "anchor a1 node=(g) w=30u h=30u anchor_layer=ANCHOR pos=(0u,0u) layer=STRUCT\n"
        "beam b1 node=(g,n1) l=100u w=4u pos=(30u,15u) layer=STRUCT\n"
        "mass m1 node=(n1) w=50u h=50u pos=(130u,0u) layer=STRUCT\n";
    Netlist n = parse_netlist(text);
    CHECK(validate_netlist(n, small_stack()).empty());
}

TEST_CASE("dangling nodes are reported unless an anchor grounds them") {
    std::string text =
        "process \"soi\"\n"
        "anchor a1 node=(g) w=30u h=30u anchor_layer=ANCHOR pos=(0u,0u) layer=STRUCT\n"
        "beam b1 node=(g,n9) l=100u w=4u pos=(0u,0u) layer=STRUCT\n";
    ValidationReport r = validate_netlist(parse_netlist(text), small_stack());
    REQUIRE(r.issues.size() == 1);
    CHECK(r.issues[0].code == "dangling_node");
    CHECK(r.issues[0].subject == "n9");
}

TEST_CASE("unknown layers and bad parameter ranges land in the report") {
    std::string text =
        "process \"soi\"\n"
        "mass m1 node=(n1,n2) w=50u h=50u pos=(0u,0u) layer=METAL9\n"
        "lincomb c1 node=(n1) fingers=0 fl=40u fw=3u gap=3u overlap=30u orient=+x "
        "pos=(0u,0u) layer=STRUCT\n"
        "beam b1 node=(n1,n2) l=100u w=4u pos=(0u,0u) layer=STRUCT\n";
    ValidationReport r = validate_netlist(parse_netlist(text), small_stack());
    bool saw_layer = false, saw_range = false;
    for (const ValidationIssue& i : r.issues) {
        if (i.code == "unknown_layer" && i.subject == "METAL9") saw_layer = true;
        if (i.code == "param_range" && i.subject == "c1") saw_range = true;
    }
    CHECK(saw_layer);
    CHECK(saw_range);
}
