#include <random>

#include "doctest.h"
#include "geometry.hpp"

using namespace mems;

namespace {

// random rectilinear simple polygons from parameterized templates
Polygon random_rectilinear(std::mt19937& rng) {
    std::uniform_int_distribution<int> shape(0, 3);
    std::uniform_int_distribution<Coord> dim(1, 200);
    std::uniform_int_distribution<Coord> offs(-500, 500);
    Coord a = dim(rng) * 10, b = dim(rng) * 10, c = dim(rng) * 10, d = dim(rng) * 10;
    Coord x = offs(rng) * 10, y = offs(rng) * 10;
    Polygon p;
    switch (shape(rng)) {
        case 0:  // rectangle
            p = make_rect(x, y, x + a, y + b);
            break;
        case 1:  // L
            p.vertices = {{x, y}, {x + a + c, y}, {x + a + c, y + b},
                          {x + a, y + b}, {x + a, y + b + d}, {x, y + b + d}};
            break;
        case 2:  // T
            p.vertices = {{x, y},         {x + a + c + a, y},     {x + a + c + a, y + b},
                          {x + a + c, y + b}, {x + a + c, y + b + d}, {x + a, y + b + d},
                          {x + a, y + b}, {x, y + b}};
            break;
        default:  // U
            p.vertices = {{x, y},         {x + a + c + a, y},
                          {x + a + c + a, y + b + d}, {x + a + c, y + b + d},
                          {x + a + c, y + b}, {x + a, y + b},
                          {x + a, y + b + d}, {x, y + b + d}};
            break;
    }
    return p;
}

}  // namespace

TEST_CASE("normalize flips clockwise to counter-clockwise") {
    Polygon cw{{{0, 0}, {0, 10}, {10, 10}, {10, 0}}};
    Polygon n = normalize_polygon(cw);
    CHECK(n.vertices == std::vector<Vec2>{{0, 0}, {10, 0}, {10, 10}, {0, 10}});
    CHECK(n.twice_signed_area() == 200);
}

TEST_CASE("normalize merges redundant collinear vertices") {
    Polygon p{{{0, 0}, {5, 0}, {10, 0}, {10, 10}, {0, 10}}};
    Polygon n = normalize_polygon(p);
    CHECK(n.vertices.size() == 4);
    CHECK(n.vertices == std::vector<Vec2>{{0, 0}, {10, 0}, {10, 10}, {0, 10}});
}

TEST_CASE("normalize rejects degenerate polygons") {
    CHECK_THROWS_AS(normalize_polygon(Polygon{{{0, 0}, {1, 1}}}), SemanticError);
    CHECK_THROWS_AS(normalize_polygon(Polygon{{{0, 0}, {5, 0}, {10, 0}}}), SemanticError);
}

TEST_CASE("normalize is idempotent and area-preserving on random rectilinear polygons") {
    std::mt19937 rng(7);
    for (int i = 0; i < 1000; ++i) {
        Polygon p = random_rectilinear(rng);
        Polygon n1 = normalize_polygon(p);
        Polygon n2 = normalize_polygon(n1);
        CHECK(n1 == n2);
        __int128 a0 = p.twice_signed_area();
        if (a0 < 0) a0 = -a0;
        __int128 a1 = n1.twice_signed_area();
        CHECK(a0 == a1);
        CHECK(n1.twice_signed_area() > 0);
    }
}

TEST_CASE("polygon multiset equality is exact on the nm grid") {
    Polygon sq = make_rect(0, 0, 100, 100);
    Polygon rotated{{{100, 0}, {100, 100}, {0, 100}, {0, 0}}};
    Polygon shifted = make_rect(1, 0, 101, 100);
    CHECK(polygon_set_equal({sq}, {rotated}));
    CHECK_FALSE(polygon_set_equal({sq}, {shifted}));
    CHECK_FALSE(polygon_set_equal({sq}, {sq, sq}));
}

TEST_CASE("polygon_set_equal is an equivalence relation on random sets") {
    std::mt19937 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<Polygon> a, b, c;
        int n = 1 + static_cast<int>(rng() % 5);
        for (int i = 0; i < n; ++i) a.push_back(random_rectilinear(rng));
        // b: same multiset, scrambled orientation and rotation
        b = a;
        std::shuffle(b.begin(), b.end(), rng);
        for (Polygon& p : b) std::reverse(p.vertices.begin(), p.vertices.end());
        c = b;
        std::shuffle(c.begin(), c.end(), rng);
        CHECK(polygon_set_equal(a, a));
        CHECK(polygon_set_equal(a, b));
        CHECK(polygon_set_equal(b, a));
        CHECK((polygon_set_equal(a, b) && polygon_set_equal(b, c) && polygon_set_equal(a, c)));
    }
}

TEST_CASE("extrude and project are inverse through the stack") {
    ProcessStack stack;
    stack.name = "soi";
    stack.layers = {{"ANCHOR", 0, 2000, "si"}, {"STRUCT", 2000, 50000, "si"}};
    Polygon sq = make_rect(0, 0, 100000, 100000);

    Prism pr = extrude_polygon(sq, "STRUCT", stack);
    CHECK(pr.z0 == 2000);
    CHECK(pr.z1 == 52000);
    auto [layer, poly] = project_prism(pr);
    CHECK(layer == "STRUCT");
    CHECK(poly == normalize_polygon(sq));

    CHECK_THROWS_AS(extrude_polygon(sq, "METAL9", stack), SemanticError);
    CHECK_THROWS_AS(check_prism_against_stack(Prism{"STRUCT", 0, 10, sq}, stack, 0), SemanticError);
    CHECK_NOTHROW(check_prism_against_stack(pr, stack, 0));
}

TEST_CASE("empty layout emits the canonical CIF skeleton") {
    Layout empty;
    CHECK(emit_cif(empty) == "DS 1 1 1;\nDF;\nC 1;\nE\n");
    Layout back = parse_cif(emit_cif(empty));
    CHECK(back.cell_id == 1);
    CHECK(back.shape_count() == 0);
}

TEST_CASE("one centered square emits a CIF box in centimicrons") {
    Layout l;
    l.insert("STRUCT", make_rect(-50000, -50000, 50000, 50000));
    std::string cif = emit_cif(l);
    CHECK(cif.find("L STRUCT;\n") != std::string::npos);
    CHECK(cif.find("B 10000 10000 0 0;\n") != std::string::npos);
    CHECK(layout_equal(parse_cif(cif), l));
}

TEST_CASE("corner-at-origin box keeps its center in the B command") {
    Layout l;
    l.insert("STRUCT", make_rect(0, 0, 100000, 100000));
    CHECK(emit_cif(l).find("B 10000 10000 5000 5000;\n") != std::string::npos);
}

TEST_CASE("re-emitting a parsed canonical file is byte-identical") {
    Layout l;
    l.insert("STRUCT", Polygon{{{0, 0}, {2000, 0}, {2000, 1000}, {1000, 1000},
                                {1000, 2000}, {0, 2000}}});
    l.insert("ANCHOR", make_rect(0, 0, 5000, 5000));
    std::string canonical = emit_cif(l);
    CHECK(emit_cif(parse_cif(canonical)) == canonical);
}

TEST_CASE("golden 6-point polygon file round-trips byte-for-byte") {
    std::string path = std::string(MEMSFLOW_GOLDEN_DIR) + "/poly6.cif";
    std::string golden = read_text_file(path);
    Layout l = parse_cif(golden);
    std::size_t structs = l.shapes.at("STRUCT").size();
    CHECK(structs == 1);
    CHECK(l.shapes.at("STRUCT")[0].vertices.size() == 6);
    CHECK(emit_cif(l) == golden);
}

TEST_CASE("CIF parse rejects the documented error classes") {
    CHECK_THROWS_AS(parse_cif("DS 1 1 1;\nQ 1 2;\nDF;\nC 1;\nE\n"), ParseError);   // unsupported
    CHECK_THROWS_AS(parse_cif("DS 1 1 1;\nL A;\nB 3 3 x y;\nDF;\nC 1;\nE\n"), ParseError);
    CHECK_THROWS_AS(parse_cif("DS 1 1 1;\nL A;\nB 10 10 0 0;\n"), ParseError);     // unterminated
    // extension commands are ignored with a warning
    std::vector<std::string> warnings;
    Layout l = parse_cif("DS 1 1 1;\n9 name;\nDF;\nC 1;\nE\n", &warnings);
    CHECK(warnings.size() == 1);
    CHECK(l.shape_count() == 0);
}

TEST_CASE("CIF DS scaling applies a/b exactly") {
    // DS 1 2 1 doubles every coordinate
    Layout l = parse_cif("DS 1 2 1;\nL A;\nB 10 10 10 10;\nDF;\nC 1;\nE\n");
    auto rect = l.shapes.at("A")[0].as_rect();
    REQUIRE(rect.has_value());
    CHECK(rect->x0 == 100);
    CHECK(rect->x1 == 300);
}

TEST_CASE("coordinates off the 10 nm grid refuse to emit") {
    Layout l;
    l.insert("STRUCT", make_rect(0, 0, 105, 100));
    CHECK_THROWS_AS(emit_cif(l), SemanticError);
}

TEST_CASE("empty solid emits header and stack line only") {
    SolidModel s;
    s.stack_ref = "soi";
    CHECK(emit_esm(s) == "esm 1\nstack soi\n");
    SolidModel back = parse_esm(emit_esm(s));
    CHECK(back.stack_ref == "soi");
    CHECK(back.prisms.empty());
}

TEST_CASE("single prism ESM line matches the documented format") {
    SolidModel s;
    s.stack_ref = "soi";
    s.prisms.push_back(Prism{"STRUCT", 2000, 52000, make_rect(0, 0, 100000, 100000)});
    CHECK(emit_esm(s) ==
          "esm 1\nstack soi\n"
          "prism layer=STRUCT z0=2000 z1=52000 poly=(0,0 100000,0 100000,100000 0,100000)\n");
    CHECK(solid_equal(parse_esm(emit_esm(s)), s));
}

TEST_CASE("ESM parse rejects bad headers and empty z-intervals") {
    CHECK_THROWS_AS(parse_esm("esm 2\nstack s\n"), ParseError);
    CHECK_THROWS_AS(parse_esm(""), ParseError);
    CHECK_THROWS_AS(
        parse_esm("esm 1\nstack s\nprism layer=A z0=10 z1=10 poly=(0,0 1,0 1,1)\n"), ParseError);
    CHECK_THROWS_AS(parse_esm("esm 1\nstack s\nprism layer=A z0=0 z1=10 poly=(0,0 1,0)\n"),
                    ParseError);
}

TEST_CASE("stack file round-trips and checks its invariants") {
    std::string text =
        "stack soi\n"
        "material si E=160000000000 nu=0.28 rho=2330\n"
        "layer ANCHOR z0=0u t=2u material=si\n"
        "layer STRUCT z0=2u t=50u material=si\n";
    ProcessStack s = parse_stack(text);
    CHECK(s.name == "soi");
    CHECK(s.layers.size() == 2);
    CHECK(s.layers[1].thickness == 50000);
    CHECK(s.materials.size() == 1);
    CHECK(emit_stack(parse_stack(emit_stack(s))) == emit_stack(s));

    CHECK_THROWS_AS(parse_stack("stack s\nlayer A z0=0u t=0u material=si\n"), ParseError);
    CHECK_THROWS_AS(
        parse_stack("stack s\nlayer A z0=2u t=1u material=si\nlayer B z0=0u t=1u material=si\n"),
        ParseError);
    CHECK_THROWS_AS(parse_stack("stack s\nmaterial m E=1 nu=0.7 rho=1\n"), ParseError);
}

TEST_CASE("layouts round-trip through CIF on random content") {
    std::mt19937 rng(23);
    for (int trial = 0; trial < 100; ++trial) {
        Layout l;
        int n = 1 + static_cast<int>(rng() % 6);
        for (int i = 0; i < n; ++i)
            l.insert(rng() % 2 ? "STRUCT" : "ANCHOR", random_rectilinear(rng));
        Layout back = parse_cif(emit_cif(l));
        CHECK(layout_equal(back, l));
    }
}
