#include "components.hpp"
#include "doctest.h"
#include "fea.hpp"
#include "mor.hpp"

using namespace mems;

namespace {

ProcessStack thin_stack() {
    ProcessStack s;
    s.name = "soi";
    s.materials = {{"si", 160e9, 0.28, 2330}};
    s.layers = {{"ANCHOR", 0, 2000, "si"}, {"STRUCT", 2000, 2000, "si"}};  // t = 2 um
    return s;
}

Material silicon() { return {"si", 160e9, 0.28, 2330}; }

ComponentInstance make_beam(Coord l, Coord w, Vec2 pos, double angle) {
    ComponentInstance c;
    c.kind = ComponentKind::Beam;
    c.name = "b";
    c.nodes = {"n1", "n2"};
    c.l = l;
    c.w = w;
    c.position = pos;
    c.layer = "STRUCT";
    c.angle_deg = angle;
    return c;
}

ComponentInstance make_mass(Coord w, Coord h, Vec2 pos) {
    ComponentInstance c;
    c.kind = ComponentKind::RigidMass;
    c.name = "m";
    c.nodes = {"n1"};
    c.w = w;
    c.h = h;
    c.position = pos;
    c.layer = "STRUCT";
    return c;
}

ComponentInstance make_comb(int fingers, Coord fl, Coord fw, Coord gap, Coord overlap,
                            CombOrient orient) {
    ComponentInstance c;
    c.kind = ComponentKind::LinearComb;
    c.name = "c";
    c.nodes = {"n1"};
    c.fingers = fingers;
    c.fl = fl;
    c.fw = fw;
    c.gap = gap;
    c.overlap = overlap;
    c.orient = orient;
    c.position = {0, 0};
    c.layer = "STRUCT";
    return c;
}

double polygon_area_nm2(const Polygon& p) {
    return static_cast<double>(p.twice_signed_area()) / 2.0;
}

}  // namespace

TEST_CASE("a rigid mass footprint is one rectangle with its corner at pos") {
    ProcessStack stack = thin_stack();
    auto shapes = component_footprint(make_mass(100000, 50000, {0, 0}), stack);
    REQUIRE(shapes.size() == 1);
    CHECK(shapes[0].layer == "STRUCT");
    CHECK(shapes[0].polygon == make_rect(0, 0, 100000, 50000));
}

TEST_CASE("comb fingers sit at the pitch fw + gap") {
    // oracle: n fingers of width fw cover n*fw + (n-1)*gap
    ProcessStack stack = thin_stack();
    Coord fw = 2000, gap = 2000, fl = 10000;
    int n = 3;
    auto shapes = component_footprint(make_comb(n, fl, fw, gap, 5000, CombOrient::PlusX), stack);
    REQUIRE(shapes.size() == static_cast<std::size_t>(n) + 1);

    Coord expected_span = n * fw + (n - 1) * gap;
    CHECK(expected_span == 10000);
    auto spine = shapes[0].polygon.as_rect();
    REQUIRE(spine.has_value());
    CHECK(spine->height() == expected_span);
    CHECK(spine->width() == 2 * fw);
    for (int i = 0; i < n; ++i) {
        auto finger = shapes[static_cast<std::size_t>(i) + 1].polygon.as_rect();
        REQUIRE(finger.has_value());
        CHECK(finger->y0 == i * (fw + gap));  // x-pitch 4 um in the rotated frame
        CHECK(finger->height() == fw);
        CHECK(finger->width() == fl);
    }
}

TEST_CASE("a beam rotated 90 degrees lands exactly on the grid") {
    ProcessStack stack = thin_stack();
    auto shapes = component_footprint(make_beam(200000, 4000, {0, 0}, 90), stack);
    REQUIRE(shapes.size() == 1);
    CHECK(shapes[0].polygon == make_rect(-2000, 0, 2000, 200000));
}

TEST_CASE("anchors produce congruent rectangles on both masks") {
    ProcessStack stack = thin_stack();
    ComponentInstance c;
    c.kind = ComponentKind::Anchor;
    c.name = "a";
    c.nodes = {"g"};
    c.w = 30000;
    c.h = 30000;
    c.anchor_layer = "ANCHOR";
    c.position = {1000, 2000};
    c.layer = "STRUCT";
    auto shapes = component_footprint(c, stack);
    REQUIRE(shapes.size() == 2);
    CHECK(shapes[0].layer == "ANCHOR");
    CHECK(shapes[1].layer == "STRUCT");
    CHECK(shapes[0].polygon == shapes[1].polygon);
}

TEST_CASE("non-right angles snap to the grid and record a warning") {
    ProcessStack stack = thin_stack();
    std::vector<std::string> warnings;
    auto shapes = component_footprint(make_beam(100000, 4000, {0, 0}, 30), stack, &warnings);
    CHECK(shapes.size() == 1);
    REQUIRE(warnings.size() == 1);
    CHECK(warnings[0].find("snapped") != std::string::npos);
    std::vector<std::string> none;
    component_footprint(make_beam(100000, 4000, {0, 0}, 180), stack, &none);
    CHECK(none.empty());
}

TEST_CASE("comb area equals spine plus finger areas") {
    ProcessStack stack = thin_stack();
    for (CombOrient o : {CombOrient::PlusX, CombOrient::MinusX, CombOrient::PlusY,
                         CombOrient::MinusY}) {
        auto shapes = component_footprint(make_comb(7, 41000, 3000, 2500, 30000, o), stack);
        double total = 0;
        for (const auto& s : shapes) total += polygon_area_nm2(s.polygon);
        double fingers = 7.0 * 41000.0 * 3000.0;
        double spine = (2.0 * 3000.0) * (7 * 3000.0 + 6 * 2500.0);
        CHECK(total == spine + fingers);  // exact integer areas
    }
}

TEST_CASE("footprints ignore instance and node names") {
    ProcessStack stack = thin_stack();
    ComponentInstance a = make_beam(100000, 4000, {5000, 6000}, 0);
    ComponentInstance b = a;
    b.name = "other";
    b.nodes = {"x", "y"};
    auto sa = component_footprint(a, stack);
    auto sb = component_footprint(b, stack);
    REQUIRE(sa.size() == sb.size());
    for (std::size_t i = 0; i < sa.size(); ++i) CHECK(sa[i].polygon == sb[i].polygon);
}

TEST_CASE("lumped beam stiffness matches E t w^3 / L^3") {
    ProcessStack stack = thin_stack();  // STRUCT t = 2 um
    ComponentInstance beam = make_beam(200000, 2000, {0, 0}, 0);
    LumpedParams lp = lumped_params(beam, silicon(), stack);
    CHECK(lp.k_lateral == doctest::Approx(0.32).epsilon(1e-12));
    // axial and out-of-plane follow the same pattern
    CHECK(lp.k_axial == doctest::Approx(160e9 * 2e-6 * 2e-6 / 200e-6).epsilon(1e-12));
    CHECK(lp.k_out_of_plane == doctest::Approx(0.32).epsilon(1e-12));  // square section
}

TEST_CASE("lumped mass is density times volume") {
    ProcessStack stack = thin_stack();
    LumpedParams lp = lumped_params(make_mass(400000, 400000, {0, 0}), silicon(), stack);
    CHECK(lp.mass == doctest::Approx(7.456e-10).epsilon(1e-12));
}

TEST_CASE("comb capacitance gradient is 2 n eps0 t / gap") {
    ProcessStack stack = thin_stack();
    LumpedParams lp =
        lumped_params(make_comb(20, 40000, 3000, 2000, 30000, CombOrient::PlusX), silicon(), stack);
    CHECK(lp.dcdx == doctest::Approx(40.0 * 8.854e-12).epsilon(1e-12));
    CHECK(lp.dcdx == doctest::Approx(3.5416e-10).epsilon(1e-4));
    CHECK(lp.c_rest == doctest::Approx(2.0 * 20 * 8.854e-12 * 2e-6 * 30e-6 / 2e-6).epsilon(1e-12));
}

TEST_CASE("lumped lateral stiffness agrees with a one-element fixed-guided solve") {
    // the cubic Hermite element is exact for end loads, so the agreement is
    // to solver precision
    ProcessStack stack = thin_stack();
    ComponentInstance beam = make_beam(200000, 2000, {0, 0}, 0);
    LumpedParams lp = lumped_params(beam, silicon(), stack);

    FeaModel model;
    int n0 = model.add_node({0, 0, 0}, "n0");
    int n1 = model.add_node({200e-6, 0, 0}, "n1");
    model.elements.push_back({n0, n1, 2e-6, 2e-6, silicon()});
    model.fix_all(n0);
    // guided far end: everything fixed except the lateral (y) translation
    for (int d : {0, 2, 3, 4, 5}) model.fixed_dofs.insert({n1, d});

    SystemMatrices sys = assemble(model, {}, {});
    REQUIRE(sys.n() == 1);
    Eigen::VectorXd f(1);
    f << 1e-6;
    Eigen::VectorXd u = static_solve(sys, f);
    double k_fea = 1e-6 / u(0);
    CHECK(std::abs(k_fea - lp.k_lateral) / lp.k_lateral < 1e-9);
}
