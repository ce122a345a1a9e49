#include "fixtures.hpp"

#include <filesystem>

namespace mems {

namespace {

constexpr Coord um(long long v) { return static_cast<Coord>(v) * 1000; }

Material silicon() { return {"si", 160e9, 0.28, 2330.0}; }

ComponentInstance beam(const std::string& name, const std::string& n0, const std::string& n1,
                       Coord l, Coord w, Vec2 pos, double angle) {
    ComponentInstance c;
    c.kind = ComponentKind::Beam;
    c.name = name;
    c.nodes = {n0, n1};
    c.l = l;
    c.w = w;
    c.position = pos;
    c.layer = "STRUCT";
    c.angle_deg = angle;
    return c;
}

ComponentInstance rigid_mass(const std::string& name, std::vector<std::string> nodes, Coord w,
                             Coord h, Vec2 pos) {
    ComponentInstance c;
    c.kind = ComponentKind::RigidMass;
    c.name = name;
    c.nodes = std::move(nodes);
    c.w = w;
    c.h = h;
    c.position = pos;
    c.layer = "STRUCT";
    return c;
}

ComponentInstance comb(ComponentKind kind, const std::string& name, const std::string& node,
                       CombOrient orient, Vec2 pos) {
    ComponentInstance c;
    c.kind = kind;
    c.name = name;
    c.nodes = {node};
    c.fingers = 8;
    c.fl = um(40);
    c.fw = um(3);
    c.gap = um(3);
    c.overlap = um(30);
    c.orient = orient;
    c.position = pos;
    c.layer = "STRUCT";
    return c;
}

ComponentInstance anchor(const std::string& name, std::vector<std::string> nodes, Coord w, Coord h,
                         Vec2 pos) {
    ComponentInstance c;
    c.kind = ComponentKind::Anchor;
    c.name = name;
    c.nodes = std::move(nodes);
    c.w = w;
    c.h = h;
    c.anchor_layer = "ANCHOR";
    c.position = pos;
    c.layer = "STRUCT";
    return c;
}

}  // namespace

ProcessStack gyro_stack() {
    ProcessStack s;
    s.name = "soi";
    s.materials = {silicon()};
    s.layers = {{"ANCHOR", 0, um(2), "si"}, {"STRUCT", um(2), um(25), "si"}};
    return s;
}

Netlist gyro_netlist() {
    Netlist n;
    n.process_ref = "soi";
    n.materials = {silicon()};

    // four suspended plates, each hung from two anchor bars by four beams;
    // comb capacitors sit on the free plate edges
    const Vec2 corners[4] = {{um(0), um(0)}, {um(600), um(0)}, {um(0), um(800)}, {um(600), um(800)}};

    std::vector<ComponentInstance> beams, masses, lincombs, biascombs, anchors;
    // comb slots per plate: e, w, n, s; 6 linear then 4 bias
    struct CombSlot {
        int plate;
        char side;
        ComponentKind kind;
    };
    const CombSlot slots[] = {
        {0, 'e', ComponentKind::LinearComb}, {0, 'w', ComponentKind::LinearComb},
        {0, 'n', ComponentKind::LinearComb}, {1, 'e', ComponentKind::LinearComb},
        {1, 'w', ComponentKind::LinearComb}, {2, 'e', ComponentKind::LinearComb},
        {0, 's', ComponentKind::BiasComb},   {1, 'n', ComponentKind::BiasComb},
        {2, 's', ComponentKind::BiasComb},   {3, 'w', ComponentKind::BiasComb},
    };

    for (int i = 0; i < 4; ++i) {
        const std::string p = "m" + std::to_string(i + 1);
        Coord mx = corners[i].x, my = corners[i].y;

        beams.push_back(beam(p + "bnw", p + "nw", p + "anw", um(100), um(4),
                             {mx + um(100), my + um(300)}, 90));
        beams.push_back(beam(p + "bne", p + "ne", p + "ane", um(100), um(4),
                             {mx + um(200), my + um(300)}, 90));
        beams.push_back(beam(p + "bsw", p + "asw", p + "sw", um(100), um(4),
                             {mx + um(100), my - um(100)}, 90));
        beams.push_back(beam(p + "bse", p + "ase", p + "se", um(100), um(4),
                             {mx + um(200), my - um(100)}, 90));

        anchors.push_back(anchor(p + "an", {p + "anw", p + "ane"}, um(180), um(40),
                                 {mx + um(60), my + um(400)}));
        anchors.push_back(anchor(p + "as", {p + "asw", p + "ase"}, um(180), um(40),
                                 {mx + um(60), my - um(140)}));

        std::vector<std::string> mass_nodes = {p + "nw", p + "ne", p + "sw", p + "se"};
        for (const CombSlot& slot : slots) {
            if (slot.plate != i) continue;
            mass_nodes.push_back(p + "c" + slot.side);
        }
        masses.push_back(rigid_mass(p, std::move(mass_nodes), um(300), um(300), {mx, my}));
    }

    int lin_n = 0, bias_n = 0;
    for (const CombSlot& slot : slots) {
        const std::string p = "m" + std::to_string(slot.plate + 1);
        Coord mx = corners[slot.plate].x, my = corners[slot.plate].y;
        std::string node = p + "c" + slot.side;
        CombOrient orient;
        Vec2 pos;
        switch (slot.side) {
            case 'e': orient = CombOrient::PlusX; pos = {mx + um(300), my + um(128)}; break;
            case 'w': orient = CombOrient::MinusX; pos = {mx, my + um(173)}; break;
            case 'n': orient = CombOrient::PlusY; pos = {mx + um(172), my + um(300)}; break;
            default: orient = CombOrient::MinusY; pos = {mx + um(127), my}; break;
        }
        std::string name = slot.kind == ComponentKind::LinearComb
                               ? "lc" + std::to_string(++lin_n)
                               : "bc" + std::to_string(++bias_n);
        (slot.kind == ComponentKind::LinearComb ? lincombs : biascombs)
            .push_back(comb(slot.kind, name, node, orient, pos));
    }

    for (auto* group : {&beams, &masses, &lincombs, &biascombs, &anchors})
        for (ComponentInstance& c : *group) n.instances.push_back(std::move(c));
    return n;
}

ProcessStack accel_stack() {
    ProcessStack s;
    s.name = "zsoi";
    s.materials = {silicon()};
    s.layers = {{"ANCHOR", 0, um(2), "si"}, {"STRUCT", um(2), um(25), "si"}};
    return s;
}

namespace {

// proof mass on a ten-folded serpentine: ten segments joined by nine links,
// anchored at the top fold. Element lengths stay near 100 um so the stiffest
// axial mode (which caps the explicit-integration step) sits only a few
// thousand times above the fundamental.
Netlist accel_netlist() {
    Netlist n;
    n.process_ref = "zsoi";
    n.materials = {silicon()};

    std::vector<ComponentInstance> parts;
    parts.push_back(beam("s0", "a0", "j0a", um(80), um(8), {um(100), um(50)}, 0));
    for (int i = 1; i <= 9; ++i) {
        // segment i joins link i-1 (top contact) and link i (bottom contact);
        // odd links sit on the left flank, even ones on the right
        std::string via_lower = "j" + std::to_string(i - 1) + "b";
        std::string via_upper = (i == 9) ? "a1" : "j" + std::to_string(i) + "a";
        std::string left = (i % 2 == 1) ? via_upper : via_lower;
        std::string right = (i % 2 == 1) ? via_lower : via_upper;
        parts.push_back(beam("s" + std::to_string(i), left, right, um(60), um(8),
                             {um(120), um(50 + 60 * i)}, 0));
    }
    for (int j = 0; j <= 8; ++j) {
        bool right_side = (j % 2 == 0);
        Coord x = right_side ? um(184) : um(116);
        parts.push_back(beam("l" + std::to_string(j), "j" + std::to_string(j) + "a",
                             "j" + std::to_string(j) + "b", um(68), um(8),
                             {x, um(46 + 60 * j)}, 90));
    }
    parts.push_back(rigid_mass("pm", {"a0"}, um(100), um(100), {um(0), um(0)}));
    parts.push_back(anchor("top", {"a1"}, um(40), um(40), {um(80), um(570)}));

    for (ComponentInstance& c : parts) n.instances.push_back(std::move(c));
    return n;
}

}  // namespace

Layout accel_layout() { return netlist_to_layout(accel_netlist(), accel_stack()); }

ExtractionRules demo_rules() {
    ExtractionRules r;
    r.beam_max_width = um(10);
    r.beam_min_aspect = 5.0;
    r.comb_min_fingers = 2;
    r.anchor_layer = "ANCHOR";
    r.struct_layer = "STRUCT";
    return r;
}

void write_fixtures(const std::string& which, const std::string& dir) {
    std::filesystem::path d(dir);
    std::filesystem::create_directories(d);
    if (which == "gyro") {
        write_text_file_atomic((d / "gyro.net").string(), serialize_netlist(gyro_netlist()));
        write_text_file_atomic((d / "soi.stack").string(), emit_stack(gyro_stack()));
        write_text_file_atomic((d / "extract.rules").string(), emit_rules(demo_rules()));
    } else if (which == "accel") {
        write_text_file_atomic((d / "accel.cif").string(), emit_cif(accel_layout()));
        write_text_file_atomic((d / "accel.stack").string(), emit_stack(accel_stack()));
        write_text_file_atomic((d / "extract.rules").string(), emit_rules(demo_rules()));
    } else {
        throw SemanticError("unknown fixture family '" + which + "'");
    }
}

}  // namespace mems
