#include "random_netlist.hpp"

#include <sstream>

namespace mems::testsupport {

namespace {

constexpr Coord um(long long v) { return static_cast<Coord>(v) * 1000; }

}  // namespace

ProcessStack test_stack() {
    ProcessStack s;
    s.name = "rt";
    s.materials = {{"si", 160e9, 0.28, 2330}};
    s.layers = {{"ANCHOR", 0, um(2), "si"}, {"STRUCT", um(2), um(25), "si"}};
    return s;
}

ExtractionRules test_rules() {
    ExtractionRules r;
    r.beam_max_width = um(10);
    r.beam_min_aspect = 5.0;
    r.comb_min_fingers = 2;
    r.anchor_layer = "ANCHOR";
    r.struct_layer = "STRUCT";
    return r;
}

Netlist random_netlist(unsigned seed, int max_instances, bool with_bias_combs) {
    std::mt19937 rng(seed);
    std::uniform_int_distribution<int> count(1, max_instances);
    std::uniform_int_distribution<int> kind_pick(0, with_bias_combs ? 4 : 3);
    std::uniform_int_distribution<Coord> jitter(0, 20);

    Netlist n;
    n.process_ref = "rt";
    n.materials = {{"si", 160e9, 0.28, 2330}};

    // a ground anchor referencing the whole node pool keeps every pool node
    // grounded, so the generated netlist always validates clean
    {
        ComponentInstance gnd;
        gnd.kind = ComponentKind::Anchor;
        gnd.name = "gnd";
        for (int k = 0; k < 7; ++k) gnd.nodes.push_back("g" + std::to_string(k));
        gnd.w = um(25);
        gnd.h = um(25);
        gnd.anchor_layer = "ANCHOR";
        gnd.position = {-um(100), -um(100)};
        gnd.layer = "STRUCT";
        n.instances.push_back(std::move(gnd));
    }

    int total = count(rng) - 1;
    int cols = 8;
    for (int i = 0; i < total; ++i) {
        // each instance gets its own 200 um cell; content stays under 170 um
        Coord cell_x = um(200) * (i % cols);
        Coord cell_y = um(200) * (i / cols);
        Vec2 pos{cell_x + um(jitter(rng)), cell_y + um(jitter(rng))};
        std::string node_a = "g" + std::to_string(i % 7);
        std::string node_b = "g" + std::to_string((i + 3) % 7);

        ComponentInstance c;
        c.name = "u" + std::to_string(i);
        c.layer = "STRUCT";
        c.position = pos;
        switch (kind_pick(rng)) {
            case 0: {
                c.kind = ComponentKind::Beam;
                c.nodes = {node_a, node_b};
                c.l = um(50 + static_cast<Coord>(rng() % 100));
                c.w = um(2 + static_cast<Coord>(rng() % 7));
                c.angle_deg = (rng() % 2) ? 90.0 : 0.0;
                break;
            }
            case 1: {
                c.kind = ComponentKind::RigidMass;
                c.nodes = {node_a};
                c.w = um(30 + static_cast<Coord>(rng() % 90));
                c.h = um(30 + static_cast<Coord>(rng() % 90));
                // keep masses off the beam rule: aspect below 4
                if (c.w * 4 < c.h) c.w = c.h / 4;
                if (c.h * 4 < c.w) c.h = c.w / 4;
                break;
            }
            case 2: {
                c.kind = ComponentKind::Anchor;
                c.nodes = {node_a};
                c.w = um(12 + static_cast<Coord>(rng() % 28));
                c.h = um(12 + static_cast<Coord>(rng() % 28));
                if (c.w * 4 < c.h) c.w = c.h / 4;
                if (c.h * 4 < c.w) c.h = c.w / 4;
                c.anchor_layer = "ANCHOR";
                break;
            }
            default: {
                c.kind = (with_bias_combs && rng() % 2) ? ComponentKind::BiasComb
                                                        : ComponentKind::LinearComb;
                c.nodes = {node_a};
                c.fingers = 2 + static_cast<int>(rng() % 10);
                c.fw = um(2 + static_cast<Coord>(rng() % 4));
                c.gap = um(2 + static_cast<Coord>(rng() % 4));
                c.fl = um(20 + static_cast<Coord>(rng() % 40));
                c.overlap = c.fl;  // full engagement, recoverable by extraction
                c.orient = static_cast<CombOrient>(rng() % 4);
                break;
            }
        }
        n.instances.push_back(std::move(c));
    }
    return n;
}

std::string geometric_key(const ComponentInstance& c) {
    std::ostringstream os;
    os << kind_name(c.kind) << "|" << c.layer << "|" << c.position.x << "," << c.position.y
       << "|a" << c.angle_deg;
    switch (c.kind) {
        case ComponentKind::Beam: os << "|l" << c.l << "|w" << c.w; break;
        case ComponentKind::RigidMass: os << "|w" << c.w << "|h" << c.h; break;
        case ComponentKind::Anchor:
            os << "|w" << c.w << "|h" << c.h << "|" << c.anchor_layer;
            break;
        case ComponentKind::LinearComb:
        case ComponentKind::BiasComb:
            os << "|n" << c.fingers << "|fl" << c.fl << "|fw" << c.fw << "|g" << c.gap << "|"
               << orient_name(c.orient);
            break;
    }
    return os.str();
}

}  // namespace mems::testsupport
