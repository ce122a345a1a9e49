#include "flows.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <sstream>

namespace mems {

Layout netlist_to_layout(const Netlist& n, const ProcessStack& stack,
                         std::vector<std::string>* warnings) {
    Layout layout;
    for (const ComponentInstance& c : n.instances)
        for (FootprintShape& fs : component_footprint(c, stack, warnings))
            layout.insert(fs.layer, std::move(fs.polygon));
    return canonical_layout(layout);
}

SolidModel netlist_to_solid(const Netlist& n, const ProcessStack& stack,
                            std::vector<std::string>* warnings) {
    SolidModel solid;
    solid.stack_ref = stack.name;
    for (const ComponentInstance& c : n.instances)
        for (const FootprintShape& fs : component_footprint(c, stack, warnings))
            solid.prisms.push_back(extrude_polygon(fs.polygon, fs.layer, stack));
    return canonical_solid(solid);
}

Layout solid_to_layout(const SolidModel& s, const ProcessStack& stack) {
    Layout layout;
    for (std::size_t i = 0; i < s.prisms.size(); ++i) {
        check_prism_against_stack(s.prisms[i], stack, i);
        auto [layer, poly] = project_prism(s.prisms[i]);
        layout.insert(layer, poly);
    }
    return canonical_layout(layout);
}

SolidModel layout_to_solid(const Layout& l, const ProcessStack& stack) {
    SolidModel solid;
    solid.stack_ref = stack.name;
    for (const auto& [layer, polys] : l.shapes)
        for (const Polygon& p : polys)
            solid.prisms.push_back(extrude_polygon(p, layer, stack));
    return canonical_solid(solid);
}

// ---------------------------------------------------------------------------
// Extraction rules

ExtractionRules parse_rules(const std::string& text) {
    ExtractionRules r;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::istringstream ls(line);
        std::string tok;
        while (ls >> tok) {
            auto eq = tok.find('=');
            if (eq == std::string::npos)
                throw ParseError("line " + std::to_string(lineno) + ": expected key=value in rules file");
            std::string k = tok.substr(0, eq), v = tok.substr(eq + 1);
            if (k == "beam_max_width") r.beam_max_width = parse_length_nm(v);
            else if (k == "beam_min_aspect") r.beam_min_aspect = parse_double(v, k);
            else if (k == "comb_min_fingers") r.comb_min_fingers = static_cast<int>(parse_int(v, k));
            else if (k == "anchor_layer") r.anchor_layer = v;
            else if (k == "struct_layer") r.struct_layer = v;
            else throw ParseError("line " + std::to_string(lineno) + ": unknown rules key '" + k + "'");
        }
    }
    if (r.beam_max_width <= 0 || r.beam_min_aspect <= 1.0 || r.comb_min_fingers < 2)
        throw ParseError("rules violate beam_max_width>0, beam_min_aspect>1, comb_min_fingers>=2");
    return r;
}

std::string emit_rules(const ExtractionRules& r) {
    return "beam_max_width=" + format_um(r.beam_max_width) + "\n" +
           "beam_min_aspect=" + format_double(r.beam_min_aspect) + "\n" +
           "comb_min_fingers=" + std::to_string(r.comb_min_fingers) + "\n" +
           "anchor_layer=" + r.anchor_layer + "\n" +
           "struct_layer=" + r.struct_layer + "\n";
}

// ---------------------------------------------------------------------------
// Layout -> netlist extraction

namespace {

struct ShapeRec {
    std::string layer;
    Polygon polygon;
    std::optional<BBox> rect;
    bool consumed = false;
};

struct Candidate {
    ComponentKind kind;
    ComponentInstance inst;           // nodes filled in later
    std::vector<std::size_t> shapes;  // indices into the shape table
    std::vector<BBox> struct_rects;   // structural-layer rects for contact tests
    bool demoted = false;
    std::string demote_reason;
};

struct Contact {
    std::size_t a, b;  // candidate indices, a < b
    BBox region;
    int node = -1;
};

bool rect_overlap(const BBox& a, const BBox& b, BBox* region) {
    Coord x0 = std::max(a.x0, b.x0), x1 = std::min(a.x1, b.x1);
    Coord y0 = std::max(a.y0, b.y0), y1 = std::min(a.y1, b.y1);
    if (x0 < x1 && y0 < y1) {
        *region = {x0, y0, x1, y1};
        return true;
    }
    return false;
}

bool rect_edge_contact(const BBox& a, const BBox& b, BBox* region) {
    // shared boundary segment of positive length; corner touches don't count
    auto span = [](Coord a0, Coord a1, Coord b0, Coord b1, Coord* lo, Coord* hi) {
        *lo = std::max(a0, b0);
        *hi = std::min(a1, b1);
        return *lo < *hi;
    };
    Coord lo, hi;
    if (a.x1 == b.x0 || b.x1 == a.x0) {
        Coord x = (a.x1 == b.x0) ? a.x1 : b.x1;
        if (span(a.y0, a.y1, b.y0, b.y1, &lo, &hi)) {
            *region = {x, lo, x, hi};
            return true;
        }
    }
    if (a.y1 == b.y0 || b.y1 == a.y0) {
        Coord y = (a.y1 == b.y0) ? a.y1 : b.y1;
        if (span(a.x0, a.x1, b.x0, b.x1, &lo, &hi)) {
            *region = {lo, y, hi, y};
            return true;
        }
    }
    return false;
}

bool region_less(const BBox& a, const BBox& b) {
    return std::tie(a.x0, a.y0, a.x1, a.y1) < std::tie(b.x0, b.y0, b.x1, b.y1);
}

}  // namespace

std::string ExtractionReport::summary() const {
    std::ostringstream os;
    os << "recognized " << recognized.instances.size() << " instances ("
       << recognized_shape_count << " shapes), " << unrecognized.size()
       << " unrecognized of " << input_shape_count << " input shapes";
    return os.str();
}

ExtractionReport layout_to_netlist(const Layout& l, const ProcessStack& stack,
                                   const ExtractionRules& rules) {
    stack.layer_or_throw(rules.struct_layer);
    stack.layer_or_throw(rules.anchor_layer);

    Layout canon = canonical_layout(l);
    ExtractionReport report;
    report.recognized.process_ref = stack.name;
    report.recognized.materials = stack.materials;

    std::vector<ShapeRec> table;
    for (const auto& [layer, polys] : canon.shapes) {
        if (!stack.find_layer(layer)) throw SemanticError("layout layer '" + layer + "' not in stack");
        for (const Polygon& p : polys) {
            if (!p.is_rectilinear())
                throw SemanticError("non-Manhattan polygon on layer '" + layer +
                                    "' (extraction requires rectilinear input)");
            ShapeRec rec{layer, p, p.as_rect(), false};
            table.push_back(std::move(rec));
        }
    }
    report.input_shape_count = table.size();

    auto reject = [&](std::size_t i, const std::string& reason) {
        table[i].consumed = true;
        report.unrecognized.push_back({table[i].layer, table[i].polygon, reason});
    };

    // shapes extraction cannot interpret at all
    for (std::size_t i = 0; i < table.size(); ++i) {
        if (table[i].layer != rules.struct_layer && table[i].layer != rules.anchor_layer)
            reject(i, "layer outside extraction rules");
        else if (!table[i].rect)
            reject(i, "non-rectangular");
    }

    std::vector<Candidate> cands;
    int anchor_n = 0, comb_n = 0, beam_n = 0, mass_n = 0;

    auto add_candidate = [&](ComponentKind kind, ComponentInstance inst,
                             std::vector<std::size_t> shapes) {
        Candidate c;
        c.kind = kind;
        c.inst = std::move(inst);
        for (std::size_t s : shapes) {
            table[s].consumed = true;
            if (table[s].layer == rules.struct_layer) c.struct_rects.push_back(*table[s].rect);
        }
        c.shapes = std::move(shapes);
        cands.push_back(std::move(c));
    };

    // anchors: anchor-layer rectangle paired with a congruent structural one
    for (std::size_t i = 0; i < table.size(); ++i) {
        if (table[i].consumed || table[i].layer != rules.anchor_layer) continue;
        std::size_t partner = table.size();
        for (std::size_t j = 0; j < table.size(); ++j) {
            if (table[j].consumed || table[j].layer != rules.struct_layer) continue;
            if (*table[j].rect == *table[i].rect) {
                partner = j;
                break;
            }
        }
        if (partner == table.size()) {
            reject(i, "unpaired anchor shape");
            continue;
        }
        const BBox& r = *table[i].rect;
        ComponentInstance inst;
        inst.kind = ComponentKind::Anchor;
        inst.name = "anchor" + std::to_string(anchor_n++);
        inst.w = r.width();
        inst.h = r.height();
        inst.anchor_layer = rules.anchor_layer;
        inst.layer = rules.struct_layer;
        inst.position = {r.x0, r.y0};
        add_candidate(ComponentKind::Anchor, std::move(inst), {i, partner});
    }
    for (std::size_t i = 0; i < table.size(); ++i)
        if (!table[i].consumed && table[i].layer == rules.anchor_layer)
            reject(i, "unpaired anchor shape");

    // combs: spine face carrying >= comb_min_fingers equal rectangles at
    // exact pitch, spanning the spine; spine thickness is 2*fw by library
    // construction, which disambiguates spines from beams
    struct Dir {
        CombOrient orient;
        // returns finger base/cross extents relative to the spine rect
        bool along_x;
        bool positive;
    };
    static const Dir dirs[] = {{CombOrient::PlusX, true, true},
                               {CombOrient::MinusX, true, false},
                               {CombOrient::PlusY, false, true},
                               {CombOrient::MinusY, false, false}};

    for (std::size_t s = 0; s < table.size(); ++s) {
        if (table[s].consumed || table[s].layer != rules.struct_layer) continue;
        const BBox spine = *table[s].rect;
        for (const Dir& d : dirs) {
            std::vector<std::size_t> fingers;
            for (std::size_t f = 0; f < table.size(); ++f) {
                if (f == s || table[f].consumed || table[f].layer != rules.struct_layer) continue;
                const BBox& r = *table[f].rect;
                bool attached;
                if (d.along_x)
                    attached = (d.positive ? r.x0 == spine.x1 : r.x1 == spine.x0) &&
                               r.y0 >= spine.y0 && r.y1 <= spine.y1;
                else
                    attached = (d.positive ? r.y0 == spine.y1 : r.y1 == spine.y0) &&
                               r.x0 >= spine.x0 && r.x1 <= spine.x1;
                if (attached) fingers.push_back(f);
            }
            if (static_cast<int>(fingers.size()) < rules.comb_min_fingers) continue;

            std::sort(fingers.begin(), fingers.end(), [&](std::size_t a, std::size_t b) {
                return d.along_x ? table[a].rect->y0 < table[b].rect->y0
                                 : table[a].rect->x0 < table[b].rect->x0;
            });
            auto cross_lo = [&](const BBox& r) { return d.along_x ? r.y0 : r.x0; };
            auto cross_hi = [&](const BBox& r) { return d.along_x ? r.y1 : r.x1; };
            auto len_of = [&](const BBox& r) { return d.along_x ? r.width() : r.height(); };

            const BBox& f0 = *table[fingers[0]].rect;
            Coord fw = cross_hi(f0) - cross_lo(f0);
            Coord fl = len_of(f0);
            bool ok = fw > 0 && fl > 0;
            Coord pitch = 0;
            for (std::size_t k = 0; ok && k < fingers.size(); ++k) {
                const BBox& r = *table[fingers[k]].rect;
                if (cross_hi(r) - cross_lo(r) != fw || len_of(r) != fl) ok = false;
                if (k > 0) {
                    Coord p = cross_lo(r) - cross_lo(*table[fingers[k - 1]].rect);
                    if (pitch == 0) pitch = p;
                    else if (p != pitch) ok = false;
                }
            }
            Coord gap = pitch - fw;
            if (ok && fingers.size() > 1 && gap <= 0) ok = false;
            // fingers must cover the spine exactly, spine thickness 2*fw
            Coord spine_lo = d.along_x ? spine.y0 : spine.x0;
            Coord spine_hi = d.along_x ? spine.y1 : spine.x1;
            Coord spine_th = d.along_x ? spine.width() : spine.height();
            if (ok && (cross_lo(f0) != spine_lo ||
                       cross_hi(*table[fingers.back()].rect) != spine_hi || spine_th != 2 * fw))
                ok = false;
            if (!ok) continue;

            ComponentInstance inst;
            inst.kind = ComponentKind::LinearComb;
            inst.name = "comb" + std::to_string(comb_n++);
            inst.fingers = static_cast<int>(fingers.size());
            inst.fl = fl;
            inst.fw = fw;
            inst.gap = fingers.size() > 1 ? gap : fw;  // single finger: gap unobservable
            inst.overlap = fl;  // engagement is not visible in a lone comb footprint
            inst.orient = d.orient;
            inst.layer = rules.struct_layer;
            switch (d.orient) {
                case CombOrient::PlusX: inst.position = {spine.x0, spine.y0}; break;
                case CombOrient::MinusX: inst.position = {spine.x1, spine.y1}; break;
                case CombOrient::PlusY: inst.position = {spine.x1, spine.y0}; break;
                case CombOrient::MinusY: inst.position = {spine.x0, spine.y1}; break;
            }
            std::vector<std::size_t> shapes = fingers;
            shapes.insert(shapes.begin(), s);
            add_candidate(ComponentKind::LinearComb, std::move(inst), std::move(shapes));
            break;
        }
    }

    // beams: thin, high-aspect structural rectangles
    for (std::size_t i = 0; i < table.size(); ++i) {
        if (table[i].consumed || table[i].layer != rules.struct_layer) continue;
        const BBox& r = *table[i].rect;
        Coord short_side = std::min(r.width(), r.height());
        Coord long_side = std::max(r.width(), r.height());
        double aspect = static_cast<double>(long_side) / static_cast<double>(short_side);
        if (short_side > rules.beam_max_width || aspect < rules.beam_min_aspect) continue;
        ComponentInstance inst;
        inst.kind = ComponentKind::Beam;
        inst.name = "beam" + std::to_string(beam_n++);
        inst.layer = rules.struct_layer;
        if (r.width() >= r.height()) {
            inst.l = r.width();
            inst.w = r.height();
            inst.angle_deg = 0;
            inst.position = {r.x0, r.y0 + inst.w / 2};
        } else {
            inst.l = r.height();
            inst.w = r.width();
            inst.angle_deg = 90;
            inst.position = {r.x0 + (inst.w - inst.w / 2), r.y0};
        }
        add_candidate(ComponentKind::Beam, std::move(inst), {i});
    }

    // everything else structural is a rigid mass
    for (std::size_t i = 0; i < table.size(); ++i) {
        if (table[i].consumed || table[i].layer != rules.struct_layer) continue;
        const BBox& r = *table[i].rect;
        ComponentInstance inst;
        inst.kind = ComponentKind::RigidMass;
        inst.name = "mass" + std::to_string(mass_n++);
        inst.w = r.width();
        inst.h = r.height();
        inst.layer = rules.struct_layer;
        inst.position = {r.x0, r.y0};
        add_candidate(ComponentKind::RigidMass, std::move(inst), {i});
    }

    // overlaps: a beam end inside a mass is connectivity, anything else is
    // ambiguous and takes both instances out
    std::vector<Contact> contacts;
    for (std::size_t a = 0; a < cands.size(); ++a) {
        for (std::size_t b = a + 1; b < cands.size(); ++b) {
            if (cands[a].demoted || cands[b].demoted) continue;
            for (const BBox& ra : cands[a].struct_rects) {
                for (const BBox& rb : cands[b].struct_rects) {
                    BBox region;
                    if (rect_overlap(ra, rb, &region)) {
                        bool beam_mass = (cands[a].kind == ComponentKind::Beam &&
                                          cands[b].kind == ComponentKind::RigidMass) ||
                                         (cands[b].kind == ComponentKind::Beam &&
                                          cands[a].kind == ComponentKind::RigidMass);
                        if (beam_mass) {
                            contacts.push_back({a, b, region, -1});
                        } else {
                            cands[a].demoted = cands[b].demoted = true;
                            cands[a].demote_reason = cands[b].demote_reason = "ambiguous overlap";
                        }
                    } else if (rect_edge_contact(ra, rb, &region)) {
                        contacts.push_back({a, b, region, -1});
                    }
                }
            }
        }
    }
    // merge multiple contact regions of the same pair (keep the smallest)
    {
        std::map<std::pair<std::size_t, std::size_t>, BBox> merged;
        for (const Contact& c : contacts) {
            auto key = std::make_pair(c.a, c.b);
            auto it = merged.find(key);
            if (it == merged.end() || region_less(c.region, it->second)) merged[key] = c.region;
        }
        contacts.clear();
        for (const auto& [key, region] : merged)
            contacts.push_back({key.first, key.second, region, -1});
    }
    // drop contacts touching demoted instances
    std::erase_if(contacts, [&](const Contact& c) {
        return cands[c.a].demoted || cands[c.b].demoted;
    });

    // beams carry exactly two attachment points
    for (std::size_t i = 0; i < cands.size(); ++i) {
        if (cands[i].demoted || cands[i].kind != ComponentKind::Beam) continue;
        int n = 0;
        for (const Contact& c : contacts)
            if (c.a == i || c.b == i) ++n;
        if (n > 2) {
            cands[i].demoted = true;
            cands[i].demote_reason = "beam with more than two attachments";
        }
    }
    std::erase_if(contacts, [&](const Contact& c) {
        return cands[c.a].demoted || cands[c.b].demoted;
    });

    // deterministic node ids: contacts sorted by region
    std::sort(contacts.begin(), contacts.end(),
              [](const Contact& a, const Contact& b) { return region_less(a.region, b.region); });
    for (std::size_t k = 0; k < contacts.size(); ++k) contacts[k].node = static_cast<int>(k);
    int next_node = static_cast<int>(contacts.size());

    for (Candidate& c : cands) {
        if (c.demoted) {
            for (std::size_t s : c.shapes)
                report.unrecognized.push_back({table[s].layer, table[s].polygon, c.demote_reason});
            continue;
        }
        std::size_t self = static_cast<std::size_t>(&c - cands.data());
        std::vector<const Contact*> mine;
        for (const Contact& ct : contacts)
            if (ct.a == self || ct.b == self) mine.push_back(&ct);

        if (c.kind == ComponentKind::Beam) {
            // order the two attachments along the beam axis
            bool horizontal = c.inst.angle_deg == 0;
            std::sort(mine.begin(), mine.end(), [&](const Contact* x, const Contact* y) {
                Coord cx = horizontal ? x->region.x0 + x->region.x1 : x->region.y0 + x->region.y1;
                Coord cy = horizontal ? y->region.x0 + y->region.x1 : y->region.y0 + y->region.y1;
                return cx < cy;
            });
        } else {
            std::sort(mine.begin(), mine.end(), [](const Contact* x, const Contact* y) {
                return region_less(x->region, y->region);
            });
        }
        for (const Contact* ct : mine) c.inst.nodes.push_back("n" + std::to_string(ct->node));
        std::size_t want = (c.kind == ComponentKind::Beam) ? 2 : std::max<std::size_t>(c.inst.nodes.size(), 1);
        while (c.inst.nodes.size() < want) c.inst.nodes.push_back("n" + std::to_string(next_node++));

        report.recognized_shape_count += c.shapes.size();
        report.recognized.instances.push_back(c.inst);
    }

    return report;
}

bool verify_triangle(const Netlist& n, const ProcessStack& stack, std::string* report) {
    Layout direct = netlist_to_layout(n, stack);
    Layout via_solid = solid_to_layout(netlist_to_solid(n, stack), stack);

    bool equal = true;
    std::vector<std::string> layers;
    for (const auto& [layer, polys] : direct.shapes) layers.push_back(layer);
    for (const auto& [layer, polys] : via_solid.shapes)
        if (!direct.shapes.count(layer)) layers.push_back(layer);
    std::sort(layers.begin(), layers.end());
    layers.erase(std::unique(layers.begin(), layers.end()), layers.end());

    for (const std::string& layer : layers) {
        static const std::vector<Polygon> none;
        const auto& a = direct.shapes.count(layer) ? direct.shapes.at(layer) : none;
        const auto& b = via_solid.shapes.count(layer) ? via_solid.shapes.at(layer) : none;
        bool ok = polygon_set_equal(a, b);
        equal = equal && ok;
        if (report)
            *report += "layer " + layer + ": " + std::to_string(a.size()) + " direct vs " +
                       std::to_string(b.size()) + " via solid: " + (ok ? "equal" : "DIFFER") + "\n";
    }
    return equal;
}

}  // namespace mems
