#pragma once

#include "components.hpp"
#include "netlist.hpp"

namespace mems {

/// Instantiates every component footprint and groups the shapes by layer.
/// Precondition: validate_netlist(n, stack) is empty.
Layout netlist_to_layout(const Netlist& n, const ProcessStack& stack,
                         std::vector<std::string>* warnings = nullptr);

/// One prism per footprint shape, extruded through its layer's z-interval.
/// Equals layout_to_solid(netlist_to_layout(n, stack), stack).
SolidModel netlist_to_solid(const Netlist& n, const ProcessStack& stack,
                            std::vector<std::string>* warnings = nullptr);

/// Projects every prism back to its mask. Prism z-intervals must match the
/// stack (checked; non-manufacturable solids are reported by prism index).
Layout solid_to_layout(const SolidModel& s, const ProcessStack& stack);

/// Extrudes every polygon through its layer. Inverse of solid_to_layout.
SolidModel layout_to_solid(const Layout& l, const ProcessStack& stack);

/// Pattern recognition thresholds for layout -> netlist extraction.
struct ExtractionRules {
    Coord beam_max_width = 10000;  // nm
    double beam_min_aspect = 5.0;
    int comb_min_fingers = 2;
    std::string anchor_layer = "ANCHOR";
    std::string struct_layer = "STRUCT";
};

ExtractionRules parse_rules(const std::string& text);
std::string emit_rules(const ExtractionRules& r);

struct UnrecognizedShape {
    std::string layer;
    Polygon polygon;
    std::string reason;
};

struct ExtractionReport {
    Netlist recognized;
    std::vector<UnrecognizedShape> unrecognized;
    std::size_t input_shape_count = 0;
    std::size_t recognized_shape_count = 0;
    std::string summary() const;
};

/// Recognizes the component library's shape vocabulary in a Manhattan layout:
/// anchors (anchor-layer rectangle with a congruent structural rectangle),
/// combs (>= comb_min_fingers equal rectangles at exact pitch on a spine),
/// beams (thin high-aspect rectangles), rigid masses (remaining structural
/// rectangles). Node connectivity comes from shared edges; a beam-end
/// overlapping a mass also connects. Everything else lands in `unrecognized`
/// with a reason; shapes are conserved:
///   recognized footprint shapes + unrecognized == input shapes.
ExtractionReport layout_to_netlist(const Layout& l, const ProcessStack& stack,
                                   const ExtractionRules& rules);

/// Closed-triangle check: netlist->solid->layout versus netlist->layout,
/// compared per layer with exact polygon multiset equality. Appends a
/// per-layer line to `report` when given.
bool verify_triangle(const Netlist& n, const ProcessStack& stack, std::string* report = nullptr);

}  // namespace mems
