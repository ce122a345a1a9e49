#pragma once

#include <string>
#include <vector>

#include "geometry.hpp"

namespace mems {

enum class ComponentKind { Beam, RigidMass, LinearComb, BiasComb, Anchor };

const char* kind_name(ComponentKind k);
bool is_comb(ComponentKind k);

enum class CombOrient { PlusX, MinusX, PlusY, MinusY };

const char* orient_name(CombOrient o);

/// One system-level component. Geometric parameters are stored on the
/// integer nanometer grid; which fields are meaningful depends on the kind:
///   Beam:       l, w
///   RigidMass:  w, h
///   Linear/BiasComb: fingers, fl, fw, gap, overlap, orient
///   Anchor:     w, h, anchor_layer
struct ComponentInstance {
    ComponentKind kind = ComponentKind::Beam;
    std::string name;
    std::vector<std::string> nodes;
    Coord l = 0, w = 0, h = 0;
    Coord fl = 0, fw = 0, gap = 0, overlap = 0;
    int fingers = 0;
    CombOrient orient = CombOrient::PlusX;
    std::string anchor_layer;
    Vec2 position;
    std::string layer;
    double angle_deg = 0;

    friend bool operator==(const ComponentInstance&, const ComponentInstance&) = default;
};

struct Netlist {
    std::string process_ref;
    std::vector<Material> materials;
    std::vector<ComponentInstance> instances;

    const Material* find_material(const std::string& name) const;
    std::size_t count_kind(ComponentKind k) const;

    friend bool operator==(const Netlist&, const Netlist&) = default;
};

/// Line-oriented netlist text:
///   process "<name>"
///   material <name> E=<v> nu=<v> rho=<v>
///   <kind> <name> node=(a,b) <k>=<v>... pos=(x,y) layer=<L> [angle=<deg>]
/// Lengths take `u` (um) / `n` (nm) suffixes or are plain meters.
/// `#` starts a comment. Errors report 1-based line numbers.
Netlist parse_netlist(const std::string& text);

/// Canonical form: one instance per line, parameters in schema order,
/// lengths in micrometers. parse(serialize(n)) == n.
std::string serialize_netlist(const Netlist& n);

struct ValidationIssue {
    std::string code;     // dangling_node | unknown_layer | param_range
    std::string subject;  // node, layer or instance name
    std::string message;
    friend bool operator==(const ValidationIssue&, const ValidationIssue&) = default;
};

struct ValidationReport {
    std::vector<ValidationIssue> issues;
    bool empty() const { return issues.empty(); }
    std::string to_string() const;
};

/// Flow-readiness check: dangling nodes (referenced once and not grounded by
/// an anchor), layers missing from the stack, parameter-range violations.
ValidationReport validate_netlist(const Netlist& n, const ProcessStack& stack);

/// Picks the material for an instance: its layer's stack material, resolved
/// against the netlist library first and the stack library second.
const Material& resolve_material(const ComponentInstance& c, const Netlist& n,
                                 const ProcessStack& stack);

}  // namespace mems
