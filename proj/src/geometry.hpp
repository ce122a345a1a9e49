#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "units.hpp"

namespace mems {

struct Vec2 {
    Coord x = 0;
    Coord y = 0;
    friend bool operator==(const Vec2&, const Vec2&) = default;
    friend auto operator<=>(const Vec2&, const Vec2&) = default;
};

struct BBox {
    Coord x0 = 0, y0 = 0, x1 = 0, y1 = 0;
    Coord width() const { return x1 - x0; }
    Coord height() const { return y1 - y0; }
    friend bool operator==(const BBox&, const BBox&) = default;
};

/// Closed planar polygon on the integer nanometer grid. A valid polygon is
/// simple, has no repeated or collinear consecutive vertices after
/// normalize_polygon, and is positively (counter-clockwise) oriented.
struct Polygon {
    std::vector<Vec2> vertices;

    /// Twice the signed area (shoelace). Exact: 128-bit accumulation.
    __int128 twice_signed_area() const;
    bool is_rectilinear() const;
    /// O(n^2) proper self-intersection test; adjacent edges may share endpoints.
    bool is_simple() const;
    BBox bounding_box() const;
    /// If the polygon is an axis-aligned rectangle, its extents.
    std::optional<BBox> as_rect() const;

    friend bool operator==(const Polygon&, const Polygon&) = default;
};

Polygon make_rect(Coord x0, Coord y0, Coord x1, Coord y1);

/// Canonical form: counter-clockwise, duplicate and collinear vertices
/// removed, rotated so the lexicographically smallest vertex comes first.
/// Idempotent. Throws SemanticError on degenerate (zero-area) input.
Polygon normalize_polygon(const Polygon& p);

/// Strict ordering of normalized polygons (lexicographic vertex list).
bool polygon_less(const Polygon& a, const Polygon& b);

/// Exact multiset equality after normalization.
bool polygon_set_equal(std::vector<Polygon> a, std::vector<Polygon> b);

// ---------------------------------------------------------------------------
// Process stack

struct Material {
    std::string name;
    double youngs_modulus = 0;  // Pa
    double poisson_ratio = 0;
    double density = 0;  // kg/m^3
    friend bool operator==(const Material&, const Material&) = default;
};

struct ProcessLayer {
    std::string mask;
    Coord z0 = 0;        // nm
    Coord thickness = 0; // nm, > 0
    std::string material;
    friend bool operator==(const ProcessLayer&, const ProcessLayer&) = default;
};

/// Ordered fabrication layers shared by every geometric flow. The stack file
/// may also carry material definitions so extracted netlists stay
/// self-contained.
struct ProcessStack {
    std::string name;
    std::vector<ProcessLayer> layers;
    std::vector<Material> materials;

    const ProcessLayer* find_layer(const std::string& mask) const;
    const ProcessLayer& layer_or_throw(const std::string& mask) const;
    const Material* find_material(const std::string& name) const;
    /// Checks mask uniqueness, z ordering and positive thickness.
    void check() const;
    friend bool operator==(const ProcessStack&, const ProcessStack&) = default;
};

ProcessStack parse_stack(const std::string& text);
std::string emit_stack(const ProcessStack& stack);

// ---------------------------------------------------------------------------
// Layout

/// Per-layer polygon multisets. CIF carries a numeric symbol id, so layouts
/// are named by a positive integer cell id (default 1).
struct Layout {
    int cell_id = 1;
    std::map<std::string, std::vector<Polygon>> shapes;

    std::size_t shape_count() const;
    void insert(const std::string& layer, Polygon p);
};

/// Normalizes every polygon and sorts each layer's multiset.
Layout canonical_layout(const Layout& l);
bool layout_equal(const Layout& a, const Layout& b);

// ---------------------------------------------------------------------------
// Solid model

struct Prism {
    std::string layer;
    Coord z0 = 0;
    Coord z1 = 0;  // > z0
    Polygon footprint;
    friend bool operator==(const Prism&, const Prism&) = default;
};

/// Layer-tagged extruded prisms; the neutral stand-in for a B-rep solid.
/// The working name is not persisted by the ESM format (parse yields "1").
struct SolidModel {
    std::string name = "1";
    std::string stack_ref;
    std::vector<Prism> prisms;
};

SolidModel canonical_solid(const SolidModel& s);
bool solid_equal(const SolidModel& a, const SolidModel& b);

Prism extrude_polygon(const Polygon& p, const std::string& layer, const ProcessStack& stack);
std::pair<std::string, Polygon> project_prism(const Prism& pr);
/// Throws SemanticError when the prism's z-interval does not match its
/// layer in the stack (a non-manufacturable solid).
void check_prism_against_stack(const Prism& pr, const ProcessStack& stack, std::size_t index);

// ---------------------------------------------------------------------------
// CIF (subset: DS/DF/L/B/P/C/E; coordinates in centimicrons = 10 nm)

Layout parse_cif(const std::string& text, std::vector<std::string>* warnings = nullptr);
std::string emit_cif(const Layout& l);

// ---------------------------------------------------------------------------
// ESM (extruded solid model, text)

SolidModel parse_esm(const std::string& text);
std::string emit_esm(const SolidModel& s);

// ---------------------------------------------------------------------------
// File helpers

std::string read_text_file(const std::string& path);
/// Writes via a temp file in the same directory plus rename.
void write_text_file_atomic(const std::string& path, const std::string& content);

}  // namespace mems
