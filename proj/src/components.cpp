#include "components.hpp"

#include <cmath>

namespace mems {

namespace {

// Rotation applied to local footprint coordinates before translation.
// Multiples of 90 degrees stay exact on the integer grid.
struct Placement {
    bool exact;
    int quarter_turns;  // valid when exact
    double cos_a, sin_a;
    Vec2 offset;

    Vec2 apply(Coord x, Coord y) const {
        Coord rx, ry;
        if (exact) {
            switch (quarter_turns) {
                case 0: rx = x; ry = y; break;
                case 1: rx = -y; ry = x; break;
                case 2: rx = -x; ry = -y; break;
                default: rx = y; ry = -x; break;
            }
        } else {
            double fx = cos_a * static_cast<double>(x) - sin_a * static_cast<double>(y);
            double fy = sin_a * static_cast<double>(x) + cos_a * static_cast<double>(y);
            rx = static_cast<Coord>(std::llround(fx));
            ry = static_cast<Coord>(std::llround(fy));
        }
        return {rx + offset.x, ry + offset.y};
    }

    Polygon rect(Coord x0, Coord y0, Coord x1, Coord y1) const {
        Polygon p;
        p.vertices = {apply(x0, y0), apply(x1, y0), apply(x1, y1), apply(x0, y1)};
        return normalize_polygon(p);
    }
};

Placement placement_for(const ComponentInstance& c, double extra_deg,
                        std::vector<std::string>* warnings) {
    double angle = c.angle_deg + extra_deg;
    Placement pl;
    pl.offset = c.position;
    double q = angle / 90.0;
    double qr = std::round(q);
    if (q == qr) {
        pl.exact = true;
        pl.quarter_turns = static_cast<int>(std::llround(qr)) % 4;
        if (pl.quarter_turns < 0) pl.quarter_turns += 4;
        pl.cos_a = pl.sin_a = 0;
    } else {
        pl.exact = false;
        double rad = angle * (std::acos(-1.0) / 180.0);
        pl.cos_a = std::cos(rad);
        pl.sin_a = std::sin(rad);
        if (warnings)
            warnings->push_back("instance '" + c.name + "': angle " + format_double(c.angle_deg) +
                                " is not a multiple of 90 degrees; vertices snapped to the nm grid");
    }
    return pl;
}

double orient_degrees(CombOrient o) {
    switch (o) {
        case CombOrient::PlusX: return 0;
        case CombOrient::MinusX: return 180;
        case CombOrient::PlusY: return 90;
        case CombOrient::MinusY: return 270;
    }
    return 0;
}

}  // namespace

std::vector<FootprintShape> component_footprint(const ComponentInstance& c,
                                                const ProcessStack& stack,
                                                std::vector<std::string>* warnings) {
    stack.layer_or_throw(c.layer);
    std::vector<FootprintShape> shapes;

    switch (c.kind) {
        case ComponentKind::Beam: {
            Placement pl = placement_for(c, 0, warnings);
            // axis runs from pos along +x before rotation; width splits
            // floor/ceil so odd widths stay on the grid
            Coord below = c.w / 2;
            Coord above = c.w - below;
            shapes.push_back({c.layer, pl.rect(0, -below, c.l, above)});
            break;
        }
        case ComponentKind::RigidMass: {
            Placement pl = placement_for(c, 0, warnings);
            shapes.push_back({c.layer, pl.rect(0, 0, c.w, c.h)});
            break;
        }
        case ComponentKind::Anchor: {
            stack.layer_or_throw(c.anchor_layer);
            Placement pl = placement_for(c, 0, warnings);
            Polygon r = pl.rect(0, 0, c.w, c.h);
            shapes.push_back({c.anchor_layer, r});
            shapes.push_back({c.layer, r});
            break;
        }
        case ComponentKind::LinearComb:
        case ComponentKind::BiasComb: {
            Placement pl = placement_for(c, orient_degrees(c.orient), warnings);
            Coord pitch = c.fw + c.gap;
            Coord span = static_cast<Coord>(c.fingers) * c.fw +
                         static_cast<Coord>(c.fingers - 1) * c.gap;
            Coord spine = 2 * c.fw;
            shapes.push_back({c.layer, pl.rect(0, 0, spine, span)});
            for (int i = 0; i < c.fingers; ++i) {
                Coord y0 = static_cast<Coord>(i) * pitch;
                shapes.push_back({c.layer, pl.rect(spine, y0, spine + c.fl, y0 + c.fw)});
            }
            break;
        }
    }
    return shapes;
}

LumpedParams lumped_params(const ComponentInstance& c, const Material& m,
                           const ProcessStack& stack) {
    const ProcessLayer& layer = stack.layer_or_throw(c.layer);
    if (layer.thickness <= 0)
        throw SemanticError("layer '" + layer.mask + "' has zero thickness");
    double t = nm_to_m(layer.thickness);
    double E = m.youngs_modulus;

    LumpedParams out;
    switch (c.kind) {
        case ComponentKind::Beam: {
            double L = nm_to_m(c.l);
            double w = nm_to_m(c.w);
            out.k_axial = E * (t * w) / L;
            out.k_lateral = E * t * w * w * w / (L * L * L);
            out.k_out_of_plane = E * w * t * t * t / (L * L * L);
            break;
        }
        case ComponentKind::RigidMass: {
            double w = nm_to_m(c.w);
            double h = nm_to_m(c.h);
            out.mass = m.density * t * w * h;
            // thin-plate inertias about the center of mass
            out.inertia_xx = out.mass * h * h / 12.0;
            out.inertia_yy = out.mass * w * w / 12.0;
            out.inertia_zz = out.mass * (w * w + h * h) / 12.0;
            break;
        }
        case ComponentKind::LinearComb:
        case ComponentKind::BiasComb: {
            double gap = nm_to_m(c.gap);
            double overlap = nm_to_m(c.overlap);
            double n = static_cast<double>(c.fingers);
            out.dcdx = 2.0 * n * kEpsilon0 * t / gap;
            out.c_rest = 2.0 * n * kEpsilon0 * t * overlap / gap;
            break;
        }
        case ComponentKind::Anchor:
            out.grounded = true;
            break;
    }
    return out;
}

}  // namespace mems
