#pragma once

#include <vector>

#include "netlist.hpp"

namespace mems {

constexpr double kEpsilon0 = 8.854e-12;  // F/m

struct FootprintShape {
    std::string layer;
    Polygon polygon;
};

/// Mask shapes of one component at its position/orientation, on the nm grid.
/// Angles that are multiples of 90 degrees rotate exactly; other angles snap
/// vertices to the grid and append a warning when a sink is given.
///   Beam       one l x w rectangle along its angle, centered on its axis
///   RigidMass  one w x h rectangle, corner at pos
///   Anchor     congruent rectangles on anchor_layer and the instance layer
///   Combs      spine (2*fw thick, covering the finger span) plus `fingers`
///              rectangles of fl x fw at pitch fw + gap
std::vector<FootprintShape> component_footprint(const ComponentInstance& c,
                                                const ProcessStack& stack,
                                                std::vector<std::string>* warnings = nullptr);

/// Lumped physical contribution of one component. Thickness always comes
/// from the instance's process layer.
struct LumpedParams {
    // Beam (fixed-guided Euler-Bernoulli)
    double k_axial = 0;        // E*A/L
    double k_lateral = 0;      // E*t*w^3/L^3  (in-plane)
    double k_out_of_plane = 0; // E*w*t^3/L^3
    // RigidMass
    double mass = 0;               // rho*t*w*h
    double inertia_xx = 0;         // thin-plate values about the center
    double inertia_yy = 0;
    double inertia_zz = 0;
    // Combs
    double dcdx = 0;    // 2*n*eps0*t/gap
    double c_rest = 0;  // 2*n*eps0*t*overlap/gap
    // Anchor
    bool grounded = false;
};

LumpedParams lumped_params(const ComponentInstance& c, const Material& m,
                           const ProcessStack& stack);

}  // namespace mems
