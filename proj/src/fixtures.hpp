#pragma once

#include "flows.hpp"

namespace mems {

/// Bundled demo devices. The vibratory rate sensor exercises the
/// system -> device -> process direction (38 components: 16 beams, 4 masses,
/// 6 linear and 4 bias comb capacitors, 8 anchors); the z-axis accelerometer
/// layout, whose suspension is a ten-folded serpentine, drives the opposite
/// direction through extraction, FEA and macromodeling.

Netlist gyro_netlist();
ProcessStack gyro_stack();

Layout accel_layout();
ProcessStack accel_stack();

ExtractionRules demo_rules();

/// Writes the fixture files for one demo family into a directory:
/// "gyro" -> gyro.net, soi.stack, extract.rules
/// "accel" -> accel.cif, accel.stack, extract.rules
void write_fixtures(const std::string& which, const std::string& dir);

}  // namespace mems
