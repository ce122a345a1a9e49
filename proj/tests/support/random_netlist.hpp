#pragma once

#include <random>

#include "flows.hpp"

namespace mems::testsupport {

/// Deterministic random library netlists for the round-trip suites: up to
/// max_instances components at 90-degree angles, one per 200 um grid cell so
/// footprints never touch. Node names draw from a small shared pool, which
/// keeps the validation report empty. `with_bias_combs` is off for the
/// extraction-inverse suite (a bias comb's footprint is identical to a
/// linear comb's, so the recovered kind tag cannot distinguish them).
Netlist random_netlist(unsigned seed, int max_instances, bool with_bias_combs);

ProcessStack test_stack();
ExtractionRules test_rules();

/// Geometric identity of an instance: everything a footprint depends on.
/// Extraction recovers these; names, nodes and overlap are excluded.
std::string geometric_key(const ComponentInstance& c);

}  // namespace mems::testsupport
