#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "errors.hpp"

namespace mems {

/// Planar coordinates and lengths live on a signed integer nanometer grid.
using Coord = std::int64_t;

/// Parses a length token into nanometers. Suffix `u` means micrometers,
/// `n` nanometers, no suffix meters. The value must land on the nanometer
/// grid exactly (e.g. "1.5u" -> 1500, "2e-6" -> 2000).
Coord parse_length_nm(std::string_view token);

/// Exact decimal micrometer rendering of a nanometer count, e.g.
/// 200000 -> "200u", 1500 -> "1.5u", -250 -> "-0.25u".
std::string format_um(Coord nm);

/// Shortest decimal that round-trips through a double (std::to_chars).
std::string format_double(double v);

/// Strict double parse of a whole token.
double parse_double(std::string_view token, const std::string& context);

/// Strict integer parse of a whole token.
long long parse_int(std::string_view token, const std::string& context);

inline double nm_to_m(Coord nm) { return static_cast<double>(nm) * 1e-9; }

}  // namespace mems
