#pragma once

#include <Eigen/Dense>
#include <string>

namespace mems {

/// Matrix Market writers. Values are printed with 17 significant digits so
/// doubles round-trip exactly.
void write_matrix_market_coordinate(const std::string& path, const Eigen::MatrixXd& m);
void write_matrix_market_array(const std::string& path, const Eigen::MatrixXd& m);

/// Reads either coordinate or array format (real, general).
Eigen::MatrixXd read_matrix_market(const std::string& path);

}  // namespace mems
