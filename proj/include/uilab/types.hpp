#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace uilab {

using Matrix = Eigen::MatrixXd;  // column-major
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;
using IndexSet = std::vector<Index>;

// NMSE floor: exact recovery is reported as -320 dB instead of -inf so CSV
// stays finite.
inline constexpr double kNmseFloorDb = -320.0;

}  // namespace uilab
