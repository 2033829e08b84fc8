#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <vector>

namespace sadapt {

// Feature matrices are n rows (observations) by d columns (features).
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

using ClassId = int;
using Seed = std::uint64_t;
using RowIndices = std::vector<std::size_t>;

/// Label reserved for the undamaged (normal) operating condition.
inline constexpr ClassId kNormalCondition = 0;

}  // namespace sadapt
