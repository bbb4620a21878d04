#pragma once

#include <vector>

#include "sceneforge/interp.hpp"

namespace sceneforge {

/// Optimal one-to-one assignment maximizing the summed weight of a
/// rectangular matrix (rows x cols, row-major). Returns, for each row, the
/// matched column or -1.
std::vector<int> max_weight_assignment(const std::vector<std::vector<double>>& weights);

/// Per-category optimal IoU matching; unmatched objects score 0 and the total
/// is divided by the larger object count. Two empty layouts score 1.
double verify(const Layout& target, const Layout& predicted);

/// The tolerance under which a reconstruction counts as exact.
inline constexpr double kExactMiou = 1.0 - 1e-9;

}  // namespace sceneforge
