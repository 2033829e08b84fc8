#pragma once

#include "sadapt/types.hpp"

namespace sadapt {

/// K_ij = exp(-‖x_i - y_j‖² / (2ℓ²)).
[[nodiscard]] Matrix rbf_kernel(const Matrix& x, const Matrix& y, double lengthscale);

/// Exact median of the n(n-1)/2 pairwise Euclidean distances (the two
/// middle values are averaged for an even count).
[[nodiscard]] double median_pairwise_distance(const Matrix& x);

/// Median-heuristic RBF length scale; falls back to 1.0 with a warning
/// when the median distance is zero.
[[nodiscard]] double median_heuristic(const Matrix& x);

/// Biased (V-statistic) estimate mean(K_ss) + mean(K_tt) - 2 mean(K_st),
/// clipped at zero.
[[nodiscard]] double mmd_squared(const Matrix& xs, const Matrix& xt, double lengthscale);

}  // namespace sadapt
