#pragma once

#include "sadapt/types.hpp"

#include <string>

namespace sadapt {

/// Geodesic flow kernel between the k-dimensional PCA subspaces of two
/// domains. G = ∫₀¹ Φ(t) Φ(t)ᵀ dt where Φ runs along the Grassmann geodesic
/// from the source subspace (t = 0) to the target subspace (t = 1).
struct GeodesicKernel {
  Matrix g;                 // d × d, symmetric PSD
  int k = 1;
  Vector principal_angles;  // k angles in [0, π/2], ascending
  Matrix source_basis;      // d × d: top-k source PCA directions, then the complement
  Matrix target_basis;      // d × k

  [[nodiscard]] std::string to_json() const;
};

/// Principal directions of the centred rows, ordered by decreasing variance
/// (d × d, orthonormal, signs canonicalised).
[[nodiscard]] Matrix pca_basis(const Matrix& x);

/// Requires 1 <= k < d/2 and at least 2 rows per domain.
[[nodiscard]] GeodesicKernel gfk(const Matrix& xs, const Matrix& xt, int k);

}  // namespace sadapt
