#pragma once

#include "sadapt/types.hpp"

#include <functional>

namespace sadapt::detail {

using LinearOp = std::function<Vector(const Vector&)>;

struct GeneralizedEigenpairs {
  Vector values;   // descending
  Matrix vectors;  // B-orthonormal columns
  int krylov_dim = 0;
};

/// Largest `count` eigenpairs of the symmetric-definite pencil A x = ν B x
/// (A symmetric, B SPD) by Lanczos in the B inner product with full
/// reorthogonalisation and Rayleigh-Ritz extraction. `solve_b` applies B⁻¹.
/// Deterministic: the start vector comes from a fixed-seed engine.
[[nodiscard]] GeneralizedEigenpairs top_generalized_eigenpairs(Eigen::Index n, int count,
                                                               const LinearOp& apply_a,
                                                               const LinearOp& apply_b,
                                                               const LinearOp& solve_b,
                                                               double tolerance = 1e-11);

/// Flips each column so its largest-magnitude entry (first on ties) is
/// positive.
void canonicalise_signs(Matrix& vectors);

}  // namespace sadapt::detail
