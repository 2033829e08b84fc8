#include "krylov.hpp"

#include "sadapt/error.hpp"
#include "sadapt/rng.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace sadapt::detail {

void canonicalise_signs(Matrix& vectors) {
  for (Eigen::Index c = 0; c < vectors.cols(); ++c) {
    Eigen::Index best = 0;
    for (Eigen::Index r = 1; r < vectors.rows(); ++r) {
      if (std::abs(vectors(r, c)) > std::abs(vectors(best, c))) best = r;
    }
    if (vectors(best, c) < 0.0) vectors.col(c) *= -1.0;
  }
}

GeneralizedEigenpairs top_generalized_eigenpairs(Eigen::Index n, int count, const LinearOp& apply_a,
                                                 const LinearOp& apply_b, const LinearOp& solve_b,
                                                 double tolerance) {
  if (count < 1 || count > n) {
    throw Error(ErrorKind::kInvalidArgument, "requested " + std::to_string(count) +
                                                 " eigenpairs of an order-" + std::to_string(n) + " pencil");
  }
  const Eigen::Index max_dim = std::min<Eigen::Index>(n, 400);
  Matrix v(n, max_dim), av(n, max_dim), bv(n, max_dim);

  Engine rng(0x5eedULL);
  std::normal_distribution<double> normal;
  Vector w(n);
  for (Eigen::Index i = 0; i < n; ++i) w(i) = normal(rng);

  GeneralizedEigenpairs out;
  Eigen::Index dim = 0;
  bool converged = false;
  const auto rayleigh_ritz = [&](Eigen::Index k) {
    Matrix t = v.leftCols(k).transpose() * av.leftCols(k);
    t = 0.5 * (t + t.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Matrix> es(t);
    if (es.info() != Eigen::Success) throw Error(ErrorKind::kNumerical, "Rayleigh-Ritz eigensolver failed");
    const Eigen::Index m = std::min<Eigen::Index>(count, k);
    // SelfAdjointEigenSolver sorts ascending; take the top m in descending order.
    Matrix y = es.eigenvectors().rightCols(m).rowwise().reverse();
    Vector theta = es.eigenvalues().tail(m).reverse();
    Matrix ay = av.leftCols(k) * y;
    Matrix by = bv.leftCols(k) * y;
    bool ok = m == count;
    const double scale = std::max(std::abs(theta(0)), 1e-300);
    for (Eigen::Index i = 0; i < m && ok; ++i) {
      const double res = (ay.col(i) - theta(i) * by.col(i)).norm();
      ok = res <= tolerance * scale * by.col(i).norm();
    }
    out.values = theta;
    out.vectors = v.leftCols(k) * y;
    out.krylov_dim = static_cast<int>(k);
    return ok;
  };

  for (Eigen::Index j = 0; j < max_dim; ++j) {
    // B-orthogonalise w against the basis (twice is enough in practice).
    for (int pass = 0; pass < 2 && j > 0; ++pass) {
      const Vector coeff = bv.leftCols(j).transpose() * w;
      w -= v.leftCols(j) * coeff;
    }
    Vector bw = apply_b(w);
    const double norm_b = std::sqrt(std::max(w.dot(bw), 0.0));
    if (!(norm_b > 1e-14 * std::max(1.0, w.norm()))) break;  // invariant subspace reached
    v.col(j) = w / norm_b;
    bv.col(j) = bw / norm_b;
    av.col(j) = apply_a(v.col(j));
    dim = j + 1;

    if (dim >= count && (dim % 4 == 0 || dim == max_dim)) {
      if ((converged = rayleigh_ritz(dim))) break;
    }
    w = solve_b(av.col(j));
  }
  if (!converged && dim >= count) converged = rayleigh_ritz(dim);
  if (!converged) {
    throw Error(ErrorKind::kNumerical, "generalized eigensolver did not converge (Krylov dimension " +
                                           std::to_string(dim) + ")");
  }
  return out;
}

}  // namespace sadapt::detail
