#include "sadapt/gfk.hpp"

#include "krylov.hpp"
#include "sadapt/error.hpp"

#include <json.hpp>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>

namespace sadapt {
namespace {

// 1 - sin(x)/x, accurate near 0.
double one_minus_sinc(double x) {
  if (std::abs(x) < 1e-2) {
    const double x2 = x * x;
    return x2 / 6.0 - x2 * x2 / 120.0 + x2 * x2 * x2 / 5040.0;
  }
  return 1.0 - std::sin(x) / x;
}

double sinc(double x) { return std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x; }

}  // namespace

Matrix pca_basis(const Matrix& x) {
  if (x.rows() < 2) throw Error(ErrorKind::kInvalidArgument, "PCA needs at least 2 rows");
  const RowVector mean = x.colwise().mean();
  const Matrix centred = x.rowwise() - mean;
  Matrix cov = centred.transpose() * centred / static_cast<double>(x.rows() - 1);
  cov = 0.5 * (cov + cov.transpose());
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
  if (eig.info() != Eigen::Success) throw Error(ErrorKind::kNumerical, "PCA eigendecomposition failed");
  Matrix basis = eig.eigenvectors().rowwise().reverse();
  detail::canonicalise_signs(basis);
  return basis;
}

GeodesicKernel gfk(const Matrix& xs, const Matrix& xt, int k) {
  if (xs.cols() != xt.cols()) throw Error(ErrorKind::kDimensionMismatch, "source and target have different d");
  const Eigen::Index d = xs.cols();
  if (k < 1 || 2 * k >= d) {
    throw Error(ErrorKind::kInvalidArgument,
                "GFK subspace dimension k=" + std::to_string(k) + " must satisfy 1 <= k < d/2 (d=" +
                    std::to_string(d) + ")");
  }
  GeodesicKernel out;
  out.k = k;
  out.source_basis = pca_basis(xs);
  out.target_basis = pca_basis(xt).leftCols(k);
  const Matrix ps = out.source_basis.leftCols(k);
  const Matrix rs = out.source_basis.rightCols(d - k);
  const Matrix& pt = out.target_basis;

  // Psᵀ Pt = U1 Γ Vᵀ, Rsᵀ Pt = -U2 Σ Vᵀ with Γ = cos θ, Σ = sin θ.
  const Eigen::JacobiSVD<Matrix> svd(ps.transpose() * pt, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Matrix u1 = svd.matrixU();
  const Matrix v = svd.matrixV();
  const Matrix w = -(rs.transpose() * pt * v);  // = U2 Σ
  const Matrix source_dirs = ps * u1;
  const Matrix flow_dirs = rs * w;               // = Rs U2 Σ

  out.principal_angles.resize(k);
  Vector d1(k), d2(k), d3(k);
  for (int i = 0; i < k; ++i) {
    const double c = svd.singularValues()(i);
    const double s = w.col(i).norm();
    const double theta = std::atan2(s, c);
    out.principal_angles(i) = theta;
    // Λ1 = ∫cos², Λ2 = -∫cos·sin, Λ3 = ∫sin² over t ∈ [0, 1], with the
    // sin θ factors of U2 Σ divided out of Λ2 and Λ3.
    d1(i) = 1.0 - 0.5 * one_minus_sinc(2.0 * theta);
    d2(i) = -0.5 * sinc(theta);
    const double s2 = std::sin(theta) * std::sin(theta);
    d3(i) = s2 > 1e-12 ? 0.5 * one_minus_sinc(2.0 * theta) / s2 : 1.0 / 3.0 + 2.0 * theta * theta / 45.0;
  }
  // Ascending angles follow from descending singular values.
  Matrix g = source_dirs * d1.asDiagonal() * source_dirs.transpose() +
             source_dirs * d2.asDiagonal() * flow_dirs.transpose() +
             flow_dirs * d2.asDiagonal() * source_dirs.transpose() +
             flow_dirs * d3.asDiagonal() * flow_dirs.transpose();
  out.g = 0.5 * (g + g.transpose());
  return out;
}

std::string GeodesicKernel::to_json() const {
  nlohmann::ordered_json j;
  j["k"] = k;
  j["principal_angles"] = std::vector<double>(principal_angles.data(), principal_angles.data() + principal_angles.size());
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (Eigen::Index i = 0; i < g.rows(); ++i) {
    std::vector<double> row(static_cast<std::size_t>(g.cols()));
    for (Eigen::Index c = 0; c < g.cols(); ++c) row[static_cast<std::size_t>(c)] = g(i, c);
    rows.push_back(row);
  }
  j["g"] = rows;
  j["complement_augments"] = "source";
  return j.dump();
}

}  // namespace sadapt
