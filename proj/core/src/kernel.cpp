#include "sadapt/kernel.hpp"

#include "sadapt/diagnostics.hpp"
#include "sadapt/error.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace sadapt {
namespace {

double squared_distance(const Matrix& x, Eigen::Index i, const Matrix& y, Eigen::Index j) {
  double s = 0.0;
  for (Eigen::Index k = 0; k < x.cols(); ++k) {
    const double diff = x(i, k) - y(j, k);
    s += diff * diff;
  }
  return s;
}

// Mean of the symmetric kernel block K(x, x) without forming it.
double mean_self_kernel(const Matrix& x, double inv_two_l2) {
  const Eigen::Index n = x.rows();
  double off = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) off += std::exp(-squared_distance(x, i, x, j) * inv_two_l2);
  }
  const double nn = static_cast<double>(n);
  return (nn + 2.0 * off) / (nn * nn);
}

}  // namespace

Matrix rbf_kernel(const Matrix& x, const Matrix& y, double lengthscale) {
  if (!(lengthscale > 0.0) || !std::isfinite(lengthscale)) {
    throw Error(ErrorKind::kInvalidArgument, "RBF length scale must be positive");
  }
  if (x.cols() != y.cols()) {
    throw Error(ErrorKind::kDimensionMismatch, "kernel arguments have different d");
  }
  const double inv_two_l2 = 1.0 / (2.0 * lengthscale * lengthscale);
  Matrix k(x.rows(), y.rows());
  if (&x == &y) {
    for (Eigen::Index j = 0; j < x.rows(); ++j) {
      k(j, j) = 1.0;
      for (Eigen::Index i = j + 1; i < x.rows(); ++i) {
        const double v = std::exp(-squared_distance(x, i, x, j) * inv_two_l2);
        k(i, j) = v;
        k(j, i) = v;
      }
    }
    return k;
  }
  for (Eigen::Index j = 0; j < y.rows(); ++j) {
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      k(i, j) = std::exp(-squared_distance(x, i, y, j) * inv_two_l2);
    }
  }
  return k;
}

double median_pairwise_distance(const Matrix& x) {
  const Eigen::Index n = x.rows();
  if (n < 2) throw Error(ErrorKind::kInvalidArgument, "median heuristic needs at least 2 rows");
  std::vector<double> dist;
  dist.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) dist.push_back(std::sqrt(squared_distance(x, i, x, j)));
  }
  const std::size_t mid = dist.size() / 2;
  std::nth_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(mid), dist.end());
  const double upper = dist[mid];
  if (dist.size() % 2 == 1) return upper;
  const double lower = *std::max_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

double median_heuristic(const Matrix& x) {
  const double median = median_pairwise_distance(x);
  if (median > 0.0) return median;
  warn("median pairwise distance is zero; using length scale 1.0");
  return 1.0;
}

double mmd_squared(const Matrix& xs, const Matrix& xt, double lengthscale) {
  if (xs.cols() != xt.cols()) throw Error(ErrorKind::kDimensionMismatch, "MMD inputs have different d");
  if (xs.rows() == 0 || xt.rows() == 0) throw Error(ErrorKind::kInvalidArgument, "MMD needs non-empty samples");
  if (!(lengthscale > 0.0)) throw Error(ErrorKind::kInvalidArgument, "RBF length scale must be positive");
  const double inv_two_l2 = 1.0 / (2.0 * lengthscale * lengthscale);
  double cross = 0.0;
  for (Eigen::Index i = 0; i < xs.rows(); ++i) {
    for (Eigen::Index j = 0; j < xt.rows(); ++j) cross += std::exp(-squared_distance(xs, i, xt, j) * inv_two_l2);
  }
  cross /= static_cast<double>(xs.rows()) * static_cast<double>(xt.rows());
  const double value = mean_self_kernel(xs, inv_two_l2) + mean_self_kernel(xt, inv_two_l2) - 2.0 * cross;
  return std::max(value, 0.0);
}

}  // namespace sadapt
