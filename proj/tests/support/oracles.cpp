#include "oracles.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>

namespace oracle {

void moments(const Matrix& x, Vector& mean, Vector& std) {
  const auto n = x.rows();
  mean = Vector::Zero(x.cols());
  std = Vector::Zero(x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) s += x(i, j);
    mean(j) = s / static_cast<double>(n);
    double ss = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) ss += (x(i, j) - mean(j)) * (x(i, j) - mean(j));
    std(j) = std::sqrt(ss / static_cast<double>(n));
  }
}

Matrix covariance(const Matrix& x) {
  Vector mean;
  Vector sd;
  moments(x, mean, sd);
  const auto d = x.cols();
  Matrix c = Matrix::Zero(d, d);
  for (Eigen::Index a = 0; a < d; ++a) {
    for (Eigen::Index b = 0; b < d; ++b) {
      double s = 0.0;
      for (Eigen::Index i = 0; i < x.rows(); ++i) s += (x(i, a) - mean(a)) * (x(i, b) - mean(b));
      c(a, b) = s / static_cast<double>(x.rows() - 1);
    }
  }
  return c;
}

namespace {

double rbf(const Matrix& a, Eigen::Index i, const Matrix& b, Eigen::Index j, double ell) {
  double d2 = 0.0;
  for (Eigen::Index f = 0; f < a.cols(); ++f) d2 += (a(i, f) - b(j, f)) * (a(i, f) - b(j, f));
  return std::exp(-d2 / (2.0 * ell * ell));
}

double mean_kernel(const Matrix& a, const Matrix& b, double ell) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < b.rows(); ++j) s += rbf(a, i, b, j, ell);
  }
  return s / static_cast<double>(a.rows() * b.rows());
}

}  // namespace

double mmd_squared(const Matrix& xs, const Matrix& xt, double lengthscale) {
  return mean_kernel(xs, xs, lengthscale) + mean_kernel(xt, xt, lengthscale) - 2.0 * mean_kernel(xs, xt, lengthscale);
}

std::vector<ClassId> knn(const Matrix& train, const std::vector<ClassId>& labels, const Matrix& test, int k,
                         const std::optional<Matrix>& metric) {
  std::vector<ClassId> out;
  for (Eigen::Index t = 0; t < test.rows(); ++t) {
    std::vector<std::pair<double, std::size_t>> dist;
    for (Eigen::Index r = 0; r < train.rows(); ++r) {
      const Vector diff = (test.row(t) - train.row(r)).transpose();
      const double d = metric ? diff.dot(*metric * diff) : diff.squaredNorm();
      dist.emplace_back(d, static_cast<std::size_t>(r));
    }
    std::sort(dist.begin(), dist.end());
    std::map<ClassId, int> votes;
    std::map<ClassId, std::size_t> first_index;
    for (int i = 0; i < k; ++i) {
      const ClassId c = labels[dist[static_cast<std::size_t>(i)].second];
      ++votes[c];
      if (!first_index.count(c)) first_index[c] = dist[static_cast<std::size_t>(i)].second;
      first_index[c] = std::min(first_index[c], dist[static_cast<std::size_t>(i)].second);
    }
    int best_votes = 0;
    for (const auto& [c, v] : votes) best_votes = std::max(best_votes, v);
    ClassId best = -1;
    std::size_t best_index = 0;
    for (const auto& [c, v] : votes) {
      if (v == best_votes && (best < 0 || first_index[c] < best_index)) {
        best = c;
        best_index = first_index[c];
      }
    }
    out.push_back(best);
  }
  return out;
}

double macro_f1(const std::vector<ClassId>& y_true, const std::vector<ClassId>& y_pred) {
  std::vector<ClassId> classes = y_true;
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
  double total = 0.0;
  for (ClassId c : classes) {
    double tp = 0.0;
    double fp = 0.0;
    double fn = 0.0;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
      if (y_true[i] == c && y_pred[i] == c) tp += 1.0;
      if (y_true[i] != c && y_pred[i] == c) fp += 1.0;
      if (y_true[i] == c && y_pred[i] != c) fn += 1.0;
    }
    total += 2.0 * tp / (2.0 * tp + fp + fn);
  }
  return total / static_cast<double>(classes.size());
}

Matrix principal_subspace(const Matrix& x, int k) {
  const Matrix centred = x.rowwise() - x.colwise().mean();
  Eigen::JacobiSVD<Matrix> svd(centred, Eigen::ComputeFullV);
  return svd.matrixV().leftCols(k);
}

Matrix geodesic_flow_kernel(const Matrix& ps, const Matrix& pt, int intervals) {
  const auto d = ps.rows();
  const auto k = ps.cols();
  Eigen::JacobiSVD<Matrix> svd(ps.transpose() * pt, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Matrix a = ps * svd.matrixU();
  const Matrix b = pt * svd.matrixV();
  Vector theta(k);
  Matrix q = Matrix::Zero(d, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    theta(i) = std::acos(std::clamp(svd.singularValues()(i), -1.0, 1.0));
    const double s = std::sin(theta(i));
    if (s > 1e-12) q.col(i) = (b.col(i) - a.col(i) * std::cos(theta(i))) / s;
  }
  auto phi = [&](double t) {
    Matrix p(d, k);
    for (Eigen::Index i = 0; i < k; ++i) p.col(i) = a.col(i) * std::cos(t * theta(i)) + q.col(i) * std::sin(t * theta(i));
    return p;
  };
  const double h = 1.0 / intervals;
  Matrix g = Matrix::Zero(d, d);
  for (int i = 0; i <= intervals; ++i) {
    const double w = (i == 0 || i == intervals) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    const Matrix p = phi(i * h);
    g += w * p * p.transpose();
  }
  return g * (h / 3.0);
}

double single_dof_damped_hz(double m, double c, double k) {
  const double wn = std::sqrt(k / m);
  const double zeta = c / (2.0 * std::sqrt(k * m));
  return wn * std::sqrt(1.0 - zeta * zeta) / (2.0 * std::numbers::pi);
}

std::vector<double> uniform_chain_hz(int n, double m, double k) {
  std::vector<double> out;
  for (int j = 1; j <= n; ++j) {
    const double w = 2.0 * std::sqrt(k / m) * std::sin((2 * j - 1) * std::numbers::pi / (2.0 * (2 * n + 1)));
    out.push_back(w / (2.0 * std::numbers::pi));
  }
  return out;
}

}  // namespace oracle
