#include "sadapt/gmm.hpp"

#include "sadapt/error.hpp"
#include "sadapt/rng.hpp"

#include <json.hpp>

#include <Eigen/Cholesky>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace sadapt {
namespace {

constexpr double kCovRidge = 1e-6;
constexpr int kLloydSteps = 10;

struct Collapse {};

// Per-row, per-component log(w_c N(x | μ_c, Σ_c)).
Matrix weighted_log_densities(const GmmModel& m, const Matrix& x) {
  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  const int c_count = m.components();
  Matrix out(n, c_count);
  const double log_2pi = std::log(2.0 * std::numbers::pi);
  for (int c = 0; c < c_count; ++c) {
    const Eigen::LLT<Matrix> llt(m.covariances[static_cast<std::size_t>(c)]);
    if (llt.info() != Eigen::Success) throw Error(ErrorKind::kNumerical, "GMM covariance is not positive definite");
    const Matrix& l = llt.matrixL();
    const double log_det = 2.0 * l.diagonal().array().log().sum();
    const Matrix centred = (x.rowwise() - m.means.row(c)).transpose();
    const Matrix solved = llt.matrixL().solve(centred);
    const double base = std::log(m.weights(c)) - 0.5 * (static_cast<double>(d) * log_2pi + log_det);
    for (Eigen::Index i = 0; i < n; ++i) out(i, c) = base - 0.5 * solved.col(i).squaredNorm();
  }
  return out;
}

// Normalises rows in place (log-sum-exp) and returns the total log-likelihood.
double normalise_rows(Matrix& log_dens) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < log_dens.rows(); ++i) {
    const double mx = log_dens.row(i).maxCoeff();
    double s = 0.0;
    for (Eigen::Index c = 0; c < log_dens.cols(); ++c) s += std::exp(log_dens(i, c) - mx);
    const double lse = mx + std::log(s);
    total += lse;
    for (Eigen::Index c = 0; c < log_dens.cols(); ++c) log_dens(i, c) = std::exp(log_dens(i, c) - lse);
  }
  return total;
}

void m_step(GmmModel& m, const Matrix& x, const Matrix& resp, double collapse_weight) {
  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  const Vector nk = resp.colwise().sum().transpose();
  m.weights = nk / static_cast<double>(n);
  for (Eigen::Index c = 0; c < resp.cols(); ++c) {
    if (!(m.weights(c) >= collapse_weight)) throw Collapse{};
    m.means.row(c) = (resp.col(c).transpose() * x) / nk(c);
    const Matrix centred = x.rowwise() - m.means.row(c);
    Matrix cov = centred.transpose() * resp.col(c).asDiagonal() * centred / nk(c);
    cov = 0.5 * (cov + cov.transpose());
    const double tr = cov.trace();
    cov.diagonal().array() += tr > 0.0 ? kCovRidge * tr / static_cast<double>(d) : kCovRidge;
    m.covariances[static_cast<std::size_t>(c)] = std::move(cov);
  }
}

// k-means++ seeding then Lloyd steps; returns hard responsibilities.
Matrix kmeans_init(const Matrix& x, int k, Seed seed) {
  const Eigen::Index n = x.rows();
  Engine rng(seed);
  Matrix centres(k, x.cols());
  std::uniform_int_distribution<Eigen::Index> first(0, n - 1);
  centres.row(0) = x.row(first(rng));
  Vector d2 = (x.rowwise() - centres.row(0)).rowwise().squaredNorm();
  for (int c = 1; c < k; ++c) {
    const double total = d2.sum();
    Eigen::Index pick = 0;
    if (total > 0.0) {
      std::uniform_real_distribution<double> u(0.0, total);
      double target = u(rng);
      for (pick = 0; pick < n - 1; ++pick) {
        target -= d2(pick);
        if (target < 0.0) break;
      }
    } else {
      pick = first(rng);
    }
    centres.row(c) = x.row(pick);
    d2 = d2.cwiseMin((x.rowwise() - centres.row(c)).rowwise().squaredNorm());
  }

  std::vector<int> assign(static_cast<std::size_t>(n), 0);
  for (int step = 0; step <= kLloydSteps; ++step) {
    for (Eigen::Index i = 0; i < n; ++i) {
      int best = 0;
      double best_d = (x.row(i) - centres.row(0)).squaredNorm();
      for (int c = 1; c < k; ++c) {
        const double dc = (x.row(i) - centres.row(c)).squaredNorm();
        if (dc < best_d) {
          best_d = dc;
          best = c;
        }
      }
      assign[static_cast<std::size_t>(i)] = best;
    }
    if (step == kLloydSteps) break;
    Matrix sums = Matrix::Zero(k, x.cols());
    Vector counts = Vector::Zero(k);
    for (Eigen::Index i = 0; i < n; ++i) {
      sums.row(assign[static_cast<std::size_t>(i)]) += x.row(i);
      counts(assign[static_cast<std::size_t>(i)]) += 1.0;
    }
    for (int c = 0; c < k; ++c) {
      if (counts(c) > 0.0) centres.row(c) = sums.row(c) / counts(c);
    }
  }
  Matrix resp = Matrix::Zero(n, k);
  for (Eigen::Index i = 0; i < n; ++i) resp(i, assign[static_cast<std::size_t>(i)]) = 1.0;
  return resp;
}

GmmModel fit_once(const Matrix& x, int k, Seed seed, const GmmOptions& options) {
  GmmModel m;
  m.seed = seed;
  m.means = Matrix::Zero(k, x.cols());
  m.covariances.assign(static_cast<std::size_t>(k), Matrix());
  m_step(m, x, kmeans_init(x, k, seed), options.collapse_weight);
  for (int it = 0; it < options.max_iters; ++it) {
    Matrix resp = weighted_log_densities(m, x);
    const double ll = normalise_rows(resp);
    if (!std::isfinite(ll)) throw Error(ErrorKind::kNumerical, "GMM log-likelihood is not finite");
    const bool converged = !m.log_likelihood_trace.empty() &&
                           std::abs(ll - m.log_likelihood_trace.back()) < options.tol * std::abs(ll);
    m.log_likelihood_trace.push_back(ll);
    if (converged) break;
    m_step(m, x, resp, options.collapse_weight);
  }
  return m;
}

}  // namespace

GmmModel gmm_fit(const Matrix& x, int components, Seed seed, const GmmOptions& options) {
  if (components < 1) throw Error(ErrorKind::kInvalidArgument, "GMM needs at least one component");
  const auto need = static_cast<Eigen::Index>(components) * (x.cols() + 1);
  if (x.rows() < need) {
    throw Error(ErrorKind::kInvalidArgument, "GMM with " + std::to_string(components) + " components in d=" +
                                                 std::to_string(x.cols()) + " needs at least " +
                                                 std::to_string(need) + " rows, got " + std::to_string(x.rows()));
  }
  if (!x.allFinite()) throw Error(ErrorKind::kInvalidArgument, "GMM input has non-finite values");
  for (int attempt = 0; attempt <= options.max_restarts; ++attempt) {
    const Seed s = attempt == 0 ? seed : derive_seed(seed, static_cast<std::uint64_t>(attempt));
    try {
      GmmModel m = fit_once(x, components, s, options);
      m.restarts = attempt;
      return m;
    } catch (const Collapse&) {
    }
  }
  throw Error(ErrorKind::kNumerical, "GMM component collapsed after " + std::to_string(options.max_restarts) +
                                         " restarts");
}

GmmPrediction gmm_predict(const GmmModel& model, const Matrix& x) {
  if (x.cols() != model.means.cols()) {
    throw Error(ErrorKind::kDimensionMismatch, "GMM fitted on d=" + std::to_string(model.means.cols()) +
                                                   ", input has d=" + std::to_string(x.cols()));
  }
  GmmModel normalised = model;
  normalised.weights /= model.weights.sum();
  GmmPrediction out;
  out.responsibilities = weighted_log_densities(normalised, x);
  normalise_rows(out.responsibilities);
  out.assignments.resize(static_cast<std::size_t>(x.rows()));
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    Eigen::Index best = 0;
    out.responsibilities.row(i).maxCoeff(&best);
    out.assignments[static_cast<std::size_t>(i)] = static_cast<int>(best);
  }
  return out;
}

double gmm_log_likelihood(const GmmModel& model, const Matrix& x) {
  Matrix dens = weighted_log_densities(model, x);
  return normalise_rows(dens);
}

std::string GmmModel::to_json() const {
  nlohmann::ordered_json j;
  j["components"] = components();
  j["seed"] = seed;
  j["restarts"] = restarts;
  j["weights"] = std::vector<double>(weights.data(), weights.data() + weights.size());
  auto matrix_json = [](const Matrix& m) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      std::vector<double> row(static_cast<std::size_t>(m.cols()));
      for (Eigen::Index c = 0; c < m.cols(); ++c) row[static_cast<std::size_t>(c)] = m(i, c);
      rows.push_back(row);
    }
    return rows;
  };
  j["means"] = matrix_json(means);
  nlohmann::ordered_json covs = nlohmann::ordered_json::array();
  for (const auto& c : covariances) covs.push_back(matrix_json(c));
  j["covariances"] = covs;
  j["log_likelihood_trace"] = log_likelihood_trace;
  return j.dump();
}

}  // namespace sadapt
