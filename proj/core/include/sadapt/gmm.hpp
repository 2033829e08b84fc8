#pragma once

#include "sadapt/types.hpp"

#include <string>
#include <vector>

namespace sadapt {

struct GmmOptions {
  int max_iters = 500;
  /// Stop when |ΔLL| < tol · |LL|.
  double tol = 1e-6;
  int max_restarts = 5;
  /// Components whose weight drops below this trigger a restart.
  double collapse_weight = 1e-8;
};

/// Gaussian mixture with full covariances.
struct GmmModel {
  Vector weights;                   // C, sums to 1
  Matrix means;                     // C × d
  std::vector<Matrix> covariances;  // C of d × d, ridged
  /// Total log-likelihood of the training rows before each M-step.
  std::vector<double> log_likelihood_trace;
  int restarts = 0;
  Seed seed = 0;

  [[nodiscard]] int components() const noexcept { return static_cast<int>(weights.size()); }
  [[nodiscard]] std::string to_json() const;
};

/// EM from k-means++ seeding followed by 10 Lloyd steps. Each M-step adds
/// 1e-6·tr(Σ)/d to the covariance diagonal.
[[nodiscard]] GmmModel gmm_fit(const Matrix& x, int components, Seed seed, const GmmOptions& options = {});

struct GmmPrediction {
  std::vector<int> assignments;  // argmax, lowest index on ties
  Matrix responsibilities;       // n × C, rows sum to 1
};

[[nodiscard]] GmmPrediction gmm_predict(const GmmModel& model, const Matrix& x);

/// Σ_i log Σ_c w_c N(x_i | μ_c, Σ_c).
[[nodiscard]] double gmm_log_likelihood(const GmmModel& model, const Matrix& x);

}  // namespace sadapt
