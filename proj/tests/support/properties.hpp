#pragma once

// Seeded property checks shared by the unit tests and the acceptance
// binary. Each returns the worst residual found over its cases.

#include <functional>
#include <string>
#include <vector>

namespace properties {

struct Result {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  /// Residual <= tolerance (or an exact check that held).
  bool passed = false;
  std::string detail;
};

Result nca_affine_recovery();
Result coral_covariance_match();
Result ncoral_equals_nca_for_equal_covariances();
Result mmd_matches_double_loop();
Result tca_constraint();
Result mmd_matrix_row_sums();
Result gfk_matches_quadrature();
Result gfk_positive_semidefinite();
Result knn_matches_brute_force();
Result macro_f1_matches_definition();
Result gmm_log_likelihood_monotone();
Result damped_frequencies_single_dof();
Result damped_frequencies_uniform_chain();
Result damped_frequencies_undamped_limit();
Result damage_lowers_frequencies();
Result frequencies_scale_with_sqrt_modulus();
Result seeded_pipelines_bit_deterministic();

struct Named {
  std::string name;
  std::function<Result()> run;
};

/// Every property above, in declaration order.
std::vector<Named> all();

}  // namespace properties
