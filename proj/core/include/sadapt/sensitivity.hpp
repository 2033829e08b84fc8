#pragma once

#include "sadapt/simulator.hpp"

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace sadapt {

struct SensitivityRow {
  std::size_t size = 0;
  std::size_t feature = 0;
  double mean = 0.0;
  /// Denominator `size`, as in standardisation.
  double std = 0.0;
};

/// 10, 20, ..., 500.
[[nodiscard]] std::vector<std::size_t> default_sensitivity_sizes();

/// "start:stop:step" (inclusive stop) or a comma-separated list.
[[nodiscard]] std::vector<std::size_t> parse_sizes(std::string_view text);

/// Moments of the first s rows of `x` for every s in `sizes`. Sizes must be
/// strictly ascending, at least 2 and at most x.rows().
[[nodiscard]] std::vector<SensitivityRow> run_sensitivity(const Matrix& x, const std::vector<std::size_t>& sizes);

/// Simulates `counts` from `spec` with `seed`, then as above.
[[nodiscard]] std::vector<SensitivityRow> run_sensitivity(const StructureSpec& spec,
                                                          const std::map<ClassId, std::size_t>& counts,
                                                          const std::vector<std::size_t>& sizes, Seed seed);

/// Columns: size, feature, mean, std.
[[nodiscard]] std::string sensitivity_csv(const std::vector<SensitivityRow>& rows);

}  // namespace sadapt
