#pragma once

#include "sadapt/types.hpp"

#include <span>
#include <string>
#include <vector>

namespace sadapt {

/// Rows are true classes, columns predicted classes; both indexed by
/// `classes` (sorted union of true and predicted ids).
struct ConfusionMatrix {
  std::vector<ClassId> classes;
  std::vector<std::vector<std::size_t>> counts;

  [[nodiscard]] std::size_t total() const noexcept;
  [[nodiscard]] std::size_t at(ClassId truth, ClassId predicted) const;
  [[nodiscard]] std::string to_json() const;
};

[[nodiscard]] ConfusionMatrix confusion(std::span<const ClassId> y_true, std::span<const ClassId> y_pred);

/// F1 for each class present in y_true, in ascending class order.
[[nodiscard]] std::vector<std::pair<ClassId, double>> per_class_f1(std::span<const ClassId> y_true,
                                                                   std::span<const ClassId> y_pred);

/// Unweighted mean of per_class_f1; classes never seen in y_true are ignored.
[[nodiscard]] double macro_f1(std::span<const ClassId> y_true, std::span<const ClassId> y_pred);

}  // namespace sadapt
