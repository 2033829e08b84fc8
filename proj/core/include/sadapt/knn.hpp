#pragma once

#include "sadapt/dataset.hpp"
#include "sadapt/types.hpp"

#include <optional>
#include <vector>

namespace sadapt {

/// Brute-force k-nearest-neighbour classifier.
///
/// Distances are Euclidean, or (x - y)ᵀ G (x - y) when a metric matrix G is
/// supplied (e.g. a geodesic flow kernel). Neighbours are ordered by
/// distance, then by training-row index; a tied vote goes to the class that
/// owns the lowest-index neighbour among the tied classes.
class KnnModel {
 public:
  KnnModel(Matrix train, std::vector<ClassId> labels, int k = 1, std::optional<Matrix> metric = std::nullopt);

  [[nodiscard]] std::vector<ClassId> predict(const Matrix& test) const;

  [[nodiscard]] int k() const noexcept { return k_; }
  [[nodiscard]] const Matrix& train() const noexcept { return train_; }
  [[nodiscard]] const std::vector<ClassId>& labels() const noexcept { return labels_; }
  [[nodiscard]] const std::optional<Matrix>& metric() const noexcept { return metric_; }

 private:
  [[nodiscard]] double distance2(const Matrix& test, Eigen::Index row, Eigen::Index train_row) const;

  Matrix train_;
  std::vector<ClassId> labels_;
  int k_;
  std::optional<Matrix> metric_;
};

[[nodiscard]] std::vector<ClassId> knn_fit_predict(const LabeledDataset& train, const Matrix& test, int k = 1,
                                                   std::optional<Matrix> metric = std::nullopt);

}  // namespace sadapt
