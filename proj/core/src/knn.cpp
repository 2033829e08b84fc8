#include "sadapt/knn.hpp"

#include "sadapt/error.hpp"

#include <algorithm>
#include <map>
#include <utility>

namespace sadapt {

KnnModel::KnnModel(Matrix train, std::vector<ClassId> labels, int k, std::optional<Matrix> metric)
    : train_(std::move(train)), labels_(std::move(labels)), k_(k), metric_(std::move(metric)) {
  if (train_.rows() == 0) throw Error(ErrorKind::kInvalidArgument, "k-NN needs at least one training row");
  if (labels_.size() != static_cast<std::size_t>(train_.rows())) {
    throw Error(ErrorKind::kDimensionMismatch, "k-NN labels do not match training rows");
  }
  if (k_ < 1 || k_ > train_.rows()) {
    throw Error(ErrorKind::kInvalidArgument,
                "k=" + std::to_string(k_) + " outside [1, " + std::to_string(train_.rows()) + "]");
  }
  if (metric_ && (metric_->rows() != train_.cols() || metric_->cols() != train_.cols())) {
    throw Error(ErrorKind::kDimensionMismatch, "k-NN metric matrix must be d x d");
  }
}

double KnnModel::distance2(const Matrix& test, Eigen::Index row, Eigen::Index train_row) const {
  const Eigen::Index d = train_.cols();
  if (!metric_) {
    double s = 0.0;
    for (Eigen::Index c = 0; c < d; ++c) {
      const double diff = test(row, c) - train_(train_row, c);
      s += diff * diff;
    }
    return s;
  }
  const Vector diff = (test.row(row) - train_.row(train_row)).transpose();
  return diff.dot(*metric_ * diff);
}

std::vector<ClassId> KnnModel::predict(const Matrix& test) const {
  if (test.cols() != train_.cols()) {
    throw Error(ErrorKind::kDimensionMismatch, "k-NN trained on d=" + std::to_string(train_.cols()) +
                                                   ", test has d=" + std::to_string(test.cols()));
  }
  const Eigen::Index n = train_.rows();
  std::vector<ClassId> out(static_cast<std::size_t>(test.rows()));
  std::vector<std::pair<double, Eigen::Index>> dist(static_cast<std::size_t>(n));
  for (Eigen::Index r = 0; r < test.rows(); ++r) {
    if (k_ == 1) {
      Eigen::Index best = 0;
      double best_d = distance2(test, r, 0);
      for (Eigen::Index i = 1; i < n; ++i) {
        const double di = distance2(test, r, i);
        if (di < best_d) {
          best_d = di;
          best = i;
        }
      }
      out[static_cast<std::size_t>(r)] = labels_[static_cast<std::size_t>(best)];
      continue;
    }
    for (Eigen::Index i = 0; i < n; ++i) dist[static_cast<std::size_t>(i)] = {distance2(test, r, i), i};
    std::partial_sort(dist.begin(), dist.begin() + k_, dist.end());
    // votes: class -> (count, first neighbour index)
    std::map<ClassId, std::pair<int, Eigen::Index>> votes;
    for (int j = 0; j < k_; ++j) {
      const Eigen::Index idx = dist[static_cast<std::size_t>(j)].second;
      auto [it, inserted] = votes.try_emplace(labels_[static_cast<std::size_t>(idx)], 0, idx);
      it->second.first += 1;
      it->second.second = std::min(it->second.second, idx);
    }
    auto best = votes.begin();
    for (auto it = votes.begin(); it != votes.end(); ++it) {
      if (it->second.first > best->second.first ||
          (it->second.first == best->second.first && it->second.second < best->second.second)) {
        best = it;
      }
    }
    out[static_cast<std::size_t>(r)] = best->first;
  }
  return out;
}

std::vector<ClassId> knn_fit_predict(const LabeledDataset& train, const Matrix& test, int k,
                                     std::optional<Matrix> metric) {
  return KnnModel(train.features(), train.require_labels(), k, std::move(metric)).predict(test);
}

}  // namespace sadapt
