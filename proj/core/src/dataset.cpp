#include "sadapt/dataset.hpp"

#include "sadapt/error.hpp"
#include "sadapt/rng.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>

namespace sadapt {

LabeledDataset::LabeledDataset(Matrix features, std::optional<std::vector<ClassId>> labels,
                               std::string domain_tag, Covariates covariates)
    : features_(std::move(features)),
      labels_(std::move(labels)),
      domain_tag_(std::move(domain_tag)),
      covariates_(std::move(covariates)) {
  if (features_.rows() < 1 || features_.cols() < 1) {
    throw Error(ErrorKind::kInvalidArgument, "dataset needs at least one row and one feature");
  }
  if (!features_.allFinite()) {
    for (Eigen::Index i = 0; i < features_.rows(); ++i) {
      for (Eigen::Index j = 0; j < features_.cols(); ++j) {
        if (!std::isfinite(features_(i, j))) {
          throw Error(ErrorKind::kInvalidArgument,
                      "non-finite feature at row " + std::to_string(i) + ", column " +
                          std::to_string(j));
        }
      }
    }
  }
  if (labels_) {
    if (labels_->size() != n()) {
      throw Error(ErrorKind::kDimensionMismatch,
                  "label count " + std::to_string(labels_->size()) + " != row count " +
                      std::to_string(n()));
    }
    for (std::size_t i = 0; i < labels_->size(); ++i) {
      if ((*labels_)[i] < 0) {
        throw Error(ErrorKind::kInvalidArgument,
                    "negative class label at row " + std::to_string(i));
      }
    }
  }
  for (const auto& [name, column] : covariates_) {
    if (column.size() != n()) {
      throw Error(ErrorKind::kDimensionMismatch,
                  "covariate '" + name + "' has " + std::to_string(column.size()) +
                      " values for " + std::to_string(n()) + " rows");
    }
  }
}

const std::vector<ClassId>& LabeledDataset::require_labels() const {
  if (!labels_) {
    throw Error(ErrorKind::kInvalidArgument, "dataset '" + domain_tag_ + "' has no labels");
  }
  return *labels_;
}

const std::vector<double>& LabeledDataset::covariate(const std::string& name) const {
  auto it = covariates_.find(name);
  if (it == covariates_.end()) {
    throw Error(ErrorKind::kNotFound, "unknown covariate '" + name + "'");
  }
  return it->second;
}

std::vector<ClassId> LabeledDataset::classes() const {
  const auto& y = require_labels();
  std::set<ClassId> unique(y.begin(), y.end());
  return {unique.begin(), unique.end()};
}

LabeledDataset LabeledDataset::select_rows(std::span<const std::size_t> rows) const {
  Matrix x(static_cast<Eigen::Index>(rows.size()), features_.cols());
  std::optional<std::vector<ClassId>> y;
  if (labels_) y.emplace();
  Covariates cov;
  for (const auto& [name, _] : covariates_) cov[name].reserve(rows.size());

  for (std::size_t r = 0; r < rows.size(); ++r) {
    const std::size_t src = rows[r];
    if (src >= n()) {
      throw Error(ErrorKind::kInvalidArgument, "row index " + std::to_string(src) + " out of range");
    }
    x.row(static_cast<Eigen::Index>(r)) = features_.row(static_cast<Eigen::Index>(src));
    if (y) y->push_back((*labels_)[src]);
    for (const auto& [name, column] : covariates_) cov[name].push_back(column[src]);
  }
  return LabeledDataset(std::move(x), std::move(y), domain_tag_, std::move(cov));
}

LabeledDataset LabeledDataset::with_domain_tag(std::string tag) const {
  LabeledDataset copy = *this;
  copy.domain_tag_ = std::move(tag);
  return copy;
}

LabeledDataset LabeledDataset::with_features(Matrix features) const {
  if (features.rows() != features_.rows()) {
    throw Error(ErrorKind::kDimensionMismatch, "replacement features change the row count");
  }
  return LabeledDataset(std::move(features), labels_, domain_tag_, covariates_);
}

ClassIndex class_index(const LabeledDataset& ds) {
  ClassIndex index;
  const auto& y = ds.require_labels();
  for (std::size_t i = 0; i < y.size(); ++i) index[y[i]].push_back(i);
  return index;
}

RowIndices rows_of_class(const LabeledDataset& ds, ClassId cls) {
  RowIndices rows;
  const auto& y = ds.require_labels();
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] == cls) rows.push_back(i);
  }
  return rows;
}

LabeledDataset downsample_class(const LabeledDataset& ds, ClassId cls, std::size_t keep,
                                Seed seed) {
  const RowIndices members = rows_of_class(ds, cls);
  if (members.empty()) {
    throw Error(ErrorKind::kNotFound, "class " + std::to_string(cls) + " not present");
  }
  if (keep > members.size()) {
    throw Error(ErrorKind::kInvalidArgument,
                "cannot keep " + std::to_string(keep) + " rows of class " + std::to_string(cls) +
                    " which has " + std::to_string(members.size()));
  }
  const RowIndices chosen = sample_without_replacement(members.size(), keep, seed);
  std::vector<bool> retain(ds.n(), true);
  for (std::size_t m : members) retain[m] = false;
  for (std::size_t c : chosen) retain[members[c]] = true;

  RowIndices rows;
  for (std::size_t i = 0; i < ds.n(); ++i) {
    if (retain[i]) rows.push_back(i);
  }
  if (rows.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "downsampling would leave an empty dataset");
  }
  return ds.select_rows(rows);
}

LabeledDataset remove_class(const LabeledDataset& ds, ClassId cls) {
  const auto& y = ds.require_labels();
  RowIndices rows;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] != cls) rows.push_back(i);
  }
  if (rows.size() == ds.n()) {
    throw Error(ErrorKind::kNotFound, "class " + std::to_string(cls) + " has no rows to remove");
  }
  if (rows.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "removing class " + std::to_string(cls) +
                                                 " would leave an empty dataset");
  }
  return ds.select_rows(rows);
}

bool CovariatePredicate::operator()(double value) const noexcept {
  switch (op) {
    case Comparison::kLess: return value < threshold;
    case Comparison::kLessEqual: return value <= threshold;
    case Comparison::kGreater: return value > threshold;
    case Comparison::kGreaterEqual: return value >= threshold;
  }
  return false;
}

CovariatePredicate CovariatePredicate::parse(std::string_view text) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  CovariatePredicate p;
  if (text.starts_with("<=")) {
    p.op = Comparison::kLessEqual;
    text.remove_prefix(2);
  } else if (text.starts_with(">=")) {
    p.op = Comparison::kGreaterEqual;
    text.remove_prefix(2);
  } else if (text.starts_with("<")) {
    p.op = Comparison::kLess;
    text.remove_prefix(1);
  } else if (text.starts_with(">")) {
    p.op = Comparison::kGreater;
    text.remove_prefix(1);
  } else {
    throw Error(ErrorKind::kParse, "predicate must start with <, <=, > or >=: '" +
                                       std::string(text) + "'");
  }
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, p.threshold);
  if (ec != std::errc{} || ptr != end) {
    throw Error(ErrorKind::kParse, "bad predicate threshold '" + std::string(text) + "'");
  }
  return p;
}

RowIndices covariate_rows(const LabeledDataset& ds, const std::string& covariate, CovariatePredicate predicate,
                          std::size_t max_n, Seed seed) {
  const auto& column = ds.covariate(covariate);
  RowIndices matches;
  for (std::size_t i = 0; i < column.size(); ++i) {
    if (predicate(column[i])) matches.push_back(i);
  }
  if (matches.empty()) {
    throw Error(ErrorKind::kNotFound, "no rows satisfy the predicate on '" + covariate + "'");
  }
  if (max_n == 0) throw Error(ErrorKind::kInvalidArgument, "max_n = 0 selects no rows");
  if (matches.size() > max_n) {
    const RowIndices chosen = sample_without_replacement(matches.size(), max_n, seed);
    RowIndices subset;
    subset.reserve(chosen.size());
    for (std::size_t c : chosen) subset.push_back(matches[c]);
    matches = std::move(subset);
  }
  return matches;
}

LabeledDataset select_by_covariate(const LabeledDataset& ds, const std::string& covariate,
                                   CovariatePredicate predicate, std::size_t max_n, Seed seed) {
  return ds.select_rows(covariate_rows(ds, covariate, predicate, max_n, seed));
}

LabeledDataset row_range(const LabeledDataset& ds, std::size_t begin, std::size_t end) {
  if (begin >= end || end > ds.n()) {
    throw Error(ErrorKind::kInvalidArgument,
                "row range [" + std::to_string(begin) + ", " + std::to_string(end) +
                    ") invalid for " + std::to_string(ds.n()) + " rows");
  }
  RowIndices rows(end - begin);
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = begin + i;
  return ds.select_rows(rows);
}

LabeledDataset concat(const LabeledDataset& a, const LabeledDataset& b, std::string domain_tag) {
  if (a.d() != b.d()) {
    throw Error(ErrorKind::kDimensionMismatch, "cannot stack datasets with different d");
  }
  Matrix x(static_cast<Eigen::Index>(a.n() + b.n()), static_cast<Eigen::Index>(a.d()));
  x << a.features(), b.features();
  std::optional<std::vector<ClassId>> y;
  if (a.has_labels() && b.has_labels()) {
    y = *a.labels();
    y->insert(y->end(), b.labels()->begin(), b.labels()->end());
  }
  Covariates cov;
  for (const auto& [name, column] : a.covariates()) {
    auto it = b.covariates().find(name);
    if (it == b.covariates().end()) continue;
    auto merged = column;
    merged.insert(merged.end(), it->second.begin(), it->second.end());
    cov.emplace(name, std::move(merged));
  }
  return LabeledDataset(std::move(x), std::move(y), std::move(domain_tag), std::move(cov));
}

}  // namespace sadapt
