#pragma once

#include "sadapt/types.hpp"

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sadapt {

/// Named per-row covariates (e.g. "temperature"), ordered by name.
using Covariates = std::map<std::string, std::vector<double>>;

/// Per-class row indices of a labeled dataset.
using ClassIndex = std::map<ClassId, RowIndices>;

/// Feature matrix with optional class labels, a domain tag and optional
/// covariate columns. Immutable once constructed: every operation below
/// returns a new dataset.
///
/// Invariants (checked by the constructor): n >= 1, d >= 1, finite
/// features, labels (if any) non-negative with length n, every covariate
/// column of length n.
class LabeledDataset {
 public:
  explicit LabeledDataset(Matrix features,
                          std::optional<std::vector<ClassId>> labels = std::nullopt,
                          std::string domain_tag = {}, Covariates covariates = {});

  [[nodiscard]] std::size_t n() const noexcept { return static_cast<std::size_t>(features_.rows()); }
  [[nodiscard]] std::size_t d() const noexcept { return static_cast<std::size_t>(features_.cols()); }

  [[nodiscard]] const Matrix& features() const noexcept { return features_; }
  [[nodiscard]] bool has_labels() const noexcept { return labels_.has_value(); }
  [[nodiscard]] const std::optional<std::vector<ClassId>>& labels() const noexcept { return labels_; }
  /// Throws if the dataset is unlabeled.
  [[nodiscard]] const std::vector<ClassId>& require_labels() const;
  [[nodiscard]] const std::string& domain_tag() const noexcept { return domain_tag_; }
  [[nodiscard]] const Covariates& covariates() const noexcept { return covariates_; }
  [[nodiscard]] const std::vector<double>& covariate(const std::string& name) const;

  /// Sorted distinct labels.
  [[nodiscard]] std::vector<ClassId> classes() const;

  /// Rows in the given order (indices may repeat).
  [[nodiscard]] LabeledDataset select_rows(std::span<const std::size_t> rows) const;
  [[nodiscard]] LabeledDataset with_domain_tag(std::string tag) const;
  [[nodiscard]] LabeledDataset with_features(Matrix features) const;

 private:
  Matrix features_;
  std::optional<std::vector<ClassId>> labels_;
  std::string domain_tag_;
  Covariates covariates_;
};

[[nodiscard]] ClassIndex class_index(const LabeledDataset& ds);
[[nodiscard]] RowIndices rows_of_class(const LabeledDataset& ds, ClassId cls);

/// Keeps exactly `keep` rows of `cls` (uniform without replacement, seeded);
/// all other rows are untouched and original row order is preserved.
[[nodiscard]] LabeledDataset downsample_class(const LabeledDataset& ds, ClassId cls,
                                              std::size_t keep, Seed seed);

/// Drops every row of `cls`. Fails if the class has no rows.
[[nodiscard]] LabeledDataset remove_class(const LabeledDataset& ds, ClassId cls);

enum class Comparison { kLess, kLessEqual, kGreater, kGreaterEqual };

struct CovariatePredicate {
  Comparison op = Comparison::kLess;
  double threshold = 0.0;

  [[nodiscard]] bool operator()(double value) const noexcept;
  /// Parses "<0", ">=-2.5", etc.
  [[nodiscard]] static CovariatePredicate parse(std::string_view text);
};

/// Indices of the rows whose covariate satisfies `predicate`, uniformly
/// subsampled to `max_n` when more match; ascending.
[[nodiscard]] RowIndices covariate_rows(const LabeledDataset& ds, const std::string& covariate,
                                        CovariatePredicate predicate, std::size_t max_n, Seed seed);

/// Rows whose covariate satisfies `predicate`, uniformly subsampled to
/// `max_n` when more match. Row order is preserved.
[[nodiscard]] LabeledDataset select_by_covariate(const LabeledDataset& ds,
                                                 const std::string& covariate,
                                                 CovariatePredicate predicate,
                                                 std::size_t max_n, Seed seed);

/// Rows [begin, end), e.g. the first 200 observations after an inspection.
[[nodiscard]] LabeledDataset row_range(const LabeledDataset& ds, std::size_t begin, std::size_t end);

/// Stacks `b` under `a`. Labels survive only if both are labeled; covariates
/// only those present in both.
[[nodiscard]] LabeledDataset concat(const LabeledDataset& a, const LabeledDataset& b,
                                    std::string domain_tag);

}  // namespace sadapt
