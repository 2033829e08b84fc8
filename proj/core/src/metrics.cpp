#include "sadapt/metrics.hpp"

#include "sadapt/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <set>

namespace sadapt {
namespace {

void check_inputs(std::span<const ClassId> y_true, std::span<const ClassId> y_pred) {
  if (y_true.size() != y_pred.size()) {
    throw Error(ErrorKind::kDimensionMismatch, "y_true has " + std::to_string(y_true.size()) +
                                                   " entries, y_pred has " + std::to_string(y_pred.size()));
  }
  if (y_true.empty()) throw Error(ErrorKind::kInvalidArgument, "no labels to evaluate");
}

std::size_t index_of(const std::vector<ClassId>& classes, ClassId c) {
  return static_cast<std::size_t>(std::lower_bound(classes.begin(), classes.end(), c) - classes.begin());
}

}  // namespace

std::size_t ConfusionMatrix::total() const noexcept {
  std::size_t t = 0;
  for (const auto& row : counts) {
    for (std::size_t v : row) t += v;
  }
  return t;
}

std::size_t ConfusionMatrix::at(ClassId truth, ClassId predicted) const {
  const std::size_t r = index_of(classes, truth);
  const std::size_t c = index_of(classes, predicted);
  if (r >= classes.size() || classes[r] != truth || c >= classes.size() || classes[c] != predicted) return 0;
  return counts[r][c];
}

std::string ConfusionMatrix::to_json() const {
  nlohmann::ordered_json j;
  j["classes"] = classes;
  j["counts"] = counts;
  return j.dump();
}

ConfusionMatrix confusion(std::span<const ClassId> y_true, std::span<const ClassId> y_pred) {
  check_inputs(y_true, y_pred);
  std::set<ClassId> all(y_true.begin(), y_true.end());
  all.insert(y_pred.begin(), y_pred.end());
  ConfusionMatrix cm;
  cm.classes.assign(all.begin(), all.end());
  cm.counts.assign(cm.classes.size(), std::vector<std::size_t>(cm.classes.size(), 0));
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    ++cm.counts[index_of(cm.classes, y_true[i])][index_of(cm.classes, y_pred[i])];
  }
  return cm;
}

std::vector<std::pair<ClassId, double>> per_class_f1(std::span<const ClassId> y_true,
                                                     std::span<const ClassId> y_pred) {
  const ConfusionMatrix cm = confusion(y_true, y_pred);
  const std::set<ClassId> present(y_true.begin(), y_true.end());
  std::vector<std::pair<ClassId, double>> out;
  for (ClassId c : present) {
    const std::size_t k = index_of(cm.classes, c);
    const double tp = static_cast<double>(cm.counts[k][k]);
    double row = 0.0;
    double col = 0.0;
    for (std::size_t j = 0; j < cm.classes.size(); ++j) {
      row += static_cast<double>(cm.counts[k][j]);
      col += static_cast<double>(cm.counts[j][k]);
    }
    // 2TP / (2TP + FP + FN) equals 2PR/(P+R), and is 0 when TP = 0.
    const double denom = row + col;
    out.emplace_back(c, tp > 0.0 ? 2.0 * tp / denom : 0.0);
  }
  return out;
}

double macro_f1(std::span<const ClassId> y_true, std::span<const ClassId> y_pred) {
  const auto f1 = per_class_f1(y_true, y_pred);
  double s = 0.0;
  for (const auto& [c, v] : f1) s += v;
  return s / static_cast<double>(f1.size());
}

}  // namespace sadapt
