#pragma once

#include "sadapt/alignment.hpp"
#include "sadapt/config.hpp"
#include "sadapt/dataset.hpp"
#include "sadapt/metrics.hpp"
#include "sadapt/simulator.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace sadapt {

enum class DaMethod { kNone, kTca, kBda, kGfk };

[[nodiscard]] std::string_view to_string(DaMethod method) noexcept;
/// Accepts "none", "tca", "bda", "gfk".
[[nodiscard]] DaMethod parse_da_method(std::string_view name);

/// One cell of a method sweep: statistic alignment, then optionally a
/// kernel DA method, then k-NN.
struct MethodSpec {
  SaMethod sa = SaMethod::kNStandardise;
  DaMethod da = DaMethod::kNone;

  /// "nca" or "nca+tca".
  [[nodiscard]] std::string label() const;
  /// Inverse of label().
  [[nodiscard]] static MethodSpec parse(std::string_view label);

  friend bool operator==(const MethodSpec&, const MethodSpec&) = default;
};

struct Hyperparameters {
  double lambda = 0.1;
  double balance = 0.5;
  /// Kernel embedding dimension; 0 means d - 1.
  int dims = 0;
  int bda_iterations = 10;
  int gfk_k = 1;
  int knn_k = 1;
  double ncoral_shrinkage = kNcoralShrinkage;
};

enum class CaseKind { kCase1, kPartial, kPreproc };

[[nodiscard]] std::string_view to_string(CaseKind kind) noexcept;

/// Everything needed to reproduce one case study.
struct CaseConfig {
  CaseKind kind = CaseKind::kCase1;
  StructureSpec source_spec;
  StructureSpec target_spec;
  std::map<ClassId, std::size_t> source_counts;
  std::map<ClassId, std::size_t> target_counts;
  std::map<ClassId, std::size_t> test_counts;
  /// Applied to both target training and test sets (partial DA).
  std::vector<ClassId> remove_target_classes;
  /// (class, keep): downsampling of target training and test sets.
  std::optional<std::pair<ClassId, std::size_t>> downsample_target;
  std::vector<MethodSpec> methods;
  Seed seed = 2022;
  int repeats = 10;
  Hyperparameters hyper;
  /// Export scatter/KDE data for the first repeat.
  bool plot_data = true;
  double plot_fraction = 0.2;

  [[nodiscard]] static CaseConfig case1();
  [[nodiscard]] static CaseConfig partial();
  [[nodiscard]] static CaseConfig preproc();
  [[nodiscard]] static CaseConfig defaults(CaseKind kind);

  /// Defaults for `kind`, overridden by the keys present in `config`
  /// (source_spec/target_spec paths are resolved against its directory).
  [[nodiscard]] static CaseConfig from_config(CaseKind kind, const KeyValueConfig& config);

  void validate() const;
  [[nodiscard]] std::string to_json() const;
};

/// Result of one method on one repeat.
struct MethodRow {
  MethodSpec method;
  int repeat = 0;
  Seed seed = 0;
  /// Absent when the method failed.
  std::optional<double> macro_f1;
  std::optional<ConfusionMatrix> confusion;
  double wall_seconds = 0.0;
  /// Fitted quantities worth auditing (length scale, BDA iterations, ...).
  std::map<std::string, double> fitted;
  std::optional<std::string> error;
};

struct MethodSummary {
  std::string method;
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  int succeeded = 0;
  int failed = 0;
};

/// Aligned datasets of the first repeat kept for plotting, keyed by
/// method label ("raw" for the unaligned features).
struct PlotSet {
  std::string label;
  LabeledDataset source;
  LabeledDataset target;
};

struct BenchReport {
  std::string case_id;
  std::string config_json;
  std::map<std::string, std::string> metadata;
  std::vector<MethodRow> rows;
  /// Case-specific extras serialised as JSON (bridge cross-tabulation).
  std::string extras_json = "{}";
  std::vector<PlotSet> plots;

  [[nodiscard]] std::vector<MethodSummary> summary() const;
  /// Macro-F1 of `method` on `repeat`; nullopt if missing or failed.
  [[nodiscard]] std::optional<double> score(const std::string& method, int repeat) const;
  [[nodiscard]] std::string to_json() const;
  [[nodiscard]] std::string rows_csv() const;
  [[nodiscard]] std::string summary_csv() const;
};

/// Runs every (method, repeat) cell. A failing cell is reported with its
/// error; other cells are unaffected.
[[nodiscard]] BenchReport run_case(const CaseConfig& config);
[[nodiscard]] BenchReport run_case1(const CaseConfig& config = CaseConfig::case1());
[[nodiscard]] BenchReport run_case_partial(const CaseConfig& config = CaseConfig::partial());
[[nodiscard]] BenchReport run_case_preproc(const CaseConfig& config = CaseConfig::preproc());

/// Evaluates one cell on prepared data; exposed for tests.
[[nodiscard]] MethodRow evaluate_method(const MethodSpec& method, const Hyperparameters& hyper,
                                        const LabeledDataset& source, const LabeledDataset& target,
                                        const LabeledDataset& test);

/// Writes report.json, rows.csv, summary.csv and (when present) plot data
/// under `out_dir`. Returns the files written.
std::vector<std::filesystem::path> write_report(const BenchReport& report, const std::filesystem::path& out_dir);

}  // namespace sadapt
