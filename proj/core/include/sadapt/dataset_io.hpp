#pragma once

#include "sadapt/dataset.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace sadapt {

/// Column mapping for a CSV file with a header row.
struct CsvSchema {
  std::vector<std::string> feature_columns;
  std::optional<std::string> label_column;
  std::vector<std::string> covariate_columns;
  /// Column holding the domain tag; the first row's value is used.
  std::optional<std::string> domain_column;
  /// Used when `domain_column` is absent.
  std::string domain_tag;

  /// Canonical layout written by save_dataset: f0..f{d-1}, optional
  /// "label", covariates, "domain". Inferred from a header row.
  [[nodiscard]] static CsvSchema canonical(const std::vector<std::string>& header);
};

/// Parses a CSV per `schema`. Errors name the offending row (1-based, data
/// rows after the header) and column.
[[nodiscard]] LabeledDataset load_dataset(const std::filesystem::path& path, const CsvSchema& schema);

/// Loads a CSV in the canonical layout.
[[nodiscard]] LabeledDataset load_dataset(const std::filesystem::path& path);

/// Writes the canonical layout with 17 significant digits, so a
/// save/load round trip reproduces features bit-exactly.
void save_dataset(const LabeledDataset& ds, const std::filesystem::path& path);

/// {"domain_tag", "n", "d", "classes", "covariates"}
[[nodiscard]] std::string manifest_json(const LabeledDataset& ds);
void write_manifest(const LabeledDataset& ds, const std::filesystem::path& path);

/// Formats a double with 17 significant digits.
[[nodiscard]] std::string format_double(double value);

/// Splits one CSV line on commas, trimming surrounding whitespace.
[[nodiscard]] std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace sadapt
