#include "sadapt/dataset_io.hpp"

#include "sadapt/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace sadapt {
namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::size_t column_of(const std::vector<std::string>& header, const std::string& name,
                      const std::filesystem::path& path) {
  auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) {
    throw Error(ErrorKind::kParse, path.string() + ": header has no column '" + name + "'");
  }
  return static_cast<std::size_t>(it - header.begin());
}

[[noreturn]] void cell_error(const std::filesystem::path& path, std::size_t row,
                             const std::string& column, const std::string& value,
                             const char* expected) {
  throw Error(ErrorKind::kParse, path.string() + ": row " + std::to_string(row) + ", column '" +
                                     column + "': expected " + expected + ", got '" + value + "'");
}

double parse_real(const std::string& cell, const std::filesystem::path& path, std::size_t row,
                  const std::string& column) {
  double v = 0.0;
  const char* end = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(cell.data(), end, v);
  if (cell.empty() || ec != std::errc{} || ptr != end) cell_error(path, row, column, cell, "a real");
  return v;
}

ClassId parse_label(const std::string& cell, const std::filesystem::path& path, std::size_t row,
                    const std::string& column) {
  ClassId v = 0;
  const char* end = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(cell.data(), end, v);
  if (cell.empty() || ec != std::errc{} || ptr != end || v < 0) {
    cell_error(path, row, column, cell, "a non-negative integer label");
  }
  return v;
}

}  // namespace

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(trim(std::string_view(line).substr(
        start, comma == std::string::npos ? std::string::npos : comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return cells;
}

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 17);
  return std::string(buf, ptr);
}

CsvSchema CsvSchema::canonical(const std::vector<std::string>& header) {
  CsvSchema schema;
  for (const auto& name : header) {
    const bool feature = name.size() > 1 && name[0] == 'f' &&
                         std::all_of(name.begin() + 1, name.end(), [](char c) { return c >= '0' && c <= '9'; });
    if (feature) {
      schema.feature_columns.push_back(name);
    } else if (name == "label") {
      schema.label_column = name;
    } else if (name == "domain") {
      schema.domain_column = name;
    } else {
      schema.covariate_columns.push_back(name);
    }
  }
  return schema;
}

LabeledDataset load_dataset(const std::filesystem::path& path, const CsvSchema& schema) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open '" + path.string() + "'");
  if (schema.feature_columns.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "schema declares no feature columns");
  }

  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::kParse, path.string() + ": empty file");
  const auto header = split_csv_line(line);

  std::vector<std::size_t> feature_cols;
  for (const auto& name : schema.feature_columns) feature_cols.push_back(column_of(header, name, path));
  std::optional<std::size_t> label_col;
  if (schema.label_column) label_col = column_of(header, *schema.label_column, path);
  std::vector<std::size_t> cov_cols;
  for (const auto& name : schema.covariate_columns) cov_cols.push_back(column_of(header, name, path));
  std::optional<std::size_t> domain_col;
  if (schema.domain_column) domain_col = column_of(header, *schema.domain_column, path);

  std::vector<double> values;
  std::vector<ClassId> labels;
  std::vector<std::vector<double>> cov(cov_cols.size());
  std::string domain = schema.domain_tag;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++row;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw Error(ErrorKind::kParse, path.string() + ": row " + std::to_string(row) + " has " +
                                         std::to_string(cells.size()) + " cells, header has " +
                                         std::to_string(header.size()));
    }
    for (std::size_t j = 0; j < feature_cols.size(); ++j) {
      values.push_back(parse_real(cells[feature_cols[j]], path, row, schema.feature_columns[j]));
    }
    if (label_col) labels.push_back(parse_label(cells[*label_col], path, row, *schema.label_column));
    for (std::size_t j = 0; j < cov_cols.size(); ++j) {
      cov[j].push_back(parse_real(cells[cov_cols[j]], path, row, schema.covariate_columns[j]));
    }
    if (domain_col && row == 1) domain = cells[*domain_col];
  }
  if (row == 0) throw Error(ErrorKind::kParse, path.string() + ": no data rows");

  const auto d = static_cast<Eigen::Index>(feature_cols.size());
  Matrix x = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      values.data(), static_cast<Eigen::Index>(row), d);
  Covariates covariates;
  for (std::size_t j = 0; j < cov_cols.size(); ++j) {
    covariates.emplace(schema.covariate_columns[j], std::move(cov[j]));
  }
  std::optional<std::vector<ClassId>> y;
  if (label_col) y = std::move(labels);
  return LabeledDataset(std::move(x), std::move(y), std::move(domain), std::move(covariates));
}

LabeledDataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::kParse, path.string() + ": empty file");
  return load_dataset(path, CsvSchema::canonical(split_csv_line(line)));
}

void save_dataset(const LabeledDataset& ds, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kIo, "cannot write '" + path.string() + "'");

  for (std::size_t j = 0; j < ds.d(); ++j) out << (j ? "," : "") << 'f' << j;
  if (ds.has_labels()) out << ",label";
  for (const auto& [name, _] : ds.covariates()) out << ',' << name;
  out << ",domain\n";

  const auto& x = ds.features();
  for (std::size_t i = 0; i < ds.n(); ++i) {
    for (std::size_t j = 0; j < ds.d(); ++j) {
      out << (j ? "," : "") << format_double(x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
    }
    if (ds.has_labels()) out << ',' << (*ds.labels())[i];
    for (const auto& [_, column] : ds.covariates()) out << ',' << format_double(column[i]);
    out << ',' << ds.domain_tag() << '\n';
  }
  if (!out) throw Error(ErrorKind::kIo, "write failed for '" + path.string() + "'");
}

std::string manifest_json(const LabeledDataset& ds) {
  nlohmann::ordered_json j;
  j["domain_tag"] = ds.domain_tag();
  j["n"] = ds.n();
  j["d"] = ds.d();
  if (ds.has_labels()) {
    nlohmann::ordered_json classes = nlohmann::ordered_json::object();
    for (const auto& [cls, rows] : class_index(ds)) classes[std::to_string(cls)] = rows.size();
    j["classes"] = classes;
  } else {
    j["classes"] = nullptr;
  }
  nlohmann::ordered_json cov = nlohmann::ordered_json::array();
  for (const auto& [name, _] : ds.covariates()) cov.push_back(name);
  j["covariates"] = cov;
  return j.dump(2);
}

void write_manifest(const LabeledDataset& ds, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kIo, "cannot write '" + path.string() + "'");
  out << manifest_json(ds) << '\n';
}

}  // namespace sadapt
