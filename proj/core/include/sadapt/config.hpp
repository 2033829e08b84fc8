#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sadapt {

/// `key = value` text configuration. Lines starting with '#' and blank
/// lines are ignored; keys are case-sensitive; later keys override.
class KeyValueConfig {
 public:
  KeyValueConfig() = default;

  [[nodiscard]] static KeyValueConfig parse(std::string_view text, std::string origin = "<string>");
  [[nodiscard]] static KeyValueConfig load(const std::filesystem::path& path);

  [[nodiscard]] bool has(const std::string& key) const { return values_.count(key) != 0; }
  [[nodiscard]] const std::string& get(const std::string& key) const;
  [[nodiscard]] std::optional<std::string> find(const std::string& key) const;

  [[nodiscard]] double get_double(const std::string& key) const;
  [[nodiscard]] long long get_int(const std::string& key) const;
  [[nodiscard]] std::uint64_t get_u64(const std::string& key) const;
  [[nodiscard]] bool get_bool(const std::string& key) const;
  /// Comma-separated reals.
  [[nodiscard]] std::vector<double> get_doubles(const std::string& key) const;
  /// Comma-separated tokens.
  [[nodiscard]] std::vector<std::string> get_list(const std::string& key) const;

  void set(const std::string& key, std::string value) { values_[key] = std::move(value); }
  [[nodiscard]] const std::map<std::string, std::string>& values() const { return values_; }
  /// Directory of the file the config came from (for relative paths).
  [[nodiscard]] const std::filesystem::path& base_dir() const { return base_dir_; }

 private:
  std::map<std::string, std::string> values_;
  std::string origin_;
  std::filesystem::path base_dir_;
};

[[nodiscard]] double parse_double(std::string_view text, std::string_view what);
[[nodiscard]] long long parse_int(std::string_view text, std::string_view what);

}  // namespace sadapt
