#include "sadapt/config.hpp"

#include "sadapt/dataset_io.hpp"
#include "sadapt/error.hpp"

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

}  // namespace

double parse_double(std::string_view text, std::string_view what) {
  const std::string t = trim(text);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size()) {
    throw Error(ErrorKind::kParse, std::string(what) + ": expected a real, got '" + t + "'");
  }
  return v;
}

long long parse_int(std::string_view text, std::string_view what) {
  const std::string t = trim(text);
  long long v = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size()) {
    throw Error(ErrorKind::kParse, std::string(what) + ": expected an integer, got '" + t + "'");
  }
  return v;
}

KeyValueConfig KeyValueConfig::parse(std::string_view text, std::string origin) {
  KeyValueConfig cfg;
  cfg.origin_ = std::move(origin);
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorKind::kParse,
                  cfg.origin_ + ":" + std::to_string(lineno) + ": expected 'key = value'");
    }
    std::string key = trim(std::string_view(t).substr(0, eq));
    std::string value = trim(std::string_view(t).substr(eq + 1));
    if (key.empty()) {
      throw Error(ErrorKind::kParse, cfg.origin_ + ":" + std::to_string(lineno) + ": empty key");
    }
    cfg.values_[std::move(key)] = std::move(value);
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open config '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  auto cfg = parse(buf.str(), path.string());
  cfg.base_dir_ = path.parent_path();
  return cfg;
}

const std::string& KeyValueConfig::get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) {
    throw Error(ErrorKind::kNotFound, origin_ + ": missing key '" + key + "'");
  }
  return it->second;
}

std::optional<std::string> KeyValueConfig::find(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

double KeyValueConfig::get_double(const std::string& key) const {
  return parse_double(get(key), origin_ + ": " + key);
}

long long KeyValueConfig::get_int(const std::string& key) const {
  return parse_int(get(key), origin_ + ": " + key);
}

std::uint64_t KeyValueConfig::get_u64(const std::string& key) const {
  const std::string& t = get(key);
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size()) {
    throw Error(ErrorKind::kParse, origin_ + ": " + key + ": expected an unsigned integer");
  }
  return v;
}

bool KeyValueConfig::get_bool(const std::string& key) const {
  const std::string& t = get(key);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw Error(ErrorKind::kParse, origin_ + ": " + key + ": expected a boolean, got '" + t + "'");
}

std::vector<double> KeyValueConfig::get_doubles(const std::string& key) const {
  std::vector<double> out;
  for (const auto& token : get_list(key)) out.push_back(parse_double(token, origin_ + ": " + key));
  return out;
}

std::vector<std::string> KeyValueConfig::get_list(const std::string& key) const {
  std::vector<std::string> out;
  for (auto& cell : split_csv_line(get(key))) {
    if (!cell.empty()) out.push_back(std::move(cell));
  }
  return out;
}

}  // namespace sadapt
