#pragma once

#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace evanspot::io {

/// Bad configuration input. key() names the offending entry (may be empty for syntax
/// errors that have no key).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& what)
      : std::runtime_error(key.empty() ? what : "config key '" + key + "': " + what),
        key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    auto piece = trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (!piece.empty()) out.push_back(std::move(piece));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline std::optional<double> parse_double(std::string_view s) {
  const auto t = trim(s);
  if (t.empty()) return std::nullopt;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size()) return std::nullopt;
  return v;
}

/// Flat key=value configuration. Later assignments win, so command-line overrides are
/// applied with set() after the file is read.
class RunConfig {
 public:
  static RunConfig from_text(std::string_view text) {
    RunConfig cfg;
    std::size_t lineno = 0;
    for (const auto& raw : split_lines(text)) {
      ++lineno;
      auto line = raw;
      if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      line = trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) {
        throw ConfigError("", "line " + std::to_string(lineno) + ": expected key=value");
      }
      auto key = trim(std::string_view(line).substr(0, eq));
      if (key.empty()) throw ConfigError("", "line " + std::to_string(lineno) + ": empty key");
      cfg.set(key, trim(std::string_view(line).substr(eq + 1)));
    }
    return cfg;
  }

  static RunConfig from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("", "cannot open config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    auto cfg = from_text(ss.str());
    const auto slash = path.find_last_of('/');
    cfg.base_dir_ = slash == std::string::npos ? "." : path.substr(0, slash);
    return cfg;
  }

  /// Directory of the config file, for resolving relative paths inside it.
  const std::string& base_dir() const noexcept { return base_dir_; }

  /// "key=value"
  void apply_override(std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("", "override '" + std::string(assignment) + "' is not key=value");
    }
    const auto key = trim(assignment.substr(0, eq));
    if (key.empty()) throw ConfigError("", "override with empty key");
    set(key, trim(assignment.substr(eq + 1)));
  }

  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  bool has(const std::string& key) const { return values_.count(key) > 0; }

  std::string get_string(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError(key, "missing");
    return it->second;
  }
  std::string get_string(const std::string& key, const std::string& fallback) const {
    return has(key) ? get_string(key) : fallback;
  }

  double get_double(const std::string& key) const {
    const auto s = get_string(key);
    auto v = parse_double(s);
    if (!v) throw ConfigError(key, "'" + s + "' is not a number");
    return *v;
  }
  double get_double(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
  }

  int get_int(const std::string& key, int fallback) const {
    if (!has(key)) return fallback;
    const double v = get_double(key);
    if (v != static_cast<double>(static_cast<int>(v))) throw ConfigError(key, "expected an integer");
    return static_cast<int>(v);
  }

  std::vector<double> get_doubles(const std::string& key) const {
    std::vector<double> out;
    for (const auto& piece : split(get_string(key), ',')) {
      auto v = parse_double(piece);
      if (!v) throw ConfigError(key, "'" + piece + "' is not a number");
      out.push_back(*v);
    }
    return out;
  }

  /// ';'-separated list.
  std::vector<std::string> get_list(const std::string& key) const { return split(get_string(key), ';'); }

  const std::map<std::string, std::string>& values() const noexcept { return values_; }

 private:
  static std::vector<std::string> split_lines(std::string_view text) {
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
      const auto nl = text.find('\n', start);
      lines.emplace_back(text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start));
      if (nl == std::string_view::npos) break;
      start = nl + 1;
    }
    return lines;
  }

  std::map<std::string, std::string> values_;
  std::string base_dir_;
};

}  // namespace evanspot::io
