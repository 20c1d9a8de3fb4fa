#pragma once

#include <charconv>
#include <cmath>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace evanspot::io {

/// Shortest representation that reads back to the same double. Locale independent,
/// which is what makes repeated runs byte-identical.
inline std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

/// RFC 4180 quoting for text cells; preset tags such as "power-exp:alpha=3,m=2" contain commas.
inline std::string quote(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + '"';
}

using Metadata = std::vector<std::pair<std::string, std::string>>;

inline void write_metadata(std::ostream& os, const Metadata& meta) {
  for (const auto& [k, v] : meta) os << '#' << ' ' << k << '=' << v << '\n';
}

inline void write_header(std::ostream& os, const std::vector<std::string_view>& cols) {
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << '\n';
}

inline void write_row(std::ostream& os, const std::vector<double>& vals) {
  for (std::size_t i = 0; i < vals.size(); ++i) os << (i ? "," : "") << fmt(vals[i]);
  os << '\n';
}

}  // namespace evanspot::io
