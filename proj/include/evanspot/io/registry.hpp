#pragma once

#include <fstream>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "evanspot/core/manifold.hpp"
#include "evanspot/core/phi.hpp"
#include "evanspot/core/potential.hpp"
#include "evanspot/io/config.hpp"

namespace evanspot::io {

/// "name:k=v,k=v" split into the name and its parameters.
struct Tag {
  std::string name;
  std::map<std::string, std::string> params;
};

inline Tag parse_tag(const std::string& text, const std::string& key) {
  Tag tag;
  const auto colon = text.find(':');
  tag.name = trim(text.substr(0, colon));
  if (tag.name.empty()) throw ConfigError(key, "empty preset name");
  if (colon == std::string::npos) return tag;
  for (const auto& kv : split(std::string_view(text).substr(colon + 1), ',')) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError(key, "parameter '" + kv + "' is not k=v");
    tag.params[trim(std::string_view(kv).substr(0, eq))] = trim(std::string_view(kv).substr(eq + 1));
  }
  return tag;
}

namespace detail {

inline void allow_only(const Tag& tag, const std::set<std::string>& allowed, const std::string& key) {
  for (const auto& [k, v] : tag.params) {
    if (!allowed.count(k)) throw ConfigError(key, "unknown parameter '" + k + "' for " + tag.name);
  }
}

inline double param(const Tag& tag, const std::string& name, const std::string& key) {
  auto it = tag.params.find(name);
  if (it == tag.params.end()) throw ConfigError(key, tag.name + " needs parameter '" + name + "'");
  auto v = parse_double(it->second);
  if (!v) throw ConfigError(key, "parameter '" + name + "' of " + tag.name + " is not a number");
  return *v;
}

inline double param(const Tag& tag, const std::string& name, double fallback, const std::string& key) {
  return tag.params.count(name) ? param(tag, name, key) : fallback;
}

}  // namespace detail

/// Two-column CSV (r, g) with a header row; '#' lines are skipped.
inline std::pair<std::vector<double>, std::vector<double>> read_warp_table(const std::string& path,
                                                                         const std::string& key) {
  std::ifstream in(path);
  if (!in) throw ConfigError(key, "cannot open table " + path);
  std::vector<double> r, g;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    const auto cols = split(line, ',');
    if (cols.size() != 2) throw ConfigError(key, "table row '" + line + "' needs two columns");
    auto a = parse_double(cols[0]), b = parse_double(cols[1]);
    if (!a || !b) throw ConfigError(key, "table row '" + line + "' is not numeric");
    r.push_back(*a);
    g.push_back(*b);
  }
  return {std::move(r), std::move(g)};
}

/// euclidean | hyperbolic | power-exp:alpha=A | tabulated:file=PATH[,monotone=1].
/// Each accepts m=M, overriding default_m.
/// A relative table path is resolved against base_dir when that is non-empty.
inline ModelManifold make_manifold(const std::string& text, int default_m, const std::string& key = "manifold",
                                   const std::string& base_dir = "") {
  const auto tag = parse_tag(text, key);
  const double md = detail::param(tag, "m", default_m, key);
  const int m = static_cast<int>(md);
  if (md != m) throw ConfigError(key, "m must be an integer");
  try {
    if (tag.name == "euclidean") {
      detail::allow_only(tag, {"m"}, key);
      return ModelManifold::euclidean(m);
    }
    if (tag.name == "hyperbolic") {
      detail::allow_only(tag, {"m"}, key);
      return ModelManifold::hyperbolic(m);
    }
    if (tag.name == "power-exp") {
      detail::allow_only(tag, {"m", "alpha"}, key);
      return ModelManifold::power_exp(m, detail::param(tag, "alpha", key));
    }
    if (tag.name == "tabulated") {
      detail::allow_only(tag, {"m", "file", "monotone"}, key);
      auto it = tag.params.find("file");
      if (it == tag.params.end()) throw ConfigError(key, "tabulated needs parameter 'file'");
      std::string path = it->second;
      if (!base_dir.empty() && !path.empty() && path.front() != '/') path = base_dir + "/" + path;
      auto [r, g] = read_warp_table(path, key);
      return ModelManifold::tabulated(m, std::move(r), std::move(g),
                                      detail::param(tag, "monotone", 0.0, key) != 0.0);
    }
  } catch (const PreconditionError& e) {
    throw ConfigError(key, e.what());
  }
  throw ConfigError(key, "unknown manifold preset '" + tag.name + "'");
}

/// p-laplacian:p=P | perturbed:p=P
inline PhiOperator make_operator(const std::string& text, const std::string& key = "operator") {
  const auto tag = parse_tag(text, key);
  detail::allow_only(tag, {"p"}, key);
  try {
    if (tag.name == "p-laplacian") return PhiOperator::p_laplacian(detail::param(tag, "p", key));
    if (tag.name == "perturbed") return PhiOperator::perturbed(detail::param(tag, "p", key));
  } catch (const PreconditionError& e) {
    throw ConfigError(key, e.what());
  }
  throw ConfigError(key, "unknown operator preset '" + tag.name + "'");
}

/// zero | linear-power:p=P,lambda=L | plateau:T=T,p=P | superlinear:q=Q
inline PotentialB make_potential(const std::string& text, const std::string& key = "potential") {
  const auto tag = parse_tag(text, key);
  try {
    if (tag.name == "zero") {
      detail::allow_only(tag, {}, key);
      return PotentialB::zero();
    }
    if (tag.name == "linear-power") {
      detail::allow_only(tag, {"p", "lambda"}, key);
      return PotentialB::linear_power(detail::param(tag, "p", key), detail::param(tag, "lambda", key));
    }
    if (tag.name == "plateau") {
      detail::allow_only(tag, {"T", "p"}, key);
      return PotentialB::plateau(detail::param(tag, "T", key), detail::param(tag, "p", key));
    }
    if (tag.name == "superlinear") {
      detail::allow_only(tag, {"q"}, key);
      return PotentialB::superlinear(detail::param(tag, "q", key));
    }
  } catch (const PreconditionError& e) {
    throw ConfigError(key, e.what());
  }
  throw ConfigError(key, "unknown potential preset '" + tag.name + "'");
}

}  // namespace evanspot::io
