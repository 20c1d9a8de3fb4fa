#pragma once

#include <cmath>
#include <exception>
#include <ostream>
#include <string>
#include <vector>

#include "evanspot/criteria/classify.hpp"
#include "evanspot/io/config.hpp"
#include "evanspot/io/csv.hpp"
#include "evanspot/io/registry.hpp"
#include "evanspot/obstacle/khasminskii.hpp"
#include "evanspot/radial/evans.hpp"

// Subcommand bodies. Each takes the merged configuration, writes CSV to `out` and
// diagnostics to `err`, and returns the process exit status.
namespace evanspot::cli {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int error = 1;
inline constexpr int inconclusive = 2;
inline constexpr int blow_up = 3;
inline constexpr int h_limit_nonzero = 4;
}  // namespace exit_code

struct Logger {
  int level = 0;
  std::ostream* sink = nullptr;
  template <class... Args>
  void info(const Args&... args) const {
    if (level < 1 || !sink) return;
    ((*sink) << ... << args) << '\n';
  }
};

namespace detail {

inline Quadrature quadrature_from(const io::RunConfig& cfg) {
  Quadrature q;
  q.rel_tol = cfg.get_double("tol", q.rel_tol);
  if (!(q.rel_tol > 0.0)) throw io::ConfigError("tol", "must be positive");
  return q;
}

inline double positive(const io::RunConfig& cfg, const std::string& key, double fallback) {
  const double v = cfg.get_double(key, fallback);
  if (!(v > 0.0)) throw io::ConfigError(key, "must be positive");
  return v;
}

template <class Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const io::ConfigError& e) {
    err << "error: " << e.what() << '\n';
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
  }
  return exit_code::error;
}

}  // namespace detail

/// Keys: manifold (';' list), m, operator (';' list), potential (';' list, optional),
/// r0, rmax, tol. One row per (manifold, operator, potential, property).
inline int run_classify(const io::RunConfig& cfg, std::ostream& out, std::ostream& err,
                        const Logger& log = {}) {
  return detail::guarded(err, [&] {
    const int m = cfg.get_int("m", 2);
    const auto manifolds = cfg.get_list("manifold");
    const auto operators = cfg.get_list("operator");
    const auto potentials = cfg.has("potential") ? cfg.get_list("potential") : std::vector<std::string>{};
    if (manifolds.empty()) throw io::ConfigError("manifold", "empty list");
    if (operators.empty()) throw io::ConfigError("operator", "empty list");

    criteria::CriteriaConfig cc;
    cc.div.quad = detail::quadrature_from(cfg);
    cc.div.r_max = detail::positive(cfg, "rmax", cc.div.r_max);
    cc.r0 = detail::positive(cfg, "r0", cc.r0);

    // Parse everything first so that a bad tag fails before any output.
    std::vector<ModelManifold> Ms;
    for (const auto& s : manifolds) Ms.push_back(io::make_manifold(s, m, "manifold", cfg.base_dir()));
    std::vector<PhiOperator> ops;
    for (const auto& s : operators) ops.push_back(io::make_operator(s));
    std::vector<PotentialB> Bs;
    for (const auto& s : potentials) Bs.push_back(io::make_potential(s));

    std::string cs;
    for (double c : cc.c_values) cs += (cs.empty() ? "" : ",") + io::fmt(c);
    io::write_metadata(out, {{"command", "classify"}, {"c_values", cs}, {"rmax", io::fmt(cc.div.r_max)}});
    io::write_header(out, {"manifold", "p", "potential", "property", "verdict", "c", "partial_integral", "slope"});

    bool inconclusive = false;
    auto row = [&](const std::string& man, double p, const std::string& pot, const criteria::Classification& cl) {
      const auto& d = cl.per_c.back();
      out << io::quote(man) << ',' << io::fmt(p) << ',' << io::quote(pot) << ',' << criteria::to_string(cl.property) << ','
          << criteria::to_string(d.verdict) << ',' << io::fmt(cl.c_values.back()) << ','
          << io::fmt(d.partial_integral) << ',' << io::fmt(d.slope_estimate) << '\n';
      inconclusive = inconclusive || cl.property == criteria::Property::Inconclusive;
    };
    for (std::size_t i = 0; i < Ms.size(); ++i) {
      for (std::size_t j = 0; j < ops.size(); ++j) {
        log.info("classify ", manifolds[i], " m=", Ms[i].dimension(), " ", operators[j]);
        row(manifolds[i], ops[j].p(), "-", criteria::classify_parabolic(Ms[i], ops[j], cc));
        for (std::size_t k = 0; k < Bs.size(); ++k) {
          row(manifolds[i], ops[j].p(), potentials[k], criteria::classify_KL(Ms[i], ops[j], Bs[k], cc));
        }
      }
    }
    return inconclusive ? exit_code::inconclusive : exit_code::ok;
  });
}

/// Keys: manifold, m, operator, potential, R, R1, eps, rmax, nodes_per_window, tol.
inline int run_evans(const io::RunConfig& cfg, std::ostream& out, std::ostream& err,
                     const Logger& log = {}) {
  return detail::guarded(err, [&] {
    const auto M = io::make_manifold(cfg.get_string("manifold", "euclidean"), cfg.get_int("m", 2),
                                     "manifold", cfg.base_dir());
    const auto op = io::make_operator(cfg.get_string("operator", "p-laplacian:p=2"));
    const auto B = io::make_potential(cfg.get_string("potential", "zero"));
    const double R = detail::positive(cfg, "R", 1.0);
    const double R1 = detail::positive(cfg, "R1", 2.0);
    const double eps = cfg.get_double("eps", 0.1);
    if (!(eps > 0.0)) throw io::ConfigError("eps", "must be positive");
    if (!(R1 > R)) throw io::ConfigError("R1", "must exceed R");
    radial::EvansConfig ec;
    ec.R_max = detail::positive(cfg, "rmax", ec.R_max);
    if (!(ec.R_max > R1)) throw io::ConfigError("rmax", "must exceed R1");
    ec.cauchy.nodes_per_window = cfg.get_int("nodes_per_window", ec.cauchy.nodes_per_window);
    ec.cauchy.picard_tol = detail::positive(cfg, "tol", ec.cauchy.picard_tol);
    log.info("evans triple R=", R, " R1=", R1, " eps=", eps);
    try {
      const auto res = radial::evans_for_triple(M, op, B, R, R1, eps, ec);
      log.info("accepted c=", res.c_final, " after ", res.attempts, " attempts");
      res.write_csv(out);
      return exit_code::ok;
    } catch (const radial::EvansFailure& f) {
      if (f.kind() != radial::EvansFailure::Kind::BlowUp) throw;
      io::write_metadata(out, {{"status", "BlowUp"}, {"rho", io::fmt(f.rho())}, {"c", io::fmt(f.c())}});
      io::write_header(out, {"r", "w"});
      err << "blow-up: " << f.what() << '\n';
      return exit_code::blow_up;
    }
  });
}

/// Keys: manifold, m, p, lambda, K_radius, Omega_radius, eps, radii, tol, nodes_per_unit_log.
inline int run_khasminskii(const io::RunConfig& cfg, std::ostream& out, std::ostream& err,
                           const Logger& log = {}) {
  return detail::guarded(err, [&] {
    const auto M = io::make_manifold(cfg.get_string("manifold", "euclidean"), cfg.get_int("m", 2),
                                     "manifold", cfg.base_dir());
    const double p = cfg.get_double("p", 2.0);
    const double lambda = cfg.get_double("lambda", 0.0);
    obstacle::KhasminskiiConfig kc;
    kc.K_radius = detail::positive(cfg, "K_radius", kc.K_radius);
    kc.Omega_radius = detail::positive(cfg, "Omega_radius", kc.Omega_radius);
    if (!(kc.K_radius < kc.Omega_radius)) throw io::ConfigError("Omega_radius", "must exceed K_radius");
    kc.eps = detail::positive(cfg, "eps", kc.eps);
    kc.radii = cfg.get_doubles("radii");
    kc.tol = detail::positive(cfg, "tol", kc.tol);
    kc.nodes_per_unit_log = detail::positive(cfg, "nodes_per_unit_log", kc.nodes_per_unit_log);
    log.info("khasminskii m=", M.dimension(), " p=", p, " lambda=", lambda);
    const auto rep = obstacle::khasminskii_construct(M, p, lambda, kc);
    rep.write_csv(out);
    return rep.verdict == obstacle::KhasVerdict::PotentialBuilt ? exit_code::ok : exit_code::h_limit_nonzero;
  });
}

/// Keys: manifold, m, p, lambda, a, b, nodes, spacing (uniform|log), theta_left,
/// theta_right, obstacle (none | cap:peak=,curv= | const:value=), tol.
inline int run_obstacle(const io::RunConfig& cfg, std::ostream& out, std::ostream& err,
                        const Logger& log = {}) {
  return detail::guarded(err, [&] {
    const auto M = io::make_manifold(cfg.get_string("manifold", "euclidean"), cfg.get_int("m", 2),
                                     "manifold", cfg.base_dir());
    const double p = cfg.get_double("p", 2.0);
    const double lambda = cfg.get_double("lambda", 0.0);
    const double a = detail::positive(cfg, "a", 1.0);
    const double b = detail::positive(cfg, "b", 2.0);
    if (!(b > a)) throw io::ConfigError("b", "must exceed a");
    const int nodes = cfg.get_int("nodes", 41);
    const auto spacing = cfg.get_string("spacing", "uniform");
    if (spacing != "uniform" && spacing != "log") throw io::ConfigError("spacing", "expected uniform or log");
    const auto prob = spacing == "log" ? obstacle::DiscreteProblem::log_spaced(M, a, b, nodes, p, lambda)
                                       : obstacle::DiscreteProblem::uniform(M, a, b, nodes, p, lambda);
    obstacle::ObstacleSpec spec;
    spec.theta_left = cfg.get_double("theta_left", 0.0);
    spec.theta_right = cfg.get_double("theta_right", 0.0);
    const auto tag = io::parse_tag(cfg.get_string("obstacle", "none"), "obstacle");
    if (tag.name == "cap") {
      const double peak = io::detail::param(tag, "peak", "obstacle");
      const double curv = io::detail::param(tag, "curv", "obstacle");
      const double mid = 0.5 * (a + b);
      for (double r : prob.grid()) spec.psi.push_back(peak - curv * (r - mid) * (r - mid));
      spec.psi.front() = std::min(spec.psi.front(), spec.theta_left);
      spec.psi.back() = std::min(spec.psi.back(), spec.theta_right);
    } else if (tag.name == "const") {
      spec.psi.assign(prob.size() - 2, io::detail::param(tag, "value", "obstacle"));
    } else if (tag.name != "none") {
      throw io::ConfigError("obstacle", "unknown obstacle '" + tag.name + "'");
    }
    obstacle::ObstacleOptions opt;
    opt.tol = detail::positive(cfg, "tol", opt.tol);
    const auto u = obstacle::solve_obstacle(prob, spec, opt);
    const auto res = obstacle::residual_complementarity(prob, u.values, spec, opt.contact_tol);
    log.info("obstacle solve: ", u.sweeps, " sweeps");
    io::write_metadata(out, {{"command", "obstacle"},
                             {"sweeps", std::to_string(u.sweeps)},
                             {"stationarity", io::fmt(res.stationarity)},
                             {"violation", io::fmt(res.violation)},
                             {"energy", io::fmt(prob.energy(u.values))}});
    io::write_header(out, {"r", "u", "psi"});
    const auto psi = obstacle::detail::expand_psi(prob, spec);
    for (std::size_t i = 0; i < prob.size(); ++i) io::write_row(out, {prob.grid()[i], u[i], psi[i]});
    return exit_code::ok;
  });
}

}  // namespace evanspot::cli
