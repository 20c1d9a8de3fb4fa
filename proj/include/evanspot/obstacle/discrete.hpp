#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "evanspot/core/errors.hpp"
#include "evanspot/core/geometry.hpp"
#include "evanspot/core/manifold.hpp"

namespace evanspot::obstacle {

inline double phi_p(double t, double p) {
  return t == 0.0 ? 0.0 : std::copysign(std::pow(std::abs(t), p - 1.0), t);
}

/// Radial grid r_0 < ... < r_N with the weighted energy
///   J(u) = sum_edges W_e |du/dr|^p / p * h_e + lambda * sum_nodes a_i |u_i|^p / p,
/// W_e = g(edge midpoint)^{m-1}, a_i = g(r_i)^{m-1} times the node's control volume.
/// Its Euler-Lagrange operator at an interior node is
///   (L_h u)_i = [W_{i+1/2} phi_p(D+u) - W_{i-1/2} phi_p(D-u)] / a_i - lambda phi_p(u_i).
class DiscreteProblem {
 public:
  DiscreteProblem(const ModelManifold& M, std::vector<double> grid, double p, double lambda)
      : r_(std::move(grid)), p_(p), lambda_(lambda) {
    if (!(p >= 1.1 && p <= 10.0)) throw PreconditionError("discrete problem needs p in [1.1, 10]");
    if (!(lambda >= 0.0)) throw PreconditionError("discrete problem needs lambda >= 0");
    if (r_.size() < 3) throw PreconditionError("discrete problem needs at least 3 nodes");
    for (std::size_t i = 1; i < r_.size(); ++i) {
      if (!(r_[i] > r_[i - 1])) throw PreconditionError("grid must be strictly increasing");
    }
    if (!(r_.front() > 0.0)) throw PreconditionError("grid must lie in r > 0");
    const int k = M.dimension() - 1;
    node_w_.resize(r_.size());
    edge_w_.resize(r_.size() - 1);
    for (std::size_t i = 0; i < r_.size(); ++i) node_w_[i] = std::pow(M.g(r_[i]), k);
    for (std::size_t i = 0; i + 1 < r_.size(); ++i) {
      edge_w_[i] = std::pow(M.g(0.5 * (r_[i] + r_[i + 1])), k);
    }
    for (double w : node_w_) {
      if (!(w > 0.0) || !std::isfinite(w)) throw PreconditionError("grid weights must be finite and positive");
    }
    for (double w : edge_w_) {
      if (!(w > 0.0) || !std::isfinite(w)) throw PreconditionError("grid weights must be finite and positive");
    }
  }

  static DiscreteProblem uniform(const ModelManifold& M, double a, double b, int nodes, double p,
                                 double lambda) {
    if (nodes < 3 || !(b > a)) throw PreconditionError("uniform grid needs a < b and >= 3 nodes");
    std::vector<double> g(nodes);
    for (int i = 0; i < nodes; ++i) g[i] = a + (b - a) * i / (nodes - 1);
    g.back() = b;
    return DiscreteProblem(M, std::move(g), p, lambda);
  }

  static DiscreteProblem log_spaced(const ModelManifold& M, double a, double b, int nodes,
                                    double p, double lambda) {
    if (nodes < 3 || !(b > a) || !(a > 0.0)) {
      throw PreconditionError("log grid needs 0 < a < b and >= 3 nodes");
    }
    std::vector<double> g(nodes);
    const double la = std::log(a), lb = std::log(b);
    for (int i = 0; i < nodes; ++i) g[i] = std::exp(la + (lb - la) * i / (nodes - 1));
    g.front() = a;
    g.back() = b;
    return DiscreteProblem(M, std::move(g), p, lambda);
  }

  /// Restriction to nodes first..last (inclusive).
  DiscreteProblem slice(std::size_t first, std::size_t last) const {
    if (!(first < last) || last >= r_.size() || last - first < 2) {
      throw PreconditionError("slice needs at least 3 nodes inside the grid");
    }
    DiscreteProblem out(*this);
    out.r_.assign(r_.begin() + first, r_.begin() + last + 1);
    out.node_w_.assign(node_w_.begin() + first, node_w_.begin() + last + 1);
    out.edge_w_.assign(edge_w_.begin() + first, edge_w_.begin() + last);
    return out;
  }

  DiscreteProblem prefix(std::size_t last) const { return slice(0, last); }

  std::size_t size() const noexcept { return r_.size(); }
  const std::vector<double>& grid() const noexcept { return r_; }
  double p() const noexcept { return p_; }
  double lambda() const noexcept { return lambda_; }
  double edge_weight(std::size_t e) const { return edge_w_[e]; }
  double node_weight(std::size_t i) const { return node_w_[i]; }
  double h(std::size_t e) const { return r_[e + 1] - r_[e]; }

  /// g(r_i)^{m-1} times the node's control volume (half cells at the ends).
  double mass(std::size_t i) const {
    double cell = 0.0;
    if (i > 0) cell += 0.5 * h(i - 1);
    if (i + 1 < r_.size()) cell += 0.5 * h(i);
    return node_w_[i] * cell;
  }

  double energy(const std::vector<double>& u) const {
    check_size(u);
    double J = 0.0;
    for (std::size_t e = 0; e + 1 < r_.size(); ++e) {
      const double d = (u[e + 1] - u[e]) / h(e);
      J += edge_w_[e] * std::pow(std::abs(d), p_) / p_ * h(e);
    }
    if (lambda_ > 0.0) {
      for (std::size_t i = 0; i < r_.size(); ++i) J += lambda_ * mass(i) * std::pow(std::abs(u[i]), p_) / p_;
    }
    return J;
  }

  /// (L_h u)_i at an interior node.
  double operator_at(const std::vector<double>& u, std::size_t i) const {
    if (i == 0 || i + 1 >= r_.size()) throw DomainError("operator_at needs an interior node");
    const double fp = edge_w_[i] * phi_p((u[i + 1] - u[i]) / h(i), p_);
    const double fm = edge_w_[i - 1] * phi_p((u[i] - u[i - 1]) / h(i - 1), p_);
    return (fp - fm) / mass(i) - lambda_ * phi_p(u[i], p_);
  }

  void check_size(const std::vector<double>& u) const {
    if (u.size() != r_.size()) throw PreconditionError("function length does not match the grid");
  }

 private:
  std::vector<double> r_;
  double p_;
  double lambda_;
  std::vector<double> node_w_;
  std::vector<double> edge_w_;
};

/// Node values of a discrete function together with solver statistics.
struct DiscreteFunction {
  std::vector<double> values;
  int sweeps = 0;

  std::size_t size() const noexcept { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
};

/// psi empty means no obstacle (-inf). Otherwise it covers every node, or only the
/// interior nodes (length N-2).
struct ObstacleSpec {
  std::vector<double> psi;
  double theta_left = 0.0;
  double theta_right = 0.0;
};

struct ObstacleOptions {
  double tol = 1e-10;           // max node update in a sweep
  double residual_tol = 1e-8;   // discrete KKT residual
  int max_sweeps = 100000;
  /// Over-relaxation factor; 0 picks 2/(1 + sin(pi/N)). Every relaxed step is kept
  /// only if it lowers the node energy, otherwise the plain minimizer is used.
  double omega = 0.0;
  std::optional<std::vector<double>> initial;
  double contact_tol = 1e-6;
};

struct ComplementarityResidual {
  double stationarity = 0.0;  // max |L_h u| off contact, max(L_h u, 0) on contact
  double violation = 0.0;     // max(psi - u, 0)
  double slackness = 0.0;     // min over nodes of (u - psi)(-L_h u)
};

namespace detail {

inline std::vector<double> expand_psi(const DiscreteProblem& prob, const ObstacleSpec& spec) {
  const std::size_t n = prob.size();
  constexpr double ninf = -std::numeric_limits<double>::infinity();
  if (spec.psi.empty()) return std::vector<double>(n, ninf);
  if (spec.psi.size() == n) return spec.psi;
  if (spec.psi.size() == n - 2) {
    std::vector<double> out(n, ninf);
    std::copy(spec.psi.begin(), spec.psi.end(), out.begin() + 1);
    return out;
  }
  throw PreconditionError("obstacle length must match the grid or its interior");
}

/// Exact discrete solution for lambda = 0: constant flux W phi_p(Du) along the grid.
inline std::vector<double> constant_flux_profile(const DiscreteProblem& prob, double left,
                                                 double right) {
  const std::size_t n = prob.size();
  const double e = 1.0 / (prob.p() - 1.0);
  std::vector<double> S(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) S[i + 1] = S[i] + prob.h(i) * std::pow(prob.edge_weight(i), -e);
  std::vector<double> u(n);
  for (std::size_t i = 0; i < n; ++i) u[i] = left + (right - left) * (S[i] / S[n - 1]);
  u.back() = right;
  return u;
}

struct NodeSolver {
  const DiscreteProblem& prob;

  double node_energy(const std::vector<double>& u, std::size_t i, double x) const {
    const double p = prob.p();
    const double dm = (x - u[i - 1]) / prob.h(i - 1), dp = (u[i + 1] - x) / prob.h(i);
    double e = prob.edge_weight(i - 1) * std::pow(std::abs(dm), p) / p * prob.h(i - 1) +
               prob.edge_weight(i) * std::pow(std::abs(dp), p) / p * prob.h(i);
    if (prob.lambda() > 0.0) e += prob.lambda() * prob.mass(i) * std::pow(std::abs(x), p) / p;
    return e;
  }

  /// Unconstrained minimizer of the node energy, neighbours frozen.
  double minimize(const std::vector<double>& u, std::size_t i) const {
    const double p = prob.p(), lam = prob.lambda();
    const double Wm = prob.edge_weight(i - 1), Wp = prob.edge_weight(i);
    const double hm = prob.h(i - 1), hp = prob.h(i);
    const double um = u[i - 1], up = u[i + 1];
    const double a = prob.mass(i);
    if (p == 2.0) return (Wm * um / hm + Wp * up / hp) / (Wm / hm + Wp / hp + lam * a);
    const double lo = std::min({um, up, 0.0}), hi = std::max({um, up, 0.0});
    if (lo == hi) return lo;
    auto F = [&](double x) {
      return Wm * phi_p((x - um) / hm, p) - Wp * phi_p((up - x) / hp, p) + lam * a * phi_p(x, p);
    };
    auto dF = [&](double x) {
      const double dm = std::abs(x - um) / hm, dp = std::abs(up - x) / hp;
      return (p - 1.0) * (Wm * std::pow(dm, p - 2.0) / hm + Wp * std::pow(dp, p - 2.0) / hp +
                          lam * a * std::pow(std::abs(x), p - 2.0));
    };
    if (F(lo) >= 0.0) return lo;
    if (F(hi) <= 0.0) return hi;
    return evanspot::detail::safeguarded_root(F, dF, 0.0, lo, hi, 300);
  }
};

}  // namespace detail

inline ComplementarityResidual residual_complementarity(const DiscreteProblem& prob,
                                                        const std::vector<double>& u,
                                                        const ObstacleSpec& spec,
                                                        double contact_tol = 1e-6) {
  prob.check_size(u);
  const auto psi = detail::expand_psi(prob, spec);
  ComplementarityResidual out;
  out.slackness = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (std::isfinite(psi[i])) out.violation = std::max(out.violation, psi[i] - u[i]);
  }
  for (std::size_t i = 1; i + 1 < u.size(); ++i) {
    const double L = prob.operator_at(u, i);
    const bool contact = std::isfinite(psi[i]) && u[i] <= psi[i] + contact_tol;
    out.stationarity = std::max(out.stationarity, contact ? std::max(L, 0.0) : std::abs(L));
    if (std::isfinite(psi[i])) out.slackness = std::min(out.slackness, (u[i] - psi[i]) * (-L));
  }
  if (std::isinf(out.slackness)) out.slackness = 0.0;
  return out;
}

/// Minimizes J over {u >= psi, u_0 = theta_left, u_N = theta_right} by projected
/// red-black coordinate minimization (over-relaxed, energy-safeguarded).
inline DiscreteFunction solve_obstacle(const DiscreteProblem& prob, const ObstacleSpec& spec,
                                       const ObstacleOptions& opt = {}) {
  const std::size_t n = prob.size();
  const auto psi = detail::expand_psi(prob, spec);
  if (!std::isfinite(spec.theta_left) || !std::isfinite(spec.theta_right)) {
    throw PreconditionError("boundary data must be finite");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (std::isnan(psi[i]) || psi[i] == std::numeric_limits<double>::infinity()) {
      throw ConstraintError("obstacle is +inf or NaN at node " + std::to_string(i));
    }
  }
  if (psi.front() > spec.theta_left || psi.back() > spec.theta_right) {
    throw ConstraintError("obstacle lies above the boundary data: the constraint set is empty");
  }
  if (!(opt.tol > 0.0) || !(opt.residual_tol > 0.0) || opt.max_sweeps < 1) {
    throw PreconditionError("invalid obstacle solver options");
  }

  std::vector<double> u;
  if (opt.initial) {
    u = *opt.initial;
    prob.check_size(u);
  } else {
    u = detail::constant_flux_profile(prob, spec.theta_left, spec.theta_right);
  }
  u.front() = spec.theta_left;
  u.back() = spec.theta_right;
  for (std::size_t i = 1; i + 1 < n; ++i) u[i] = std::max(u[i], psi[i]);

  const double pi = std::acos(-1.0);
  const double omega =
      opt.omega > 0.0 ? opt.omega : 2.0 / (1.0 + std::sin(pi / static_cast<double>(n)));
  detail::NodeSolver node{prob};

  double last_update = 0.0;
  for (int sweep = 1; sweep <= opt.max_sweeps; ++sweep) {
    double max_update = 0.0;
    for (std::size_t color = 1; color <= 2; ++color) {
      for (std::size_t i = color; i + 1 < n; i += 2) {
        const double old = u[i];
        const double gs = std::max(node.minimize(u, i), psi[i]);
        double x = gs;
        if (omega != 1.0) {
          const double relaxed = std::max(old + omega * (gs - old), psi[i]);
          if (node.node_energy(u, i, relaxed) <= node.node_energy(u, i, old)) x = relaxed;
        }
        u[i] = x;
        max_update = std::max(max_update, std::abs(x - old));
      }
    }
    last_update = max_update;
    if (max_update <= opt.tol) {
      const auto res = residual_complementarity(prob, u, spec, opt.contact_tol);
      if (res.stationarity <= opt.residual_tol) return {u, sweep};
    }
  }
  const auto res = residual_complementarity(prob, u, spec, opt.contact_tol);
  throw NumericError("obstacle solver hit max_sweeps (KKT residual " + std::to_string(res.stationarity) +
                         ", last update " + std::to_string(last_update) + ")",
                     res.stationarity);
}

inline DiscreteFunction solve_dirichlet(const DiscreteProblem& prob, double theta_left,
                                        double theta_right, const ObstacleOptions& opt = {}) {
  return solve_obstacle(prob, ObstacleSpec{{}, theta_left, theta_right}, opt);
}

struct SupersolutionReport {
  bool ok = true;
  std::size_t worst_node = 0;
  double worst_value = -std::numeric_limits<double>::infinity();  // max of L_h u

  explicit operator bool() const noexcept { return ok; }
};

/// Discrete supersolution test: (L_h u)_i <= tol at every interior node.
inline SupersolutionReport is_supersolution(const DiscreteProblem& prob,
                                            const std::vector<double>& u, double tol = 1e-8) {
  prob.check_size(u);
  SupersolutionReport rep;
  for (std::size_t i = 1; i + 1 < u.size(); ++i) {
    const double L = prob.operator_at(u, i);
    if (L > rep.worst_value) {
      rep.worst_value = L;
      rep.worst_node = i;
    }
  }
  rep.ok = rep.worst_value <= tol;
  return rep;
}

/// Subsolution counterpart: (L_h s)_i >= -tol everywhere.
inline SupersolutionReport is_subsolution(const DiscreteProblem& prob,
                                          const std::vector<double>& s, double tol = 1e-8) {
  prob.check_size(s);
  SupersolutionReport rep;
  rep.worst_value = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    const double L = prob.operator_at(s, i);
    if (L < rep.worst_value) {
      rep.worst_value = L;
      rep.worst_node = i;
    }
  }
  rep.ok = rep.worst_value >= -tol;
  return rep;
}

/// w >= s - tol at every node, for a supersolution w and a subsolution s ordered on the
/// boundary.
inline bool comparison_check(const DiscreteProblem& prob, const std::vector<double>& w,
                             const std::vector<double>& s, double tol = 1e-8) {
  prob.check_size(w);
  prob.check_size(s);
  if (!is_supersolution(prob, w, tol)) throw PreconditionError("comparison_check: w is not a supersolution");
  if (!is_subsolution(prob, s, tol)) throw PreconditionError("comparison_check: s is not a subsolution");
  if (w.front() < s.front() - tol || w.back() < s.back() - tol) {
    throw PreconditionError("comparison_check: boundary data are not ordered");
  }
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] < s[i] - tol) return false;
  }
  return true;
}

/// min(w1, w2) on nodes first..last (where w2 lives, w2.size() == last-first+1), w1
/// elsewhere. w1 and w2 must agree at the junction nodes.
inline DiscreteFunction pasting_min(const DiscreteProblem& prob, const std::vector<double>& w1,
                                    const std::vector<double>& w2, std::size_t first,
                                    std::size_t last, double tol = 1e-8) {
  prob.check_size(w1);
  if (!(first <= last) || last >= w1.size() || w2.size() != last - first + 1) {
    throw PreconditionError("pasting_min: w2 does not fit the node range");
  }
  if (std::abs(w1[first] - w2.front()) > tol || std::abs(w1[last] - w2.back()) > tol) {
    throw PreconditionError("pasting_min: w1 and w2 disagree at the junction");
  }
  DiscreteFunction out{w1, 0};
  for (std::size_t i = first; i <= last; ++i) out.values[i] = std::min(w1[i], w2[i - first]);
  return out;
}

}  // namespace evanspot::obstacle
