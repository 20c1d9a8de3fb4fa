#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "evanspot/core/errors.hpp"
#include "evanspot/core/geometry.hpp"
#include "evanspot/io/csv.hpp"

namespace evanspot::radial {

/// z(R) = theta, z'(R) = mu for the scaled radial equation
///   (g^{m-1} phi(c z'))' = g^{m-1} B(c z).
struct CauchyParams {
  double R = 1.0;
  double theta = 0.0;
  double mu = 1.0;
  double c = 1.0;

  void validate() const {
    if (!(R > 0.0)) throw PreconditionError("Cauchy problem needs R > 0");
    if (!(theta >= 0.0)) throw PreconditionError("Cauchy problem needs theta >= 0");
    if (!(mu > 0.0)) throw PreconditionError("Cauchy problem needs mu > 0");
    if (!(c > 0.0 && c <= 1.0)) throw PreconditionError("Cauchy problem needs c in (0, 1]");
  }
};

enum class Status { Complete, BlowUp };

inline const char* to_string(Status s) { return s == Status::Complete ? "Complete" : "BlowUp"; }

struct RadialSolution {
  std::vector<double> r;
  std::vector<double> z;
  std::vector<double> zp;
  CauchyParams params;
  Status status = Status::Complete;
  /// Complete: the radius reached. BlowUp: midpoint of the last bracketing window.
  double rho = 0.0;

  /// Cubic Hermite interpolation from (z, zp); x must lie on the grid range.
  double value_at(double x) const {
    if (r.empty() || x < r.front() || x > r.back()) {
      throw DomainError("RadialSolution::value_at outside the solution grid");
    }
    auto it = std::upper_bound(r.begin(), r.end(), x);
    std::size_t i = it == r.end() ? r.size() - 2 : static_cast<std::size_t>(it - r.begin()) - 1;
    if (i + 1 >= r.size()) return z.back();
    const double h = r[i + 1] - r[i];
    const double t = (x - r[i]) / h;
    const double h00 = (1 + 2 * t) * (1 - t) * (1 - t), h10 = t * (1 - t) * (1 - t);
    const double h01 = t * t * (3 - 2 * t), h11 = t * t * (t - 1);
    return h00 * z[i] + h10 * h * zp[i] + h01 * z[i + 1] + h11 * h * zp[i + 1];
  }

  void write_csv(std::ostream& os) const {
    io::write_metadata(os, {{"status", to_string(status)},
                            {"rho", io::fmt(rho)},
                            {"R", io::fmt(params.R)},
                            {"theta", io::fmt(params.theta)},
                            {"mu", io::fmt(params.mu)},
                            {"c", io::fmt(params.c)}});
    io::write_header(os, {"r", "z", "zp"});
    for (std::size_t i = 0; i < r.size(); ++i) io::write_row(os, {r[i], z[i], zp[i]});
  }
};

struct CauchyConfig {
  int nodes_per_window = 64;
  /// 0 selects min(1, (R_max - R)/16).
  double initial_window = 0.0;
  double picard_tol = 1e-10;
  int max_iter = 200;
  double blowup_threshold = 1e100;
  /// Windows narrower than this times R count as a stall.
  double min_window_factor = 1e-8;
  /// Radii the window boundaries must land on exactly.
  std::vector<double> stops;
};

struct PicardResult {
  bool converged = false;
  int iterations = 0;
  double last_change = 0.0;
  std::vector<double> r, z, zp;
  /// phi(c z') at the right end, the first-integral value carried to the next window.
  double end_flux = 0.0;
};

namespace detail {

// Weights of int_{x_i}^{x_{i+1}} f for the Lagrange interpolant of f on a stencil of up
// to four nodes around the interval; 2-point Gauss integrates the cubic exactly.
struct IntervalRule {
  std::size_t first = 0;
  std::vector<double> w;
};

inline std::vector<IntervalRule> cubic_rules(const std::vector<double>& x) {
  const std::size_t n = x.size();
  const std::size_t width = std::min<std::size_t>(n, 4);
  std::vector<IntervalRule> rules(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    auto& rule = rules[i];
    rule.first = std::min(i > 0 ? i - 1 : 0, n - width);
    rule.w.assign(width, 0.0);
    const double h = x[i + 1] - x[i], mid = 0.5 * (x[i] + x[i + 1]);
    for (double t : {mid - h / (2.0 * std::sqrt(3.0)), mid + h / (2.0 * std::sqrt(3.0))}) {
      for (std::size_t j = 0; j < width; ++j) {
        double L = 1.0;
        for (std::size_t k = 0; k < width; ++k) {
          if (k != j) L *= (t - x[rule.first + k]) / (x[rule.first + j] - x[rule.first + k]);
        }
        rule.w[j] += 0.5 * h * L;
      }
    }
  }
  return rules;
}

// T_c on one window in the scaled form: A(s) = phi(c z'(s)) obeys
//   A(s_{i+1}) = A(s_i) q_i + int_{s_i}^{s_{i+1}} (g(t)/g(s_{i+1}))^{m-1} B(c u(t)) dt,
// q_i = (g(s_i)/g(s_{i+1}))^{m-1}, so neither g^{m-1} nor its integral is formed. Both
// integrals use the cubic rules, since u is known at every node; interval contributions
// are clipped at 0 because the integrands are nonnegative.
class WindowOperator {
 public:
  WindowOperator(const ModelManifold& M, const PhiOperator& op, const PotentialB& B, double c,
                 double theta, double A0, std::vector<double> grid)
      : op_(op), B_(B), c_(c), theta_(theta), A0_(A0), r_(std::move(grid)) {
    const int k = M.dimension() - 1;
    const std::size_t n = r_.size();
    q_.resize(n, 1.0);
    // ell_j = log (g(s_j)/g(s_0))^{m-1}
    std::vector<double> ell(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const double log_q = k * M.log_g_drop(r_[i + 1], r_[i + 1] - r_[i]);
      q_[i] = std::exp(log_q);
      ell[i + 1] = ell[i] - log_q;
    }
    rules_ = cubic_rules(r_);
    weighted_ = rules_;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      auto& rule = weighted_[i];
      for (std::size_t j = 0; j < rule.w.size(); ++j) rule.w[j] *= std::exp(ell[rule.first + j] - ell[i + 1]);
    }
    trivial_b_ = B.kind() == PotentialKind::Zero;
  }

  const std::vector<double>& grid() const { return r_; }
  const PhiOperator& op() const { return op_; }
  double c() const { return c_; }

  void apply(const std::vector<double>& u, std::vector<double>& z, std::vector<double>& A) const {
    const std::size_t n = r_.size();
    z.resize(n);
    A.resize(n);
    b_.assign(n, 0.0);
    v_.resize(n);
    if (!trivial_b_) {
      for (std::size_t i = 0; i < n; ++i) b_[i] = B_(c_ * u[i]);
    }
    A[0] = A0_;
    for (std::size_t i = 0; i + 1 < n; ++i) A[i + 1] = A[i] * q_[i] + integrate(weighted_[i], b_);
    for (std::size_t i = 0; i < n; ++i) v_[i] = phi_inverse(op_, A[i]);
    z[0] = theta_;
    for (std::size_t i = 0; i + 1 < n; ++i) z[i + 1] = z[i] + integrate(rules_[i], v_) / c_;
  }

 private:
  static double integrate(const IntervalRule& rule, const std::vector<double>& f) {
    double s = 0.0;
    for (std::size_t j = 0; j < rule.w.size(); ++j) s += rule.w[j] * f[rule.first + j];
    return std::max(0.0, s);
  }

  const PhiOperator& op_;
  const PotentialB& B_;
  double c_, theta_, A0_;
  std::vector<double> r_;
  std::vector<double> q_;
  std::vector<IntervalRule> rules_, weighted_;
  mutable std::vector<double> b_, v_;
  bool trivial_b_ = false;
};

inline std::vector<double> uniform_grid(double a, double b, int nodes) {
  std::vector<double> g(nodes);
  for (int i = 0; i < nodes; ++i) g[i] = a + (b - a) * i / (nodes - 1);
  g.back() = b;
  return g;
}

inline PicardResult picard(const WindowOperator& T, double theta, double tol, int max_iter) {
  PicardResult out;
  const auto& r = T.grid();
  std::vector<double> u(r.size(), theta), z, A;
  double prev_change = std::numeric_limits<double>::infinity();
  int increases = 0;
  for (int it = 1; it <= max_iter; ++it) {
    T.apply(u, z, A);
    double change = 0.0, scale = 1.0;
    bool finite = true;
    for (std::size_t i = 0; i < z.size(); ++i) {
      if (!std::isfinite(z[i]) || !std::isfinite(A[i])) {
        finite = false;
        break;
      }
      change = std::max(change, std::abs(z[i] - u[i]));
      scale = std::max(scale, std::abs(z[i]));
    }
    out.iterations = it;
    if (!finite) {
      out.last_change = std::numeric_limits<double>::infinity();
      return out;
    }
    out.last_change = change;
    u.swap(z);
    if (change <= tol * scale) {
      out.converged = true;
      break;
    }
    increases = change > prev_change ? increases + 1 : 0;
    if (increases >= 8) return out;
    prev_change = change;
  }
  if (!out.converged) return out;
  out.r = r;
  out.z = std::move(u);
  out.zp.resize(A.size());
  // A belongs to the last application, whose output u now holds.
  for (std::size_t i = 0; i < A.size(); ++i) out.zp[i] = phi_inverse(T.op(), A[i]) / T.c();
  out.end_flux = A.back();
  return out;
}

}  // namespace detail

/// One application of the Volterra operator T_c to samples u on `grid` (grid[0] = R):
///   T_c(u)(t) = theta + (1/c) int_R^t phi^{-1}( g^{m-1}(R) phi(c mu) / g^{m-1}(s)
///                   + int_R^s (g(tau)/g(s))^{m-1} B(c u(tau)) dtau ) ds,
/// with piecewise-cubic interpolatory rules for both integrals.
inline std::vector<double> volterra_apply(const ModelManifold& M, const PhiOperator& op,
                                          const PotentialB& B, const CauchyParams& params,
                                          const std::vector<double>& grid,
                                          const std::vector<double>& u) {
  params.validate();
  if (grid.size() < 2 || grid.size() != u.size()) {
    throw PreconditionError("volterra_apply needs matching grid and samples (>= 2 nodes)");
  }
  if (grid.front() != params.R) throw PreconditionError("volterra_apply grid must start at R");
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (!(u[i] >= 0.0)) throw PreconditionError("volterra_apply needs nonnegative samples");
    if (i > 0 && !(grid[i] > grid[i - 1])) throw PreconditionError("grid must be increasing");
  }
  detail::WindowOperator T(M, op, B, params.c, params.theta, op.phi(params.c * params.mu), grid);
  std::vector<double> z, A;
  T.apply(u, z, A);
  return z;
}

/// Picard iteration u <- T_c(u) from u = theta on a uniform grid of [R, r_end].
inline PicardResult solve_on_interval(const ModelManifold& M, const PhiOperator& op,
                                      const PotentialB& B, const CauchyParams& params,
                                      double r_end, double tol = 1e-10, int max_iter = 200,
                                      int nodes = 64) {
  params.validate();
  if (!(r_end > params.R)) throw PreconditionError("solve_on_interval needs r_end > R");
  if (nodes < 2) throw PreconditionError("solve_on_interval needs at least 2 nodes");
  detail::WindowOperator T(M, op, B, params.c, params.theta, op.phi(params.c * params.mu),
                           detail::uniform_grid(params.R, r_end, nodes));
  return detail::picard(T, params.theta, tol, max_iter);
}

/// Marches [R, R_max] window by window. A window restarts from (z, phi(c z')) at the end
/// of the previous one; windows halve whenever Picard fails and never grow again.
///
/// BlowUp is reported when z passes the threshold, or when the window stalls below
/// min_window_factor*R with z/z' (the local blow-up time scale) also below
/// 1e-4*R. Any other stall is a NumericError.
inline RadialSolution solve_cauchy(const ModelManifold& M, const PhiOperator& op,
                                   const PotentialB& B, const CauchyParams& params, double R_max,
                                   const CauchyConfig& cfg = {}) {
  params.validate();
  if (!(R_max > params.R)) throw PreconditionError("solve_cauchy needs R_max > R");
  if (cfg.nodes_per_window < 3) throw PreconditionError("solve_cauchy needs >= 3 nodes per window");
  if (!(cfg.picard_tol > 0.0) || cfg.max_iter < 2) throw PreconditionError("invalid Picard settings");
  if (!(cfg.blowup_threshold > 0.0)) throw PreconditionError("blow-up threshold must be positive");

  std::vector<double> stops;
  for (double s : cfg.stops) {
    if (s > params.R && s < R_max) stops.push_back(s);
  }
  stops.push_back(R_max);
  std::sort(stops.begin(), stops.end());

  RadialSolution sol;
  sol.params = params;
  sol.r.push_back(params.R);
  sol.z.push_back(params.theta);
  sol.zp.push_back(params.mu);

  double window = cfg.initial_window > 0.0 ? cfg.initial_window
                                           : std::min(1.0, (R_max - params.R) / 16.0);
  const double floor = cfg.min_window_factor * params.R;
  double a = params.R;
  double theta = params.theta;
  double A = op.phi(params.c * params.mu);
  std::size_t next_stop = 0;

  while (a < R_max) {
    while (stops[next_stop] <= a) ++next_stop;
    double b = std::min(a + window, stops[next_stop]);
    // Avoid a sliver before a stop.
    if (stops[next_stop] - b < 1e-3 * window) b = stops[next_stop];
    detail::WindowOperator T(M, op, B, params.c, theta, A,
                             detail::uniform_grid(a, b, cfg.nodes_per_window));
    auto res = detail::picard(T, theta, cfg.picard_tol, cfg.max_iter);
    if (!res.converged) {
      const double failed = b - a;
      window = 0.5 * failed;
      if (window < floor) {
        const double z_now = sol.z.back(), zp_now = sol.zp.back();
        if (zp_now > 0.0 && z_now / zp_now < 1e-4 * params.R) {
          sol.status = Status::BlowUp;
          sol.rho = a + 0.5 * failed;
          return sol;
        }
        throw NumericError("Cauchy solver stalled at r=" + std::to_string(a) +
                               " without blow-up signature",
                           res.last_change);
      }
      continue;
    }
    for (std::size_t i = 1; i < res.r.size(); ++i) {
      sol.r.push_back(res.r[i]);
      sol.z.push_back(res.z[i]);
      sol.zp.push_back(res.zp[i]);
      if (res.z[i] > cfg.blowup_threshold) {
        sol.status = Status::BlowUp;
        sol.rho = 0.5 * (a + b);
        return sol;
      }
    }
    a = b;
    theta = res.z.back();
    A = res.end_flux;
  }
  sol.status = Status::Complete;
  sol.rho = R_max;
  return sol;
}

/// mu = phi^{-1}(c^{p-1})/c, the largest slope with phi(c mu) <= c^{p-1}.
inline double choose_mu(const PhiOperator& op, double c) {
  if (!(c > 0.0 && c <= 1.0)) throw PreconditionError("choose_mu needs c in (0, 1]");
  return phi_inverse(op, std::pow(c, op.p() - 1.0)) / c;
}

/// mu = phi^{-1}(g^{m-1}(R) phi(w'_R) / (2 g^{m-1}(R_hat))) / c, which makes the inner
/// solution's flux at R_hat strictly smaller than the outer solution's flux at R.
inline double non_overlap_mu(const ModelManifold& M, const PhiOperator& op, double w_prime_R,
                             double R, double R_hat, double c) {
  if (!(R > 0.0) || !(R_hat > R)) throw PreconditionError("non_overlap_mu needs R_hat > R > 0");
  if (!(w_prime_R > 0.0)) throw PreconditionError("non_overlap_mu needs w'(R) > 0");
  if (!(c > 0.0)) throw PreconditionError("non_overlap_mu needs c > 0");
  const int k = M.dimension() - 1;
  const double ratio = std::exp(k * M.log_g_drop(R_hat, R_hat - R));
  return phi_inverse(op, 0.5 * ratio * op.phi(w_prime_R)) / c;
}

/// max over interior nodes of |F' - g^{m-1} B(c z)| / (1 + g^{m-1} B(c z)) with the flux
/// F = g^{m-1} phi(c z') differentiated by the 3-point rule on the (possibly uneven) grid.
inline double ode_residual(const ModelManifold& M, const PhiOperator& op, const PotentialB& B,
                           const RadialSolution& sol) {
  const auto& r = sol.r;
  if (r.size() < 3) return 0.0;
  const int k = M.dimension() - 1;
  const double c = sol.params.c;
  std::vector<double> G(r.size()), F(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    G[i] = std::pow(M.g(r[i]), k);
    F[i] = G[i] * op.phi(c * sol.zp[i]);
  }
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < r.size(); ++i) {
    const double h0 = r[i] - r[i - 1], h1 = r[i + 1] - r[i];
    const double dF = (-h1 / (h0 * (h0 + h1))) * F[i - 1] + ((h1 - h0) / (h0 * h1)) * F[i] +
                      (h0 / (h1 * (h0 + h1))) * F[i + 1];
    const double rhs = G[i] * B(c * sol.z[i]);
    worst = std::max(worst, std::abs(dF - rhs) / (1.0 + rhs));
  }
  return worst;
}

}  // namespace evanspot::radial
