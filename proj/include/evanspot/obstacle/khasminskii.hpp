#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "evanspot/io/csv.hpp"
#include "evanspot/obstacle/discrete.hpp"

namespace evanspot::obstacle {

enum class KhasVerdict { PotentialBuilt, HLimitNonzero };

inline const char* to_string(KhasVerdict v) {
  return v == KhasVerdict::PotentialBuilt ? "PotentialBuilt" : "HLimitNonzero";
}

struct KhasminskiiConfig {
  double K_radius = 1.0;
  double Omega_radius = 2.0;
  double eps = 0.1;
  std::vector<double> radii;
  double tol = 1e-10;
  /// Grid density on each segment [K, Omega], [Omega, rho_1], [rho_1, rho_2], ...
  double nodes_per_unit_log = 8.0;
  ObstacleOptions solver{};
};

struct KhasminskiiReport {
  KhasVerdict verdict = KhasVerdict::HLimitNonzero;
  std::vector<double> grid;             // global grid on [K, rho_last]
  std::vector<double> w;                // final potential (empty unless PotentialBuilt)
  std::vector<std::vector<double>> stages;  // w_1, w_2, ... on the global grid
  std::vector<std::vector<double>> h;       // h_j extended by 1 to the global grid
  int n_stages = 0;
  std::vector<double> budget_used;  // sup over Omega of w_{n+1} - w_n (w_0 = 0)
  std::vector<int> chosen_j;        // 1-based exhaustion index used by each stage
  double h_limit_sup = 0.0;
  std::size_t omega_index = 0;
  std::vector<std::size_t> radius_index;

  void write_csv(std::ostream& os) const {
    io::Metadata meta{{"verdict", to_string(verdict)},
                      {"n_stages", std::to_string(n_stages)},
                      {"h_limit_sup", io::fmt(h_limit_sup)}};
    for (std::size_t n = 0; n < budget_used.size(); ++n) {
      meta.emplace_back("budget_used_" + std::to_string(n + 1), io::fmt(budget_used[n]));
    }
    io::write_metadata(os, meta);
    io::write_header(os, {"r", "w", "h_last"});
    for (std::size_t i = 0; i < grid.size(); ++i) {
      io::write_row(os, {grid[i], w.empty() ? 0.0 : w[i], h.empty() ? 0.0 : h.back()[i]});
    }
  }
};

/// No exhaustion index keeps the stage increment inside its budget.
class BudgetError : public NumericError {
 public:
  BudgetError(const std::string& what, int stage, double smallest_increment, double budget)
      : NumericError(what, smallest_increment), stage_(stage), budget_(budget) {}
  int stage() const noexcept { return stage_; }
  double smallest_increment() const noexcept { return estimate(); }
  double budget() const noexcept { return budget_; }

 private:
  int stage_;
  double budget_;
};

namespace detail {

inline std::vector<double> segmented_log_grid(const std::vector<double>& knots, double per_unit,
                                              std::vector<std::size_t>& knot_index) {
  std::vector<double> g{knots.front()};
  knot_index.assign(1, 0);
  for (std::size_t s = 0; s + 1 < knots.size(); ++s) {
    const double la = std::log(knots[s]), lb = std::log(knots[s + 1]);
    const int n = std::max(4, static_cast<int>(std::ceil(per_unit * (lb - la))));
    for (int i = 1; i <= n; ++i) g.push_back(i == n ? knots[s + 1] : std::exp(la + (lb - la) * i / n));
    knot_index.push_back(g.size() - 1);
  }
  return g;
}

// Limit of a monotone sequence from its last three terms, by Aitken extrapolation of
// the reciprocals 1/h_j. Increments that do not shrink (ratio >= 0.9) mean 1/h_j is
// unbounded and the limit is 0.
inline double aitken_limit(double h1, double h2, double h3) {
  if (!(h3 > 0.0)) return 0.0;
  const double x1 = 1.0 / h1, x2 = 1.0 / h2, x3 = 1.0 / h3;
  const double d1 = x2 - x1, d2 = x3 - x2;
  if (std::abs(d2) <= 1e-14 * x3) return h3;
  if (!(d1 > 0.0) || !(d2 > 0.0)) return h3;
  const double q = d2 / d1;
  if (q >= 0.9) return 0.0;
  return 1.0 / (x3 + d2 * q / (1.0 - q));
}

}  // namespace detail

/// Discrete version of the exhaustion argument turning the Liouville property into a
/// Khas'minskii potential for Delta_p u - lambda |u|^{p-2} u on a model manifold:
///   h_j    Dirichlet solutions on [K, rho_j] with data (0, 1), extended by 1;
///   w_1    the first h_j whose sup on Omega is at most eps/2;
///   w_{n+1} the obstacle solution above w_n + h_j on [K, rho_{j+1}] with data (0, n+1),
///          extended by n+1, for the first j whose increment on Omega is below eps/2^{n+1}.
/// The budget is checked on the fixed Omega (the only set the final bound is about).
inline KhasminskiiReport khasminskii_construct(const ModelManifold& M, double p, double lambda,
                                               const KhasminskiiConfig& cfg) {
  const auto& rho = cfg.radii;
  if (!(cfg.K_radius > 0.0 && cfg.K_radius < cfg.Omega_radius)) {
    throw PreconditionError("khasminskii needs 0 < K_radius < Omega_radius");
  }
  if (rho.size() < 4) throw PreconditionError("khasminskii needs at least 4 exhaustion radii");
  if (!(rho.front() > cfg.Omega_radius)) throw PreconditionError("khasminskii needs Omega_radius < rho_1");
  for (std::size_t j = 1; j < rho.size(); ++j) {
    if (!(rho[j] > rho[j - 1])) throw PreconditionError("exhaustion radii must increase");
  }
  if (!(cfg.eps > 0.0)) throw PreconditionError("khasminskii needs eps > 0");
  if (!(cfg.tol > 0.0)) throw PreconditionError("khasminskii needs tol > 0");

  std::vector<double> knots{cfg.K_radius, cfg.Omega_radius};
  knots.insert(knots.end(), rho.begin(), rho.end());
  std::vector<std::size_t> kidx;
  KhasminskiiReport rep;
  rep.grid = detail::segmented_log_grid(knots, cfg.nodes_per_unit_log, kidx);
  rep.omega_index = kidx[1];
  rep.radius_index.assign(kidx.begin() + 2, kidx.end());
  const DiscreteProblem full(M, rep.grid, p, lambda);
  const std::size_t N = rep.grid.size();
  const std::size_t L = rho.size();
  ObstacleOptions opt = cfg.solver;
  opt.tol = std::min(opt.tol, cfg.tol);

  // Stage 0: the h_j.
  for (std::size_t j = 0; j < L; ++j) {
    const auto prob = full.prefix(rep.radius_index[j]);
    auto hj = solve_dirichlet(prob, 0.0, 1.0, opt).values;
    hj.resize(N, 1.0);
    if (!rep.h.empty()) {
      const auto& prev = rep.h.back();
      for (std::size_t i = 0; i < N; ++i) {
        if (hj[i] > prev[i] + cfg.tol) {
          throw NumericError("h_j is not decreasing in j at r=" + io::fmt(rep.grid[i]));
        }
      }
    }
    rep.h.push_back(std::move(hj));
  }
  for (std::size_t i = 0; i <= rep.radius_index[0]; ++i) {
    const double lim = detail::aitken_limit(rep.h[L - 3][i], rep.h[L - 2][i], rep.h[L - 1][i]);
    rep.h_limit_sup = std::max(rep.h_limit_sup, lim);
  }
  if (rep.h_limit_sup > 10.0 * cfg.tol) {
    rep.verdict = KhasVerdict::HLimitNonzero;
    return rep;
  }

  auto sup_on_omega = [&](const std::vector<double>& v, const std::vector<double>& base) {
    double s = 0.0;
    for (std::size_t i = 0; i <= rep.omega_index; ++i) s = std::max(s, v[i] - base[i]);
    return s;
  };

  // w_1
  const std::vector<double> zero(N, 0.0);
  double smallest = std::numeric_limits<double>::infinity();
  std::size_t support = L;  // index j (0-based) where the current w_n reaches its plateau
  for (std::size_t j = 0; j < L; ++j) {
    const double s = sup_on_omega(rep.h[j], zero);
    smallest = std::min(smallest, s);
    if (s <= cfg.eps / 2.0) {
      rep.stages.push_back(rep.h[j]);
      rep.budget_used.push_back(s);
      rep.chosen_j.push_back(static_cast<int>(j) + 1);
      support = j;
      break;
    }
  }
  if (rep.stages.empty()) {
    throw BudgetError("no h_j meets sup_Omega h_j <= eps/2; smallest is " + io::fmt(smallest), 1,
                      smallest, cfg.eps / 2.0);
  }

  const int target = static_cast<int>(L) - 1;
  for (int n = 1; n < target; ++n) {
    const auto& wbar = rep.stages.back();
    const double budget = cfg.eps / std::ldexp(1.0, n + 1);
    smallest = std::numeric_limits<double>::infinity();
    bool found = false;
    for (std::size_t j = support; j + 1 < L; ++j) {
      const std::size_t last = rep.radius_index[j + 1];
      const auto prob = full.prefix(last);
      ObstacleSpec spec;
      spec.psi.resize(last + 1);
      for (std::size_t i = 0; i <= last; ++i) spec.psi[i] = wbar[i] + rep.h[j][i];
      spec.theta_left = 0.0;
      spec.theta_right = static_cast<double>(n + 1);
      auto s = solve_obstacle(prob, spec, opt).values;
      s.resize(N, static_cast<double>(n + 1));
      const double inc = sup_on_omega(s, wbar);
      smallest = std::min(smallest, inc);
      if (inc < budget) {
        rep.stages.push_back(std::move(s));
        rep.budget_used.push_back(inc);
        rep.chosen_j.push_back(static_cast<int>(j) + 1);
        support = j + 1;
        found = true;
        break;
      }
    }
    if (!found) {
      throw BudgetError("stage " + std::to_string(n + 1) + ": no exhaustion index keeps the increment below " +
                            io::fmt(budget) + "; smallest is " + io::fmt(smallest),
                        n + 1, smallest, budget);
    }
  }

  // Verify the construction's invariants before reporting success.
  for (std::size_t n = 0; n < rep.stages.size(); ++n) {
    const auto& wn = rep.stages[n];
    if (!is_supersolution(full, wn, 10.0 * opt.residual_tol)) {
      throw NumericError("stage " + std::to_string(n + 1) + " is not a discrete supersolution");
    }
    if (n > 0) {
      for (std::size_t i = 0; i < N; ++i) {
        if (wn[i] < rep.stages[n - 1][i] - cfg.tol) throw NumericError("w_n is not increasing in n");
      }
    }
  }
  rep.w = rep.stages.back();
  for (std::size_t i = 0; i <= rep.omega_index; ++i) {
    if (rep.w[i] > cfg.eps) throw NumericError("final potential exceeds eps on Omega");
  }
  rep.n_stages = static_cast<int>(rep.stages.size());
  rep.verdict = KhasVerdict::PotentialBuilt;
  return rep;
}

}  // namespace evanspot::obstacle
