// One PASS/FAIL line per acceptance criterion; exit status is the number of failures.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "../support/oracles.hpp"
#include "../support/properties.hpp"
#include "evanspot/evanspot.hpp"

using namespace evanspot;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

struct Outcome {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
  void note(const std::string& s) { detail += (detail.empty() ? "" : "; ") + s; }
};

int failures = 0;

void criterion(int n, const char* title, const std::function<void(Outcome&)>& body) {
  Outcome out;
  const auto t0 = Clock::now();
  try {
    body(out);
  } catch (const std::exception& e) {
    out.ok = false;
    out.note(std::string("exception: ") + e.what());
  }
  if (!out.ok) ++failures;
  std::cout << (out.ok ? "PASS" : "FAIL") << " criterion " << n << ": " << title << " [" << num(seconds_since(t0))
            << " s] " << out.detail << std::endl;
}

double sup_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

const auto P2 = PhiOperator::p_laplacian(2.0);

// ---------------------------------------------------------------------------

void truth_table(Outcome& o) {
  using namespace criteria;
  const auto t0 = Clock::now();
  double worst = INFINITY;
  auto margins = [&](const Classification& c) {
    for (const auto& v : c.per_c) worst = std::min(worst, v.margin);
  };
  struct Row {
    const char* name;
    Classification got;
    Property want;
  };
  const Row rows[] = {
      {"E2 p=2", classify_parabolic(ModelManifold::euclidean(2), P2), Property::Parabolic},
      {"E3 p=3", classify_parabolic(ModelManifold::euclidean(3), PhiOperator::p_laplacian(3.0)), Property::Parabolic},
      {"E3 p=2", classify_parabolic(ModelManifold::euclidean(3), P2), Property::NonParabolic},
      {"H3 p=2", classify_parabolic(ModelManifold::hyperbolic(3), P2), Property::NonParabolic},
      {"E3 B=t", classify_KL(ModelManifold::euclidean(3), P2, PotentialB::linear_power(2.0, 1.0)), Property::KL_Holds},
      {"exp(r^3) B=t", classify_KL(ModelManifold::power_exp(2, 3.0), P2, PotentialB::linear_power(2.0, 1.0)),
       Property::KL_Fails},
  };
  for (const auto& r : rows) {
    o.require(r.got.property == r.want, std::string(r.name) + " gave " + to_string(r.got.property));
    margins(r.got);
  }
  const double elapsed = seconds_since(t0);
  o.require(worst >= 0.15, "slope margin " + num(worst) + " < 0.15");
  o.require(elapsed < 10.0, "runtime " + num(elapsed) + " s");
  o.note("min margin " + num(worst));
}

void cross_consistency(Outcome& o) {
  using namespace criteria;
  int cases = 0;
  for (int m : {2, 3}) {
    for (const auto& M : {ModelManifold::euclidean(m), ModelManifold::hyperbolic(m), ModelManifold::power_exp(m, 3.0)}) {
      for (double p : {1.5, 2.0, 3.0}) {
        const auto op = PhiOperator::p_laplacian(p);
        const auto [st, pa] = p_laplacian_criteria(M, p);
        const auto par = classify_parabolic(M, op);
        const auto kl = classify_KL(M, op, PotentialB::linear_power(p, 1.0));
        const std::string tag = "m=" + std::to_string(m) + " p=" + num(p) + " kind=" +
                                std::to_string(static_cast<int>(M.kind()));
        for (const auto& v : par.per_c) o.require(v.verdict == pa.verdict, tag + " parabolic verdicts differ");
        for (const auto& v : kl.per_c) o.require(v.verdict == st.verdict, tag + " stochastic verdicts differ");
        ++cases;
      }
    }
  }
  o.note(std::to_string(cases) + " (manifold, p) cases");
}

void keller_osserman_grid(Outcome& o) {
  using namespace criteria;
  for (double p : {1.5, 2.0, 3.0}) {
    const auto op = PhiOperator::p_laplacian(p);
    const std::pair<PotentialB, bool> cases[] = {
        {PotentialB::linear_power(p, 1.0), true},  // homogeneity p-1
        {PotentialB::superlinear(p - 1.0 + 0.5), false},
        {PotentialB::plateau(1.0, p), true},  // t^{p-1} beyond the plateau
    };
    for (const auto& [B, holds] : cases) {
      const auto r = keller_osserman(op, B);
      const std::string tag = "p=" + num(p) + " " + to_string(r.verdict);
      o.require(r.k_form == r.beta_form, tag + " forms disagree");
      o.require(r.verdict != KOVerdict::Inconclusive, tag);
      o.require(r.verdict == (holds ? KOVerdict::NotKO_holds : KOVerdict::NotKO_fails), tag + " wrong verdict");
    }
  }
}

void closed_form(Outcome& o) {
  using namespace radial;
  const auto E3 = ModelManifold::euclidean(3);
  const std::pair<const char*, PhiOperator> ops[] = {
      {"p-laplacian p=2", P2},
      {"p-laplacian p=3", PhiOperator::p_laplacian(3.0)},
      {"perturbed p=2", PhiOperator::perturbed(2.0)},
  };
  CauchyConfig cfg;
  cfg.initial_window = 9.0 / 16.0;
  cfg.nodes_per_window = 251;
  for (const auto& [name, op] : ops) {
    const auto t0 = Clock::now();
    const auto sol = solve_cauchy(E3, op, PotentialB::zero(), {1.0, 0.0, 1.0, 1.0}, 10.0, cfg);
    const double elapsed = seconds_since(t0);
    const auto ref = oracle::z_pa(E3, [&](double t) { return op.phi(t); }, 1.0, 0.0, 1.0, 1.0, sol.r);
    const double err = sup_diff(sol.z, ref);
    o.require(sol.status == Status::Complete, std::string(name) + " not Complete");
    o.require(err <= 1e-6, std::string(name) + " error " + num(err));
    o.require(elapsed < 1.0, std::string(name) + " runtime " + num(elapsed) + " s");
    o.note(std::string(name) + ": err " + num(err) + ", " + std::to_string(sol.r.size()) + " nodes");
  }
}

void ode_oracle(Outcome& o) {
  using namespace radial;
  const auto B = PotentialB::linear_power(2.0, 1.0);
  CauchyConfig cfg;
  cfg.nodes_per_window = 257;
  for (int m : {2, 3}) {
    const auto M = ModelManifold::euclidean(m);
    const auto sol = solve_cauchy(M, P2, B, {1.0, 0.0, 1.0, 1.0}, 10.0, cfg);
    const auto ref =
        oracle::ode_reference_p2(M, [&](double t) { return B(t); }, 1.0, 0.0, 1.0, 1.0, sol.r);
    const double err = sup_diff(sol.z, ref);
    o.require(sol.status == Status::Complete, "m=" + std::to_string(m) + " not Complete");
    o.require(err <= 1e-5, "m=" + std::to_string(m) + " error " + num(err));
    o.note("m=" + std::to_string(m) + ": err " + num(err) + " (z(10)=" + num(sol.z.back()) + ")");
  }
}

void ko_dichotomy(Outcome& o) {
  using namespace radial;
  const auto E2 = ModelManifold::euclidean(2);
  CauchyConfig coarse, fine;
  fine.nodes_per_window = 2 * coarse.nodes_per_window;
  const CauchyParams params{1.0, 0.0, 1.0, 1.0};
  const auto a = solve_cauchy(E2, P2, PotentialB::superlinear(5.0), params, 10.0, coarse);
  const auto b = solve_cauchy(E2, P2, PotentialB::superlinear(5.0), params, 10.0, fine);
  o.require(a.status == Status::BlowUp && b.status == Status::BlowUp, "quintic did not blow up");
  const double drift = std::abs(a.rho - b.rho) / b.rho;
  o.require(drift <= 0.02, "rho drift " + num(drift));
  o.note("rho " + num(a.rho) + " -> " + num(b.rho) + " (drift " + num(drift) + ")");
  for (double c : {1.0, 0.5, 0.25}) {
    const auto s = solve_cauchy(E2, P2, PotentialB::linear_power(2.0, 1.0), {1.0, 0.0, 1.0, c}, 100.0);
    o.require(s.status == Status::Complete && s.rho == 100.0, "B=t c=" + num(c) + " not Complete(100)");
  }
}

void evans_triple(Outcome& o) {
  const auto res = radial::evans_for_triple(ModelManifold::euclidean(2), P2, PotentialB::zero(), 1.0, 2.0, 0.1);
  o.require(res.sup_on_annulus < 0.1, "sup " + num(res.sup_on_annulus));
  o.require(res.w_at(50.0) > 5.0 * res.w_at(2.0), "no exhaustion growth");
  double rel = 0.0;
  for (std::size_t i = 0; i < res.solution.r.size(); ++i) {
    const double r = res.solution.r[i];
    if (r <= 1.0) continue;
    const double shape = res.c_final * std::log(r);
    rel = std::max(rel, std::abs(res.c_final * res.solution.z[i] - shape) / shape);
  }
  o.require(rel <= 0.01, "profile error " + num(rel));
  o.note("c " + num(res.c_final) + ", sup " + num(res.sup_on_annulus) + ", profile rel err " + num(rel));
}

void obstacle_oracles(Outcome& o) {
  using namespace obstacle;
  const auto E2 = ModelManifold::euclidean(2);
  const auto prob = DiscreteProblem::uniform(E2, 100.0, 101.0, 40, 2.0, 0.0);
  ObstacleSpec spec;
  for (double r : prob.grid()) spec.psi.push_back(0.3 - 4.0 * (r - 100.5) * (r - 100.5));
  spec.psi.front() = std::min(spec.psi.front(), 0.0);
  spec.psi.back() = std::min(spec.psi.back(), 0.0);
  const auto u = solve_obstacle(prob, spec);
  const auto qp = oracle::brute_force_qp(prob, spec.psi, 0.0, 0.0);
  const double err = sup_diff(u.values, qp.u);
  int contact_mismatch = 0, contacts = 0;
  for (std::size_t i = 1; i + 1 < prob.size(); ++i) {
    contact_mismatch += (u[i] <= spec.psi[i] + 1e-6) != bool(qp.contact[i]);
    contacts += qp.contact[i];
  }
  o.require(qp.kkt_sets == 1, "oracle found " + std::to_string(qp.kkt_sets) + " KKT sets");
  o.require(err <= 1e-6, "QP error " + num(err));
  o.require(contact_mismatch == 0 && contacts > 0, "contact sets differ");

  auto exact = [](double r) { return (std::sqrt(r) - 1.0) / (std::sqrt(2.0) - 1.0); };
  std::vector<double> errs;
  for (int n : {11, 21, 41, 81}) {
    const auto d = DiscreteProblem::uniform(E2, 1.0, 2.0, n, 3.0, 0.0);
    const auto v = solve_dirichlet(d, 0.0, 1.0);
    double e = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) e = std::max(e, std::abs(v[i] - exact(d.grid()[i])));
    errs.push_back(e);
  }
  const double order = std::log2(errs[errs.size() - 2] / errs.back());
  o.require(order >= 1.8, "p=3 order " + num(order));
  o.note("QP err " + num(err) + ", " + std::to_string(contacts) + " contacts, p=3 order " + num(order));
}

void properties(Outcome& o) {
  std::string why;
  int checked = 0;
  const int comparison = props::comparison_failures(1000, 101, &why);
  const int minimality = props::minimality_failures(1000, 202, &why, &checked);
  const int stationarity = props::stationarity_failures(1000, 303, &why);
  const int pasting = props::pasting_failures(1000, 404, &why);
  o.require(comparison == 0, "comparison " + std::to_string(comparison) + " failures");
  o.require(minimality == 0, "minimality " + std::to_string(minimality) + " failures");
  o.require(checked >= 1000, "only " + std::to_string(checked) + " minimality candidates");
  o.require(stationarity == 0, "stationarity " + std::to_string(stationarity) + " failures");
  o.require(pasting == 0, "pasting " + std::to_string(pasting) + " failures");
  if (!why.empty()) o.note("last failure " + why);
  o.note("4 x 1000 trials, " + std::to_string(checked) + " minimality candidates");
}

void khasminskii(Outcome& o) {
  using namespace obstacle;
  const auto t0 = Clock::now();
  KhasminskiiConfig cfg;
  cfg.K_radius = 1.0;
  cfg.Omega_radius = 2.0;
  cfg.eps = 0.1;
  // h_j = log r / log rho_j on the plane, so sup over Omega is log 2 / log rho_j; the
  // radii must grow doubly exponentially for stage budgets eps/2^n.
  cfg.radii = {std::ldexp(1.0, 21), std::ldexp(1.0, 41), std::ldexp(1.0, 81), std::ldexp(1.0, 161)};
  const auto plane = khasminskii_construct(ModelManifold::euclidean(2), 2.0, 0.0, cfg);
  o.require(plane.verdict == KhasVerdict::PotentialBuilt, std::string("plane ") + to_string(plane.verdict));
  const double total = std::accumulate(plane.budget_used.begin(), plane.budget_used.end(), 0.0);
  o.require(total <= cfg.eps, "budget " + num(total));
  double w_omega = 0.0;
  for (std::size_t i = 0; i <= plane.omega_index && i < plane.w.size(); ++i) w_omega = std::max(w_omega, plane.w[i]);
  o.require(!plane.w.empty() && w_omega <= cfg.eps, "w on Omega " + num(w_omega));

  // With radii {4, 8, 16, 32} the first stage cannot meet eps/2 (log 2 / log 32 > 0.05).
  cfg.radii = {4, 8, 16, 32};
  bool budget_error = false;
  try {
    khasminskii_construct(ModelManifold::euclidean(2), 2.0, 0.0, cfg);
  } catch (const BudgetError&) {
    budget_error = true;
  }
  o.require(budget_error, "short plane exhaustion did not report a budget error");

  const auto space = khasminskii_construct(ModelManifold::euclidean(3), 2.0, 0.0, cfg);
  o.require(space.verdict == KhasVerdict::HLimitNonzero, std::string("space ") + to_string(space.verdict));
  o.require(space.h_limit_sup >= 0.4, "h_limit_sup " + num(space.h_limit_sup));
  const double elapsed = seconds_since(t0);
  o.require(elapsed < 60.0, "runtime " + num(elapsed) + " s");
  o.note("plane budget " + num(total) + ", w on Omega " + num(w_omega) + ", space h_limit " +
         num(space.h_limit_sup) + ", short radii give BudgetError");
}

int run_cli(const std::string& args) {
  const int status = std::system((std::string(EVANSPOT_CLI) + " " + args + " 2>/dev/null").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void determinism(Outcome& o) {
  const std::pair<const char*, const char*> runs[] = {
      {"classify", "classify_plane"},     {"classify", "classify_sweep"}, {"classify", "classify_blindspot"},
      {"evans", "evans_plane"},           {"evans", "evans_blowup"},      {"khasminskii", "khas_plane"},
      {"khasminskii", "khas_space"},      {"obstacle", "obstacle_cap"},
  };
  const std::string tmp = "acceptance_determinism";
  for (const auto& [cmd, cfg] : runs) {
    const std::string base = std::string(cmd) + " --config " + EVANSPOT_SAMPLES + "/" + cfg + ".cfg --out ";
    const int c1 = run_cli(base + tmp + "_1.csv");
    const int c2 = run_cli(base + tmp + "_2.csv");
    const auto a = slurp(tmp + "_1.csv"), b = slurp(tmp + "_2.csv");
    o.require(c1 == c2, std::string(cfg) + " exit codes differ");
    o.require(!a.empty() && a == b, std::string(cfg) + " outputs differ");
    std::remove((tmp + "_1.csv").c_str());
    std::remove((tmp + "_2.csv").c_str());
  }
  o.note(std::to_string(std::size(runs)) + " configs over 4 commands");
}

}  // namespace

int main() {
  criterion(1, "classifier truth table", truth_table);
  criterion(2, "generic and p-Laplacian criteria agree", cross_consistency);
  criterion(3, "Keller-Osserman forms agree on 9 cases", keller_osserman_grid);
  criterion(4, "radial solver vs closed form (B=0)", closed_form);
  criterion(5, "radial solver vs ODE integration (B=t)", ode_oracle);
  criterion(6, "blow-up vs completeness", ko_dichotomy);
  criterion(7, "Evans triple contract", evans_triple);
  criterion(8, "obstacle solver vs active-set QP and p=3 order", obstacle_oracles);
  criterion(9, "structural properties, 1000 trials each", properties);
  criterion(10, "Khas'minskii dichotomy", khasminskii);
  criterion(11, "CLI determinism", determinism);
  std::cout << (failures == 0 ? "all criteria pass" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
