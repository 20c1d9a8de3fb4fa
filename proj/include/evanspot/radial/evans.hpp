#pragma once

#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

#include "evanspot/io/csv.hpp"
#include "evanspot/radial/cauchy.hpp"

namespace evanspot::radial {

struct EvansConfig {
  double R_max = 50.0;
  CauchyConfig cauchy{};
  double min_c = 1e-12;
  /// Exhaustion proxy: w(R_max) must be at least this multiple of sup_{[R,R1]} w.
  double exhaustion_factor = 2.0;
};

/// Radial potential w = c z_c with z_c(R) = 0, z_c'(R) = choose_mu(c).
struct EvansResult {
  RadialSolution solution;
  double c_final = 0.0;
  double mu_final = 0.0;
  double sup_on_annulus = 0.0;  // max of c z_c on [R, R1]
  double K_bound = 0.0;         // max of z_c on [R, R1], the observed uniform bound
  double R = 0.0, R1 = 0.0, eps = 0.0;
  int attempts = 0;

  double w_at(double r) const { return c_final * solution.value_at(r); }

  void write_csv(std::ostream& os) const {
    io::write_metadata(os, {{"status", to_string(solution.status)},
                            {"c", io::fmt(c_final)},
                            {"mu", io::fmt(mu_final)},
                            {"sup_on_annulus", io::fmt(sup_on_annulus)},
                            {"K_bound", io::fmt(K_bound)},
                            {"R", io::fmt(R)},
                            {"R1", io::fmt(R1)},
                            {"eps", io::fmt(eps)},
                            {"R_max", io::fmt(solution.rho)}});
    io::write_header(os, {"r", "w"});
    for (std::size_t i = 0; i < solution.r.size(); ++i) {
      io::write_row(os, {solution.r[i], c_final * solution.z[i]});
    }
  }
};

class EvansFailure : public std::runtime_error {
 public:
  enum class Kind { BlowUp, NonUniformBound, NotExhausting };

  EvansFailure(Kind kind, const std::string& what, double rho, double observed, double c)
      : std::runtime_error(what), kind_(kind), rho_(rho), observed_(observed), c_(c) {}

  Kind kind() const noexcept { return kind_; }
  /// Blow-up radius estimate (BlowUp only).
  double rho() const noexcept { return rho_; }
  /// Last measured sup of c z_c on the annulus, or the exhaustion ratio.
  double observed() const noexcept { return observed_; }
  double c() const noexcept { return c_; }

 private:
  Kind kind_;
  double rho_, observed_, c_;
};

/// Halves c from 1 until sup_{[R,R1]} c z_c < eps, then checks the accepted profile is
/// complete on [R, R_max], increasing and exhausting. Any blow-up aborts the search.
inline EvansResult evans_for_triple(const ModelManifold& M, const PhiOperator& op,
                                    const PotentialB& B, double R, double R1, double eps,
                                    const EvansConfig& cfg = {}) {
  if (!(R > 0.0 && R < R1 && R1 < cfg.R_max)) {
    throw PreconditionError("evans_for_triple needs 0 < R < R1 < R_max");
  }
  if (!(eps > 0.0)) throw PreconditionError("evans_for_triple needs eps > 0");
  if (!M.monotone()) throw PreconditionError("evans_for_triple needs a monotone warp (g' >= 0)");
  if (auto b1 = B.b1()) {
    for (int k = 0; k <= 120; ++k) {
      const double t = std::pow(10.0, -6.0 + k * 0.1);
      if (B(t) > *b1 * std::pow(t, op.p() - 1.0) * (1.0 + 1e-12)) {
        throw PreconditionError("potential violates B(t) <= b1 t^{p-1}");
      }
    }
  }

  CauchyConfig cc = cfg.cauchy;
  cc.stops.push_back(R1);
  EvansResult out;
  out.R = R;
  out.R1 = R1;
  out.eps = eps;
  double sup = 0.0;
  for (double c = 1.0; c >= cfg.min_c; c *= 0.5) {
    ++out.attempts;
    const double mu = choose_mu(op, c);
    auto sol = solve_cauchy(M, op, B, {R, 0.0, mu, c}, cfg.R_max, cc);
    if (sol.status == Status::BlowUp) {
      throw EvansFailure(EvansFailure::Kind::BlowUp,
                         "radial solution blows up at rho~" + io::fmt(sol.rho) +
                             " (Keller-Osserman violated)",
                         sol.rho, sup, c);
    }
    double zmax = 0.0;
    for (std::size_t i = 0; i < sol.r.size() && sol.r[i] <= R1; ++i) zmax = std::max(zmax, sol.z[i]);
    sup = c * zmax;
    if (!(sup < eps)) continue;

    for (std::size_t i = 1; i < sol.r.size(); ++i) {
      if (!(sol.z[i] > sol.z[i - 1]) || !(sol.zp[i] > 0.0)) {
        throw NumericError("accepted radial profile is not increasing at r=" + io::fmt(sol.r[i]));
      }
    }
    const double ratio = sol.z.back() / zmax;
    if (!(ratio >= cfg.exhaustion_factor)) {
      throw EvansFailure(EvansFailure::Kind::NotExhausting,
                         "profile is not exhausting: w(R_max)/sup_annulus = " + io::fmt(ratio),
                         0.0, ratio, c);
    }
    out.solution = std::move(sol);
    out.c_final = c;
    out.mu_final = mu;
    out.sup_on_annulus = sup;
    out.K_bound = zmax;
    return out;
  }
  throw EvansFailure(EvansFailure::Kind::NonUniformBound,
                     "c fell below min_c; last sup on annulus " + io::fmt(sup), 0.0, sup,
                     cfg.min_c);
}

}  // namespace evanspot::radial
