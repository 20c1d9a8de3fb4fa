#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "evanspot/core/geometry.hpp"
#include "evanspot/criteria/classify.hpp"
#include "evanspot/criteria/divergence.hpp"

namespace evanspot::criteria {

enum class KOVerdict { NotKO_holds, NotKO_fails, Inconclusive };

inline const char* to_string(KOVerdict v) {
  switch (v) {
    case KOVerdict::NotKO_holds:
      return "NotKO_holds";
    case KOVerdict::NotKO_fails:
      return "NotKO_fails";
    case KOVerdict::Inconclusive:
      return "Inconclusive";
  }
  return "?";
}

inline KOVerdict ko_from(Verdict v) {
  switch (v) {
    case Verdict::Diverges:
      return KOVerdict::NotKO_holds;
    case Verdict::Converges:
      return KOVerdict::NotKO_fails;
    default:
      return KOVerdict::Inconclusive;
  }
}

struct KOResult {
  KOVerdict verdict = KOVerdict::Inconclusive;
  KOVerdict k_form = KOVerdict::Inconclusive;
  KOVerdict beta_form = KOVerdict::Inconclusive;
  DivergenceVerdict k_detail;
  DivergenceVerdict beta_detail;
  double s0 = 0.0;  // start of the tested half-line
};

/// Tests 1/K_0^{-1}(beta(s)) and beta(s)^{-1/p} for non-integrability at infinity.
/// Non-integrable means the (not KO) condition holds: radial solutions do not blow up.
/// For a potential vanishing on [0, T] the test starts at max(r0, 2T), where beta > 0.
inline KOResult keller_osserman(const PhiOperator& op, const PotentialB& B,
                                const CriteriaConfig& cfg = {}) {
  if (!op.derivative_bounds()) {
    throw PreconditionError("keller_osserman needs an operator with the derivative bounds flag");
  }
  KOResult out;
  const auto type = classify_operator_type(B);
  if (type.tag == OperatorType::Type2 && std::isinf(type.T)) {
    // beta == 0: both integrands are identically +inf.
    DivergenceVerdict d;
    d.verdict = Verdict::Diverges;
    d.partial_integral = std::numeric_limits<double>::infinity();
    d.r_max = cfg.div.r_max;
    out.k_detail = out.beta_detail = d;
    out.k_form = out.beta_form = out.verdict = KOVerdict::NotKO_holds;
    out.s0 = cfg.r0;
    return out;
  }
  out.s0 = type.tag == OperatorType::Type2 ? std::max(cfg.r0, 2.0 * type.T) : cfg.r0;
  const Quadrature q = cfg.div.quad;
  const double p = op.p();
  auto k_form = [&](double s) { return 1.0 / K_inverse(op, beta(B, s, q), q); };
  auto b_form = [&](double s) { return std::pow(beta(B, s, q), -1.0 / p); };
  out.k_detail = test_L1_at_infinity(k_form, out.s0, cfg.div);
  out.beta_detail = test_L1_at_infinity(b_form, out.s0, cfg.div);
  out.k_form = ko_from(out.k_detail.verdict);
  out.beta_form = ko_from(out.beta_detail.verdict);
  if (out.k_form != KOVerdict::Inconclusive && out.beta_form != KOVerdict::Inconclusive &&
      out.k_form != out.beta_form) {
    throw ConsistencyError(std::string("Keller-Osserman forms disagree: K-form ") +
                           to_string(out.k_form) + ", beta-form " + to_string(out.beta_form));
  }
  out.verdict = out.k_form == out.beta_form ? out.k_form : KOVerdict::Inconclusive;
  return out;
}

}  // namespace evanspot::criteria
