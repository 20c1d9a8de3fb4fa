#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "evanspot/core/geometry.hpp"
#include "evanspot/criteria/divergence.hpp"

namespace evanspot::criteria {

enum class Property { Parabolic, NonParabolic, KL_Holds, KL_Fails, Inconclusive };

inline const char* to_string(Property p) {
  switch (p) {
    case Property::Parabolic:
      return "Parabolic";
    case Property::NonParabolic:
      return "NonParabolic";
    case Property::KL_Holds:
      return "KL_Holds";
    case Property::KL_Fails:
      return "KL_Fails";
    case Property::Inconclusive:
      return "Inconclusive";
  }
  return "?";
}

/// Type1: B > 0 on every probe point. Type2: B vanishes on an initial interval [0, T];
/// T is only known to the probe grid resolution and is +inf for B == 0.
struct OperatorType {
  enum Tag { Type1, Type2 } tag = Type1;
  double T = 0.0;
};

/// Log grid of 141 points over [1e-6, 10], 20 per decade.
inline std::vector<double> default_probe_grid() {
  std::vector<double> g;
  for (int k = 0; k <= 140; ++k) g.push_back(std::pow(10.0, -6.0 + k * 0.05));
  return g;
}

inline OperatorType classify_operator_type(const PotentialB& B,
                                           const std::vector<double>& probe = default_probe_grid()) {
  OperatorType out;
  double last_zero = 0.0;
  for (double t : probe) {
    if (B(t) > 0.0) {
      if (last_zero > 0.0) {
        out.tag = OperatorType::Type2;
        out.T = last_zero;
      }
      return out;
    }
    last_zero = t;
  }
  out.tag = OperatorType::Type2;
  out.T = std::numeric_limits<double>::infinity();
  return out;
}

/// V_pa(r) = phi^{-1}(c g(r)^{1-m})
inline double v_pa(const ModelManifold& M, const PhiOperator& op, double c, double r) {
  if (!(r > 0.0)) throw DomainError("v_pa needs r > 0");
  if (!(c > 0.0)) throw DomainError("v_pa needs c > 0");
  return phi_inverse(op, c * std::exp(-(M.dimension() - 1) * M.log_g(r)));
}

/// V_st(r) = phi^{-1}(c g(r)^{1-m} int_R^r g^{m-1})
inline double v_st(const ModelManifold& M, const PhiOperator& op, double c, double R, double r,
                   const Quadrature& q = {}) {
  if (!(R > 0.0)) throw DomainError("v_st needs R > 0");
  if (r < R) throw DomainError("v_st needs r >= R");
  if (!(c > 0.0)) throw DomainError("v_st needs c > 0");
  return phi_inverse(op, c * volume_ratio(M, R, r, q));
}

struct CriteriaConfig {
  DivergenceConfig div{};
  double r0 = 1.0;
  std::vector<double> c_values{1.0, 0.25, 1.0 / 16.0, 1.0 / 64.0};
};

struct Classification {
  Property property = Property::Inconclusive;
  std::vector<double> c_values;
  std::vector<DivergenceVerdict> per_c;
  std::optional<OperatorType> op_type;
};

namespace detail {

inline DivergenceConfig clamp_to_table(const ModelManifold& M, DivergenceConfig div) {
  div.r_max = std::min(div.r_max, M.r_max());
  return div;
}

inline void check_c_values(const std::vector<double>& cs) {
  if (cs.empty()) throw PreconditionError("at least one c value is required");
  for (std::size_t i = 0; i < cs.size(); ++i) {
    if (!(cs[i] > 0.0)) throw PreconditionError("c values must be positive");
    if (i > 0 && !(cs[i] < cs[i - 1])) throw PreconditionError("c values must be decreasing");
  }
}

template <class MakeIntegrand>
Classification sweep_c(const CriteriaConfig& cfg, const DivergenceConfig& div, Property yes,
                       Property no, MakeIntegrand&& make) {
  check_c_values(cfg.c_values);
  Classification out;
  out.c_values = cfg.c_values;
  bool all_diverge = true;
  for (double c : cfg.c_values) {
    out.per_c.push_back(test_L1_at_infinity(make(c), cfg.r0, div));
    all_diverge = all_diverge && out.per_c.back().verdict == Verdict::Diverges;
  }
  if (all_diverge) {
    out.property = yes;
  } else if (out.per_c.back().verdict == Verdict::Converges) {
    out.property = no;
  } else {
    out.property = Property::Inconclusive;
  }
  return out;
}

}  // namespace detail

inline Classification classify_parabolic(const ModelManifold& M, const PhiOperator& op,
                                         const CriteriaConfig& cfg = {}) {
  const auto div = detail::clamp_to_table(M, cfg.div);
  return detail::sweep_c(cfg, div, Property::Parabolic, Property::NonParabolic, [&](double c) {
    return [&M, &op, c](double r) { return v_pa(M, op, c, r); };
  });
}

inline Classification classify_KL(const ModelManifold& M, const PhiOperator& op,
                                  const PotentialB& B, const CriteriaConfig& cfg = {}) {
  const auto type = classify_operator_type(B);
  const auto div = detail::clamp_to_table(M, cfg.div);
  Classification out;
  if (type.tag == OperatorType::Type1) {
    const double R = cfg.r0;
    const Quadrature q = div.quad;
    out = detail::sweep_c(cfg, div, Property::KL_Holds, Property::KL_Fails, [&](double c) {
      return [&M, &op, c, R, q](double r) { return v_st(M, op, c, R, r, q); };
    });
  } else {
    out = detail::sweep_c(cfg, div, Property::KL_Holds, Property::KL_Fails, [&](double c) {
      return [&M, &op, c](double r) { return v_pa(M, op, c, r); };
    });
  }
  out.op_type = type;
  return out;
}

/// For phi(t) = t^{p-1}: first = (vol(B_r)/vol(dB_r))^{1/(p-1)}, second = vol(dB_r)^{-1/(p-1)},
/// both tested for non-integrability at infinity.
inline std::pair<DivergenceVerdict, DivergenceVerdict> p_laplacian_criteria(
    const ModelManifold& M, double p, const CriteriaConfig& cfg = {}) {
  if (!(p > 1.0)) throw PreconditionError("p_laplacian_criteria needs p > 1");
  const auto div = detail::clamp_to_table(M, cfg.div);
  const double e = 1.0 / (p - 1.0);
  const int k = M.dimension() - 1;
  const Quadrature q = div.quad;
  auto stochastic = [&](double r) { return std::pow(volume_ratio(M, M.r_min(), r, q), e); };
  auto parabolic = [&](double r) { return std::exp(-e * k * M.log_g(r)); };
  return {test_L1_at_infinity(stochastic, cfg.r0, div), test_L1_at_infinity(parabolic, cfg.r0, div)};
}

}  // namespace evanspot::criteria
