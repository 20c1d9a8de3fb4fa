#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "evanspot/core/errors.hpp"
#include "evanspot/core/manifold.hpp"
#include "evanspot/core/phi.hpp"
#include "evanspot/core/potential.hpp"
#include "evanspot/core/quadrature.hpp"

namespace evanspot {

/// vol(dB_r) = g(r)^{m-1}
inline double sphere_volume(const ModelManifold& M, double r) {
  if (!(r > 0.0)) throw DomainError("sphere_volume needs r > 0");
  return std::pow(M.g(r), M.dimension() - 1);
}

/// vol(B_r) = int_0^r g^{m-1}
inline double ball_volume(const ModelManifold& M, double r, const Quadrature& q = {}) {
  if (!(r > 0.0)) throw DomainError("ball_volume needs r > 0");
  const int k = M.dimension() - 1;
  return integrate([&](double t) { return std::pow(M.g(t), k); }, M.r_min(), r, q);
}

/// int_R^r (g(t)/g(r))^{m-1} dt, i.e. g(r)^{1-m} int_R^r g^{m-1}. Integrated in the
/// distance d = r - t from the outer radius so that fast-growing warps neither overflow
/// nor lose the ratio to cancellation.
inline double volume_ratio(const ModelManifold& M, double R, double r, const Quadrature& q = {}) {
  if (r < R) throw DomainError("volume_ratio needs r >= R");
  if (r == R) return 0.0;
  const int k = M.dimension() - 1;
  Quadrature rel = q;
  rel.abs_tol = std::min(q.abs_tol, 1e-300);
  auto integrand = [&](double d) {
    if (d >= r) return 0.0;
    return std::exp(k * M.log_g_drop(r, d));
  };
  return integrate_graded_left(integrand, 0.0, r - R, rel);
}

namespace detail {

// Root of a strictly increasing f on [lo, hi] with f(lo) <= target <= f(hi); Newton
// steps guarded by the bracket, bisection otherwise.
template <class F, class DF>
double safeguarded_root(F&& f, DF&& df, double target, double lo, double hi, int max_iter = 200) {
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < max_iter; ++it) {
    const double fx = f(x) - target;
    if (fx == 0.0) return x;
    if (fx < 0.0) lo = x; else hi = x;
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(lo), std::abs(hi))) break;
    const double d = df(x);
    double next = (d > 0.0 && std::isfinite(d)) ? x - fx / d : lo - 1.0;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == x) break;
    x = next;
  }
  return x;
}

}  // namespace detail

/// phi^{-1}(y) for y >= 0. The bracket comes from a1 t^{p-1} <= phi(t) <= a2 t^{p-1}
/// and is widened geometrically if phi does not straddle y on it.
inline double phi_inverse(const PhiOperator& op, double y) {
  if (y < 0.0 || std::isnan(y)) throw DomainError("phi_inverse needs y >= 0");
  if (y == 0.0) return 0.0;
  if (std::isinf(y)) return y;
  const double e = 1.0 / (op.p() - 1.0);
  if (op.kind() == PhiKind::PLaplacian) return std::pow(y, e);
  double lo = std::pow(y / op.a2(), e);
  double hi = std::pow(y / op.a1(), e);
  if (!(lo > 0.0)) lo = std::numeric_limits<double>::denorm_min();
  if (!std::isfinite(hi)) hi = std::numeric_limits<double>::max();
  int expand = 0;
  while (op.phi(lo) > y) {
    // The root lies below the smallest subnormal: 0 is the closest double.
    if (lo == std::numeric_limits<double>::denorm_min()) return 0.0;
    lo = std::max(0.5 * lo, std::numeric_limits<double>::denorm_min());
    if (++expand > 2000) throw NumericError("phi_inverse: no lower bracket");
  }
  while (op.phi(hi) < y) {
    hi *= 2.0;
    if (++expand > 200 || !std::isfinite(hi)) throw NumericError("phi_inverse: no upper bracket");
  }
  if (op.phi(lo) == y) return lo;
  if (op.phi(hi) == y) return hi;
  return detail::safeguarded_root([&](double t) { return op.phi(t); },
                                  [&](double t) { return op.phi_prime(t); }, y, lo, hi);
}

/// beta(t) = int_0^t B
inline double beta(const PotentialB& B, double t, const Quadrature& q = {}) {
  if (!(t > 0.0)) return 0.0;
  if (B.kind() == PotentialKind::Zero) return 0.0;
  Quadrature rel = q;
  rel.abs_tol = std::min(q.abs_tol, 1e-300);
  return integrate([&](double s) { return B(s); }, 0.0, t, rel);
}

/// K_mu(t) = int_mu^t s phi'(s) ds
inline double K_mu(const PhiOperator& op, double mu, double t, const Quadrature& q = {}) {
  if (mu < 0.0) throw DomainError("K_mu needs mu >= 0");
  if (t < mu) throw DomainError("K_mu needs t >= mu");
  if (t == mu) return 0.0;
  Quadrature rel = q;
  rel.abs_tol = std::min(q.abs_tol, 1e-300);
  return integrate([&](double s) { return s > 0.0 ? s * op.phi_prime(s) : 0.0; }, mu, t, rel);
}

/// Inverse of K_0 on [0, inf). K_0 is strictly increasing with K_0' (t) = t phi'(t).
inline double K_inverse(const PhiOperator& op, double y, const Quadrature& q = {}) {
  if (y < 0.0 || std::isnan(y)) throw DomainError("K_inverse needs y >= 0");
  if (y == 0.0) return 0.0;
  // t^p/(p a2) <= K_0(t) <= a1 t + a2 t^p / p under the derivative bounds.
  const double p = op.p();
  double lo = std::pow(y * p / (op.a2() + op.a1() * p), 1.0 / p);
  lo = std::min(lo, y / (op.a1() + op.a2()));
  double hi = std::pow(y * p * op.a2(), 1.0 / p);
  auto K = [&](double t) { return K_mu(op, 0.0, t, q); };
  int expand = 0;
  while (K(lo) > y) {
    lo *= 0.5;
    if (++expand > 200 || lo == 0.0) throw NumericError("K_inverse: no lower bracket");
  }
  while (K(hi) < y) {
    hi *= 2.0;
    if (++expand > 200 || !std::isfinite(hi)) throw NumericError("K_inverse: no upper bracket");
  }
  return detail::safeguarded_root(K, [&](double t) { return t * op.phi_prime(t); }, y, lo, hi, 100);
}

}  // namespace evanspot
