#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include "evanspot/core/errors.hpp"

namespace evanspot {

/// Tolerances for the adaptive Gauss-Kronrod integrator.
struct Quadrature {
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  int max_intervals = 5000;

  void validate() const {
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) {
      throw PreconditionError("quadrature tolerances must be positive");
    }
    if (max_intervals < 1) throw PreconditionError("quadrature needs max_intervals >= 1");
  }
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  int intervals = 0;
};

namespace detail {

// 7-point Gauss / 15-point Kronrod abscissae and weights (QUADPACK qk15). The panel keeps
// QUADPACK's scaled error estimate and roundoff floor, which the absolute tolerance on
// near-zero integrals relies on.
inline constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

template <class F>
Panel gauss_kronrod15(F& f, double a, double b) {
  const double centr = 0.5 * (a + b);
  const double hlgth = 0.5 * (b - a);
  const double dhlgth = std::abs(hlgth);

  double fv1[7], fv2[7];
  const double fc = f(centr);
  double resg = fc * kWg[3];
  double resk = fc * kWgk[7];
  double resabs = std::abs(resk);
  for (int j = 0; j < 3; ++j) {
    const int jtw = 2 * j + 1;
    const double absc = hlgth * kXgk[jtw];
    const double f1 = f(centr - absc);
    const double f2 = f(centr + absc);
    fv1[jtw] = f1;
    fv2[jtw] = f2;
    resg += kWg[j] * (f1 + f2);
    resk += kWgk[jtw] * (f1 + f2);
    resabs += kWgk[jtw] * (std::abs(f1) + std::abs(f2));
  }
  for (int j = 0; j < 4; ++j) {
    const int jtwm1 = 2 * j;
    const double absc = hlgth * kXgk[jtwm1];
    const double f1 = f(centr - absc);
    const double f2 = f(centr + absc);
    fv1[jtwm1] = f1;
    fv2[jtwm1] = f2;
    resk += kWgk[jtwm1] * (f1 + f2);
    resabs += kWgk[jtwm1] * (std::abs(f1) + std::abs(f2));
  }
  const double reskh = resk * 0.5;
  double resasc = kWgk[7] * std::abs(fc - reskh);
  for (int j = 0; j < 7; ++j) {
    resasc += kWgk[j] * (std::abs(fv1[j] - reskh) + std::abs(fv2[j] - reskh));
  }
  const double result = resk * hlgth;
  resabs *= dhlgth;
  resasc *= dhlgth;
  double abserr = std::abs((resk - resg) * hlgth);
  if (resasc != 0.0 && abserr != 0.0) {
    abserr = resasc * std::min(1.0, std::pow(200.0 * abserr / resasc, 1.5));
  }
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) {
    abserr = std::max(50.0 * eps * resabs, abserr);
  }
  if (!std::isfinite(result) || !std::isfinite(abserr)) {
    throw NumericError("integrand is not finite on [" + std::to_string(a) + ", " +
                       std::to_string(b) + "]");
  }
  return {a, b, result, abserr};
}

}  // namespace detail

/// Globally adaptive G7K15 integration over [breaks.front(), breaks.back()], with the
/// breakpoints as the initial partition. The worst panel is bisected until the summed
/// error estimate meets max(abs_tol, rel_tol*|I|).
template <class F>
QuadratureResult integrate_detailed(F&& f, std::span<const double> breaks,
                                    const Quadrature& q) {
  q.validate();
  if (breaks.size() < 2) return {};
  std::priority_queue<detail::Panel> open;
  double value = 0.0;
  double error = 0.0;
  double frozen_error = 0.0;  // panels too narrow to split further
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    if (breaks[i] == breaks[i + 1]) continue;
    auto panel = detail::gauss_kronrod15(f, breaks[i], breaks[i + 1]);
    value += panel.value;
    error += panel.error;
    open.push(panel);
  }
  int intervals = static_cast<int>(open.size());
  auto tolerance = [&] { return std::max(q.abs_tol, q.rel_tol * std::abs(value)); };
  while (error > tolerance() && !open.empty()) {
    if (intervals >= q.max_intervals) {
      throw NumericError("adaptive quadrature did not converge (error estimate " +
                         std::to_string(error) + ")",
                         error);
    }
    auto worst = open.top();
    open.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= std::min(worst.a, worst.b) || mid >= std::max(worst.a, worst.b)) {
      frozen_error += worst.error;
      if (frozen_error > tolerance()) {
        throw NumericError("adaptive quadrature hit interval resolution limit", error);
      }
      continue;
    }
    auto left = detail::gauss_kronrod15(f, worst.a, mid);
    auto right = detail::gauss_kronrod15(f, mid, worst.b);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    open.push(left);
    open.push(right);
    ++intervals;
  }
  // Re-sum to drop the accumulated cancellation from incremental updates.
  double total = 0.0;
  double total_err = frozen_error;
  while (!open.empty()) {
    total += open.top().value;
    total_err += open.top().error;
    open.pop();
  }
  return {total, total_err, intervals};
}

template <class F>
double integrate(F&& f, double a, double b, const Quadrature& q = {}) {
  if (a == b) return 0.0;
  if (a > b) return -integrate(f, b, a, q);
  const double breaks[2] = {a, b};
  return integrate_detailed(f, std::span<const double>(breaks, 2), q).value;
}

/// Breakpoints on [a, b] that halve geometrically toward b. Used for integrands whose
/// mass concentrates in a thin layer at the right endpoint.
inline std::vector<double> graded_breaks_right(double a, double b, int max_levels = 60) {
  std::vector<double> pts{a};
  const double width = b - a;
  for (int k = 1; k <= max_levels; ++k) {
    const double x = b - width * std::ldexp(1.0, -k);
    if (!(x > pts.back()) || !(x < b)) break;
    pts.push_back(x);
  }
  pts.push_back(b);
  return pts;
}

/// Mirror image of graded_breaks_right: halving toward a.
inline std::vector<double> graded_breaks_left(double a, double b, int max_levels = 60) {
  std::vector<double> pts{b};
  const double width = b - a;
  for (int k = 1; k <= max_levels; ++k) {
    const double x = a + width * std::ldexp(1.0, -k);
    if (!(x < pts.back()) || !(x > a)) break;
    pts.push_back(x);
  }
  pts.push_back(a);
  std::reverse(pts.begin(), pts.end());
  return pts;
}

template <class F>
double integrate_graded_left(F&& f, double a, double b, const Quadrature& q = {}) {
  if (a == b) return 0.0;
  if (a > b) throw DomainError("integrate_graded_left needs a <= b");
  const auto pts = graded_breaks_left(a, b);
  return integrate_detailed(f, std::span<const double>(pts), q).value;
}

template <class F>
double integrate_graded_right(F&& f, double a, double b, const Quadrature& q = {}) {
  if (a == b) return 0.0;
  if (a > b) throw DomainError("integrate_graded_right needs a <= b");
  const auto pts = graded_breaks_right(a, b);
  return integrate_detailed(f, std::span<const double>(pts), q).value;
}

}  // namespace evanspot
