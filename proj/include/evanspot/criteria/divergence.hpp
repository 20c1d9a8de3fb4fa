#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "evanspot/core/errors.hpp"
#include "evanspot/core/quadrature.hpp"

namespace evanspot::criteria {

enum class Verdict { Diverges, Converges, Inconclusive };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Diverges:
      return "Diverges";
    case Verdict::Converges:
      return "Converges";
    case Verdict::Inconclusive:
      return "Inconclusive";
  }
  return "?";
}

struct DivergenceConfig {
  double r_max = 1e4;
  double divergence_threshold = 1e6;
  double slope_margin = 0.15;
  int fit_samples = 41;
  /// Converges also needs the extrapolated tail to be at most this fraction of the
  /// partial integral.
  double tail_fraction = 1.0;
  Quadrature quad{};
};

/// Numerical surrogate for "f is (not) in L^1 near +infinity".
///
/// slope_estimate is the least-squares slope of log f against log r over the last
/// decade [r_max/10, r_max]. When it sits inside the band -1 +/- margin, the second
/// statistic log_slope_estimate fits log(r f(r)) against log log r on the same samples;
/// this separates 1/r (flat in that variable) from 1/(r log^2 r). `margin` is the
/// distance of the deciding slope from the integrability boundary -1.
struct DivergenceVerdict {
  Verdict verdict = Verdict::Inconclusive;
  double partial_integral = 0.0;
  double slope_estimate = std::numeric_limits<double>::quiet_NaN();
  double log_slope_estimate = std::numeric_limits<double>::quiet_NaN();
  double tail_estimate = std::numeric_limits<double>::quiet_NaN();
  double r_max = 0.0;
  double margin = 0.0;
};

namespace detail {

inline double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  return sxy / sxx;
}

}  // namespace detail

inline DivergenceVerdict test_L1_at_infinity(const std::function<double(double)>& f, double r0,
                                             const DivergenceConfig& cfg = {}) {
  if (!(r0 > 0.0)) throw PreconditionError("test_L1_at_infinity needs R0 > 0");
  if (!(cfg.r_max > 10.0 * r0)) throw PreconditionError("test_L1_at_infinity needs r_max > 10 R0");
  if (!(cfg.slope_margin > 0.0) || cfg.fit_samples < 3) {
    throw PreconditionError("invalid divergence configuration");
  }

  auto eval = [&](double r) {
    const double v = f(r);
    if (std::isnan(v) || v < 0.0) {
      throw NumericError("integrand evaluation failed at r=" + std::to_string(r));
    }
    return v;
  };

  DivergenceVerdict out;
  out.r_max = cfg.r_max;

  // Partial integral in s = log r, on panels of width <= 1/2.
  const double s0 = std::log(r0), s1 = std::log(cfg.r_max);
  const int panels = std::max(1, static_cast<int>(std::ceil((s1 - s0) / 0.5)));
  std::vector<double> breaks(panels + 1);
  for (int i = 0; i <= panels; ++i) breaks[i] = s0 + (s1 - s0) * i / panels;
  breaks.back() = s1;
  out.partial_integral =
      integrate_detailed([&](double s) { const double r = std::exp(s); return eval(r) * r; },
                         std::span<const double>(breaks), cfg.quad)
          .value;

  // Slope over the last decade.
  std::vector<double> lx, ly, llx, lly;
  for (int k = 0; k < cfg.fit_samples; ++k) {
    const double r = cfg.r_max * std::pow(10.0, -1.0 + static_cast<double>(k) / (cfg.fit_samples - 1));
    const double v = eval(r);
    if (v > 0.0 && std::isfinite(v)) {
      lx.push_back(std::log(r));
      ly.push_back(std::log(v));
      llx.push_back(std::log(std::log(r)));
      lly.push_back(std::log(v * r));
    }
  }
  const double f_end = eval(cfg.r_max);
  const bool vanishing_tail = lx.size() < 3 || !(f_end > 0.0);
  out.slope_estimate = vanishing_tail ? -std::numeric_limits<double>::infinity()
                                      : detail::least_squares_slope(lx, ly);
  const double k1 = out.slope_estimate;
  const double margin = cfg.slope_margin;

  if (out.partial_integral > cfg.divergence_threshold) {
    out.verdict = Verdict::Diverges;
    out.margin = std::isfinite(k1) ? std::abs(k1 + 1.0) : 0.0;
    return out;
  }
  if (k1 > -1.0 + margin) {
    out.verdict = Verdict::Diverges;
    out.margin = k1 + 1.0;
    return out;
  }
  if (k1 < -1.0 - margin) {
    out.tail_estimate = vanishing_tail ? 0.0 : f_end * cfg.r_max / (-k1 - 1.0);
    out.margin = -1.0 - k1;
    out.verdict = out.tail_estimate <= cfg.tail_fraction * out.partial_integral
                      ? Verdict::Converges
                      : Verdict::Inconclusive;
    return out;
  }
  // Borderline power: decide on the logarithmic scale, never toward convergence.
  out.log_slope_estimate = detail::least_squares_slope(llx, lly);
  const double k2 = out.log_slope_estimate;
  if (k2 > -margin) {
    out.verdict = Verdict::Diverges;
    out.margin = k2 + 1.0;
  } else {
    out.verdict = Verdict::Inconclusive;
    out.margin = std::abs(k1 + 1.0);
  }
  return out;
}

}  // namespace evanspot::criteria
