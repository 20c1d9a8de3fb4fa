#pragma once

// Boost 1.74 pchip calls unqualified isnan; the C header puts it in the global namespace.
#include <math.h>

#include <boost/math/interpolators/pchip.hpp>

#include <cmath>
#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "evanspot/core/errors.hpp"

namespace evanspot {

enum class WarpKind { Euclidean, Hyperbolic, PowerExp, Tabulated };

/// Rotationally symmetric model: R^m with metric dr^2 + g(r)^2 dtheta^2.
///
/// Besides g and g', the manifold exposes log g, which every volume ratio in the
/// library is computed through so that fast-growing warps (sinh r, r*exp(r^3)) do
/// not overflow at large radii.
class ModelManifold {
 public:
  static ModelManifold euclidean(int m) { return ModelManifold(m, WarpKind::Euclidean, 0.0); }
  static ModelManifold hyperbolic(int m) { return ModelManifold(m, WarpKind::Hyperbolic, 0.0); }

  /// g(r) = r * exp(r^alpha), alpha > 0.
  static ModelManifold power_exp(int m, double alpha) {
    if (!(alpha > 0.0)) throw PreconditionError("power-exp warp needs alpha > 0");
    return ModelManifold(m, WarpKind::PowerExp, alpha);
  }

  /// Samples (r_i, g_i), strictly increasing in r, interpolated by monotone cubics.
  /// Evaluation outside [r_0, r_last] throws. When `monotone` is set the samples must
  /// be non-decreasing.
  static ModelManifold tabulated(int m, std::vector<double> r, std::vector<double> g,
                                 bool monotone = false) {
    ModelManifold M(m, WarpKind::Tabulated, 0.0);
    M.init_table(std::move(r), std::move(g), monotone);
    return M;
  }

  int dimension() const noexcept { return m_; }
  WarpKind kind() const noexcept { return kind_; }
  double alpha() const noexcept { return alpha_; }

  /// True when g' >= 0 is known to hold on the evaluation range.
  bool monotone() const noexcept { return monotone_; }

  double r_min() const noexcept { return table_ ? table_->r.front() : 0.0; }
  double r_max() const noexcept {
    return table_ ? table_->r.back() : std::numeric_limits<double>::infinity();
  }

  double g(double r) const {
    switch (kind_) {
      case WarpKind::Euclidean:
        return r;
      case WarpKind::Hyperbolic:
        return std::sinh(r);
      case WarpKind::PowerExp:
        return r * std::exp(std::pow(r, alpha_));
      case WarpKind::Tabulated:
        check_range(r);
        return (*table_->spline)(r);
    }
    return 0.0;
  }

  double g_prime(double r) const {
    switch (kind_) {
      case WarpKind::Euclidean:
        return 1.0;
      case WarpKind::Hyperbolic:
        return std::cosh(r);
      case WarpKind::PowerExp: {
        const double ra = std::pow(r, alpha_);
        return std::exp(ra) * (1.0 + alpha_ * ra);
      }
      case WarpKind::Tabulated: {
        check_range(r);
        const double h = std::max(1e-6, 1e-6 * r);
        const double lo = std::max(table_->r.front(), r - h);
        const double hi = std::min(table_->r.back(), r + h);
        return ((*table_->spline)(hi) - (*table_->spline)(lo)) / (hi - lo);
      }
    }
    return 0.0;
  }

  /// log g(r) for r > 0, evaluated without forming g when g would overflow.
  double log_g(double r) const {
    switch (kind_) {
      case WarpKind::Euclidean:
        return std::log(r);
      case WarpKind::Hyperbolic:
        // sinh r = e^r (1 - e^{-2r}) / 2
        return r < 20.0 ? std::log(std::sinh(r)) : r + std::log1p(-std::exp(-2.0 * r)) - M_LN2;
      case WarpKind::PowerExp:
        return std::log(r) + std::pow(r, alpha_);
      case WarpKind::Tabulated:
        return std::log(g(r));
    }
    return 0.0;
  }

  /// log g(r - d) - log g(r) for 0 <= d <= r, without the cancellation of subtracting
  /// two large logarithms (log g(r) ~ r^3 for the power-exp warp).
  double log_g_drop(double r, double d) const {
    if (d == 0.0) return 0.0;
    const double t = r - d;
    switch (kind_) {
      case WarpKind::Euclidean:
        return std::log1p(-d / r);
      case WarpKind::Hyperbolic:
        if (t < 20.0) return log_g(t) - log_g(r);
        return -d + std::log1p(-std::exp(-2.0 * t)) - std::log1p(-std::exp(-2.0 * r));
      case WarpKind::PowerExp: {
        const double l = std::log1p(-d / r);
        return l + std::pow(r, alpha_) * std::expm1(alpha_ * l);
      }
      case WarpKind::Tabulated:
        return log_g(t) - log_g(r);
    }
    return 0.0;
  }

  /// Tag in the preset registry syntax, e.g. "power-exp:alpha=3".
  std::string name() const {
    switch (kind_) {
      case WarpKind::Euclidean:
        return "euclidean";
      case WarpKind::Hyperbolic:
        return "hyperbolic";
      case WarpKind::PowerExp: {
        std::ostringstream os;
        os << "power-exp:alpha=" << alpha_;
        return os.str();
      }
      case WarpKind::Tabulated:
        return "tabulated";
    }
    return "?";
  }

 private:
  struct Table {
    std::vector<double> r;
    std::vector<double> g;
    std::unique_ptr<boost::math::interpolators::pchip<std::vector<double>>> spline;
  };

  ModelManifold(int m, WarpKind kind, double alpha)
      : m_(m), kind_(kind), alpha_(alpha), monotone_(kind != WarpKind::Tabulated) {
    if (m < 2) throw PreconditionError("model manifold dimension must be >= 2");
  }

  void init_table(std::vector<double> r, std::vector<double> g, bool monotone) {
    if (r.size() != g.size()) throw PreconditionError("tabulated warp: column lengths differ");
    if (r.size() < 4) throw PreconditionError("tabulated warp needs at least 4 samples");
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (!std::isfinite(r[i]) || !std::isfinite(g[i])) {
        throw PreconditionError("tabulated warp: non-finite sample");
      }
      if (i > 0 && !(r[i] > r[i - 1])) {
        throw PreconditionError("tabulated warp: radii must be strictly increasing");
      }
      if (r[i] < 0.0) throw PreconditionError("tabulated warp: negative radius");
      if (r[i] > 0.0 && !(g[i] > 0.0)) {
        throw PreconditionError("tabulated warp: g must be positive for r > 0");
      }
      if (monotone && i > 0 && g[i] < g[i - 1]) {
        throw PreconditionError("tabulated warp flagged monotone but g decreases");
      }
    }
    // g(0) = 0, g'(0) = 1, checked at the smallest sample only.
    double slope0;
    if (r[0] == 0.0) {
      if (std::abs(g[0]) > 1e-12) throw PreconditionError("tabulated warp: g(0) must be 0");
      slope0 = (g[1] - g[0]) / (r[1] - r[0]);
    } else {
      slope0 = g[0] / r[0];
    }
    if (std::abs(slope0 - 1.0) > 0.05) {
      throw PreconditionError("tabulated warp: g'(0) = 1 fails at the smallest sample");
    }
    auto table = std::make_shared<Table>();
    table->r = r;
    table->g = g;
    table->spline = std::make_unique<boost::math::interpolators::pchip<std::vector<double>>>(
        std::move(r), std::move(g));
    table_ = std::move(table);
    monotone_ = monotone;
  }

  void check_range(double r) const {
    if (r < table_->r.front() || r > table_->r.back()) {
      std::ostringstream os;
      os << "tabulated warp evaluated at r=" << r << " outside [" << table_->r.front() << ", "
         << table_->r.back() << "]";
      throw DomainError(os.str());
    }
  }

  int m_;
  WarpKind kind_;
  double alpha_;
  bool monotone_;
  std::shared_ptr<const Table> table_;
};

}  // namespace evanspot
