#pragma once

#include <cmath>
#include <functional>
#include <sstream>
#include <string>
#include <utility>

#include "evanspot/core/errors.hpp"

namespace evanspot {

enum class PhiKind { PLaplacian, Perturbed, Custom };

/// Gradient nonlinearity phi of the radial phi-Laplacian, with exponent p and the
/// pinching constants a1 t^{p-1} <= phi(t) <= a2 t^{p-1}.
///
/// `derivative_bounds` marks operators that also satisfy
///   t^{p-1}/a2 <= t phi'(t) <= a1 + a2 t^{p-1},
/// which the Keller-Osserman and Evans machinery require. Both bounds are verified on a
/// logarithmic sample grid at construction.
class PhiOperator {
 public:
  using Fn = std::function<double(double)>;

  /// phi(t) = t^{p-1}
  static PhiOperator p_laplacian(double p) {
    check_p(p);
    const double a2 = std::max({1.0, p - 1.0, 1.0 / (p - 1.0)});
    return PhiOperator(PhiKind::PLaplacian, p, 1.0, a2, nullptr, nullptr, true);
  }

  /// phi(t) = t^{p-1} + t^{p-1}/(1+t); pinched between t^{p-1} and 2 t^{p-1}.
  static PhiOperator perturbed(double p) {
    check_p(p);
    // t phi'(t) / t^{p-1} = (p-1) + (p-2) s + s^2 with s = 1/(1+t) in (0, 1].
    double lo = std::min(p - 1.0, 2.0 * (p - 1.0));
    const double s_star = -(p - 2.0) / 2.0;
    if (s_star > 0.0 && s_star < 1.0) lo = std::min(lo, (p - 1.0) + (p - 2.0) * s_star + s_star * s_star);
    const double hi = std::max(p - 1.0, 2.0 * (p - 1.0));
    const double a2 = std::max({2.0, hi, 1.0 / lo});
    return PhiOperator(PhiKind::Perturbed, p, 1.0, a2, nullptr, nullptr, true);
  }

  /// User-supplied phi. Without phi_prime, derivatives use central differences with
  /// step max(1e-6, 1e-6 t).
  static PhiOperator custom(Fn phi, double p, double a1, double a2, Fn phi_prime = nullptr,
                            bool derivative_bounds = false) {
    check_p(p);
    if (!phi) throw PreconditionError("custom phi needs a function");
    return PhiOperator(PhiKind::Custom, p, a1, a2, std::move(phi), std::move(phi_prime),
                       derivative_bounds);
  }

  PhiKind kind() const noexcept { return kind_; }
  double p() const noexcept { return p_; }
  double a1() const noexcept { return a1_; }
  double a2() const noexcept { return a2_; }
  bool derivative_bounds() const noexcept { return derivative_bounds_; }

  double phi(double t) const {
    if (t <= 0.0) return 0.0;
    switch (kind_) {
      case PhiKind::PLaplacian:
        return std::pow(t, p_ - 1.0);
      case PhiKind::Perturbed: {
        const double tp = std::pow(t, p_ - 1.0);
        return tp + tp / (1.0 + t);
      }
      case PhiKind::Custom:
        return phi_(t);
    }
    return 0.0;
  }

  double phi_prime(double t) const {
    switch (kind_) {
      case PhiKind::PLaplacian:
        return (p_ - 1.0) * std::pow(t, p_ - 2.0);
      case PhiKind::Perturbed: {
        const double s = 1.0 / (1.0 + t);
        return std::pow(t, p_ - 2.0) * ((p_ - 1.0) * (1.0 + s) - t * s * s);
      }
      case PhiKind::Custom: {
        if (phi_prime_) return phi_prime_(t);
        const double h = std::max(1e-6, 1e-6 * t);
        const double lo = std::max(0.0, t - h);
        return (phi_(t + h) - phi_(lo)) / (t + h - lo);
      }
    }
    return 0.0;
  }

  std::string name() const {
    std::ostringstream os;
    switch (kind_) {
      case PhiKind::PLaplacian:
        os << "p-laplacian:p=" << p_;
        break;
      case PhiKind::Perturbed:
        os << "perturbed:p=" << p_;
        break;
      case PhiKind::Custom:
        os << "custom:p=" << p_;
        break;
    }
    return os.str();
  }

 private:
  PhiOperator(PhiKind kind, double p, double a1, double a2, Fn phi, Fn phi_prime,
              bool derivative_bounds)
      : kind_(kind),
        p_(p),
        a1_(a1),
        a2_(a2),
        derivative_bounds_(derivative_bounds),
        phi_(std::move(phi)),
        phi_prime_(std::move(phi_prime)) {
    if (!(a1 > 0.0) || !(a2 > 0.0)) throw PreconditionError("phi constants a1, a2 must be positive");
    validate();
  }

  static void check_p(double p) {
    if (!(p > 1.0) || !std::isfinite(p)) throw PreconditionError("phi exponent p must be > 1");
  }

  void validate() const {
    if (phi(0.0) != 0.0 || (kind_ == PhiKind::Custom && phi_(0.0) != 0.0)) {
      throw PreconditionError("phi(0) must be 0");
    }
    constexpr double slack = 1e-12;
    double prev = 0.0;
    for (int k = 0; k <= 240; ++k) {
      const double t = std::pow(10.0, -6.0 + k * 0.05);  // [1e-6, 1e6]
      const double f = phi(t);
      const double tp = std::pow(t, p_ - 1.0);
      if (!(f > prev)) throw PreconditionError("phi must be strictly increasing on (0, inf)");
      prev = f;
      if (f < a1_ * tp * (1.0 - slack) || f > a2_ * tp * (1.0 + slack)) {
        throw PreconditionError("phi violates a1 t^{p-1} <= phi(t) <= a2 t^{p-1}");
      }
      if (derivative_bounds_) {
        const double tdp = t * phi_prime(t);
        if (tdp < tp / a2_ * (1.0 - 1e-6) || tdp > (a1_ + a2_ * tp) * (1.0 + 1e-6)) {
          throw PreconditionError(
              "phi violates t^{p-1}/a2 <= t phi'(t) <= a1 + a2 t^{p-1}");
        }
      }
    }
  }

  PhiKind kind_;
  double p_;
  double a1_;
  double a2_;
  bool derivative_bounds_;
  Fn phi_;
  Fn phi_prime_;
};

}  // namespace evanspot
