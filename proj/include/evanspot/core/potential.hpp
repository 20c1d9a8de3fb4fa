#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <utility>

#include "evanspot/core/errors.hpp"

namespace evanspot {

enum class PotentialKind { Zero, LinearPower, Plateau, Superlinear, Custom };

/// Zero-order term B(t) of L_F u = L_phi u - B(u). B vanishes on (-inf, 0], is
/// non-decreasing and satisfies B(t) t >= 0; the sampled checks run at construction.
class PotentialB {
 public:
  using Fn = std::function<double(double)>;

  static PotentialB zero() { return PotentialB(PotentialKind::Zero, 0.0, 0.0, nullptr, 0.0); }

  /// B(t) = lambda t^{p-1}
  static PotentialB linear_power(double p, double lambda) {
    if (!(p > 1.0)) throw PreconditionError("linear-power potential needs p > 1");
    if (!(lambda >= 0.0)) throw PreconditionError("linear-power potential needs lambda >= 0");
    return PotentialB(PotentialKind::LinearPower, p, lambda, nullptr, lambda);
  }

  /// B(t) = max(t - T, 0)^{p-1}; vanishes on [0, T].
  static PotentialB plateau(double T, double p) {
    if (!(T > 0.0)) throw PreconditionError("plateau potential needs T > 0");
    if (!(p > 1.0)) throw PreconditionError("plateau potential needs p > 1");
    return PotentialB(PotentialKind::Plateau, p, T, nullptr, 1.0);
  }

  /// B(t) = t^q
  static PotentialB superlinear(double q) {
    if (!(q > 0.0)) throw PreconditionError("superlinear potential needs q > 0");
    return PotentialB(PotentialKind::Superlinear, q, 0.0, nullptr, std::nullopt);
  }

  static PotentialB custom(Fn B, std::optional<double> b1 = std::nullopt) {
    if (!B) throw PreconditionError("custom potential needs a function");
    return PotentialB(PotentialKind::Custom, 0.0, 0.0, std::move(B), b1);
  }

  PotentialKind kind() const noexcept { return kind_; }

  /// Constant in B(t) <= b1 t^{p-1}, when known.
  std::optional<double> b1() const noexcept { return b1_; }

  double operator()(double t) const {
    if (!(t > 0.0)) return 0.0;
    switch (kind_) {
      case PotentialKind::Zero:
        return 0.0;
      case PotentialKind::LinearPower:
        return param_ * std::pow(t, exponent_ - 1.0);
      case PotentialKind::Plateau:
        return t > param_ ? std::pow(t - param_, exponent_ - 1.0) : 0.0;
      case PotentialKind::Superlinear:
        return std::pow(t, exponent_);
      case PotentialKind::Custom:
        return fn_(t);
    }
    return 0.0;
  }

  /// Antiderivative in closed form where one exists (presets only). Tests use it as an
  /// oracle for the quadrature route.
  std::optional<double> exact_beta(double t) const {
    if (!(t > 0.0)) return 0.0;
    switch (kind_) {
      case PotentialKind::Zero:
        return 0.0;
      case PotentialKind::LinearPower:
        return param_ * std::pow(t, exponent_) / exponent_;
      case PotentialKind::Plateau:
        return t > param_ ? std::pow(t - param_, exponent_) / exponent_ : 0.0;
      case PotentialKind::Superlinear:
        return std::pow(t, exponent_ + 1.0) / (exponent_ + 1.0);
      case PotentialKind::Custom:
        return std::nullopt;
    }
    return std::nullopt;
  }

  std::string name() const {
    std::ostringstream os;
    switch (kind_) {
      case PotentialKind::Zero:
        os << "zero";
        break;
      case PotentialKind::LinearPower:
        os << "linear-power:p=" << exponent_ << ",lambda=" << param_;
        break;
      case PotentialKind::Plateau:
        os << "plateau:T=" << param_ << ",p=" << exponent_;
        break;
      case PotentialKind::Superlinear:
        os << "superlinear:q=" << exponent_;
        break;
      case PotentialKind::Custom:
        os << "custom";
        break;
    }
    return os.str();
  }

 private:
  PotentialB(PotentialKind kind, double exponent, double param, Fn fn, std::optional<double> b1)
      : kind_(kind), exponent_(exponent), param_(param), fn_(std::move(fn)), b1_(b1) {
    validate();
  }

  void validate() const {
    if (kind_ == PotentialKind::Custom && fn_(0.0) != 0.0) {
      throw PreconditionError("potential must satisfy B(0) = 0");
    }
    double prev = 0.0;
    for (int k = 0; k <= 200; ++k) {
      const double t = std::pow(10.0, -6.0 + k * 0.05);  // [1e-6, 1e4]
      const double b = (*this)(t);
      if (!std::isfinite(b) || b < 0.0) throw PreconditionError("potential must satisfy B(t) t >= 0");
      if (b < prev) throw PreconditionError("potential must be non-decreasing");
      prev = b;
    }
  }

  PotentialKind kind_;
  double exponent_;
  double param_;
  Fn fn_;
  std::optional<double> b1_;
};

}  // namespace evanspot
