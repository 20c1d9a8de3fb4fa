#pragma once

#include <limits>
#include <stdexcept>
#include <string>

namespace evanspot {

/// Argument outside the mathematical domain of an operation (r <= 0, t < mu, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A hypothesis required by an operation does not hold for the supplied data.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Iterative or adaptive numerics failed; carries the best error estimate reached.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what,
                        double estimate = std::numeric_limits<double>::quiet_NaN())
      : std::runtime_error(what), estimate_(estimate) {}

  double estimate() const noexcept { return estimate_; }

 private:
  double estimate_;
};

/// The constraint set of an obstacle problem is empty.
class ConstraintError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Two independent routes to the same quantity disagree.
class ConsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace evanspot
