#pragma once

#include <stdexcept>
#include <string>

namespace circpc {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// A quadrature integrand that cannot be evaluated (e.g. log of a zero density).
class NonIntegrableError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Operation not defined for the requested normalization mode.
class UnsupportedModeError : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

/// No scaling parameter reproduces the requested tail probability.
class InfeasibleTailError : public std::runtime_error {
public:
  InfeasibleTailError(const std::string& what, double alpha_low, double alpha_high)
      : std::runtime_error(what), alpha_low_(alpha_low), alpha_high_(alpha_high) {}

  /// Open interval of tail probabilities the prior family can attain.
  [[nodiscard]] double alpha_low() const noexcept { return alpha_low_; }
  [[nodiscard]] double alpha_high() const noexcept { return alpha_high_; }

private:
  double alpha_low_;
  double alpha_high_;
};

/// MCMC started from a state with zero posterior density.
class InitializationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace circpc
