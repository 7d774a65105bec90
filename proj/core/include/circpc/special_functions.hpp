#pragma once

// Modified Bessel functions of the first kind (orders 0, 1, 2) and the
// ratio A(x) = I1(x)/I0(x) that appears in every von Mises formula.
//
// Evaluation is split at x = 15: below it the power series (all terms
// positive, no cancellation), above it the Hankel asymptotic expansion of
// the exponentially scaled function e^{-x} I_n(x). All functions are pure.

namespace circpc {

enum class BesselOrder { zero = 0, one = 1, two = 2 };

/// Switch point between the power series and the asymptotic expansion.
inline constexpr double kBesselSeriesLimit = 15.0;

/// I_n(x). Overflows to +inf for x above ~713; use bessel_i_scaled there.
[[nodiscard]] double bessel_i(BesselOrder order, double x);

/// e^{-x} I_n(x), finite for every finite x >= 0.
[[nodiscard]] double bessel_i_scaled(BesselOrder order, double x);

/// log I0(x) without overflow. Uses log1p near zero so that tiny
/// arguments keep full relative precision (log I0(x) ~ x^2/4).
[[nodiscard]] double log_bessel_i0(double x);

/// A(x) = I1(x)/I0(x) in [0, 1); exactly 0 at x = 0.
[[nodiscard]] double bessel_ratio(double x);

/// 1 - A(x), accurate to full relative precision as x -> infinity.
[[nodiscard]] double bessel_ratio_complement(double x);

/// A'(x) = 1 - A/x - A^2, with the limit 1/2 at x = 0.
[[nodiscard]] double bessel_ratio_derivative(double x);

/// A''(x), with the limit 0 at x = 0.
[[nodiscard]] double bessel_ratio_second_derivative(double x);

/// Bundle of A and its derivatives evaluated once.
struct BesselRatioJet {
  double ratio;        // A(x)
  double complement;   // 1 - A(x)
  double derivative;   // A'(x)
  double second;       // A''(x)
};

[[nodiscard]] BesselRatioJet bessel_ratio_jet(double x);

/// Inverse of A on [0, 1): the x with A(x) = r. Used for moment estimates.
[[nodiscard]] double inverse_bessel_ratio(double r);

} // namespace circpc
