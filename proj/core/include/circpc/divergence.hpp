#pragma once

#include "circpc/distributions.hpp"

#include <cstddef>
#include <string_view>

namespace circpc {

/// Simplest member of a family that complexity is measured against.
enum class BaseModel { Uniform, PointMass, CardioidCurve };

[[nodiscard]] std::string_view to_string(BaseModel base);
/// Accepts "uniform", "point-mass"/"pointmass"/"pm", "curve"/"cardioid-curve".
[[nodiscard]] BaseModel parse_base_model(std::string_view text);

enum class Direction { IncreasingInParam, DecreasingInParam };

/// The monotone map between a concentration parameter and its distance
/// d = sqrt(KLD) from the base model, for one supported (family, base) pair:
///
///   VonMises      / Uniform        d in [0, inf)          increasing
///   VonMises      / PointMass      d in [0, 1]            decreasing
///   Cardioid      / Uniform        d in [0, sqrt(1-log2)] increasing
///   Cardioid      / CardioidCurve  d in [0, sqrt(log2)]   decreasing
///   WrappedCauchy / Uniform        d in [0, inf)          increasing
struct DistanceProfile {
  Family family = Family::VonMises;
  BaseModel base = BaseModel::Uniform;
  double d_min = 0.0;
  double d_max = 0.0;
  Direction direction = Direction::IncreasingInParam;

  /// Throws DomainError for unsupported pairs.
  [[nodiscard]] static DistanceProfile make(Family family, BaseModel base);

  [[nodiscard]] ConcentrationSupport support() const { return concentration_support(family); }
  [[nodiscard]] bool increasing() const noexcept {
    return direction == Direction::IncreasingInParam;
  }
  /// Distance at the lower end of the parameter support.
  [[nodiscard]] double distance_at_support_min() const noexcept {
    return increasing() ? d_min : d_max;
  }
};

// ---------------------------------------------------------------------------
// Closed-form divergences

/// KLD(vM(kappa) || vM(kappa0)) = log I0(k0) - log I0(k) + (k - k0) A(k), clamped at 0.
[[nodiscard]] double kld_vm(double kappa, double kappa0);

/// KLD between two cardioids with concentrations ell and ell0 > 0.
[[nodiscard]] double kld_cardioid(double ell, double ell0);

/// KLD(WC(rho) || uniform) = -log(1 - rho^2).
[[nodiscard]] double kld_wc(double rho);

/// Trapezoid quadrature of int_0^{2 pi} p log(p/q) on `nodes` equispaced
/// nodes. Throws NonIntegrableError if q vanishes on the grid.
[[nodiscard]] double kld_numeric(const DistributionSpec& p, const DistributionSpec& q,
                                 std::size_t nodes = 20001);

// ---------------------------------------------------------------------------
// Distance maps

[[nodiscard]] double distance(const DistanceProfile& profile, double param);

/// Signed dd/dparam. Finite limits are returned at the base model itself.
[[nodiscard]] double distance_derivative(const DistanceProfile& profile, double param);

/// d/dparam log |dd/dparam|, used by log-density gradients.
[[nodiscard]] double log_abs_distance_derivative_slope(const DistanceProfile& profile,
                                                       double param);

/// The parameter whose distance equals d (bisection on the monotone map).
/// Endpoints that are limits rather than attained values are reported as
/// the nearest representable parameter: +inf for the von Mises point mass,
/// the largest double below 1/2 for the cardioid curve.
[[nodiscard]] double inverse_distance(const DistanceProfile& profile, double d);

// ---------------------------------------------------------------------------
// Unconstrained coordinates
//
// z = log kappa (von Mises), logit(2 ell) (cardioid), logit rho (wrapped
// Cauchy). Working in z keeps full precision next to the open end of the
// support (rho -> 1, ell -> 1/2, kappa beyond the double range), which is
// where heavy-tailed priors keep visible mass.

[[nodiscard]] double to_unconstrained(Family family, double param);
[[nodiscard]] double from_unconstrained(Family family, double z);
/// log |dparam/dz|
[[nodiscard]] double log_abs_param_jacobian(Family family, double z);

[[nodiscard]] double distance_unconstrained(const DistanceProfile& profile, double z);
/// log |dd/dz|
[[nodiscard]] double log_abs_distance_derivative_unconstrained(const DistanceProfile& profile,
                                                               double z);
/// The z with distance_unconstrained(z) == d; +-inf at limit endpoints.
[[nodiscard]] double inverse_distance_unconstrained(const DistanceProfile& profile, double d);

} // namespace circpc
