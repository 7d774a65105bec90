#pragma once

#include "circpc/distributions.hpp"
#include "circpc/divergence.hpp"

#include <functional>
#include <string>
#include <variant>

namespace circpc {

/// Exponential prior b e^{-b kappa} for the von Mises concentration.
struct GammaOneB {
  double b;
};
/// 2 / (pi (1 + kappa^2))
struct H2 {};
/// kappa / (1 + kappa^2)^{3/2}
struct H3 {};
/// Beta(a, b) on [0, 1), for the wrapped Cauchy rho.
struct Beta {
  double a;
  double b;
};
/// 2 ell ~ Beta(a, b), on [0, 1/2), for the cardioid ell.
struct ScaledBetaHalf {
  double a;
  double b;
};
/// Uniform on [0, 1/2).
struct UniformHalf {};
/// Uniform location prior 1/(2 pi) on [0, 2 pi).
struct CircularUniformLocation {};
/// Joint conjugate prior I0(kappa)^{-c} exp(kappa R0 cos(mu - mu0)), known
/// only up to a constant and only as a function of (mu, kappa).
struct VonMisesConjugate {
  double c;
  double r0;
  Angle mu0;
};

using ReferencePrior = std::variant<GammaOneB, H2, H3, Beta, ScaledBetaHalf, UniformHalf,
                                    CircularUniformLocation, VonMisesConjugate>;

/// Short label such as "gamma(b=0.34)" or "beta(a=2,b=5)".
[[nodiscard]] std::string describe(const ReferencePrior& prior);

/// Throws DomainError for non-positive hyperparameters.
void validate(const ReferencePrior& prior);

/// Parameter support of a one-dimensional prior.
[[nodiscard]] ConcentrationSupport ref_support(const ReferencePrior& prior);

/// Family whose concentration the prior is meant for; throws for the
/// location and joint priors.
[[nodiscard]] Family ref_family(const ReferencePrior& prior);

/// Density on the parameter scale; +inf where a Beta density diverges at
/// an endpoint. Throws DomainError for VonMisesConjugate, which is joint.
[[nodiscard]] double ref_pdf(const ReferencePrior& prior, double param);
[[nodiscard]] double ref_log_pdf(const ReferencePrior& prior, double param);

/// d/dparam log ref_pdf at an interior point.
[[nodiscard]] double ref_log_pdf_derivative(const ReferencePrior& prior, double param);

/// Log density of z = to_unconstrained(param) for concentration priors.
[[nodiscard]] double ref_log_pdf_unconstrained(const ReferencePrior& prior, double z);

/// Unnormalized joint conjugate density and its log.
[[nodiscard]] double conjugate_log_density(const VonMisesConjugate& prior, Angle mu, double kappa);
[[nodiscard]] double conjugate_pdf(const VonMisesConjugate& prior, Angle mu, double kappa);

// ---------------------------------------------------------------------------
// Distance scale

using DensityFn = std::function<double(double)>;

/// pi(xi(d)) |dxi/dd| with the inverse map differentiated numerically.
/// At an endpoint of the distance range the one-sided limit is estimated
/// from a sequence approaching it (0 or +inf when the sequence decays or
/// grows geometrically).
[[nodiscard]] double distance_scale_pdf(const ReferencePrior& prior, const DistanceProfile& profile,
                                        double d);

/// The same for an arbitrary parameter-scale density.
[[nodiscard]] double distance_scale_pdf(const DensityFn& pdf, const DistanceProfile& profile,
                                        double d);

/// Closed-form Beta(a, b) density of the wrapped Cauchy distance, using
/// rho(d) = sqrt(1 - e^{-d^2}).
[[nodiscard]] double beta_distance_scale_pdf_closed_form(double a, double b, double d);

struct AuditReport {
  double density_at_zero;   // one-sided limit at the base model; may be +inf
  bool monotone_decreasing;
  double argmax_d;
  std::string classification;  // "base-model-favoring" or "complexity-favoring"
};

/// Evaluates the distance-scale density on a 1000-point grid over the
/// distance range (capped at d = 4 when unbounded).
[[nodiscard]] AuditReport overfit_audit(const ReferencePrior& prior, const DistanceProfile& profile);
[[nodiscard]] AuditReport overfit_audit(const DensityFn& pdf, const DistanceProfile& profile);

} // namespace circpc
