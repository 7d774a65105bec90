#pragma once

#include "circpc/distributions.hpp"
#include "circpc/divergence.hpp"

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

namespace circpc {

/// How the exponential-in-distance density is normalized.
///
/// Truncated renormalizes over the finite distance range so the density
/// integrates to one on the parameter support. PaperExact keeps the
/// untruncated exponential in d, which for the von Mises point-mass and the
/// cardioid-curve priors leave mass 1 - e^{-lambda d_max} in total.
enum class Normalization { Truncated, PaperExact };

[[nodiscard]] std::string_view to_string(Normalization mode);
/// Accepts "truncated" and "paper-exact"/"paper".
[[nodiscard]] Normalization parse_normalization(std::string_view text);

struct PcPrior {
  Family family = Family::VonMises;
  BaseModel base = BaseModel::Uniform;
  double lambda = 1.0;
  Normalization normalization = Normalization::Truncated;

  /// Validated construction; throws DomainError for unsupported pairs or lambda <= 0.
  [[nodiscard]] static PcPrior make(Family family, BaseModel base, double lambda,
                                    Normalization normalization = Normalization::Truncated);
  void validate() const;
  [[nodiscard]] DistanceProfile profile() const { return DistanceProfile::make(family, base); }
};

/// Constant Z dividing lambda e^{-lambda d} |d'|.
[[nodiscard]] double normalizing_constant(const PcPrior& prior);

[[nodiscard]] double pc_pdf(const PcPrior& prior, double param);
[[nodiscard]] double pc_log_pdf(const PcPrior& prior, double param);
[[nodiscard]] double pc_cdf(const PcPrior& prior, double param);

/// Density of z = to_unconstrained(param), so that exp() integrates over
/// the real line. Finite everywhere, including where the parameter-scale
/// density is too small or too large to represent.
[[nodiscard]] double pc_log_pdf_unconstrained(const PcPrior& prior, double z);

/// d/dparam log pc_pdf at an interior point.
[[nodiscard]] double pc_log_pdf_derivative(const PcPrior& prior, double param);

/// Inverse CDF. Throws UnsupportedModeError when the prior's CDF does not
/// run from 0 to 1 (PaperExact point-mass and cardioid-curve priors).
[[nodiscard]] double pc_quantile(const PcPrior& prior, double p);

/// Inverse-CDF draws, deterministic in `seed`.
[[nodiscard]] std::vector<double> pc_sample(const PcPrior& prior, std::size_t n,
                                            std::uint64_t seed);

// ---------------------------------------------------------------------------
// Tail calibration
//
// A tail statement P(Q(param) > U) = alpha is made on an interpretable
// scale Q: 2 pi/(1 + kappa) radians for von Mises, the cardiodity rate
// 2 ell for the cardioid, 2 pi (1 - rho) radians for the wrapped Cauchy.

struct TailSpec {
  double U = 0.0;
  double alpha = 0.5;

  /// vM and WC: U in (0, 2 pi]; cardioid: U in (0, 1); alpha in (0, 1).
  void validate(Family family) const;
};

[[nodiscard]] double tail_transform(Family family, double param);

/// The parameter value at which Q equals U.
[[nodiscard]] double tail_threshold(Family family, double U);

/// P(Q(param) > U) under the prior's own CDF.
[[nodiscard]] double tail_probability(const PcPrior& prior, double U);

/// Open interval of tail probabilities reachable by a Truncated prior as
/// lambda ranges over (0, inf).
struct TailRange {
  double low;
  double high;
};
[[nodiscard]] TailRange attainable_tail_range(Family family, BaseModel base, double U);

/// lambda with P(Q > U) = alpha under the Truncated CDF, found by bisection
/// on log lambda over [1e-8, 1e6] (widened once). Throws InfeasibleTailError.
[[nodiscard]] double calibrate_lambda(Family family, BaseModel base, const TailSpec& tail);

/// Legacy closed forms. The von Mises point-mass and cardioid-curve
/// expressions correspond to neither normalization's CDF convention for
/// the point mass, and to the PaperExact CDF for the cardioid curve; they
/// are returned unchanged. The cardioid-uniform expression is implicit in
/// lambda and is solved by damped fixed-point iteration.
[[nodiscard]] double calibrate_lambda_paper(Family family, BaseModel base, const TailSpec& tail);

enum class CalibrationMethod { ClosedForm, Numeric };
[[nodiscard]] std::string_view to_string(CalibrationMethod method);

struct Calibration {
  double lambda;
  CalibrationMethod method;
  double roundtrip_alpha;  // tail probability of the Truncated prior at lambda
};

/// Uses the closed form where it agrees with the Truncated CDF (von Mises
/// uniform, cardioid uniform, wrapped Cauchy) and bisection otherwise.
[[nodiscard]] Calibration calibrate(Family family, BaseModel base, const TailSpec& tail);

} // namespace circpc
