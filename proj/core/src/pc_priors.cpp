#include "circpc/pc_priors.hpp"

#include "circpc/error.hpp"
#include "circpc/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace circpc {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = std::numbers::pi;

// Above this the parameter-scale derivative of the von Mises distances
// underflows, so it is recovered from the unconstrained coordinate.
constexpr double kLargeKappa = 1e100;

constexpr double kLambdaLow = 1e-8;
constexpr double kLambdaHigh = 1e6;
constexpr double kLambdaWiden = 1e4;

// Distance range the CDF is normalized over. The untruncated point-mass and
// cardioid-curve CDFs behave as if the range were unbounded.
double effective_range(const PcPrior& prior, const DistanceProfile& profile) {
  if (prior.normalization == Normalization::PaperExact &&
      (profile.base == BaseModel::PointMass || profile.base == BaseModel::CardioidCurve)) {
    return kInf;
  }
  return profile.d_max - profile.d_min;
}

// P(d <= x) and P(d >= x) for the truncated exponential on [0, range].
double prob_below(double lambda, double x, double range) {
  if (range == kInf) return -std::expm1(-lambda * x);
  if (x >= range) return 1.0;
  return std::expm1(-lambda * x) / std::expm1(-lambda * range);
}

double prob_above(double lambda, double x, double range) {
  if (range == kInf) return std::exp(-lambda * x);
  if (x >= range) return 0.0;
  return std::exp(-lambda * x) * std::expm1(-lambda * (range - x)) / std::expm1(-lambda * range);
}

bool is_proper(const PcPrior& prior) {
  return prior.normalization == Normalization::Truncated ||
         (prior.base != BaseModel::PointMass && prior.base != BaseModel::CardioidCurve);
}

// Whether the tail event {Q > U} is {d <= x} (true) or {d >= x} (false).
bool tail_event_is_below(Family family, BaseModel base) {
  const auto profile = DistanceProfile::make(family, base);
  // vM and WC: Q > U means a small parameter; cardioid: a large one.
  const bool small_param = family != Family::Cardioid;
  return small_param == profile.increasing();
}

// Distance at the tail threshold, computed without forming 1 - U/(2 pi)
// for the wrapped Cauchy so that tiny U keep their precision.
double tail_distance(const DistanceProfile& profile, double U) {
  if (profile.family == Family::WrappedCauchy) {
    const double gap = U / (2.0 * kPi);
    if (gap >= 1.0) return 0.0;
    return distance_unconstrained(profile, std::log1p(-gap) - std::log(gap));
  }
  return distance(profile, tail_threshold(profile.family, U));
}

double truncated_tail_probability(Family family, BaseModel base, double lambda, double x) {
  const auto profile = DistanceProfile::make(family, base);
  const double range = profile.d_max - profile.d_min;
  return tail_event_is_below(family, base) ? prob_below(lambda, x, range)
                                           : prob_above(lambda, x, range);
}

[[noreturn]] void throw_infeasible(const TailSpec& tail, const TailRange& range) {
  throw InfeasibleTailError("no lambda gives P(Q > " + std::to_string(tail.U) + ") = " +
                                std::to_string(tail.alpha) + "; attainable range is (" +
                                std::to_string(range.low) + ", " + std::to_string(range.high) +
                                ")",
                            range.low, range.high);
}

double bisect_log_lambda(Family family, BaseModel base, double x, const TailSpec& tail) {
  const bool below = tail_event_is_below(family, base);
  // f increases with log lambda after orienting by the event type.
  auto f = [&](double log_lambda) {
    const double p = truncated_tail_probability(family, base, std::exp(log_lambda), x);
    return below ? p - tail.alpha : tail.alpha - p;
  };
  double lo = std::log(kLambdaLow);
  double hi = std::log(kLambdaHigh);
  if (!(f(lo) <= 0.0 && f(hi) >= 0.0)) {
    lo -= std::log(kLambdaWiden);
    hi += std::log(kLambdaWiden);
    if (!(f(lo) <= 0.0 && f(hi) >= 0.0)) {
      throw_infeasible(tail, attainable_tail_range(family, base, tail.U));
    }
  }
  for (int it = 0; it < 400 && hi - lo > 1e-14; ++it) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  return std::exp(0.5 * (lo + hi));
}

} // namespace

std::string_view to_string(Normalization mode) {
  return mode == Normalization::Truncated ? "truncated" : "paper-exact";
}

Normalization parse_normalization(std::string_view text) {
  if (text == "truncated" || text == "Truncated") return Normalization::Truncated;
  if (text == "paper-exact" || text == "paper" || text == "PaperExact") {
    return Normalization::PaperExact;
  }
  throw DomainError("unknown normalization '" + std::string(text) + "'");
}

std::string_view to_string(CalibrationMethod method) {
  return method == CalibrationMethod::ClosedForm ? "closed_form" : "numeric";
}

PcPrior PcPrior::make(Family family, BaseModel base, double lambda, Normalization normalization) {
  PcPrior prior{family, base, lambda, normalization};
  prior.validate();
  return prior;
}

void PcPrior::validate() const {
  (void)DistanceProfile::make(family, base);
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw DomainError("PC prior lambda must be finite and > 0");
  }
}

double normalizing_constant(const PcPrior& prior) {
  prior.validate();
  const auto profile = prior.profile();
  double range = effective_range(prior, profile);
  // The cardioid-uniform density is printed with its truncation constant.
  if (prior.normalization == Normalization::PaperExact && profile.base == BaseModel::Uniform &&
      profile.family == Family::Cardioid) {
    range = profile.d_max;
  }
  return range == kInf ? 1.0 : -std::expm1(-prior.lambda * range);
}

double pc_log_pdf(const PcPrior& prior, double param) {
  const auto profile = prior.profile();
  const double d = distance(profile, param);
  double log_slope;
  if (profile.family == Family::VonMises && param > kLargeKappa) {
    const double z = std::log(param);
    log_slope = log_abs_distance_derivative_unconstrained(profile, z) - z;
  } else {
    log_slope = std::log(std::abs(distance_derivative(profile, param)));
  }
  return std::log(prior.lambda) - prior.lambda * d + log_slope -
         std::log(normalizing_constant(prior));
}

double pc_pdf(const PcPrior& prior, double param) { return std::exp(pc_log_pdf(prior, param)); }

double pc_cdf(const PcPrior& prior, double param) {
  prior.validate();
  const auto profile = prior.profile();
  const double d = distance(profile, param);
  const double range = effective_range(prior, profile);
  return profile.increasing() ? prob_below(prior.lambda, d, range)
                              : prob_above(prior.lambda, d, range);
}

double pc_log_pdf_unconstrained(const PcPrior& prior, double z) {
  prior.validate();
  if (std::isnan(z)) throw DomainError("pc_log_pdf_unconstrained: NaN coordinate");
  if (std::isinf(z)) return -kInf;
  const auto profile = prior.profile();
  return std::log(prior.lambda) - prior.lambda * distance_unconstrained(profile, z) +
         log_abs_distance_derivative_unconstrained(profile, z) -
         std::log(normalizing_constant(prior));
}

double pc_log_pdf_derivative(const PcPrior& prior, double param) {
  prior.validate();
  const auto profile = prior.profile();
  return -prior.lambda * distance_derivative(profile, param) +
         log_abs_distance_derivative_slope(profile, param);
}

double pc_quantile(const PcPrior& prior, double p) {
  prior.validate();
  if (!is_proper(prior)) {
    throw UnsupportedModeError(
        "pc_quantile: the paper-exact CDF of this prior does not reach 0 and 1; use truncated");
  }
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("pc_quantile: p must lie in [0, 1]");
  const auto profile = prior.profile();
  const double lambda = prior.lambda;
  const double range = effective_range(prior, profile);
  const double zc = normalizing_constant(prior);
  double d;
  if (profile.increasing()) {
    d = -std::log1p(-p * zc) / lambda;
  } else {
    const double tail = range == kInf ? 0.0 : std::exp(-lambda * range);
    d = -std::log(p * zc + tail) / lambda;
  }
  d = std::clamp(d, profile.d_min, profile.d_max);
  const double param = inverse_distance(profile, d);
  if (param == kInf) return std::numeric_limits<double>::max();
  return param;
}

std::vector<double> pc_sample(const PcPrior& prior, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw DomainError("pc_sample: n must be >= 1");
  if (!is_proper(prior)) {
    throw UnsupportedModeError("pc_sample: the paper-exact CDF of this prior is not proper");
  }
  Rng rng(seed);
  std::vector<double> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(pc_quantile(prior, rng.uniform_open()));
  return out;
}

void TailSpec::validate(Family family) const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("tail alpha must lie in (0, 1)");
  switch (family) {
    case Family::VonMises:
    case Family::WrappedCauchy:
      if (!(U > 0.0 && U <= 2.0 * kPi)) throw DomainError("tail U must lie in (0, 2 pi]");
      return;
    case Family::Cardioid:
      if (!(U > 0.0 && U < 1.0)) throw DomainError("cardioid tail U must lie in (0, 1)");
      return;
    case Family::CircularUniform: break;
  }
  throw DomainError("circular uniform has no concentration to calibrate");
}

double tail_transform(Family family, double param) {
  if (!concentration_support(family).contains(param)) {
    throw DomainError("tail_transform: parameter outside the support");
  }
  switch (family) {
    case Family::VonMises: return 2.0 * kPi / (1.0 + param);
    case Family::Cardioid: return 2.0 * param;
    case Family::WrappedCauchy: return 2.0 * kPi * (1.0 - param);
    case Family::CircularUniform: break;
  }
  throw DomainError("family has no concentration parameter");
}

double tail_threshold(Family family, double U) {
  TailSpec{U, 0.5}.validate(family);
  switch (family) {
    case Family::VonMises: return 2.0 * kPi / U - 1.0;
    case Family::Cardioid: return 0.5 * U;
    case Family::WrappedCauchy: return 1.0 - U / (2.0 * kPi);
    case Family::CircularUniform: break;
  }
  throw DomainError("family has no concentration parameter");
}

double tail_probability(const PcPrior& prior, double U) {
  prior.validate();
  TailSpec{U, 0.5}.validate(prior.family);
  const auto profile = prior.profile();
  const double x = tail_distance(profile, U);
  const double range = effective_range(prior, profile);
  return tail_event_is_below(prior.family, prior.base) ? prob_below(prior.lambda, x, range)
                                                       : prob_above(prior.lambda, x, range);
}

TailRange attainable_tail_range(Family family, BaseModel base, double U) {
  const auto profile = DistanceProfile::make(family, base);
  const double x = tail_distance(profile, U);
  const double range = profile.d_max - profile.d_min;
  const double frac = range == kInf ? 0.0 : x / range;
  if (tail_event_is_below(family, base)) return {frac, x > 0.0 ? 1.0 : 0.0};
  return {0.0, 1.0 - frac};
}

double calibrate_lambda(Family family, BaseModel base, const TailSpec& tail) {
  tail.validate(family);
  const auto profile = DistanceProfile::make(family, base);
  const TailRange range = attainable_tail_range(family, base, tail.U);
  if (!(tail.alpha > range.low && tail.alpha < range.high)) throw_infeasible(tail, range);
  return bisect_log_lambda(family, base, tail_distance(profile, tail.U), tail);
}

double calibrate_lambda_paper(Family family, BaseModel base, const TailSpec& tail) {
  tail.validate(family);
  const auto profile = DistanceProfile::make(family, base);
  const double x = tail_distance(profile, tail.U);
  const double log_keep = std::log1p(-tail.alpha);
  if (x == 0.0) throw_infeasible(tail, attainable_tail_range(family, base, tail.U));

  if (family == Family::Cardioid && base == BaseModel::Uniform) {
    const TailRange range = attainable_tail_range(family, base, tail.U);
    if (!(tail.alpha > range.low && tail.alpha < range.high)) throw_infeasible(tail, range);
    const double d_max = profile.d_max;
    auto rhs = [&](double lambda) {
      return -std::log(tail.alpha + (1.0 - tail.alpha) * std::exp(-lambda * d_max)) / x;
    };
    double lambda = -std::log(tail.alpha) / x;
    for (int it = 0; it < 200; ++it) {
      const double next = 0.5 * lambda + 0.5 * rhs(lambda);
      if (std::abs(next - lambda) <= 1e-12 * std::max(1.0, lambda)) return next;
      lambda = next;
    }
    return calibrate_lambda(family, base, tail);
  }
  if (family == Family::WrappedCauchy) {
    const double U = tail.U;
    return -log_keep / std::sqrt(-std::log(U / kPi - U * U / (4.0 * kPi * kPi)));
  }
  return -log_keep / x;
}

Calibration calibrate(Family family, BaseModel base, const TailSpec& tail) {
  const bool closed = base == BaseModel::Uniform;
  const double lambda =
      closed ? calibrate_lambda_paper(family, base, tail) : calibrate_lambda(family, base, tail);
  const auto prior = PcPrior::make(family, base, lambda);
  return {lambda, closed ? CalibrationMethod::ClosedForm : CalibrationMethod::Numeric,
          tail_probability(prior, tail.U)};
}

} // namespace circpc
