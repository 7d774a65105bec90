#include "circpc/reference_priors.hpp"

#include "circpc/error.hpp"
#include "circpc/special_functions.hpp"
#include "logistic.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <sstream>
#include <vector>

namespace circpc {
namespace {

using detail::log_sigmoid;

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = std::numbers::pi;
constexpr double kLog2 = std::numbers::ln2;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

double log_beta_fn(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

// (a - 1) log x + (b - 1) log(1 - x) - log B(a, b), with the endpoint
// values taken as limits.
double beta_log_density(double a, double b, double x) {
  const double norm = -log_beta_fn(a, b);
  if (x == 0.0) {
    if (a < 1.0) return kInf;
    return a == 1.0 ? norm : -kInf;
  }
  return (a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) + norm;
}

// log(1 + e^{2z}), stable for either sign of z.
double log1p_exp2(double z) {
  return z > 0.0 ? 2.0 * z + std::log1p(std::exp(-2.0 * z)) : std::log1p(std::exp(2.0 * z));
}

void require_support(const ReferencePrior& prior, double param) {
  if (!ref_support(prior).contains(param)) {
    throw DomainError("parameter " + std::to_string(param) + " outside the support of " +
                      describe(prior));
  }
}

[[noreturn]] void throw_joint() {
  throw DomainError("the conjugate prior is joint in (mu, kappa); use conjugate_pdf");
}

// Numeric |dz/dd| by central differences of the inverse distance map.
double inverse_map_slope(const DistanceProfile& profile, double d) {
  double h = 1e-6 * std::max(1.0, d);
  h = std::min(h, 0.01 * (d - profile.d_min));
  if (std::isfinite(profile.d_max)) h = std::min(h, 0.01 * (profile.d_max - d));
  const double up = d + h;
  const double down = d - h;
  const double zp = inverse_distance_unconstrained(profile, up);
  const double zm = inverse_distance_unconstrained(profile, down);
  return std::abs(zp - zm) / (up - down);
}

// ZDensity: z -> density of z = to_unconstrained(param).
template <class ZDensity>
double interior_density(const ZDensity& fz, const DistanceProfile& profile, double d) {
  const double z = inverse_distance_unconstrained(profile, d);
  const double fzv = fz(z);
  if (fzv == 0.0) return 0.0;
  return fzv * inverse_map_slope(profile, d);
}

template <class ZDensity>
double endpoint_limit(const ZDensity& fz, const DistanceProfile& profile, double endpoint) {
  const bool at_min = endpoint == profile.d_min;
  const double width = std::isfinite(profile.d_max) ? std::min(1.0, profile.d_max - profile.d_min)
                                                    : 1.0;
  double previous = 0.0;
  double last = 0.0;
  for (int k = 2; k <= 8; ++k) {
    const double delta = width * std::pow(10.0, -k);
    previous = last;
    last = interior_density(fz, profile, at_min ? endpoint + delta : endpoint - delta);
  }
  if (last == 0.0) return 0.0;
  if (previous == 0.0) return last;
  const double ratio = last / previous;
  if (ratio < 0.5) return 0.0;
  if (ratio > 2.0) return kInf;
  return last;
}

template <class ZDensity>
double distance_density(const ZDensity& fz, const DistanceProfile& profile, double d) {
  if (std::isnan(d) || d < profile.d_min || d > profile.d_max || std::isinf(d)) {
    throw DomainError("distance_scale_pdf: d = " + std::to_string(d) + " outside the range");
  }
  if (d == profile.d_min || d == profile.d_max) return endpoint_limit(fz, profile, d);
  // closer than this to an endpoint the difference quotient cannot be resolved
  const double width = std::isfinite(profile.d_max) ? profile.d_max - profile.d_min : 1.0;
  if (d - profile.d_min < 1e-10 * width) return endpoint_limit(fz, profile, profile.d_min);
  if (profile.d_max - d < 1e-10 * width) return endpoint_limit(fz, profile, profile.d_max);
  return interior_density(fz, profile, d);
}

void require_matching_support(const ConcentrationSupport& support, const DistanceProfile& profile) {
  const auto expected = profile.support();
  if (support.lower != expected.lower || support.upper != expected.upper) {
    throw DomainError("prior support does not match the " + std::string(to_string(profile.family)) +
                      " concentration support");
  }
}

template <class ZDensity>
AuditReport audit_impl(const ZDensity& fz, const DistanceProfile& profile) {
  constexpr std::size_t kPoints = 1000;
  const double lo = profile.d_min;
  const double hi = std::isfinite(profile.d_max) ? profile.d_max : 4.0;
  std::vector<double> grid(kPoints);
  std::vector<double> density(kPoints);
  for (std::size_t i = 0; i < kPoints; ++i) {
    grid[i] = i + 1 == kPoints ? hi : lo + (hi - lo) * static_cast<double>(i) / (kPoints - 1);
    density[i] = distance_density(fz, profile, grid[i]);
  }
  bool monotone = true;
  for (std::size_t i = 1; i < kPoints; ++i) {
    if (density[i] > density[i - 1] * (1.0 + 1e-9)) {
      monotone = false;
      break;
    }
  }
  const auto best = std::max_element(density.begin(), density.end());
  AuditReport report;
  report.density_at_zero = density.front();
  report.monotone_decreasing = monotone;
  report.argmax_d = grid[static_cast<std::size_t>(best - density.begin())];
  report.classification = (report.density_at_zero > 0.0 && report.argmax_d == lo)
                              ? "base-model-favoring"
                              : "complexity-favoring";
  return report;
}

} // namespace

std::string describe(const ReferencePrior& prior) {
  std::ostringstream out;
  std::visit(Overloaded{
                 [&](const GammaOneB& p) { out << "gamma(b=" << p.b << ")"; },
                 [&](const H2&) { out << "h2"; },
                 [&](const H3&) { out << "h3"; },
                 [&](const Beta& p) { out << "beta(a=" << p.a << ",b=" << p.b << ")"; },
                 [&](const ScaledBetaHalf& p) {
                   out << "2xbeta(a=" << p.a << ",b=" << p.b << ")";
                 },
                 [&](const UniformHalf&) { out << "uniform(0,0.5)"; },
                 [&](const CircularUniformLocation&) { out << "circular-uniform"; },
                 [&](const VonMisesConjugate& p) {
                   out << "conjugate(c=" << p.c << ",R0=" << p.r0 << ",mu0=" << p.mu0.radians()
                       << ")";
                 },
             },
             prior);
  return out.str();
}

void validate(const ReferencePrior& prior) {
  auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
  std::visit(Overloaded{
                 [&](const GammaOneB& p) {
                   if (!positive(p.b)) throw DomainError("gamma rate b must be > 0");
                 },
                 [&](const Beta& p) {
                   if (!positive(p.a) || !positive(p.b)) {
                     throw DomainError("beta shapes must be > 0");
                   }
                 },
                 [&](const ScaledBetaHalf& p) {
                   if (!positive(p.a) || !positive(p.b)) {
                     throw DomainError("beta shapes must be > 0");
                   }
                 },
                 [&](const VonMisesConjugate& p) {
                   if (!std::isfinite(p.c) || !std::isfinite(p.r0)) {
                     throw DomainError("conjugate hyperparameters must be finite");
                   }
                 },
                 [](const auto&) {},
             },
             prior);
}

ConcentrationSupport ref_support(const ReferencePrior& prior) {
  return std::visit(Overloaded{
                        [](const Beta&) { return ConcentrationSupport{0.0, 1.0}; },
                        [](const ScaledBetaHalf&) { return ConcentrationSupport{0.0, 0.5}; },
                        [](const UniformHalf&) { return ConcentrationSupport{0.0, 0.5}; },
                        [](const CircularUniformLocation&) {
                          return ConcentrationSupport{0.0, kTwoPi};
                        },
                        [](const VonMisesConjugate&) -> ConcentrationSupport { throw_joint(); },
                        [](const auto&) { return ConcentrationSupport{0.0, kInf}; },
                    },
                    prior);
}

Family ref_family(const ReferencePrior& prior) {
  return std::visit(Overloaded{
                        [](const Beta&) { return Family::WrappedCauchy; },
                        [](const ScaledBetaHalf&) { return Family::Cardioid; },
                        [](const UniformHalf&) { return Family::Cardioid; },
                        [](const CircularUniformLocation&) -> Family {
                          throw DomainError("circular-uniform is a location prior");
                        },
                        [](const VonMisesConjugate&) -> Family { throw_joint(); },
                        [](const auto&) { return Family::VonMises; },
                    },
                    prior);
}

double ref_log_pdf(const ReferencePrior& prior, double param) {
  validate(prior);
  require_support(prior, param);
  const double x = param;
  return std::visit(
      Overloaded{
          [&](const GammaOneB& p) { return std::log(p.b) - p.b * x; },
          [&](const H2&) { return std::log(2.0 / kPi) - std::log1p(x * x); },
          [&](const H3&) {
            return x == 0.0 ? -kInf : std::log(x) - 1.5 * std::log1p(x * x);
          },
          [&](const Beta& p) { return beta_log_density(p.a, p.b, x); },
          [&](const ScaledBetaHalf& p) { return kLog2 + beta_log_density(p.a, p.b, 2.0 * x); },
          [&](const UniformHalf&) { return kLog2; },
          [&](const CircularUniformLocation&) { return -std::log(kTwoPi); },
          [&](const VonMisesConjugate&) -> double { throw_joint(); },
      },
      prior);
}

double ref_pdf(const ReferencePrior& prior, double param) {
  return std::exp(ref_log_pdf(prior, param));
}

double ref_log_pdf_derivative(const ReferencePrior& prior, double param) {
  validate(prior);
  require_support(prior, param);
  const double x = param;
  return std::visit(
      Overloaded{
          [&](const GammaOneB& p) { return -p.b; },
          [&](const H2&) { return -2.0 * x / (1.0 + x * x); },
          [&](const H3&) { return 1.0 / x - 3.0 * x / (1.0 + x * x); },
          [&](const Beta& p) { return (p.a - 1.0) / x - (p.b - 1.0) / (1.0 - x); },
          [&](const ScaledBetaHalf& p) {
            const double y = 2.0 * x;
            return 2.0 * ((p.a - 1.0) / y - (p.b - 1.0) / (1.0 - y));
          },
          [&](const UniformHalf&) { return 0.0; },
          [&](const CircularUniformLocation&) { return 0.0; },
          [&](const VonMisesConjugate&) -> double { throw_joint(); },
      },
      prior);
}

double ref_log_pdf_unconstrained(const ReferencePrior& prior, double z) {
  validate(prior);
  if (std::isnan(z)) throw DomainError("ref_log_pdf_unconstrained: NaN coordinate");
  if (std::isinf(z)) return -kInf;
  return std::visit(
      Overloaded{
          [&](const GammaOneB& p) {
            const double kappa = std::exp(z);
            return std::log(p.b) - p.b * kappa + z;
          },
          [&](const H2&) { return std::log(2.0 / kPi) - log1p_exp2(z) + z; },
          [&](const H3&) { return 2.0 * z - 1.5 * log1p_exp2(z); },
          // Beta in logit coordinates: a log sigma(z) + b log sigma(-z) - log B(a, b)
          [&](const Beta& p) {
            return p.a * log_sigmoid(z) + p.b * log_sigmoid(-z) - log_beta_fn(p.a, p.b);
          },
          [&](const ScaledBetaHalf& p) {
            return p.a * log_sigmoid(z) + p.b * log_sigmoid(-z) - log_beta_fn(p.a, p.b);
          },
          [&](const UniformHalf&) { return log_sigmoid(z) + log_sigmoid(-z); },
          [&](const CircularUniformLocation&) -> double {
            throw DomainError("circular-uniform is a location prior");
          },
          [&](const VonMisesConjugate&) -> double { throw_joint(); },
      },
      prior);
}

double conjugate_log_density(const VonMisesConjugate& prior, Angle mu, double kappa) {
  validate(prior);
  if (!(kappa >= 0.0) || !std::isfinite(kappa)) {
    throw DomainError("conjugate prior: kappa must be finite and >= 0");
  }
  return -prior.c * log_bessel_i0(kappa) +
         kappa * prior.r0 * std::cos(mu.radians() - prior.mu0.radians());
}

double conjugate_pdf(const VonMisesConjugate& prior, Angle mu, double kappa) {
  return std::exp(conjugate_log_density(prior, mu, kappa));
}

double distance_scale_pdf(const ReferencePrior& prior, const DistanceProfile& profile, double d) {
  validate(prior);
  require_matching_support(ref_support(prior), profile);
  auto fz = [&](double z) { return std::exp(ref_log_pdf_unconstrained(prior, z)); };
  return distance_density(fz, profile, d);
}

double distance_scale_pdf(const DensityFn& pdf, const DistanceProfile& profile, double d) {
  const Family family = profile.family;
  auto fz = [&](double z) {
    const double param = from_unconstrained(family, z);
    if (std::isinf(param)) return 0.0;
    const double p = pdf(param);
    if (p == 0.0) return 0.0;
    return p * std::exp(log_abs_param_jacobian(family, z));
  };
  return distance_density(fz, profile, d);
}

double beta_distance_scale_pdf_closed_form(double a, double b, double d) {
  if (!(a > 0.0 && b > 0.0)) throw DomainError("beta shapes must be > 0");
  if (!(d > 0.0) || !std::isfinite(d)) throw DomainError("closed form needs finite d > 0");
  const double e = std::exp(-d * d);
  const double rho = std::sqrt(-std::expm1(-d * d));
  return std::exp(-log_beta_fn(a, b)) * std::pow(rho, a - 1.0) * std::pow(1.0 - rho, b - 1.0) *
         d * e / rho;
}

AuditReport overfit_audit(const ReferencePrior& prior, const DistanceProfile& profile) {
  validate(prior);
  require_matching_support(ref_support(prior), profile);
  auto fz = [&](double z) { return std::exp(ref_log_pdf_unconstrained(prior, z)); };
  return audit_impl(fz, profile);
}

AuditReport overfit_audit(const DensityFn& pdf, const DistanceProfile& profile) {
  const Family family = profile.family;
  auto fz = [&](double z) {
    const double param = from_unconstrained(family, z);
    if (std::isinf(param)) return 0.0;
    const double p = pdf(param);
    if (p == 0.0) return 0.0;
    return p * std::exp(log_abs_param_jacobian(family, z));
  };
  return audit_impl(fz, profile);
}

} // namespace circpc
