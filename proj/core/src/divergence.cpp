#include "circpc/divergence.hpp"

#include "circpc/error.hpp"
#include "circpc/special_functions.hpp"
#include "logistic.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace circpc {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLog2 = std::numbers::ln2;
constexpr double kLogTwoPi = 1.8378770664093454835606594728112;

// Beyond this the cardioid-curve distance equals its leading term
// d^2 = (8/3) eps^{3/2}, eps = 1/2 - ell, to within e^{-z/2} relative, and
// the exact radicand would underflow past z ~ 470.
constexpr double kCardioidAsymptoticZ = 100.0;

// Radicands within this much below zero are rounding noise.
constexpr double kRadicandSlack = 1e-14;

// Beyond kappa = e^200 every 1/kappa correction is below 1e-86 and the
// leading asymptotic forms are exact in double precision.
constexpr double kVonMisesAsymptoticZ = 200.0;

using detail::log_sigmoid;
using detail::sigmoid;
using detail::softplus;

// log1p(s) - s + s^2/2, which is O(s^3) near zero.
double log1p_cubic_remainder(double s) {
  if (s < 0.1) {
    double sum = 0.0;
    double power = s * s * s;
    for (int k = 3; k < 24; ++k) {
      sum += ((k % 2 == 1) ? 1.0 : -1.0) * power / k;
      power *= s;
    }
    return sum;
  }
  return std::log1p(s) - s + 0.5 * s * s;
}

double cardioid_curve_log_distance(double z) {
  const double log_eps = -z - kLog2;
  return 0.5 * (std::log(8.0 / 3.0) + 1.5 * log_eps);
}

// A concentration value together with its distance to the open upper end
// of the support, both carried at full precision.
struct Point {
  double value;
  double gap;
};

Point point_from_param(Family family, double param) {
  const auto support = concentration_support(family);
  return {param, support.upper - param};
}

Point point_from_z(Family family, double z) {
  switch (family) {
    case Family::VonMises: return {std::exp(z), kInf};
    case Family::Cardioid: return {0.5 * sigmoid(z), 0.5 * sigmoid(-z)};
    case Family::WrappedCauchy: return {sigmoid(z), sigmoid(-z)};
    case Family::CircularUniform: break;
  }
  throw DomainError("family has no concentration parameter");
}

double cardioid_s(const Point& p) {
  // sqrt(1 - 4 ell^2) = sqrt((1 - 2 ell)(1 + 2 ell)) with 1 - 2 ell = 2 gap.
  return std::sqrt(2.0 * p.gap * (1.0 + 2.0 * p.value));
}

double radicand(const DistanceProfile& profile, const Point& p) {
  const double x = p.value;
  switch (profile.family) {
    case Family::VonMises:
      if (profile.base == BaseModel::Uniform) {
        if (x < kBesselSeriesLimit) return x * bessel_ratio(x) - log_bessel_i0(x);
        // kappa A - log I0 = -kappa (1 - A) - log(e^{-kappa} I0)
        return -x * bessel_ratio_complement(x) - std::log(bessel_i_scaled(BesselOrder::zero, x));
      }
      return bessel_ratio_complement(x);
    case Family::Cardioid: {
      const double s = cardioid_s(p);
      if (profile.base == BaseModel::Uniform) {
        // 1 - s + log((1 + s)/2) with t = (1 - s)/2 = 2 ell^2/(1 + s)
        const double t = 2.0 * x * x / (1.0 + s);
        return 2.0 * t + std::log1p(-t);
      }
      // log 2 - 2 ell + (uniform radicand) = 2 gap^2 + log1p(s) - s + s^2/2
      return 2.0 * p.gap * p.gap + log1p_cubic_remainder(s);
    }
    case Family::WrappedCauchy:
      if (x < 0.5) return -std::log1p(-x * x);
      return -std::log(p.gap) - std::log1p(x);
    case Family::CircularUniform: break;
  }
  throw DomainError("family has no concentration parameter");
}

double finish_distance(double r) {
  if (r < 0.0) {
    if (r < -kRadicandSlack) throw DomainError("negative KLD radicand");
    return 0.0;
  }
  return std::sqrt(r);
}

// Signed dd/dparam given the distance d at the same point.
double slope(const DistanceProfile& profile, const Point& p, double d) {
  const double x = p.value;
  switch (profile.family) {
    case Family::VonMises:
      if (profile.base == BaseModel::Uniform) {
        if (x == 0.0 || d == 0.0) return 0.5;
        return x * bessel_ratio_derivative(x) / (2.0 * d);
      }
      if (d == 0.0) return -0.0;
      return -bessel_ratio_derivative(x) / (2.0 * d);
    case Family::Cardioid: {
      const double s = cardioid_s(p);
      if (profile.base == BaseModel::Uniform) {
        if (x == 0.0 || d == 0.0) return 1.0;
        return 2.0 * x / ((1.0 + s) * d);
      }
      if (d == 0.0) return -kInf;
      return -(1.0 - 2.0 * x / (1.0 + s)) / d;
    }
    case Family::WrappedCauchy:
      if (x == 0.0 || d == 0.0) return 1.0;
      return x / (p.gap * (1.0 + x) * d);
    case Family::CircularUniform: break;
  }
  throw DomainError("family has no concentration parameter");
}

void require_in_support(const DistanceProfile& profile, double param) {
  if (!profile.support().contains(param)) {
    throw DomainError("parameter " + std::to_string(param) + " outside the support of the " +
                      std::string(to_string(profile.family)) + " family");
  }
}

double upper_boundary_param(Family family) {
  switch (family) {
    case Family::VonMises: return kInf;
    case Family::Cardioid: return std::nextafter(0.5, 0.0);
    case Family::WrappedCauchy: return std::nextafter(1.0, 0.0);
    case Family::CircularUniform: break;
  }
  throw DomainError("family has no concentration parameter");
}

} // namespace

std::string_view to_string(BaseModel base) {
  switch (base) {
    case BaseModel::Uniform: return "uniform";
    case BaseModel::PointMass: return "point-mass";
    case BaseModel::CardioidCurve: return "curve";
  }
  return "unknown";
}

BaseModel parse_base_model(std::string_view text) {
  if (text == "uniform" || text == "Uniform" || text == "UniformBase") return BaseModel::Uniform;
  if (text == "point-mass" || text == "pointmass" || text == "pm" || text == "PointMass" ||
      text == "PointMassBase") {
    return BaseModel::PointMass;
  }
  if (text == "curve" || text == "cardioid-curve" || text == "CardioidCurve" ||
      text == "CardioidCurveBase") {
    return BaseModel::CardioidCurve;
  }
  throw DomainError("unknown base model '" + std::string(text) + "'");
}

DistanceProfile DistanceProfile::make(Family family, BaseModel base) {
  using enum Direction;
  if (family == Family::VonMises && base == BaseModel::Uniform) {
    return {family, base, 0.0, kInf, IncreasingInParam};
  }
  if (family == Family::VonMises && base == BaseModel::PointMass) {
    return {family, base, 0.0, 1.0, DecreasingInParam};
  }
  if (family == Family::Cardioid && base == BaseModel::Uniform) {
    return {family, base, 0.0, std::sqrt(1.0 - kLog2), IncreasingInParam};
  }
  if (family == Family::Cardioid && base == BaseModel::CardioidCurve) {
    return {family, base, 0.0, std::sqrt(kLog2), DecreasingInParam};
  }
  if (family == Family::WrappedCauchy && base == BaseModel::Uniform) {
    return {family, base, 0.0, kInf, IncreasingInParam};
  }
  throw DomainError("unsupported (family, base model) pair: (" + std::string(to_string(family)) +
                    ", " + std::string(to_string(base)) + ")");
}

double kld_vm(double kappa, double kappa0) {
  if (!std::isfinite(kappa) || !std::isfinite(kappa0) || kappa < 0.0 || kappa0 < 0.0) {
    throw DomainError("kld_vm: concentrations must be finite and >= 0");
  }
  const double value =
      log_bessel_i0(kappa0) - log_bessel_i0(kappa) + (kappa - kappa0) * bessel_ratio(kappa);
  return value > 0.0 ? value : 0.0;
}

double kld_cardioid(double ell, double ell0) {
  if (!(ell >= 0.0 && ell < 0.5)) throw DomainError("kld_cardioid: ell must lie in [0, 1/2)");
  if (!(ell0 > 0.0 && ell0 < 0.5)) {
    throw DomainError("kld_cardioid: ell0 must lie in (0, 1/2); use the uniform-base distance");
  }
  // E_p log(1 + 2 ell cos) - E_p log(1 + 2 ell0 cos), each in closed form:
  // E_p log(1 + b cos) = log((1 + s_b)/2) + 2 ell (1 - s_b)/b.
  const double s = std::sqrt((1.0 - 2.0 * ell) * (1.0 + 2.0 * ell));
  const double s0 = std::sqrt((1.0 - 2.0 * ell0) * (1.0 + 2.0 * ell0));
  const double t = 2.0 * ell * ell / (1.0 + s);
  const double t0 = 2.0 * ell0 * ell0 / (1.0 + s0);
  const double value = 2.0 * t + std::log1p(-t) - std::log1p(-t0) - 4.0 * ell * ell0 / (1.0 + s0);
  return value > 0.0 ? value : 0.0;
}

double kld_wc(double rho) {
  if (!(rho >= 0.0 && rho < 1.0)) throw DomainError("kld_wc: rho must lie in [0, 1)");
  return -std::log((1.0 - rho) * (1.0 + rho));
}

double kld_numeric(const DistributionSpec& p, const DistributionSpec& q, std::size_t nodes) {
  if (nodes < 3) throw DomainError("kld_numeric: need at least 3 nodes");
  p.validate();
  q.validate();
  // The integrand is 2 pi periodic, so the trapezoid rule on [0, 2 pi]
  // reduces to an equal-weight sum over the first nodes - 1 points.
  const std::size_t intervals = nodes - 1;
  const double h = kTwoPi / static_cast<double>(intervals);
  double sum = 0.0;
  for (std::size_t i = 0; i < intervals; ++i) {
    const Angle x(h * static_cast<double>(i));
    const double lp = log_pdf(p, x);
    if (lp == -kInf) continue;
    const double lq = log_pdf(q, x);
    if (lq == -kInf) throw NonIntegrableError("kld_numeric: reference density vanishes on the grid");
    sum += std::exp(lp) * (lp - lq);
  }
  return sum * h;
}

double distance(const DistanceProfile& profile, double param) {
  require_in_support(profile, param);
  return finish_distance(radicand(profile, point_from_param(profile.family, param)));
}

double distance_derivative(const DistanceProfile& profile, double param) {
  require_in_support(profile, param);
  const Point p = point_from_param(profile.family, param);
  return slope(profile, p, finish_distance(radicand(profile, p)));
}

double log_abs_distance_derivative_slope(const DistanceProfile& profile, double param) {
  require_in_support(profile, param);
  const Point p = point_from_param(profile.family, param);
  const double d = finish_distance(radicand(profile, p));
  const double dd = slope(profile, p, d);
  const double x = param;
  switch (profile.family) {
    case Family::VonMises: {
      const auto jet = bessel_ratio_jet(x);
      const double base = jet.second / jet.derivative - dd / d;
      return profile.base == BaseModel::Uniform ? base + 1.0 / x : base;
    }
    case Family::Cardioid: {
      const double s = cardioid_s(p);
      const double ds = -4.0 * x / s;
      if (profile.base == BaseModel::Uniform) return 1.0 / x - ds / (1.0 + s) - dd / d;
      return (ds - 2.0) / (1.0 + s - 2.0 * x) - ds / (1.0 + s) - dd / d;
    }
    case Family::WrappedCauchy:
      return 1.0 / x + 2.0 * x / (p.gap * (1.0 + x)) - dd / d;
    case Family::CircularUniform: break;
  }
  throw DomainError("family has no concentration parameter");
}

double to_unconstrained(Family family, double param) {
  if (!concentration_support(family).contains(param)) {
    throw DomainError("to_unconstrained: parameter outside the support");
  }
  switch (family) {
    case Family::VonMises: return std::log(param);
    case Family::Cardioid: return std::log(2.0 * param) - std::log(1.0 - 2.0 * param);
    case Family::WrappedCauchy: return std::log(param) - std::log1p(-param);
    case Family::CircularUniform: break;
  }
  throw DomainError("family has no concentration parameter");
}

double from_unconstrained(Family family, double z) {
  if (std::isnan(z)) throw DomainError("from_unconstrained: NaN coordinate");
  if (z == kInf) return upper_boundary_param(family);
  const double value = point_from_z(family, z).value;
  if (family != Family::VonMises && value >= concentration_support(family).upper) {
    return upper_boundary_param(family);
  }
  return value;
}

double log_abs_param_jacobian(Family family, double z) {
  switch (family) {
    case Family::VonMises: return z;
    case Family::Cardioid: return log_sigmoid(z) + log_sigmoid(-z) - kLog2;
    case Family::WrappedCauchy: return log_sigmoid(z) + log_sigmoid(-z);
    case Family::CircularUniform: break;
  }
  throw DomainError("family has no concentration parameter");
}

double distance_unconstrained(const DistanceProfile& profile, double z) {
  if (std::isnan(z)) throw DomainError("distance_unconstrained: NaN coordinate");
  if (z == -kInf) return profile.distance_at_support_min();
  if (profile.family == Family::VonMises && z > kVonMisesAsymptoticZ) {
    if (profile.base == BaseModel::Uniform) return std::sqrt(0.5 * (kLogTwoPi + z) - 0.5);
    return std::exp(-0.5 * z) / std::numbers::sqrt2;
  }
  if (z == kInf) return profile.increasing() ? profile.d_max : profile.d_min;
  if (profile.family == Family::WrappedCauchy && z > 0.0) {
    // -log(1 - rho) = softplus(z) exactly, with no rounding of 1 - rho
    return finish_distance(softplus(z) - std::log1p(sigmoid(z)));
  }
  if (profile.family == Family::Cardioid && profile.base == BaseModel::CardioidCurve &&
      z > kCardioidAsymptoticZ) {
    return std::exp(cardioid_curve_log_distance(z));
  }
  return finish_distance(radicand(profile, point_from_z(profile.family, z)));
}

double log_abs_distance_derivative_unconstrained(const DistanceProfile& profile, double z) {
  if (std::isnan(z) || std::isinf(z)) {
    throw DomainError("log_abs_distance_derivative_unconstrained: coordinate must be finite");
  }
  const Family family = profile.family;
  if (family == Family::VonMises && z > kVonMisesAsymptoticZ) {
    // |dd/dz| = kappa^2 A'/(2d) -> 1/(4d) (uniform), kappa A'/(2d) -> e^{-z}/(4d) (point mass)
    if (profile.base == BaseModel::Uniform) return -std::log(4.0 * distance_unconstrained(profile, z));
    // d = e^{-z/2}/sqrt(2) underflows long before its logarithm does
    return -0.5 * z - std::log(4.0) + 0.5 * std::log(2.0);
  }
  const Point p = point_from_z(family, z);
  const double d = distance_unconstrained(profile, z);
  switch (family) {
    case Family::VonMises: {
      const double kappa = p.value;
      if (profile.base == BaseModel::Uniform) {
        if (d == 0.0) return z - std::log(2.0);
        return 2.0 * z + std::log(bessel_ratio_derivative(kappa)) - std::log(2.0 * d);
      }
      return z + std::log(bessel_ratio_derivative(kappa)) - std::log(2.0 * d);
    }
    case Family::Cardioid: {
      if (profile.base == BaseModel::CardioidCurve && z > kCardioidAsymptoticZ) {
        // d is proportional to eps^{3/4} and eps to e^{-z}
        return std::log(0.75) + cardioid_curve_log_distance(z);
      }
      const double s = cardioid_s(p);
      const double log_dparam = log_abs_param_jacobian(family, z);
      if (profile.base == BaseModel::Uniform) {
        if (d == 0.0) return log_dparam;
        return std::log(2.0 * p.value / (1.0 + s)) - std::log(d) + log_dparam;
      }
      return std::log(s / (1.0 + s) + 2.0 * p.gap / (1.0 + s)) - std::log(d) + log_dparam;
    }
    case Family::WrappedCauchy: {
      // |dd/drho| * drho/dz = rho^2 / ((1 + rho) d)
      if (d == 0.0) return log_abs_param_jacobian(family, z);
      return 2.0 * log_sigmoid(z) - std::log1p(p.value) - std::log(d);
    }
    case Family::CircularUniform: break;
  }
  throw DomainError("family has no concentration parameter");
}

double inverse_distance_unconstrained(const DistanceProfile& profile, double d) {
  if (std::isnan(d) || d < profile.d_min || d > profile.d_max) {
    throw DomainError("inverse_distance: d = " + std::to_string(d) + " outside [" +
                      std::to_string(profile.d_min) + ", " + std::to_string(profile.d_max) + "]");
  }
  const bool inc = profile.increasing();
  if (d == profile.distance_at_support_min()) return -kInf;
  if (d == (inc ? profile.d_max : profile.d_min)) return kInf;

  // g(z) < 0 means z lies below the solution.
  auto below = [&](double z) {
    const double dz = distance_unconstrained(profile, z);
    return inc ? dz < d : dz > d;
  };
  double lo = -1.0;
  double hi = 1.0;
  for (int i = 0; i < 64 && !below(lo); ++i) {
    hi = lo;
    lo *= 2.0;
  }
  for (int i = 0; i < 64 && below(hi); ++i) {
    lo = hi;
    hi *= 2.0;
  }
  for (int it = 0; it < 4000; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (hi - lo <= 2e-16 * std::max({1.0, std::abs(lo), std::abs(hi)})) break;
    (below(mid) ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double inverse_distance(const DistanceProfile& profile, double d) {
  const double z = inverse_distance_unconstrained(profile, d);
  if (z == -kInf) return 0.0;
  return from_unconstrained(profile.family, z);
}

} // namespace circpc
