#include "circpc/distributions.hpp"

#include "circpc/error.hpp"
#include "circpc/rng.hpp"
#include "circpc/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace circpc {
namespace {

constexpr double kLogTwoPi = 1.8378770664093454835606594728112;

double half_angle_sin_sq(double delta) {
  const double s = std::sin(0.5 * delta);
  return s * s;
}

// Best & Fisher (1979) rejection sampler for the von Mises distribution,
// with the envelope constants written to avoid cancellation at small kappa.
double sample_von_mises(double mu, double kappa, Rng& rng) {
  if (kappa == 0.0) return kTwoPi * rng.uniform();
  const double root = std::sqrt(1.0 + 4.0 * kappa * kappa);
  const double tau = 1.0 + root;
  // rho = (tau - sqrt(2 tau)) / (2 kappa), rewritten without subtraction.
  const double rho = 2.0 * kappa * tau / ((root + 1.0) * (tau + std::sqrt(2.0 * tau)));
  const double r = (1.0 + rho * rho) / (2.0 * rho);
  for (;;) {
    const double u1 = rng.uniform();
    const double u2 = rng.uniform_open();
    const double u3 = rng.uniform();
    const double z = std::cos(std::numbers::pi * u1);
    const double f = (1.0 + r * z) / (r + z);
    const double c = kappa * (r - f);
    if (c * (2.0 - c) - u2 > 0.0 || std::log(c / u2) + 1.0 - c >= 0.0) {
      const double theta = std::acos(std::clamp(f, -1.0, 1.0));
      return wrap_angle(u3 > 0.5 ? mu + theta : mu - theta);
    }
  }
}

double sample_wrapped_cauchy(double mu, double rho, Rng& rng) {
  if (rho == 0.0) return kTwoPi * rng.uniform();
  const double scale = -std::log(rho);
  const double u = rng.uniform_open();
  return wrap_angle(mu + scale * std::tan(std::numbers::pi * (u - 0.5)));
}

// Inverts the closed-form cardioid CDF by bisection.
double sample_cardioid(double mu, double ell, Rng& rng) {
  const double u = rng.uniform();
  double lo = 0.0;
  double hi = kTwoPi;
  for (int it = 0; it < 60 && hi - lo > 1e-12; ++it) {
    const double mid = 0.5 * (lo + hi);
    (cardioid_cdf(mu, ell, mid) < u ? lo : hi) = mid;
  }
  return wrap_angle(0.5 * (lo + hi));
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

} // namespace

double wrap_angle(double radians) {
  if (!std::isfinite(radians)) throw DomainError("angle must be finite");
  double v = std::fmod(radians, kTwoPi);
  if (v < 0.0) v += kTwoPi;
  // fmod of a value just below a multiple of 2 pi can round up to 2 pi.
  if (v >= kTwoPi) v = 0.0;
  return v;
}

Angle::Angle(double radians) : value_(wrap_angle(radians)) {}

std::string_view to_string(Family family) {
  switch (family) {
    case Family::CircularUniform: return "uniform";
    case Family::VonMises: return "vm";
    case Family::Cardioid: return "cardioid";
    case Family::WrappedCauchy: return "wc";
  }
  return "unknown";
}

Family parse_family(std::string_view text) {
  if (text == "uniform" || text == "CircularUniform") return Family::CircularUniform;
  if (text == "vm" || text == "VonMises" || text == "von-mises") return Family::VonMises;
  if (text == "cardioid" || text == "Cardioid") return Family::Cardioid;
  if (text == "wc" || text == "WrappedCauchy" || text == "wrapped-cauchy") {
    return Family::WrappedCauchy;
  }
  throw DomainError("unknown family '" + std::string(text) + "'");
}

ConcentrationSupport concentration_support(Family family) {
  switch (family) {
    case Family::CircularUniform: return {0.0, std::numeric_limits<double>::min()};
    case Family::VonMises: return {0.0, std::numeric_limits<double>::infinity()};
    case Family::Cardioid: return {0.0, 0.5};
    case Family::WrappedCauchy: return {0.0, 1.0};
  }
  throw DomainError("unknown family");
}

DistributionSpec DistributionSpec::uniform() { return {Family::CircularUniform, Angle{}, 0.0}; }

DistributionSpec DistributionSpec::von_mises(double mu, double kappa) {
  DistributionSpec s{Family::VonMises, Angle(mu), kappa};
  s.validate();
  return s;
}

DistributionSpec DistributionSpec::cardioid(double mu, double ell) {
  DistributionSpec s{Family::Cardioid, Angle(mu), ell};
  s.validate();
  return s;
}

DistributionSpec DistributionSpec::wrapped_cauchy(double mu, double rho) {
  DistributionSpec s{Family::WrappedCauchy, Angle(mu), rho};
  s.validate();
  return s;
}

void DistributionSpec::validate() const {
  if (family == Family::CircularUniform) {
    if (concentration != 0.0) throw DomainError("circular uniform has no concentration");
    return;
  }
  if (!concentration_support(family).contains(concentration)) {
    throw DomainError("concentration " + std::to_string(concentration) +
                      " outside the support of the " + std::string(to_string(family)) +
                      " family");
  }
}

double log_pdf(const DistributionSpec& spec, Angle x) {
  spec.validate();
  const double delta = x.radians() - spec.mu.radians();
  const double c = spec.concentration;
  switch (spec.family) {
    case Family::CircularUniform:
      return -kLogTwoPi;
    case Family::VonMises:
      if (c < kBesselSeriesLimit) return c * std::cos(delta) - kLogTwoPi - log_bessel_i0(c);
      // kappa (cos delta - 1) - log(e^{-kappa} I0) avoids subtracting two large terms.
      return -2.0 * c * half_angle_sin_sq(delta) - kLogTwoPi -
             std::log(bessel_i_scaled(BesselOrder::zero, c));
    case Family::Cardioid: {
      const double v = 2.0 * c * std::cos(delta);
      if (v <= -1.0) return -std::numeric_limits<double>::infinity();
      return std::log1p(v) - kLogTwoPi;
    }
    case Family::WrappedCauchy: {
      const double gap = 1.0 - c;
      const double denom = gap * gap + 4.0 * c * half_angle_sin_sq(delta);
      return std::log(gap * (1.0 + c)) - kLogTwoPi - std::log(denom);
    }
  }
  throw DomainError("unknown family");
}

double pdf(const DistributionSpec& spec, Angle x) {
  spec.validate();
  const double delta = x.radians() - spec.mu.radians();
  const double c = spec.concentration;
  switch (spec.family) {
    case Family::CircularUniform:
      return 1.0 / kTwoPi;
    case Family::VonMises:
      return std::exp(log_pdf(spec, x));
    case Family::Cardioid:
      return (1.0 + 2.0 * c * std::cos(delta)) / kTwoPi;
    case Family::WrappedCauchy: {
      const double gap = 1.0 - c;
      return gap * (1.0 + c) / (kTwoPi * (gap * gap + 4.0 * c * half_angle_sin_sq(delta)));
    }
  }
  throw DomainError("unknown family");
}

double cardioid_cdf(double mu, double ell, double x) {
  return x / kTwoPi + ell / std::numbers::pi * (std::sin(x - mu) + std::sin(mu));
}

Dataset sample(const DistributionSpec& spec, std::size_t n, std::uint64_t seed) {
  spec.validate();
  if (n == 0) throw DomainError("sample: n must be >= 1");
  Rng rng(seed);
  Dataset out;
  out.angles.reserve(n);
  const double mu = spec.mu.radians();
  const double c = spec.concentration;
  for (std::size_t i = 0; i < n; ++i) {
    double x = 0.0;
    switch (spec.family) {
      case Family::CircularUniform: x = kTwoPi * rng.uniform(); break;
      case Family::VonMises: x = sample_von_mises(mu, c, rng); break;
      case Family::Cardioid: x = sample_cardioid(mu, c, rng); break;
      case Family::WrappedCauchy: x = sample_wrapped_cauchy(mu, c, rng); break;
    }
    out.angles.emplace_back(x);
  }
  return out;
}

Resultant mean_resultant(std::span<const Angle> angles) {
  double c = 0.0, s = 0.0;
  for (const Angle a : angles) {
    c += std::cos(a.radians());
    s += std::sin(a.radians());
  }
  const double n = static_cast<double>(angles.size());
  return {wrap_angle(std::atan2(s, c)), n > 0 ? std::hypot(c, s) / n : 0.0};
}

Resultant mean_resultant(std::span<const double> angles) {
  double c = 0.0, s = 0.0;
  for (const double a : angles) {
    c += std::cos(a);
    s += std::sin(a);
  }
  const double n = static_cast<double>(angles.size());
  return {wrap_angle(std::atan2(s, c)), n > 0 ? std::hypot(c, s) / n : 0.0};
}

double population_resultant_length(const DistributionSpec& spec) {
  spec.validate();
  switch (spec.family) {
    case Family::CircularUniform: return 0.0;
    case Family::VonMises: return bessel_ratio(spec.concentration);
    case Family::Cardioid: return spec.concentration;
    case Family::WrappedCauchy: return spec.concentration;
  }
  throw DomainError("unknown family");
}

void write_dataset_csv(std::ostream& out, const Dataset& data) {
  out << "angle_rad\n";
  const auto old = out.precision(17);
  for (const Angle a : data.angles) out << a.radians() << '\n';
  out.precision(old);
}

Dataset read_dataset_csv(std::istream& in, std::string label) {
  Dataset data;
  data.label = std::move(label);
  std::string line;
  bool header_seen = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    if (!header_seen) {
      if (line != "angle_rad") {
        throw std::runtime_error("dataset CSV: expected header 'angle_rad', got '" + line + "'");
      }
      header_seen = true;
      continue;
    }
    std::istringstream cell(line);
    double value = 0.0;
    cell >> value;
    if (cell.fail() || !(cell >> std::ws).eof()) {
      throw std::runtime_error("dataset CSV: bad angle on line " + std::to_string(line_no));
    }
    data.angles.emplace_back(value);
  }
  if (!header_seen) throw std::runtime_error("dataset CSV: missing header 'angle_rad'");
  return data;
}

} // namespace circpc
