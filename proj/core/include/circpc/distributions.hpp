#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace circpc {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// An angle in radians, always stored wrapped into [0, 2*pi).
class Angle {
public:
  constexpr Angle() = default;
  /// Wraps any finite value with a floored modulo; throws DomainError otherwise.
  explicit Angle(double radians);

  [[nodiscard]] constexpr double radians() const noexcept { return value_; }

  friend constexpr bool operator==(Angle, Angle) = default;

private:
  double value_ = 0.0;
};

/// Floored modulo into [0, 2*pi).
[[nodiscard]] double wrap_angle(double radians);

enum class Family { CircularUniform, VonMises, Cardioid, WrappedCauchy };

[[nodiscard]] std::string_view to_string(Family family);
/// Accepts "uniform", "vm", "cardioid", "wc" and the full enumerator names.
[[nodiscard]] Family parse_family(std::string_view text);

/// Closed support of the concentration parameter: [lower, upper) where
/// `upper` is excluded (and may be +inf).
struct ConcentrationSupport {
  double lower;
  double upper;
  [[nodiscard]] bool contains(double value) const noexcept {
    return value >= lower && value < upper;
  }
};

[[nodiscard]] ConcentrationSupport concentration_support(Family family);

/// Family tag, location and concentration (kappa, ell or rho).
struct DistributionSpec {
  Family family = Family::CircularUniform;
  Angle mu{};
  double concentration = 0.0;

  [[nodiscard]] static DistributionSpec uniform();
  [[nodiscard]] static DistributionSpec von_mises(double mu, double kappa);
  [[nodiscard]] static DistributionSpec cardioid(double mu, double ell);
  [[nodiscard]] static DistributionSpec wrapped_cauchy(double mu, double rho);

  /// Throws DomainError if the concentration is outside the family's support.
  void validate() const;
};

/// Ordered sample of angles.
struct Dataset {
  std::vector<Angle> angles;
  std::string label;

  [[nodiscard]] std::size_t size() const noexcept { return angles.size(); }
  [[nodiscard]] bool empty() const noexcept { return angles.empty(); }
};

[[nodiscard]] double pdf(const DistributionSpec& spec, Angle x);

/// log pdf; returns -inf where the density vanishes.
[[nodiscard]] double log_pdf(const DistributionSpec& spec, Angle x);

/// Cardioid CDF measured from 0: x/(2 pi) + (ell/pi)(sin(x - mu) + sin mu).
[[nodiscard]] double cardioid_cdf(double mu, double ell, double x);

/// n independent draws, deterministic in `seed`.
[[nodiscard]] Dataset sample(const DistributionSpec& spec, std::size_t n, std::uint64_t seed);

/// Mean resultant vector summary of a sample.
struct Resultant {
  double mean_direction;  // atan2(S, C) wrapped to [0, 2 pi)
  double length;          // |(C, S)| / n
};

[[nodiscard]] Resultant mean_resultant(std::span<const Angle> angles);
[[nodiscard]] Resultant mean_resultant(std::span<const double> angles);

/// Population mean resultant length E[cos(X - mu)] of a distribution.
[[nodiscard]] double population_resultant_length(const DistributionSpec& spec);

/// Dataset CSV: header `angle_rad`, one decimal angle per row.
void write_dataset_csv(std::ostream& out, const Dataset& data);
[[nodiscard]] Dataset read_dataset_csv(std::istream& in, std::string label = {});

} // namespace circpc
