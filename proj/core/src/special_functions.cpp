#include "circpc/special_functions.hpp"

#include "circpc/error.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace circpc {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Above this point 1 - A, A' and A'' come from the asymptotic series of
// A(x) in powers of 1/x; below it the direct formulas lose at most ~x^2 ulps.
constexpr double kRatioAsymptoticLimit = 20.0;

constexpr int kRatioTerms = 40;

// A(x) ~ sum_n c_n x^{-n} as x -> inf. Substituting into the Riccati
// equation A' = 1 - A/x - A^2 gives c_0 = 1 and
// c_m = ((m - 2) c_{m-1} - sum_{i=1}^{m-1} c_i c_{m-i}) / 2.
constexpr std::array<double, kRatioTerms> make_large_x_coefficients() {
  std::array<double, kRatioTerms> c{};
  c[0] = 1.0;
  for (int m = 1; m < kRatioTerms; ++m) {
    double conv = 0.0;
    for (int i = 1; i < m; ++i) conv += c[i] * c[m - i];
    c[m] = ((m - 2) * c[m - 1] - conv) / 2.0;
  }
  return c;
}

// A(x) = sum_k b_k x^{2k+1} near zero, from the same Riccati equation:
// b_m = ([m == 0] - sum_{i+j=m-1} b_i b_j) / (2m + 2).
constexpr int kSmallTerms = 12;
constexpr std::array<double, kSmallTerms> make_small_x_coefficients() {
  std::array<double, kSmallTerms> b{};
  for (int m = 0; m < kSmallTerms; ++m) {
    double conv = 0.0;
    for (int i = 0; i <= m - 1; ++i) conv += b[i] * b[m - 1 - i];
    b[m] = ((m == 0 ? 1.0 : 0.0) - conv) / (2.0 * m + 2.0);
  }
  return b;
}

constexpr auto kLargeX = make_large_x_coefficients();
constexpr auto kSmallX = make_small_x_coefficients();
constexpr double kSmallXLimit = 0.1;

void require_nonnegative(double x, const char* fn) {
  if (!(x >= 0.0) || !std::isfinite(x)) {
    throw DomainError(std::string(fn) + ": argument must be finite and >= 0");
  }
}

int order_value(BesselOrder order) {
  switch (order) {
    case BesselOrder::zero: return 0;
    case BesselOrder::one: return 1;
    case BesselOrder::two: return 2;
  }
  throw DomainError("bessel_i: unsupported order");
}

// sum_{k >= k0} (x/2)^{2k+n} / (k! (k+n)!)
double power_series(int n, double x, int k0 = 0) {
  const double half = 0.5 * x;
  const double q = half * half;
  double term = 1.0;
  for (int j = 1; j <= n; ++j) term *= half / j;
  for (int k = 0; k < k0; ++k) term *= q / ((k + 1.0) * (k + 1.0 + n));
  double sum = 0.0;
  for (int k = k0; k < 500; ++k) {
    sum += term;
    if (term <= kEps * 0.25 * sum) break;
    term *= q / ((k + 1.0) * (k + 1.0 + n));
  }
  return sum;
}

// Hankel series sum_k (-1)^k a_k(n) / x^k, truncated at its smallest term.
double hankel_sum(int n, double x) {
  const double mu = 4.0 * n * n;
  double term = 1.0;
  double sum = 1.0;
  double prev = std::numeric_limits<double>::infinity();
  for (int k = 1; k < 200; ++k) {
    const double odd = 2.0 * k - 1.0;
    const double next = -term * (mu - odd * odd) / (k * 8.0 * x);
    if (std::abs(next) >= prev) break;
    term = next;
    sum += term;
    prev = std::abs(term);
    if (prev <= kEps * 0.25 * std::abs(sum)) break;
  }
  return sum;
}

double scaled_asymptotic(int n, double x) {
  return hankel_sum(n, x) / std::sqrt(2.0 * std::numbers::pi * x);
}

struct LargeXSums {
  double complement;
  double derivative;
  double second;
};

// Truncates all three sums at the smallest term of the 1 - A series.
LargeXSums large_x_sums(double x) {
  const double inv = 1.0 / x;
  double power = inv;  // x^{-n}
  double complement = 0.0, derivative = 0.0, second = 0.0;
  double prev = std::numeric_limits<double>::infinity();
  for (int n = 1; n < kRatioTerms; ++n) {
    const double t = -kLargeX[n] * power;
    if (std::abs(t) >= prev) break;
    complement += t;
    derivative += -n * kLargeX[n] * power * inv;
    second += n * (n + 1.0) * kLargeX[n] * power * inv * inv;
    prev = std::abs(t);
    if (prev <= kEps * 0.25 * complement) break;
    power *= inv;
  }
  return {complement, derivative, second};
}

// A/x for x > 0 without dividing a small ratio by a small argument.
double ratio_over_x(double x) {
  if (x < kBesselSeriesLimit) {
    // I1(x)/x = sum_k (x/2)^{2k} / (2 k! (k+1)!)
    return 0.5 * power_series(1, x) / (0.5 * x) / power_series(0, x);
  }
  return bessel_ratio(x) / x;
}

} // namespace

double bessel_i(BesselOrder order, double x) {
  require_nonnegative(x, "bessel_i");
  const int n = order_value(order);
  if (x < kBesselSeriesLimit) return power_series(n, x);
  const double scaled = scaled_asymptotic(n, x);
  if (x > 700.0) {
    // e^x overflows near 709.78; combine in log space first.
    const double log_value = x + std::log(scaled);
    return log_value > 709.78 ? std::numeric_limits<double>::infinity()
                              : std::exp(log_value);
  }
  return std::exp(x) * scaled;
}

double bessel_i_scaled(BesselOrder order, double x) {
  require_nonnegative(x, "bessel_i_scaled");
  const int n = order_value(order);
  if (x < kBesselSeriesLimit) return power_series(n, x) * std::exp(-x);
  return scaled_asymptotic(n, x);
}

double log_bessel_i0(double x) {
  require_nonnegative(x, "log_bessel_i0");
  if (x < kBesselSeriesLimit) return std::log1p(power_series(0, x, 1));
  return x + std::log(scaled_asymptotic(0, x));
}

double bessel_ratio(double x) {
  require_nonnegative(x, "bessel_ratio");
  if (x == 0.0) return 0.0;
  if (x < kBesselSeriesLimit) return power_series(1, x) / power_series(0, x);
  return hankel_sum(1, x) / hankel_sum(0, x);
}

double bessel_ratio_complement(double x) {
  require_nonnegative(x, "bessel_ratio_complement");
  if (x < kRatioAsymptoticLimit) return 1.0 - bessel_ratio(x);
  return large_x_sums(x).complement;
}

double bessel_ratio_derivative(double x) {
  require_nonnegative(x, "bessel_ratio_derivative");
  if (x == 0.0) return 0.5;
  if (x < kRatioAsymptoticLimit) {
    const double a = bessel_ratio(x);
    return 1.0 - ratio_over_x(x) - a * a;
  }
  return large_x_sums(x).derivative;
}

double bessel_ratio_second_derivative(double x) {
  require_nonnegative(x, "bessel_ratio_second_derivative");
  if (x < kSmallXLimit) {
    // d^2/dx^2 sum_k b_k x^{2k+1}
    double sum = 0.0;
    double power = x;  // x^{2k-1} for k >= 1
    for (int k = 1; k < kSmallTerms; ++k) {
      sum += (2.0 * k + 1.0) * (2.0 * k) * kSmallX[k] * power;
      power *= x * x;
    }
    return sum;
  }
  if (x < kRatioAsymptoticLimit) {
    const double a = bessel_ratio(x);
    const double d = bessel_ratio_derivative(x);
    return -d / x + a / (x * x) - 2.0 * a * d;
  }
  return large_x_sums(x).second;
}

BesselRatioJet bessel_ratio_jet(double x) {
  require_nonnegative(x, "bessel_ratio_jet");
  if (x >= kRatioAsymptoticLimit) {
    const auto sums = large_x_sums(x);
    return {bessel_ratio(x), sums.complement, sums.derivative, sums.second};
  }
  const double a = bessel_ratio(x);
  return {a, 1.0 - a, bessel_ratio_derivative(x), bessel_ratio_second_derivative(x)};
}

double inverse_bessel_ratio(double r) {
  if (!(r >= 0.0 && r < 1.0)) {
    throw DomainError("inverse_bessel_ratio: r must lie in [0, 1)");
  }
  if (r == 0.0) return 0.0;
  double lo = 0.0;
  double hi = 1.0;
  while (bessel_ratio(hi) < r) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e300) return hi;
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (bessel_ratio(mid) < r ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

} // namespace circpc
