#include "circpc/error.hpp"
#include "circpc/pc_priors.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

using namespace circpc;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Case {
  Family family;
  BaseModel base;
};
const Case kCases[] = {{Family::VonMises, BaseModel::Uniform},
                       {Family::VonMises, BaseModel::PointMass},
                       {Family::Cardioid, BaseModel::Uniform},
                       {Family::Cardioid, BaseModel::CardioidCurve},
                       {Family::WrappedCauchy, BaseModel::Uniform}};

std::string name(const Case& c) {
  return std::string(to_string(c.family)) + "/" + std::string(to_string(c.base));
}

std::vector<double> interior(Family f) {
  switch (f) {
    case Family::VonMises: return {0.01, 0.3, 1.0, 2.5, 8.0, 30.0, 200.0};
    case Family::Cardioid: return {0.001, 0.05, 0.2, 0.35, 0.45, 0.499};
    default: return {0.001, 0.1, 0.4, 0.8, 0.95, 0.999};
  }
}

/// lambda e^{-lambda d} |d'| / (1 - e^{-lambda d_max}) written out directly.
double truncated_pdf_oracle(const Case& c, double lambda, double x) {
  const auto profile = DistanceProfile::make(c.family, c.base);
  const double z = std::isinf(profile.d_max) ? 1.0 : -std::expm1(-lambda * profile.d_max);
  return lambda * std::exp(-lambda * distance(profile, x)) *
         std::abs(distance_derivative(profile, x)) / z;
}

double mass_between(const PcPrior& prior, double a, double b) {
  return oracle::integrate_singular([&](double x) { return pc_pdf(prior, x); }, a, b);
}

double threshold_oracle(Family f, double U) {
  switch (f) {
    case Family::VonMises: return 2.0 * oracle::kPi / U - 1.0;
    case Family::Cardioid: return U / 2.0;
    default: return 1.0 - U / (2.0 * oracle::kPi);
  }
}

} // namespace

TEST(PcPrior, ConstructionValidates) {
  EXPECT_THROW((void)PcPrior::make(Family::VonMises, BaseModel::Uniform, 0.0), DomainError);
  EXPECT_THROW((void)PcPrior::make(Family::VonMises, BaseModel::Uniform, -1.0), DomainError);
  EXPECT_THROW((void)PcPrior::make(Family::WrappedCauchy, BaseModel::PointMass, 1.0), DomainError);
  EXPECT_THROW((void)PcPrior::make(Family::CircularUniform, BaseModel::Uniform, 1.0), DomainError);
  EXPECT_EQ(parse_normalization("paper"), Normalization::PaperExact);
  EXPECT_EQ(parse_normalization(to_string(Normalization::Truncated)), Normalization::Truncated);
  EXPECT_THROW((void)parse_normalization("exact"), DomainError);
}

TEST(PcPrior, DensityMatchesExponentialInDistance) {
  for (const Case& c : kCases) {
    for (const double lambda : {0.2, 1.0, 7.0}) {
      const PcPrior prior = PcPrior::make(c.family, c.base, lambda);
      for (const double x : interior(c.family)) {
        const double expected = truncated_pdf_oracle(c, lambda, x);
        EXPECT_NEAR(pc_pdf(prior, x), expected, 1e-11 * expected) << name(c) << " x=" << x;
        EXPECT_NEAR(pc_log_pdf(prior, x), std::log(expected), 1e-11 * std::abs(std::log(expected)) + 1e-12);
      }
    }
  }
}

TEST(PcPrior, TruncatedCdfMatchesIntegratedDensity) {
  for (const Case& c : kCases) {
    const PcPrior prior = PcPrior::make(c.family, c.base, 1.5);
    const double lower = concentration_support(c.family).lower;
    EXPECT_EQ(pc_cdf(prior, lower), 0.0) << name(c);
    for (const double x : interior(c.family)) {
      if (c.family == Family::VonMises && x > 50.0) continue;
      EXPECT_NEAR(pc_cdf(prior, x), mass_between(prior, lower, x), 1e-9) << name(c) << " x=" << x;
    }
  }
}

TEST(PcPrior, CdfIsMonotoneAndReachesOne) {
  for (const Case& c : kCases) {
    const PcPrior prior = PcPrior::make(c.family, c.base, 0.7);
    double previous = 0.0;
    const auto s = concentration_support(c.family);
    const double top = std::isinf(s.upper) ? 1e12 : s.upper;
    for (int i = 1; i < 300; ++i) {
      const double x = s.lower + (top - s.lower) * std::pow(i / 300.0, 6.0);
      const double f = pc_cdf(prior, x);
      EXPECT_GE(f, previous);
      EXPECT_LE(f, 1.0);
      previous = f;
    }
  }
  const PcPrior wc = PcPrior::make(Family::WrappedCauchy, BaseModel::Uniform, 3.0);
  EXPECT_GT(pc_cdf(wc, 1.0 - 1e-12), 0.99);
}

TEST(PcPrior, PaperExactLeavesDocumentedMassForBoundedPriors) {
  for (const Case& c : kCases) {
    const double lambda = 2.0;
    const PcPrior exact = PcPrior::make(c.family, c.base, lambda, Normalization::PaperExact);
    const PcPrior trunc = PcPrior::make(c.family, c.base, lambda);
    const auto profile = DistanceProfile::make(c.family, c.base);
    const bool lossy = c.base != BaseModel::Uniform;
    for (const double x : interior(c.family)) {
      const double ratio = pc_pdf(exact, x) / pc_pdf(trunc, x);
      const double expected = lossy ? -std::expm1(-lambda * profile.d_max) : 1.0;
      EXPECT_NEAR(ratio, expected, 1e-12) << name(c);
    }
    EXPECT_NEAR(normalizing_constant(exact), 1.0 * (lossy ? 1.0 : normalizing_constant(trunc)), 1e-15);
  }
}

TEST(PcPrior, QuantileInvertsCdf) {
  for (const Case& c : kCases) {
    const PcPrior prior = PcPrior::make(c.family, c.base, 1.3);
    for (const double p : {0.0, 1e-6, 0.1, 0.5, 0.9, 0.999}) {
      const double x = pc_quantile(prior, p);
      // one ulp of x moves the CDF by pdf * ulp, which dominates as rho -> 1
      const double ulp = std::nextafter(x, kInf) - x;
      EXPECT_NEAR(pc_cdf(prior, x), p, 1e-9 + 2.0 * pc_pdf(prior, x) * ulp) << name(c) << " p=" << p;
    }
    EXPECT_THROW((void)pc_quantile(prior, 1.5), DomainError);
  }
  const PcPrior exact =
      PcPrior::make(Family::VonMises, BaseModel::PointMass, 1.0, Normalization::PaperExact);
  EXPECT_THROW((void)pc_quantile(exact, 0.5), UnsupportedModeError);
  const PcPrior pm = PcPrior::make(Family::VonMises, BaseModel::PointMass, 1.0);
  EXPECT_EQ(pc_quantile(pm, 1.0), std::numeric_limits<double>::max());
}

TEST(PcPrior, SamplesFollowTheCdf) {
  const std::size_t n = 20000;
  for (const Case& c : kCases) {
    const PcPrior prior = PcPrior::make(c.family, c.base, 2.0);
    std::vector<double> xs = pc_sample(prior, n, 9);
    EXPECT_EQ(xs, pc_sample(prior, n, 9));
    std::sort(xs.begin(), xs.end());
    double ks = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double f = pc_cdf(prior, xs[i]);
      ks = std::max({ks, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
    }
    EXPECT_LT(ks * std::sqrt(static_cast<double>(n)), 1.95) << name(c);
  }
}

TEST(PcPrior, LogDensityDerivativeMatchesFiniteDifference) {
  for (const Case& c : kCases) {
    const PcPrior prior = PcPrior::make(c.family, c.base, 1.1);
    for (const double x : interior(c.family)) {
      const double gap = concentration_support(c.family).upper - x;
      const double h = 1e-4 * std::min({x, gap, 1.0});
      const double fd = oracle::derivative([&](double y) { return pc_log_pdf(prior, y); }, x, h);
      EXPECT_NEAR(pc_log_pdf_derivative(prior, x), fd, 1e-6 * std::abs(fd) + 1e-6)
          << name(c) << " x=" << x;
    }
  }
}

TEST(PcPrior, UnconstrainedDensityIsTheChangeOfVariables) {
  for (const Case& c : kCases) {
    const PcPrior prior = PcPrior::make(c.family, c.base, 0.8);
    for (const double x : interior(c.family)) {
      const double z = to_unconstrained(c.family, x);
      EXPECT_NEAR(pc_log_pdf_unconstrained(prior, z),
                  pc_log_pdf(prior, x) + log_abs_param_jacobian(c.family, z), 1e-9)
          << name(c);
    }
    for (const double z : {-1e6, -700.0, 700.0, 1e6}) {
      EXPECT_TRUE(std::isfinite(pc_log_pdf_unconstrained(prior, z))) << name(c) << " z=" << z;
    }
    EXPECT_EQ(pc_log_pdf_unconstrained(prior, kInf), -kInf);
  }
}

TEST(Tail, TransformsAndThresholdsAreInverse) {
  EXPECT_NEAR(tail_transform(Family::VonMises, 1.0), oracle::kPi, 1e-15);
  EXPECT_NEAR(tail_transform(Family::Cardioid, 0.2), 0.4, 1e-15);
  EXPECT_NEAR(tail_transform(Family::WrappedCauchy, 0.75), oracle::kPi / 2.0, 1e-15);
  for (const Family f : {Family::VonMises, Family::WrappedCauchy}) {
    for (const double U : {0.1, 1.0, 3.0, 6.0}) {
      EXPECT_NEAR(tail_transform(f, tail_threshold(f, U)), U, 1e-13);
      EXPECT_NEAR(tail_threshold(f, U), threshold_oracle(f, U), 1e-13);
    }
  }
  EXPECT_NEAR(tail_threshold(Family::Cardioid, 0.6), 0.3, 1e-15);
  EXPECT_THROW(TailSpec({0.0, 0.5}).validate(Family::VonMises), DomainError);
  EXPECT_THROW(TailSpec({1.0, 1.0}).validate(Family::VonMises), DomainError);
  EXPECT_THROW(TailSpec({1.0, 0.5}).validate(Family::Cardioid), DomainError);
  EXPECT_NO_THROW(TailSpec({0.5, 0.5}).validate(Family::Cardioid));
}

TEST(Calibration, RoundTripsOnRandomTailStatements) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u01(0.02, 0.98);
  for (const Case& c : kCases) {
    for (int i = 0; i < 30; ++i) {
      const double U = c.family == Family::Cardioid ? 0.05 + 0.9 * u01(rng) : 0.2 + 5.8 * u01(rng);
      const TailRange range = attainable_tail_range(c.family, c.base, U);
      ASSERT_LT(range.low, range.high);
      const double alpha = range.low + (range.high - range.low) * u01(rng);
      const Calibration cal = calibrate(c.family, c.base, {U, alpha});
      EXPECT_NEAR(cal.roundtrip_alpha, alpha, 1e-9) << name(c);
      // integrate the calibrated density over the tail region
      const PcPrior prior = PcPrior::make(c.family, c.base, cal.lambda);
      const double t = threshold_oracle(c.family, U);
      const double lower = concentration_support(c.family).lower;
      const double tail = c.family == Family::Cardioid ? 1.0 - mass_between(prior, lower, t)
                                                       : mass_between(prior, lower, t);
      EXPECT_NEAR(tail, alpha, 1e-7) << name(c) << " U=" << U << " alpha=" << alpha;
      const bool closed = c.base == BaseModel::Uniform;
      EXPECT_EQ(cal.method, closed ? CalibrationMethod::ClosedForm : CalibrationMethod::Numeric);
    }
  }
}

TEST(Calibration, ClosedFormsAgreeWithBisectionWhereTheyApply) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u01(0.05, 0.95);
  for (int i = 0; i < 30; ++i) {
    const double U = 0.3 + 5.5 * u01(rng), alpha = u01(rng);
    EXPECT_NEAR(calibrate_lambda_paper(Family::VonMises, BaseModel::Uniform, {U, alpha}),
                calibrate_lambda(Family::VonMises, BaseModel::Uniform, {U, alpha}), 1e-8);
    const double wc = calibrate_lambda_paper(Family::WrappedCauchy, BaseModel::Uniform, {U, alpha});
    EXPECT_NEAR(wc, calibrate_lambda(Family::WrappedCauchy, BaseModel::Uniform, {U, alpha}), 1e-8);
    // the printed expression, with U/pi - U^2/(4 pi^2) = 1 - rho^2 at the threshold
    const double v = U / oracle::kPi - U * U / (4.0 * oracle::kPi * oracle::kPi);
    EXPECT_NEAR(wc, -std::log1p(-alpha) / std::sqrt(-std::log(v)), 1e-10 * wc);

    const double Uc = 0.05 + 0.9 * u01(rng);
    const TailRange r = attainable_tail_range(Family::Cardioid, BaseModel::Uniform, Uc);
    const double ac = r.low + (r.high - r.low) * u01(rng);
    EXPECT_NEAR(calibrate_lambda_paper(Family::Cardioid, BaseModel::Uniform, {Uc, ac}),
                calibrate_lambda(Family::Cardioid, BaseModel::Uniform, {Uc, ac}), 1e-8);
  }
}

TEST(Calibration, ReportsInfeasibleStatementsWithTheAttainableRange) {
  const double U = oracle::kPi / 2.0;
  const TailRange r = attainable_tail_range(Family::VonMises, BaseModel::PointMass, U);
  EXPECT_EQ(r.low, 0.0);
  EXPECT_LT(r.high, 1.0);
  try {
    (void)calibrate_lambda(Family::VonMises, BaseModel::PointMass, {U, 0.5 * (r.high + 1.0)});
    FAIL() << "expected InfeasibleTailError";
  } catch (const InfeasibleTailError& e) {
    EXPECT_EQ(e.alpha_low(), r.low);
    EXPECT_DOUBLE_EQ(e.alpha_high(), r.high);
  }
  const TailRange full = attainable_tail_range(Family::VonMises, BaseModel::Uniform, U);
  EXPECT_EQ(full.low, 0.0);
  EXPECT_EQ(full.high, 1.0);
}

TEST(Calibration, LargerAlphaMeansStrongerShrinkageToUniform) {
  for (const Family f : {Family::VonMises, Family::WrappedCauchy}) {
    double previous = 0.0;
    for (const double alpha : {0.05, 0.2, 0.5, 0.8, 0.95}) {
      const double lambda = calibrate_lambda(f, BaseModel::Uniform, {1.0, alpha});
      EXPECT_GT(lambda, previous);
      previous = lambda;
    }
  }
}
