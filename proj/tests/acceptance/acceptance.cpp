// Prints one PASS/FAIL line per acceptance criterion; exit status is the
// number of failures (capped at 1).

#include "circpc/circpc.hpp"
#include "oracles.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace circpc;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* pattern, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

/// Uniform draws on [lo, hi] from a fixed-seed stream owned by the test.
class Draws {
public:
  explicit Draws(std::uint64_t seed) : engine_(seed) {}
  double operator()(double lo, double hi) {
    return lo + (hi - lo) * std::uniform_real_distribution<double>(0.0, 1.0)(engine_);
  }

private:
  std::mt19937_64 engine_;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// 1 -------------------------------------------------------------------------
Outcome kld_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  Draws draw(101);
  double worst_vm = 0.0, worst_card = 0.0, worst_wc = 0.0;
  for (int i = 0; i < 50; ++i) {
    const double k = draw(0.0, 20.0), k0 = draw(0.0, 20.0), mu = draw(0.0, 2 * oracle::kPi);
    const double q = oracle::kld_quadrature([&](double x) { return oracle::vm_pdf(x, mu, k); },
                                            [&](double x) { return oracle::vm_pdf(x, mu, k0); });
    worst_vm = std::max(worst_vm, std::abs(kld_vm(k, k0) - q));
  }
  for (int i = 0; i < 50; ++i) {
    const double l = draw(0.0, 0.49), l0 = draw(0.001, 0.49), mu = draw(0.0, 2 * oracle::kPi);
    const double q =
        oracle::kld_quadrature([&](double x) { return oracle::cardioid_pdf(x, mu, l); },
                               [&](double x) { return oracle::cardioid_pdf(x, mu, l0); });
    worst_card = std::max(worst_card, std::abs(kld_cardioid(l, l0) - q));
  }
  for (int i = 0; i < 50; ++i) {
    const double r = draw(0.0, 0.95), mu = draw(0.0, 2 * oracle::kPi);
    const double q = oracle::kld_quadrature([&](double x) { return oracle::wc_pdf(x, mu, r); },
                                            [](double) { return 1.0 / (2 * oracle::kPi); });
    worst_wc = std::max(worst_wc, std::abs(kld_wc(r) - q));
  }
  const double t = seconds_since(t0);
  const double worst = std::max({worst_vm, worst_card, worst_wc});
  return {worst <= 1e-7 && t < 5.0,
          fmt("max|dKLD| vm=%.2e cardioid=%.2e wc=%.2e (tol 1e-7), %.2fs (limit 5s)", worst_vm,
              worst_card, worst_wc, t)};
}

// 2 -------------------------------------------------------------------------
struct Pair {
  Family family;
  BaseModel base;
  const char* name;
};
const Pair kPairs[] = {{Family::VonMises, BaseModel::Uniform, "vm/uniform"},
                       {Family::VonMises, BaseModel::PointMass, "vm/point-mass"},
                       {Family::Cardioid, BaseModel::Uniform, "cardioid/uniform"},
                       {Family::Cardioid, BaseModel::CardioidCurve, "cardioid/curve"},
                       {Family::WrappedCauchy, BaseModel::Uniform, "wc/uniform"}};

/// Mass on the parameter scale up to `split`, plus the remainder as the
/// integral of the unconstrained density beyond to_unconstrained(split).
double total_mass(const PcPrior& prior) {
  const double split = prior.family == Family::VonMises ? 50.0
                       : prior.family == Family::Cardioid ? 0.45
                                                          : 0.9;
  const double lower = concentration_support(prior.family).lower;
  const double body =
      oracle::integrate_singular([&](double x) { return pc_pdf(prior, x); }, lower, split);
  const double z0 = to_unconstrained(prior.family, split);
  const double tail = oracle::integrate_to_infinity(
      [&](double z) { return std::exp(pc_log_pdf_unconstrained(prior, z)); }, z0);
  return body + tail;
}

Outcome normalization() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  std::string where;
  for (const Pair& p : kPairs) {
    for (const double lambda : {0.1, 1.0, 5.0, 20.0}) {
      const double err = std::abs(total_mass(PcPrior::make(p.family, p.base, lambda)) - 1.0);
      if (err >= worst) {
        worst = err;
        where = fmt("%s lambda=%g", p.name, lambda);
      }
    }
  }
  const double t = seconds_since(t0);
  return {worst <= 1e-6 && t < 5.0,
          fmt("max|mass-1|=%.2e at %s (tol 1e-6), %.2fs (limit 5s)", worst, where.c_str(), t)};
}

// 3 -------------------------------------------------------------------------
std::vector<double> interior_points(Family family, std::size_t n) {
  std::vector<double> xs;
  for (std::size_t i = 0; i < n; ++i) {
    const double u = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    switch (family) {
      case Family::VonMises: xs.push_back(std::pow(10.0, -2.0 + 4.0 * u)); break;
      case Family::Cardioid: xs.push_back(0.5 * (0.005 + 0.99 * u)); break;
      default: xs.push_back(0.005 + 0.99 * u); break;
    }
  }
  return xs;
}

Outcome cdf_pdf_consistency() {
  double worst = 0.0;
  std::string where;
  for (const Pair& p : kPairs) {
    const PcPrior prior = PcPrior::make(p.family, p.base, 1.0);
    for (const double x : interior_points(p.family, 200)) {
      const double scale = p.family == Family::VonMises ? x : std::min(x, 0.5 * (1.0 - x));
      const double fd = oracle::derivative([&](double y) { return pc_cdf(prior, y); }, x,
                                           1e-3 * std::min(scale, 1.0));
      const double rel = std::abs(fd - pc_pdf(prior, x)) / pc_pdf(prior, x);
      if (rel >= worst) {
        worst = rel;
        where = fmt("%s x=%g", p.name, x);
      }
    }
  }
  return {worst <= 1e-5, fmt("max rel err=%.2e at %s (tol 1e-5)", worst, where.c_str())};
}

// 4 -------------------------------------------------------------------------
double d_max_oracle(BaseModel base, Family family) {
  if (base == BaseModel::PointMass) return 1.0;
  if (base == BaseModel::CardioidCurve) return std::sqrt(std::log(2.0));
  if (family == Family::Cardioid) return std::sqrt(1.0 - std::log(2.0));
  return std::numeric_limits<double>::infinity();
}

/// P(Q > U) written out from the truncated exponential law of the distance.
double tail_oracle(const Pair& p, double lambda, double U) {
  const auto profile = DistanceProfile::make(p.family, p.base);
  double threshold = 0.0;
  bool below = true;  // event is {param < threshold}
  switch (p.family) {
    case Family::VonMises: threshold = 2 * oracle::kPi / U - 1.0; break;
    case Family::Cardioid: threshold = U / 2.0; below = false; break;
    default: threshold = 1.0 - U / (2 * oracle::kPi); break;
  }
  const double d = distance(profile, threshold);
  const double dm = d_max_oracle(p.base, p.family);
  const double G = -std::expm1(-lambda * d) / (std::isinf(dm) ? 1.0 : -std::expm1(-lambda * dm));
  const bool distance_below = below == profile.increasing();
  return distance_below ? G : 1.0 - G;
}

Outcome calibration_roundtrip() {
  Draws draw(404);
  double worst = 0.0, worst_wc = 0.0;
  std::string where;
  for (const Pair& p : kPairs) {
    for (int i = 0; i < 20; ++i) {
      const double U = p.family == Family::Cardioid ? draw(0.05, 0.95) : draw(0.2, 6.0);
      const TailRange range = attainable_tail_range(p.family, p.base, U);
      const double alpha = range.low + (range.high - range.low) * draw(0.02, 0.98);
      const double lambda = calibrate_lambda(p.family, p.base, {U, alpha});
      const double err = std::abs(tail_oracle(p, lambda, U) - alpha);
      if (err >= worst) {
        worst = err;
        where = fmt("%s U=%g alpha=%g", p.name, U, alpha);
      }
      if (p.family == Family::WrappedCauchy) {
        const double paper = calibrate_lambda_paper(p.family, p.base, {U, alpha});
        worst_wc = std::max(worst_wc, std::abs(paper - lambda));
      }
    }
  }
  return {worst <= 1e-8 && worst_wc <= 1e-8,
          fmt("max|alpha err|=%.2e at %s; wc closed form vs numeric %.2e (tol 1e-8)", worst,
              where.c_str(), worst_wc)};
}

// 5 -------------------------------------------------------------------------
double bisect(const std::function<double(double)>& f, double lo, double hi) {
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    ((f(lo) < 0) == (f(mid) < 0) ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

Outcome caption_lambdas() {
  const double m = std::log(2.0) / 0.34;
  const double l_pcu = bisect(
      [&](double l) { return pc_cdf(PcPrior::make(Family::VonMises, BaseModel::Uniform, l), m) - 0.5; },
      1e-3, 100.0);
  const auto pm = DistanceProfile::make(Family::VonMises, BaseModel::PointMass);
  const double l_pm =
      bisect([&](double l) { return std::exp(-l * distance(pm, m)) - 0.5; }, 1e-3, 100.0);
  const bool pass = std::abs(l_pcu - 0.92) <= 0.05 && std::abs(l_pm - 1.26) <= 0.05;
  return {pass, fmt("lambda_PCU=%.4f (0.92+-0.05), lambda_pm=%.4f (1.26+-0.05)", l_pcu, l_pm)};
}

// 6 -------------------------------------------------------------------------
Outcome distance_scale_claims() {
  const auto uni = DistanceProfile::make(Family::VonMises, BaseModel::Uniform);
  const auto pm = DistanceProfile::make(Family::VonMises, BaseModel::PointMass);
  const ReferencePrior gamma = GammaOneB{0.34}, h2 = H2{}, h3 = H3{};
  const AuditReport a3 = overfit_audit(h3, uni);
  const AuditReport a2 = overfit_audit(h2, uni);
  const AuditReport ag = overfit_audit(gamma, uni);
  const double pg = distance_scale_pdf(gamma, pm, 0.0);
  const double p2 = distance_scale_pdf(h2, pm, 0.0);
  const double p3 = distance_scale_pdf(h3, pm, 0.0);
  const PcPrior pc = PcPrior::make(Family::VonMises, BaseModel::PointMass, 1.26);
  const double ppc =
      distance_scale_pdf([&](double k) { return pc_pdf(pc, k); }, pm, 0.0);
  const bool pass = a3.density_at_zero == 0.0 && a2.density_at_zero > 0.0 &&
                    a2.monotone_decreasing && ag.argmax_d > 0.5 && ag.argmax_d < 1.5 &&
                    pg == 0.0 && p2 == 0.0 && p3 == 0.0 && ppc > 0.0;
  return {pass, fmt("h3(0)=%g h2(0)=%.4f h2 monotone=%d gamma argmax=%.3f; point-mass: "
                    "gamma(0)=%g h2(0)=%g h3(0)=%g pc(0)=%.4f",
                    a3.density_at_zero, a2.density_at_zero, int(a2.monotone_decreasing),
                    ag.argmax_d, pg, p2, p3, ppc)};
}

// 7 -------------------------------------------------------------------------
Outcome sampler_resultants() {
  const std::size_t n = 100000;
  struct Case {
    DistributionSpec spec;
    double expected;
  };
  std::vector<Case> cases;
  for (const double k : {0.5, 2.0, 10.0}) {
    cases.push_back({DistributionSpec::von_mises(1.0, k), oracle::bessel_ratio(k)});
  }
  for (const double r : {0.2, 0.6, 0.9}) {
    cases.push_back({DistributionSpec::wrapped_cauchy(4.0, r), r});
  }
  for (const double l : {0.1, 0.25, 0.45}) {
    const double mu = 2.5;
    const double expected = oracle::integrate(
        [&](double x) { return std::cos(x - mu) * oracle::cardioid_pdf(x, mu, l); }, 0.0,
        2 * oracle::kPi);
    cases.push_back({DistributionSpec::cardioid(mu, l), expected});
  }
  double worst_z = 0.0;
  std::uint64_t seed = 700;
  for (const Case& c : cases) {
    const Dataset data = sample(c.spec, n, seed++);
    double sc = 0.0, ss = 0.0;
    for (const Angle a : data.angles) {
      sc += std::cos(a.radians());
      ss += std::sin(a.radians());
    }
    const double rbar = std::hypot(sc, ss) / static_cast<double>(n);
    const double dir = std::atan2(ss, sc);
    double m = 0.0, m2 = 0.0;
    for (const Angle a : data.angles) {
      const double v = std::cos(a.radians() - dir);
      m += v;
      m2 += v * v;
    }
    m /= static_cast<double>(n);
    const double se = std::sqrt((m2 / static_cast<double>(n) - m * m) / static_cast<double>(n));
    worst_z = std::max(worst_z, std::abs(rbar - c.expected) / se);
  }
  return {worst_z <= 3.0, fmt("max |Rbar - rho|/SE = %.2f over 9 cases (limit 3)", worst_z)};
}

// 8 -------------------------------------------------------------------------
Outcome inference_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  const Dataset data = sample(DistributionSpec::von_mises(oracle::kPi, 2.0), 30, 2024);
  const double lambda =
      calibrate_lambda(Family::VonMises, BaseModel::Uniform, {oracle::kPi / 2.0, 0.5});
  const PcPrior prior = PcPrior::make(Family::VonMises, BaseModel::Uniform, lambda);

  const int G = 400;
  const double kmax = 12.0;
  std::vector<double> lp(static_cast<std::size_t>(G) * G);
  double top = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < G; ++i) {
    const double mu = 2 * oracle::kPi * (i + 0.5) / G;
    double c = 0.0;
    for (const Angle a : data.angles) c += std::cos(a.radians() - mu);
    for (int j = 0; j < G; ++j) {
      const double k = kmax * (j + 0.5) / G;
      const double v = k * c - 30.0 * std::log(boost::math::cyl_bessel_i(0, k)) +
                       std::log(pc_pdf(prior, k));
      lp[static_cast<std::size_t>(i) * G + j] = v;
      top = std::max(top, v);
    }
  }
  double num = 0.0, den = 0.0;
  for (int i = 0; i < G; ++i) {
    for (int j = 0; j < G; ++j) {
      const double w = std::exp(lp[static_cast<std::size_t>(i) * G + j] - top);
      num += w * kmax * (j + 0.5) / G;
      den += w;
    }
  }
  const double grid_mean = num / den;

  McmcConfig config;
  config.iterations = 200000;
  config.burn_in = 20000;
  config.seed = 88;
  const PosteriorSummary s = summarize(run_mcmc({Family::VonMises, prior}, data, config));
  const double t = seconds_since(t0);
  return {std::abs(s.concentration_mean - grid_mean) <= 0.05 && t < 60.0,
          fmt("MCMC mean=%.4f grid mean=%.4f (tol 0.05), ESS=%.0f, %.2fs (limit 60s)",
              s.concentration_mean, grid_mean, s.effective_sample_size, t)};
}

// 9, 10 ---------------------------------------------------------------------
SimStudyConfig desk_study(std::size_t workers) {
  SimStudyConfig config = default_study(Family::VonMises);
  config.replicates = 20;
  config.sample_sizes = {100, 300};
  config.truths = {0.33, 1.0, 3.0};
  config.workers = workers;
  return config;
}

std::string to_csv(const SimStudyResult& result) {
  std::ostringstream out;
  write_study_csv(out, result);
  return out.str();
}

SimStudyResult desk_result;
std::string desk_csv;

Outcome desk_simulation() {
  const auto t0 = std::chrono::steady_clock::now();
  desk_result = run_sim_study(desk_study(4));
  desk_csv = to_csv(desk_result);
  const double t = seconds_since(t0);

  auto avg = [&](const std::string& prior, const std::string& hyper, double truth, std::size_t n) {
    for (const SimStudyRow& r : desk_result.rows) {
      if (r.prior == prior && r.hyper == hyper && r.truth == truth && r.n == n) {
        return r.post_mean_avg;
      }
    }
    return std::numeric_limits<double>::quiet_NaN();
  };
  std::vector<std::string> alphas, rates;
  for (const SimStudyRow& r : desk_result.rows) {
    auto& list = r.prior == "pc-uniform" ? alphas : rates;
    if (std::find(list.begin(), list.end(), r.hyper) == list.end()) list.push_back(r.hyper);
  }

  bool trend = true;
  std::string trend_detail;
  for (const double truth : {0.33, 1.0, 3.0}) {
    double e100 = 0.0, e300 = 0.0;
    for (const std::string& a : alphas) {
      e100 += std::abs(avg("pc-uniform", a, truth, 100) - truth) / alphas.size();
      e300 += std::abs(avg("pc-uniform", a, truth, 300) - truth) / alphas.size();
    }
    trend = trend && e300 <= e100;
    trend_detail += fmt(" k=%g:%.3f->%.3f", truth, e100, e300);
  }

  auto spread = [&](const std::string& prior, const std::vector<std::string>& hypers) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const std::string& h : hypers) {
      const double v = avg(prior, h, 1.0, 300);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    return hi - lo;
  };
  const double s_pc = spread("pc-uniform", alphas);
  const double s_gamma = spread("gamma", rates);
  std::size_t failed = 0;
  for (const SimStudyRow& r : desk_result.rows) failed += r.cells_failed;

  return {trend && s_pc < s_gamma && failed == 0 && t < 1200.0,
          fmt("(a) PC mean abs error N=100->300:%s; (b) spread at k=1,N=300: PC %.4f < gamma "
              "%.4f; failed replicates %zu; %.1fs (limit 1200s)",
              trend_detail.c_str(), s_pc, s_gamma, failed, t)};
}

Outcome reproducibility() {
  const std::string again = to_csv(run_sim_study(desk_study(4)));
  const std::string serial = to_csv(run_sim_study(desk_study(1)));
  const std::string three = to_csv(run_sim_study(desk_study(3)));
  const bool pass = !desk_csv.empty() && again == desk_csv && serial == desk_csv &&
                    three == desk_csv;
  return {pass, fmt("rerun identical=%d, 1 worker identical=%d, 3 workers identical=%d "
                    "(%zu bytes)",
                    int(again == desk_csv), int(serial == desk_csv), int(three == desk_csv),
                    desk_csv.size())};
}

} // namespace

int main() {
  struct Criterion {
    const char* name;
    Outcome (*run)();
  };
  const Criterion criteria[] = {
      {"kld oracle agreement", kld_oracle},
      {"pc prior normalization", normalization},
      {"cdf/pdf consistency", cdf_pdf_consistency},
      {"calibration roundtrip", calibration_roundtrip},
      {"caption lambdas", caption_lambdas},
      {"distance-scale claims", distance_scale_claims},
      {"sampler resultants", sampler_resultants},
      {"inference oracle", inference_oracle},
      {"desk-scale simulation study", desk_simulation},
      {"reproducibility", reproducibility},
  };
  int failures = 0;
  int index = 1;
  for (const Criterion& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    std::printf("%s [%d] %s: %s\n", o.pass ? "PASS" : "FAIL", index++, c.name, o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failures;
  }
  std::printf("%d/%d criteria passed\n", 10 - failures, 10);
  return failures == 0 ? 0 : 1;
}
