#include "circpc/inference.hpp"

#include "circpc/error.hpp"
#include "circpc/rng.hpp"
#include "circpc/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

namespace circpc {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLogTwoPi = 1.8378770664093454835606594728112;

// Sample log-likelihood with the per-observation trigonometry done once.
class Likelihood {
public:
  Likelihood(Family family, const Dataset& data) : family_(family) {
    if (data.empty()) throw DomainError("inference needs a non-empty dataset");
    if (family == Family::CircularUniform) {
      throw DomainError("the circular uniform family has no concentration to infer");
    }
    n_ = static_cast<double>(data.size());
    cos_.reserve(data.size());
    sin_.reserve(data.size());
    for (const Angle a : data.angles) {
      cos_.push_back(std::cos(a.radians()));
      sin_.push_back(std::sin(a.radians()));
      sum_cos_ += cos_.back();
      sum_sin_ += sin_.back();
    }
  }

  double log(double mu, double c) const {
    const double cm = std::cos(mu);
    const double sm = std::sin(mu);
    switch (family_) {
      case Family::VonMises: {
        const double r = cm * sum_cos_ + sm * sum_sin_;
        if (c < kBesselSeriesLimit) return c * r - n_ * (kLogTwoPi + log_bessel_i0(c));
        return c * (r - n_) - n_ * (kLogTwoPi + std::log(bessel_i_scaled(BesselOrder::zero, c)));
      }
      case Family::Cardioid: {
        double sum = 0.0;
        for (std::size_t i = 0; i < cos_.size(); ++i) {
          const double v = 2.0 * c * (cos_[i] * cm + sin_[i] * sm);
          if (v <= -1.0) return -kInf;
          sum += std::log1p(v);
        }
        return sum - n_ * kLogTwoPi;
      }
      case Family::WrappedCauchy: {
        const double gap = 1.0 - c;
        double sum = 0.0;
        for (std::size_t i = 0; i < cos_.size(); ++i) {
          const double one_minus_cos = 1.0 - (cos_[i] * cm + sin_[i] * sm);
          sum += std::log(gap * gap + 2.0 * c * one_minus_cos);
        }
        return n_ * (std::log(gap * (1.0 + c)) - kLogTwoPi) - sum;
      }
      case Family::CircularUniform: break;
    }
    return -n_ * kLogTwoPi;
  }

  double derivative(double mu, double c) const {
    const double cm = std::cos(mu);
    const double sm = std::sin(mu);
    switch (family_) {
      case Family::VonMises:
        return cm * sum_cos_ + sm * sum_sin_ - n_ * bessel_ratio(c);
      case Family::Cardioid: {
        double sum = 0.0;
        for (std::size_t i = 0; i < cos_.size(); ++i) {
          const double cd = cos_[i] * cm + sin_[i] * sm;
          sum += 2.0 * cd / (1.0 + 2.0 * c * cd);
        }
        return sum;
      }
      case Family::WrappedCauchy: {
        const double gap = 1.0 - c;
        double sum = 0.0;
        for (std::size_t i = 0; i < cos_.size(); ++i) {
          const double one_minus_cos = 1.0 - (cos_[i] * cm + sin_[i] * sm);
          sum += (-2.0 * gap + 2.0 * one_minus_cos) / (gap * gap + 2.0 * c * one_minus_cos);
        }
        return n_ * (-1.0 / gap + 1.0 / (1.0 + c)) - sum;
      }
      case Family::CircularUniform: break;
    }
    return 0.0;
  }

private:
  Family family_;
  double n_ = 0.0;
  double sum_cos_ = 0.0;
  double sum_sin_ = 0.0;
  std::vector<double> cos_;
  std::vector<double> sin_;
};

ConcentrationSupport prior_support(const ConcentrationPrior& prior) {
  if (const auto* pc = std::get_if<PcPrior>(&prior)) return concentration_support(pc->family);
  return ref_support(std::get<ReferencePrior>(prior));
}

// Interior starting concentration from the sample resultant length.
double moment_estimate(Family family, double rbar) {
  switch (family) {
    case Family::VonMises: return std::clamp(inverse_bessel_ratio(std::min(rbar, 0.999)), 1e-2, 1e3);
    case Family::Cardioid: return std::clamp(rbar, 1e-2, 0.49);
    case Family::WrappedCauchy: return std::clamp(rbar, 1e-2, 0.99);
    case Family::CircularUniform: break;
  }
  throw DomainError("family has no concentration parameter");
}

} // namespace

std::string describe_prior(const ConcentrationPrior& prior) {
  if (const auto* pc = std::get_if<PcPrior>(&prior)) {
    std::ostringstream out;
    out << "pc(" << to_string(pc->family) << "," << to_string(pc->base)
        << ",lambda=" << pc->lambda << ")";
    return out.str();
  }
  return describe(std::get<ReferencePrior>(prior));
}

void ModelSpec::validate() const {
  if (family == Family::CircularUniform) {
    throw DomainError("the circular uniform family has no concentration to infer");
  }
  if (const auto* pc = std::get_if<PcPrior>(&prior)) {
    pc->validate();
    if (pc->family != family) throw DomainError("PC prior family does not match the model");
    return;
  }
  const auto& ref = std::get<ReferencePrior>(prior);
  circpc::validate(ref);
  const auto support = ref_support(ref);
  const auto expected = concentration_support(family);
  if (support.lower != expected.lower || support.upper != expected.upper) {
    throw DomainError("prior " + describe(ref) + " does not match the " +
                      std::string(to_string(family)) + " concentration support");
  }
}

double log_concentration_prior(const ConcentrationPrior& prior, double param) {
  if (const auto* pc = std::get_if<PcPrior>(&prior)) return pc_log_pdf(*pc, param);
  return ref_log_pdf(std::get<ReferencePrior>(prior), param);
}

double log_concentration_prior_unconstrained(const ConcentrationPrior& prior, double z) {
  if (const auto* pc = std::get_if<PcPrior>(&prior)) return pc_log_pdf_unconstrained(*pc, z);
  return ref_log_pdf_unconstrained(std::get<ReferencePrior>(prior), z);
}

double log_posterior(const ModelSpec& model, const Dataset& data, Angle mu, double concentration) {
  model.validate();
  if (!prior_support(model.prior).contains(concentration)) {
    throw DomainError("concentration outside the support");
  }
  const Likelihood lik(model.family, data);
  const double prior = log_concentration_prior(model.prior, concentration);
  if (prior == -kInf) return -kInf;
  return lik.log(mu.radians(), concentration) + prior - kLogTwoPi;
}

double log_posterior_derivative(const ModelSpec& model, const Dataset& data, Angle mu,
                                double concentration) {
  model.validate();
  const Likelihood lik(model.family, data);
  double prior;
  if (const auto* pc = std::get_if<PcPrior>(&model.prior)) {
    prior = pc_log_pdf_derivative(*pc, concentration);
  } else {
    prior = ref_log_pdf_derivative(std::get<ReferencePrior>(model.prior), concentration);
  }
  return lik.derivative(mu.radians(), concentration) + prior;
}

void McmcConfig::validate() const {
  if (iterations == 0) throw DomainError("MCMC iterations must be positive");
  if (burn_in >= iterations) throw DomainError("MCMC burn-in must be smaller than iterations");
  if (!(target_acceptance > 0.0 && target_acceptance < 1.0)) {
    throw DomainError("target acceptance must lie in (0, 1)");
  }
}

Chain run_mcmc(const ModelSpec& model, const Dataset& data, const McmcConfig& config) {
  model.validate();
  config.validate();
  const Likelihood lik(model.family, data);
  const Family family = model.family;

  const Resultant moments = mean_resultant(std::span<const Angle>(data.angles));
  double mu = config.initial_mu ? config.initial_mu->radians() : moments.mean_direction;
  double conc = config.initial_concentration ? *config.initial_concentration
                                             : moment_estimate(family, moments.length);
  if (!concentration_support(family).contains(conc)) {
    throw InitializationError("initial concentration outside the support");
  }
  double z = to_unconstrained(family, conc);

  auto log_target = [&](double m, double zz) {
    const double prior = log_concentration_prior_unconstrained(model.prior, zz);
    if (!std::isfinite(prior)) return -kInf;
    const double c = from_unconstrained(family, zz);
    if (!std::isfinite(c)) return -kInf;
    return lik.log(m, c) + prior;
  };

  double current = log_target(mu, z);
  if (!std::isfinite(current)) {
    throw InitializationError("initial state has zero posterior density");
  }

  Rng rng(config.seed);
  double log_mu_step = std::log(0.5);
  double log_z_step = std::log(0.5);
  std::size_t mu_accepted = 0;
  std::size_t z_accepted = 0;

  Chain chain;
  chain.burn_in = config.burn_in;
  chain.draws.reserve(config.iterations - config.burn_in);

  for (std::size_t t = 0; t < config.iterations; ++t) {
    const bool adapting = t < config.burn_in;

    const double mu_prop = wrap_angle(mu + std::exp(log_mu_step) * rng.normal());
    const double mu_value = log_target(mu_prop, z);
    const bool mu_ok = std::log(rng.uniform_open()) < mu_value - current;
    if (mu_ok) {
      mu = mu_prop;
      current = mu_value;
    }

    const double z_prop = z + std::exp(log_z_step) * rng.normal();
    const double z_value = log_target(mu, z_prop);
    const bool z_ok = std::log(rng.uniform_open()) < z_value - current;
    if (z_ok) {
      z = z_prop;
      current = z_value;
    }

    if (adapting) {
      const double gain = std::pow(static_cast<double>(t + 1), -0.6);
      log_mu_step += gain * ((mu_ok ? 1.0 : 0.0) - config.target_acceptance);
      log_z_step += gain * ((z_ok ? 1.0 : 0.0) - config.target_acceptance);
      log_mu_step = std::min(log_mu_step, std::log(2.0 * std::numbers::pi));
    } else {
      mu_accepted += mu_ok ? 1 : 0;
      z_accepted += z_ok ? 1 : 0;
      chain.draws.push_back({Angle(mu), from_unconstrained(family, z)});
    }
  }
  const double kept = static_cast<double>(chain.draws.size());
  chain.mu_acceptance = static_cast<double>(mu_accepted) / kept;
  chain.concentration_acceptance = static_cast<double>(z_accepted) / kept;
  chain.mu_step = std::exp(log_mu_step);
  chain.z_step = std::exp(log_z_step);
  return chain;
}

double empirical_quantile(std::vector<double> values, double p) {
  if (values.empty()) throw DomainError("quantile of an empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("quantile level must lie in [0, 1]");
  std::sort(values.begin(), values.end());
  const double pos = p * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

double effective_sample_size(const std::vector<double>& x) {
  const std::size_t n = x.size();
  if (n == 0) throw DomainError("ESS of an empty chain");
  const double count = static_cast<double>(n);
  double mean = 0.0;
  for (const double v : x) mean += v;
  mean /= count;
  auto autocov = [&](std::size_t lag) {
    double s = 0.0;
    for (std::size_t i = 0; i + lag < n; ++i) s += (x[i] - mean) * (x[i + lag] - mean);
    return s / count;
  };
  const double var = autocov(0);
  if (!(var > 0.0)) return count;

  double tau = -1.0;
  for (std::size_t m = 0; 2 * m + 1 < n; ++m) {
    const double pair = (autocov(2 * m) + autocov(2 * m + 1)) / var;
    if (pair <= 0.0) break;
    tau += 2.0 * pair;
  }
  if (!(tau > 0.0)) return count;
  return std::min(count, count / tau);
}

PosteriorSummary summarize(const Chain& chain) {
  if (chain.draws.empty()) throw DomainError("summarize: empty chain");
  std::vector<double> conc;
  conc.reserve(chain.size());
  double s = 0.0;
  double c = 0.0;
  double total = 0.0;
  for (const Draw& d : chain.draws) {
    conc.push_back(d.concentration);
    total += d.concentration;
    s += std::sin(d.mu.radians());
    c += std::cos(d.mu.radians());
  }
  PosteriorSummary out;
  out.concentration_mean = total / static_cast<double>(conc.size());
  out.concentration_median = empirical_quantile(conc, 0.5);
  out.concentration_ci_low = empirical_quantile(conc, 0.025);
  out.concentration_ci_high = empirical_quantile(conc, 0.975);
  out.mu_circular_mean = Angle(std::atan2(s, c));
  out.effective_sample_size = effective_sample_size(conc);
  out.draws = conc.size();
  return out;
}

void write_chain_csv(std::ostream& out, const Chain& chain) {
  out << "iter,mu,concentration\n";
  const auto old = out.precision(17);
  for (std::size_t i = 0; i < chain.draws.size(); ++i) {
    out << chain.burn_in + i + 1 << ',' << chain.draws[i].mu.radians() << ','
        << chain.draws[i].concentration << '\n';
  }
  out.precision(old);
}

} // namespace circpc
