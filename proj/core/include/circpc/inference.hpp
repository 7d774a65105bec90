#pragma once

#include "circpc/distributions.hpp"
#include "circpc/pc_priors.hpp"
#include "circpc/reference_priors.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace circpc {

using ConcentrationPrior = std::variant<PcPrior, ReferencePrior>;

/// Label such as "pc(vm,uniform,lambda=0.9)" or a reference prior label.
[[nodiscard]] std::string describe_prior(const ConcentrationPrior& prior);

/// Observation family plus the prior on its concentration. The location
/// prior is always circular uniform.
struct ModelSpec {
  Family family = Family::VonMises;
  ConcentrationPrior prior = PcPrior{};

  /// Throws DomainError if the prior does not live on the family's support.
  void validate() const;
};

[[nodiscard]] double log_concentration_prior(const ConcentrationPrior& prior, double param);
/// Log prior density of z = to_unconstrained(param).
[[nodiscard]] double log_concentration_prior_unconstrained(const ConcentrationPrior& prior,
                                                           double z);

/// sum log f(x_i | mu, conc) + log pi(conc) - log(2 pi).
[[nodiscard]] double log_posterior(const ModelSpec& model, const Dataset& data, Angle mu,
                                   double concentration);

/// d/dconc of log_posterior at an interior concentration.
[[nodiscard]] double log_posterior_derivative(const ModelSpec& model, const Dataset& data, Angle mu,
                                              double concentration);

struct McmcConfig {
  std::size_t iterations = 20000;
  std::size_t burn_in = 5000;
  std::uint64_t seed = 0;
  /// Moment estimates from the data when unset.
  std::optional<Angle> initial_mu;
  std::optional<double> initial_concentration;
  double target_acceptance = 0.44;

  void validate() const;
};

struct Draw {
  Angle mu;
  double concentration;
};

struct Chain {
  std::vector<Draw> draws;        // post burn-in
  std::size_t burn_in = 0;
  double mu_acceptance = 0.0;     // post burn-in acceptance rates
  double concentration_acceptance = 0.0;
  double mu_step = 0.0;           // frozen proposal scales
  double z_step = 0.0;

  [[nodiscard]] std::size_t size() const noexcept { return draws.size(); }
};

/// Component-wise adaptive random-walk Metropolis on (mu, z). mu moves by
/// a wrapped Gaussian step; z = to_unconstrained(conc) by a Gaussian step.
/// Step scales adapt by Robbins-Monro during burn-in and are then frozen.
/// Throws InitializationError if the starting state has zero density.
[[nodiscard]] Chain run_mcmc(const ModelSpec& model, const Dataset& data, const McmcConfig& config);

struct PosteriorSummary {
  double concentration_mean;
  double concentration_median;
  double concentration_ci_low;   // 2.5% quantile
  double concentration_ci_high;  // 97.5% quantile
  Angle mu_circular_mean;
  double effective_sample_size;  // of the concentration draws
  std::size_t draws;
};

[[nodiscard]] PosteriorSummary summarize(const Chain& chain);

/// Geyer initial positive sequence estimate, capped at the chain length.
[[nodiscard]] double effective_sample_size(const std::vector<double>& x);

/// Linear-interpolation empirical quantile of unsorted values.
[[nodiscard]] double empirical_quantile(std::vector<double> values, double p);

/// Header `iter,mu,concentration`; iter counts from the first kept iteration.
void write_chain_csv(std::ostream& out, const Chain& chain);

} // namespace circpc
