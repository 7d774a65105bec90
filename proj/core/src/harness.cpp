#include "circpc/harness.hpp"

#include "circpc/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <thread>

namespace circpc {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::uint64_t kChainSeedOffset = 1'000'000;

std::string format_number(double v) {
  std::ostringstream out;
  out.precision(12);
  out << v;
  return out.str();
}

std::optional<BaseModel> pc_base(std::string_view kind) {
  if (kind == "pc-uniform") return BaseModel::Uniform;
  if (kind == "pc-point-mass") return BaseModel::PointMass;
  if (kind == "pc-curve") return BaseModel::CardioidCurve;
  return std::nullopt;
}

struct Outcome {
  bool ok = false;
  double posterior_mean = 0.0;
};

Outcome run_replicate(const SimStudyConfig& config, const ConcentrationPrior& prior, double truth,
                      std::size_t n, std::size_t replicate) {
  const auto r = static_cast<std::uint64_t>(replicate);
  DistributionSpec spec{config.family, Angle(kPi), truth};
  const Dataset data = sample(spec, n, config.base_seed + r);
  McmcConfig mcmc = config.mcmc;
  mcmc.seed = config.base_seed + kChainSeedOffset + r;
  try {
    const Chain chain = run_mcmc(ModelSpec{config.family, prior}, data, mcmc);
    double total = 0.0;
    for (const Draw& d : chain.draws) total += d.concentration;
    return {true, total / static_cast<double>(chain.size())};
  } catch (const std::exception&) {
    return {};
  }
}

} // namespace

std::vector<PriorCell> expand_priors(Family family, const PriorGrid& grid, double tail_U) {
  std::vector<PriorCell> cells;
  if (const auto base = pc_base(grid.kind)) {
    for (const double alpha : grid.values) {
      PriorCell cell{grid.kind, "alpha=" + format_number(alpha), std::nullopt, {}};
      try {
        const double lambda = calibrate_lambda(family, *base, TailSpec{tail_U, alpha});
        cell.prior = PcPrior::make(family, *base, lambda);
      } catch (const InfeasibleTailError& e) {
        cell.failure = e.what();
      }
      cells.push_back(std::move(cell));
    }
    return cells;
  }
  if (grid.kind == "gamma") {
    for (const double b : grid.values) {
      cells.push_back({grid.kind, "b=" + format_number(b), ReferencePrior{GammaOneB{b}}, {}});
    }
    return cells;
  }
  if (grid.kind == "beta" || grid.kind == "2xbeta") {
    for (const double a : grid.values) {
      for (const double b : grid.second) {
        const ReferencePrior prior = grid.kind == "beta" ? ReferencePrior{Beta{a, b}}
                                                         : ReferencePrior{ScaledBetaHalf{a, b}};
        cells.push_back(
            {grid.kind, "a=" + format_number(a) + ";b=" + format_number(b), prior, {}});
      }
    }
    return cells;
  }
  if (grid.kind == "uniform") return {{grid.kind, "-", ReferencePrior{UniformHalf{}}, {}}};
  if (grid.kind == "h2") return {{grid.kind, "-", ReferencePrior{H2{}}, {}}};
  if (grid.kind == "h3") return {{grid.kind, "-", ReferencePrior{H3{}}, {}}};
  throw DomainError("unknown prior kind '" + grid.kind + "'");
}

void SimStudyConfig::validate() const {
  if (truths.empty() || sample_sizes.empty() || priors.empty()) {
    throw DomainError("simulation study grids must be non-empty");
  }
  if (replicates == 0) throw DomainError("replicates must be positive");
  const auto support = concentration_support(family);
  for (const double t : truths) {
    if (family == Family::CircularUniform || !support.contains(t)) {
      throw DomainError("true concentration " + format_number(t) + " outside the support");
    }
  }
  for (const std::size_t n : sample_sizes) {
    if (n == 0) throw DomainError("sample sizes must be positive");
  }
  TailSpec{tail_U, 0.5}.validate(family);
  mcmc.validate();
}

SimStudyConfig default_study(Family family, bool full) {
  const std::vector<double> alphas{0.01, 0.1, 0.3, 0.5, 0.7, 0.9, 0.99};
  const std::vector<double> shapes{0.5, 1.0, 2.0, 5.0};
  SimStudyConfig config;
  config.family = family;
  config.replicates = full ? 100 : 20;
  config.sample_sizes = full ? std::vector<std::size_t>{100, 300, 1000}
                             : std::vector<std::size_t>{100, 300};
  switch (family) {
    case Family::VonMises:
      config.truths = full ? std::vector<double>{0.02, 0.33, 1, 1.67, 3, 7, 15, 59}
                           : std::vector<double>{0.33, 1, 3};
      config.tail_U = kPi / 2.0;
      config.priors = {{"pc-uniform", alphas, {}}, {"gamma", {0.01, 0.05, 0.1, 1, 5}, {}}};
      if (full) {
        config.priors.push_back({"pc-point-mass", alphas, {}});
        config.priors.push_back({"h2", {}, {}});
        config.priors.push_back({"h3", {}, {}});
      }
      break;
    case Family::Cardioid:
      config.truths = full ? std::vector<double>{0, 0.01, 0.1, 0.2, 0.3, 0.4, 0.49}
                           : std::vector<double>{0.1, 0.3};
      config.tail_U = 0.5;
      config.priors = {{"pc-uniform", {0.01, 0.1, 0.2, 0.3, 0.4, 0.5}, {}},
                       {"pc-curve", alphas, {}},
                       {"2xbeta", shapes, shapes},
                       {"uniform", {}, {}}};
      break;
    case Family::WrappedCauchy:
      config.truths = full ? std::vector<double>{0, 0.01, 0.1, 0.3, 0.5, 0.7, 0.9, 0.99}
                           : std::vector<double>{0.1, 0.5, 0.9};
      config.tail_U = 0.6;
      config.priors = {{"pc-uniform", alphas, {}}, {"beta", shapes, shapes}};
      break;
    case Family::CircularUniform:
      throw DomainError("the circular uniform family has no concentration to study");
  }
  return config;
}

SimStudyResult run_sim_study(const SimStudyConfig& config) {
  config.validate();

  std::vector<PriorCell> priors;
  for (const PriorGrid& grid : config.priors) {
    auto cells = expand_priors(config.family, grid, config.tail_U);
    priors.insert(priors.end(), cells.begin(), cells.end());
  }

  struct Cell {
    std::size_t prior;
    double truth;
    std::size_t n;
  };
  std::vector<Cell> cells;
  for (std::size_t p = 0; p < priors.size(); ++p) {
    for (const double truth : config.truths) {
      for (const std::size_t n : config.sample_sizes) cells.push_back({p, truth, n});
    }
  }

  const std::size_t reps = config.replicates;
  const std::size_t tasks = cells.size() * reps;
  std::vector<Outcome> outcomes(tasks);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t task = next++; task < tasks; task = next++) {
      const Cell& cell = cells[task / reps];
      const PriorCell& prior = priors[cell.prior];
      if (!prior.prior) continue;
      outcomes[task] = run_replicate(config, *prior.prior, cell.truth, cell.n, task % reps);
    }
  };
  std::size_t workers = config.workers;
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, std::max<std::size_t>(tasks, 1));
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
  }

  SimStudyResult result;
  result.rows.reserve(cells.size());
  for (std::size_t c = 0; c < cells.size(); ++c) {
    std::vector<double> means;
    for (std::size_t r = 0; r < reps; ++r) {
      const Outcome& o = outcomes[c * reps + r];
      if (o.ok) means.push_back(o.posterior_mean);
    }
    SimStudyRow row;
    row.prior = priors[cells[c].prior].kind;
    row.hyper = priors[cells[c].prior].hyper;
    row.truth = cells[c].truth;
    row.n = cells[c].n;
    row.cells_failed = reps - means.size();
    row.post_mean_avg = std::numeric_limits<double>::quiet_NaN();
    row.post_mean_sd = std::numeric_limits<double>::quiet_NaN();
    if (!means.empty()) {
      double total = 0.0;
      for (const double m : means) total += m;
      const double avg = total / static_cast<double>(means.size());
      double ss = 0.0;
      for (const double m : means) ss += (m - avg) * (m - avg);
      row.post_mean_avg = avg;
      row.post_mean_sd = means.size() > 1 ? std::sqrt(ss / static_cast<double>(means.size() - 1))
                                          : 0.0;
    }
    result.rows.push_back(std::move(row));
  }
  return result;
}

void write_study_csv(std::ostream& out, const SimStudyResult& result) {
  out << "prior,hyper,truth,N,post_mean_avg,post_mean_sd,cells_failed\n";
  const auto old = out.precision(17);
  for (const SimStudyRow& row : result.rows) {
    out << row.prior << ',' << row.hyper << ',' << row.truth << ',' << row.n << ','
        << row.post_mean_avg << ',' << row.post_mean_sd << ',' << row.cells_failed << '\n';
  }
  out.precision(old);
}

std::string_view to_string(TailWindow window) {
  switch (window) {
    case TailWindow::MeanWidth: return "mean-width";
    case TailWindow::MeanRadius: return "mean-radius";
    case TailWindow::ZeroWidth: return "zero-width";
  }
  return "unknown";
}

TailWindow parse_tail_window(std::string_view text) {
  if (text == "mean-width") return TailWindow::MeanWidth;
  if (text == "mean-radius") return TailWindow::MeanRadius;
  if (text == "zero-width") return TailWindow::ZeroWidth;
  throw DomainError("unknown tail window '" + std::string(text) + "'");
}

double circular_distance(double a, double b) {
  const double d = std::fmod(std::abs(a - b), 2.0 * kPi);
  return std::min(d, 2.0 * kPi - d);
}

TailFromData tail_from_data(const Dataset& data, double U, TailWindow window) {
  if (data.empty()) throw DomainError("tail_from_data: empty dataset");
  if (!(U > 0.0 && U <= 2.0 * kPi)) throw DomainError("tail_from_data: U must lie in (0, 2 pi]");
  double reference = 0.0;
  if (window != TailWindow::ZeroWidth) {
    reference = mean_resultant(std::span<const Angle>(data.angles)).mean_direction;
  }
  const double radius = window == TailWindow::MeanRadius ? U : 0.5 * U;
  std::size_t outside = 0;
  for (const Angle a : data.angles) {
    if (circular_distance(a.radians(), reference) > radius) ++outside;
  }
  const double n = static_cast<double>(data.size());
  const double floor = 0.5 / n;
  const double alpha = std::clamp(static_cast<double>(outside) / n, floor, 1.0 - floor);
  return {U, alpha, outside, reference};
}

} // namespace circpc
