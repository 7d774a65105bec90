#pragma once

#include "circpc/distributions.hpp"
#include "circpc/inference.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace circpc {

/// One prior family and its hyperparameter grid in a simulation study.
///
///   kind            values          second
///   pc-uniform      alpha grid      -
///   pc-point-mass   alpha grid      -
///   pc-curve        alpha grid      -
///   gamma           rate b grid     -
///   beta, 2xbeta    shape a grid    shape b grid (Cartesian product)
///   uniform, h2, h3 -               -
///
/// PC priors are calibrated from (tail_U, alpha) by calibrate_lambda.
struct PriorGrid {
  std::string kind;
  std::vector<double> values;
  std::vector<double> second;
};

/// A single prior of a grid with a printable hyperparameter label.
struct PriorCell {
  std::string kind;
  std::string hyper;
  std::optional<ConcentrationPrior> prior;  // empty when calibration was infeasible
  std::string failure;
};

/// Expands every grid into concrete priors for `family`.
[[nodiscard]] std::vector<PriorCell> expand_priors(Family family, const PriorGrid& grid,
                                                   double tail_U);

struct SimStudyConfig {
  Family family = Family::VonMises;
  std::vector<double> truths;
  std::vector<std::size_t> sample_sizes;
  std::size_t replicates = 20;
  std::vector<PriorGrid> priors;
  double tail_U = 0.0;
  std::uint64_t base_seed = 520;
  McmcConfig mcmc;
  /// Worker threads; 0 uses the hardware concurrency.
  std::size_t workers = 0;

  void validate() const;
};

/// Desk-scale defaults (20 replicates, N in {100, 300}, reduced truth
/// grids) or, with `full`, the complete grids.
[[nodiscard]] SimStudyConfig default_study(Family family, bool full = false);

struct SimStudyRow {
  std::string prior;
  std::string hyper;
  double truth;
  std::size_t n;
  double post_mean_avg;  // NaN when every replicate failed
  double post_mean_sd;
  std::size_t cells_failed;  // failed replicates in this cell
};

struct SimStudyResult {
  std::vector<SimStudyRow> rows;
};

/// Replicate r draws data with seed base_seed + r at mu = pi and runs its
/// chain with seed base_seed + 1e6 + r. Output is independent of `workers`.
[[nodiscard]] SimStudyResult run_sim_study(const SimStudyConfig& config);

/// Header `prior,hyper,truth,N,post_mean_avg,post_mean_sd,cells_failed`.
void write_study_csv(std::ostream& out, const SimStudyResult& result);

// ---------------------------------------------------------------------------
// Tail statements from data

/// Where the counting window sits and how U sizes it.
enum class TailWindow {
  MeanWidth,   // total width U centred on the sample circular mean
  MeanRadius,  // radius U around the sample circular mean
  ZeroWidth,   // total width U centred on angle 0
};

[[nodiscard]] std::string_view to_string(TailWindow window);
/// Accepts "mean-width", "mean-radius", "zero-width".
[[nodiscard]] TailWindow parse_tail_window(std::string_view text);

struct TailFromData {
  double U;
  double alpha;          // fraction outside the window, clamped
  std::size_t outside;   // raw count outside the window
  double reference;      // window centre in radians
};

/// alpha = (points outside the window) / n, clamped to [1/(2n), 1 - 1/(2n)].
[[nodiscard]] TailFromData tail_from_data(const Dataset& data, double U,
                                          TailWindow window = TailWindow::MeanWidth);

/// Shortest arc length between two angles, in [0, pi].
[[nodiscard]] double circular_distance(double a, double b);

} // namespace circpc
