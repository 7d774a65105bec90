#include "circpc/circpc.hpp"

#include <benchmark/benchmark.h>

using namespace circpc;

static void BM_BesselRatio(benchmark::State& state) {
  double x = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(bessel_ratio(x));
    x = x > 500.0 ? 0.1 : x * 1.1;
  }
}
BENCHMARK(BM_BesselRatio);

static void BM_LogBesselI0(benchmark::State& state) {
  double x = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(log_bessel_i0(x));
    x = x > 500.0 ? 0.1 : x * 1.1;
  }
}
BENCHMARK(BM_LogBesselI0);

static void BM_Distance(benchmark::State& state) {
  const auto base = static_cast<BaseModel>(state.range(0));
  const Family family = base == BaseModel::CardioidCurve ? Family::Cardioid : Family::VonMises;
  const auto profile = DistanceProfile::make(family, base);
  const double top = family == Family::Cardioid ? 0.49 : 30.0;
  double x = 0.01;
  for (auto _ : state) {
    benchmark::DoNotOptimize(distance(profile, x));
    x = x > top ? 0.01 : x * 1.05;
  }
}
BENCHMARK(BM_Distance)
    ->Arg(static_cast<int>(BaseModel::Uniform))
    ->Arg(static_cast<int>(BaseModel::PointMass))
    ->Arg(static_cast<int>(BaseModel::CardioidCurve));

static void BM_InverseDistance(benchmark::State& state) {
  const auto profile = DistanceProfile::make(Family::VonMises, BaseModel::PointMass);
  double d = 0.05;
  for (auto _ : state) {
    benchmark::DoNotOptimize(inverse_distance(profile, d));
    d = d > 0.95 ? 0.05 : d + 0.01;
  }
}
BENCHMARK(BM_InverseDistance);

static void BM_PcLogPdf(benchmark::State& state) {
  const PcPrior prior = PcPrior::make(Family::VonMises, BaseModel::Uniform, 1.0);
  double x = 0.01;
  for (auto _ : state) {
    benchmark::DoNotOptimize(pc_log_pdf(prior, x));
    x = x > 30.0 ? 0.01 : x * 1.05;
  }
}
BENCHMARK(BM_PcLogPdf);

static void BM_CalibrateNumeric(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(calibrate(Family::VonMises, BaseModel::PointMass, {1.0, 0.2}));
  }
}
BENCHMARK(BM_CalibrateNumeric)->Unit(benchmark::kMicrosecond);

static void BM_McmcChain(benchmark::State& state) {
  const Dataset data = sample(DistributionSpec::von_mises(1.0, 2.0), state.range(0), 3);
  const ModelSpec model{Family::VonMises, PcPrior::make(Family::VonMises, BaseModel::Uniform, 1.0)};
  McmcConfig config;
  config.iterations = 5000;
  config.burn_in = 1000;
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_mcmc(model, data, config));
  }
}
BENCHMARK(BM_McmcChain)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
