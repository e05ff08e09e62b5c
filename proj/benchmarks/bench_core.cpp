#include <benchmark/benchmark.h>

#include <numbers>

#include "genorb/arcs.hpp"
#include "genorb/continuation.hpp"
#include "genorb/lambert.hpp"
#include "genorb/report.hpp"

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

void BM_SolveTiming(benchmark::State& state) {
  const int I = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(genorb::solve_timing(40.0 * kDeg, I, genorb::Rotation::direct));
}
BENCHMARK(BM_SolveTiming)->Arg(1)->Arg(10)->Arg(40);

void BM_ArcElapsedTime(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(genorb::arc_elapsed_time(3.2, 1.1, 0, genorb::ArcDirection::outgoing));
  }
}
BENCHMARK(BM_ArcElapsedTime);

void BM_KeplerTimeOracle(benchmark::State& state) {
  const double eps = genorb::eccentricity_from_theta(3.2, 1.1);
  for (auto _ : state) benchmark::DoNotOptimize(genorb::kepler_time_oracle(3.2, eps, 1.1));
}
BENCHMARK(BM_KeplerTimeOracle);

void BM_GeneratingTable(benchmark::State& state) {
  for (auto _ : state) {
    for (int deg = 0; deg <= 180; deg += 10) {
      benchmark::DoNotOptimize(genorb::generating_arc(deg * kDeg, 1, genorb::Rotation::direct));
    }
  }
}
BENCHMARK(BM_GeneratingTable);

void BM_GeneratingHalfOrbit(benchmark::State& state) {
  const genorb::GeneratingArc arc = genorb::generating_arc(30.0 * kDeg, static_cast<int>(state.range(0)),
                                                           genorb::Rotation::direct);
  for (auto _ : state) benchmark::DoNotOptimize(genorb::generating_half_orbit(arc).t_end());
}
BENCHMARK(BM_GeneratingHalfOrbit)->Arg(1)->Arg(10)->Unit(benchmark::kMicrosecond);

void BM_ContinueSunJupiter(benchmark::State& state) {
  const genorb::GeneratingArc arc = genorb::generating_arc(10.0 * kDeg, 1, genorb::Rotation::direct);
  for (auto _ : state) benchmark::DoNotOptimize(genorb::continue_arc(arc, {genorb::kSunJupiter}));
}
BENCHMARK(BM_ContinueSunJupiter)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
