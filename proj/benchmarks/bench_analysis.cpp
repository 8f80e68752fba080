#include <benchmark/benchmark.h>

#include <random>

#include "qss/analysis.hpp"

using namespace qss;

static void BM_FitFringe(benchmark::State& state) {
  std::mt19937_64 rng(3);
  analysis::FringeScan scan;
  const int points = static_cast<int>(state.range(0));
  for (int m = 0; m < points; ++m) {
    analysis::FringePoint p;
    p.phase = kTwoPi * m / points;
    p.duration = 100.0;
    for (int c = 0; c < 4; ++c) {
      const double sign = (c == 0 || c == 3) ? 1.0 : -1.0;
      const double mean = 800.0 * (1 + sign * 0.92 * std::cos(p.phase));
      p.counts[c] = std::poisson_distribution<std::uint64_t>(mean)(rng);
    }
    scan.points.push_back(p);
  }
  for (auto _ : state) benchmark::DoNotOptimize(analysis::fit_fringe(scan));
}
BENCHMARK(BM_FitFringe)->Arg(16)->Arg(256);

static void BM_S3FromCounts(benchmark::State& state) {
  const std::array<std::array<std::uint64_t, 4>, 4> counts{
      {{960, 40, 40, 960}, {955, 45, 45, 955}, {962, 38, 38, 962}, {40, 960, 960, 40}}};
  for (auto _ : state) benchmark::DoNotOptimize(analysis::s3_from_counts(counts));
}
BENCHMARK(BM_S3FromCounts);
