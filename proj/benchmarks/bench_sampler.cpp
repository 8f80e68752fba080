#include <benchmark/benchmark.h>

#include "qss/coincidence.hpp"
#include "qss/protocol.hpp"

using namespace qss;

static void BM_OutcomeDistribution(benchmark::State& state) {
  PhaseSettings s{Phase(0.3), Phase(1.2), Phase(2.1)};
  for (auto _ : state) {
    benchmark::DoNotOptimize(correlations::outcome_distribution(s, Visibility(0.92)));
    s.alice = s.alice + Phase(1e-3);
  }
}
BENCHMARK(BM_OutcomeDistribution);

static void BM_DrawPair(benchmark::State& state) {
  Rng rng(1);
  const PhaseSettings s{Phase(0.3), Phase(), Phase()};
  for (auto _ : state) benchmark::DoNotOptimize(source::draw_pair(s, Visibility(0.92), rng));
}
BENCHMARK(BM_DrawPair);

static void BM_SimulateSlot(benchmark::State& state) {
  Rng rng(2);
  const source::SourceParams src;
  const devices::DetectorParams det;
  std::uint64_t slot = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        devices::simulate_slot(slot++, {}, Visibility(0.92), src, det, {}, {}, rng));
  }
}
BENCHMARK(BM_SimulateSlot);

static void BM_FixedSettingsPulses(benchmark::State& state) {
  const source::SourceParams src;
  const devices::DetectorParams det;
  const auto n = static_cast<std::uint64_t>(state.range(0));
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        devices::run_fixed_settings(n, {}, Visibility(0.92), src, det, {++seed, 1}));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n));
}
BENCHMARK(BM_FixedSettingsPulses)->Arg(8'000'000'000)->Unit(benchmark::kMillisecond);

static void BM_Session(benchmark::State& state) {
  const source::SourceParams src;
  const devices::DetectorParams det;
  const auto n = static_cast<std::uint64_t>(state.range(0));
  protocol::SessionOptions opts;
  opts.keep_transcript = false;
  for (auto _ : state) {
    ++opts.seed;
    benchmark::DoNotOptimize(protocol::run_session(n, src, det, Visibility(0.93), {}, opts));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n));
}
BENCHMARK(BM_Session)->Arg(8'000'000'000)->Unit(benchmark::kMillisecond);
