#include <cmath>
#include <vector>

#include <benchmark/benchmark.h>

#include "vvlab/bounds.hpp"
#include "vvlab/grid.hpp"
#include "vvlab/walk.hpp"

using namespace vvlab;

namespace {

IncrementModel reference_model() { return IncrementModel(JumpDistribution::pareto(2.5, 1.0), 2.0); }

void BM_SampleJump(benchmark::State& state) {
  const auto jump = JumpDistribution::pareto(2.5, 1.0);
  RandomStream stream(1);
  double acc = 0.0;
  for (auto _ : state) acc += jump.sample(stream);
  benchmark::DoNotOptimize(acc);
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_SampleJump);

void BM_EstimateTail(benchmark::State& state) {
  const auto m = reference_model();
  SimConfig cfg;
  cfg.n_paths = static_cast<std::uint64_t>(state.range(0));
  cfg.barrier = 200.0;
  cfg.threads = 1;
  const std::vector<double> xs{25.0, 78.4, 156.7};
  for (auto _ : state) {
    const auto est = estimate_tail(m, xs, cfg);
    benchmark::DoNotOptimize(est.points.data());
    state.counters["steps"] = static_cast<double>(est.diagnostics.steps);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EstimateTail)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);

void BM_Convolve(benchmark::State& state) {
  const auto m = reference_model();
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto g = GridDistribution::from_tail([&](double y) { return m.second_tail(y); }, 0.0, 0.01, n);
  for (auto _ : state) {
    const auto c = convolve(g, g);
    benchmark::DoNotOptimize(c.tail_values().data());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Convolve)->RangeMultiplier(4)->Range(1 << 8, 1 << 18)->Complexity()->Unit(benchmark::kMicrosecond);

void BM_UpperBound(benchmark::State& state) {
  const auto m = reference_model();
  GridSpec spec;
  spec.top = 800.0;
  for (auto _ : state) benchmark::DoNotOptimize(upper_bound(m, 156.7, 20.0, 1.0 / 6.0, 0.06, 0.08, 1e-9, spec));
}
BENCHMARK(BM_UpperBound)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
