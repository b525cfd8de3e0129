#include <benchmark/benchmark.h>

#include "nlfilt/evolution.hpp"
#include "nlfilt/initial_data.hpp"
#include "nlfilt/nonlocal_operator.hpp"
#include "nlfilt/random.hpp"
#include "nlfilt/resolvent.hpp"

using namespace nlfilt;

namespace {

GridSpec cube(int points) {
  GridSpec g;
  g.points_per_axis_z = points;
  g.points_per_axis_s = points;
  return g;
}

DiscreteField random_field(const GridSpec& g, std::uint64_t seed) {
  Rng rng(seed);
  DiscreteField f(g);
  for (auto& v : f.values) v = rng.uniform(-1.0, 1.0);
  return f;
}

void BM_Assemble(benchmark::State& state) {
  const GridSpec g = cube(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(assemble(g, KernelSpec::log_rough(1.0, 0.5)));
  state.counters["nodes"] = static_cast<double>(g.node_count());
}
BENCHMARK(BM_Assemble)->Arg(9)->Arg(13)->Unit(benchmark::kMillisecond);

void BM_ApplyDense(benchmark::State& state) {
  const GridSpec g = cube(static_cast<int>(state.range(0)));
  const NonlocalOperator op = assemble(g, KernelSpec::pure_power(1.0));
  const DiscreteField f = random_field(g, 1);
  for (auto _ : state) benchmark::DoNotOptimize(apply(op, f));
  state.counters["nodes"] = static_cast<double>(g.node_count());
}
BENCHMARK(BM_ApplyDense)->Arg(9)->Arg(13)->Arg(17)->Unit(benchmark::kMicrosecond);

void BM_ApplyStreamed(benchmark::State& state) {
  const GridSpec g = cube(static_cast<int>(state.range(0)));
  QuadratureConfig q;
  q.dense_threshold = 0;
  const NonlocalOperator op = assemble(g, KernelSpec::pure_power(1.0), q);
  const DiscreteField f = random_field(g, 2);
  for (auto _ : state) benchmark::DoNotOptimize(apply(op, f));
}
BENCHMARK(BM_ApplyStreamed)->Arg(9)->Arg(13)->Unit(benchmark::kMillisecond);

void BM_ResolventSolve(benchmark::State& state) {
  const GridSpec g = cube(13);
  const NonlocalOperator op = assemble(g, KernelSpec::pure_power(1.0));
  const double m = static_cast<double>(state.range(0)) / 10.0;
  const ResolventProblem prob{op, random_field(g, 3), m, 0.5, 1e-10};
  for (auto _ : state) benchmark::DoNotOptimize(solve(prob));
}
BENCHMARK(BM_ResolventSolve)->Arg(5)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_EvolutionStep(benchmark::State& state) {
  const GridSpec g = cube(13);
  const NonlocalOperator op = assemble(g, KernelSpec::pure_power(1.0));
  InitialData d;
  d.radius = 1.5;
  const DiscreteField u0 = make_initial_data(g, d);
  for (auto _ : state) benchmark::DoNotOptimize(step(op, u0, 2.0, 0.05, 1e-10));
}
BENCHMARK(BM_EvolutionStep)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
