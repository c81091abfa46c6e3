#include <benchmark/benchmark.h>

#include "l12/oracles.hpp"
#include "l12/reduction.hpp"
#include "l12/solvers.hpp"
#include "l12/verify.hpp"

using namespace l12;

namespace {

const PartitionInstance& instance_of_size(std::size_t m) {
  for (const auto& S : verify::standard_corpus()) {
    if (S.m() == m) return S;
  }
  throw std::logic_error("no corpus instance of that size");
}

void BM_PatternEnumeration(benchmark::State& state) {
  const auto inst = build_instance(instance_of_size(static_cast<std::size_t>(state.range(0))),
                                   ReductionParams::nup(1.0));
  for (auto _ : state) benchmark::DoNotOptimize(oracles::enumerate_pattern_minimum(inst));
}
BENCHMARK(BM_PatternEnumeration)->DenseRange(4, 12, 4);

void BM_BruteForcePartition(benchmark::State& state) {
  const auto& S = instance_of_size(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(oracles::brute_force_partition(S));
}
BENCHMARK(BM_BruteForcePartition)->DenseRange(4, 12, 4);

void BM_MultiStartDca(benchmark::State& state) {
  const auto inst = build_instance(instance_of_size(static_cast<std::size_t>(state.range(0))),
                                   ReductionParams::nup(1.0));
  SolverOptions opts;
  opts.seed = 1;
  for (auto _ : state) benchmark::DoNotOptimize(multi_start_solve(inst, opts));
}
BENCHMARK(BM_MultiStartDca)->Arg(3)->Arg(6)->Unit(benchmark::kMillisecond);

void BM_MultiStartPenalty(benchmark::State& state) {
  const auto inst = build_instance(instance_of_size(static_cast<std::size_t>(state.range(0))),
                                   ReductionParams::ncp(1.0));
  SolverOptions opts;
  opts.seed = 1;
  for (auto _ : state) benchmark::DoNotOptimize(multi_start_solve(inst, opts));
}
BENCHMARK(BM_MultiStartPenalty)->Arg(3)->Arg(6)->Unit(benchmark::kMillisecond);

void BM_GridUpLowerBound(benchmark::State& state) {
  const oracles::ScalarField g = [](const Vector& x) { return oracles::eval_up_lower_bound(x, 1.0); };
  const auto spec = oracles::GridSpec::cube(4, -2.0, 2.0, 0.1);
  for (auto _ : state) benchmark::DoNotOptimize(oracles::grid_minimize(g, spec));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(spec.total_points()));
}
BENCHMARK(BM_GridUpLowerBound)->Unit(benchmark::kMillisecond);

void BM_Criticality(benchmark::State& state) {
  const auto inst = build_instance(instance_of_size(6), ReductionParams::ncp(1.0));
  const auto x = initial_point(inst, InitStrategy::PerturbedPattern, 1, 0);
  for (auto _ : state) benchmark::DoNotOptimize(criticality_residual(inst, x));
}
BENCHMARK(BM_Criticality);

}  // namespace

BENCHMARK_MAIN();
