#include <benchmark/benchmark.h>

#include "susysep/exact_solver.hpp"
#include "susysep/operators.hpp"
#include "susysep/oracle.hpp"
#include "susysep/qes_solver.hpp"

using namespace susysep;
using oracle::GridSpec;

namespace {

void BM_ApplyGrid(benchmark::State& state) {
  const auto p = ModelParams::make(30.25, 1.0, -1.0);
  const auto spec = GridSpec::triangle(-2.0, 12.0, static_cast<int>(state.range(0)));
  const SampledField f = sample(qes::zero_mode(0, p), spec.grid());
  const auto op = supercharge(Sign::Plus, p);
  for (auto _ : state) benchmark::DoNotOptimize(apply_grid(op, f));
  state.SetComplexityN(state.range(0) * state.range(0));
}
BENCHMARK(BM_ApplyGrid)->Arg(100)->Arg(200)->Arg(400)->Complexity();

void BM_Assemble(benchmark::State& state) {
  const auto p = ModelParams::make(30.25, 1.0, -0.5);
  const auto v = potential(Branch::H1, p);
  const auto spec = GridSpec::square(-2.0, 16.0, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(oracle::assemble(v, spec));
}
BENCHMARK(BM_Assemble)->Arg(100)->Arg(200);

void BM_LowestEigenpairs(benchmark::State& state) {
  const auto p = ModelParams::make(30.25, 1.0, -0.5);
  const auto h = oracle::assemble(potential(Branch::H1, p), GridSpec::square(-2.0, 16.0, static_cast<int>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(oracle::lowest_eigenpairs(h, 6));
}
BENCHMARK(BM_LowestEigenpairs)->Arg(100)->Arg(150)->Unit(benchmark::kMillisecond);

void BM_CouplingMatrix(benchmark::State& state) {
  const auto p = ModelParams::make(30.25, 1.0, -1.0);
  const auto spec = GridSpec::triangle(-2.0, 12.0, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(qes::coupling_matrix(p, spec, static_cast<int>(state.range(0)) / 2));
}
BENCHMARK(BM_CouplingMatrix)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_PartnerState(benchmark::State& state) {
  const auto p = ModelParams::make(30.25, 1.0, -0.5);
  const auto spec = GridSpec::square(-2.0, 12.0, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(exact::partner_state(0, 2, p, spec));
}
BENCHMARK(BM_PartnerState)->Arg(200)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
