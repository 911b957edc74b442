// Serial reference against the OpenMP path for each parallel kernel; arg 0 = serial, 1 = parallel.

#include <benchmark/benchmark.h>

#include <random>

#include "cubar/gridmodel.hpp"
#include "cubar/models.hpp"
#include "cubar/suites.hpp"

using namespace cubar;

namespace {

const RingSpec ZZ = RingSpec::integers();

Exec mode_of(const benchmark::State& state) { return state.range(0) == 0 ? Exec::Serial : Exec::Parallel; }

void BM_Boundary(benchmark::State& state) {
  std::mt19937_64 rng(1);
  CubeChain u(ZZ, 3);
  for (int k = 0; k < 96; ++k) u.add(sample_base_generator(rng, 3, 2, 2), k % 7 - 3);
  const auto w = WeightVector::ints(ZZ, {2, -1, 3});
  for (auto _ : state) benchmark::DoNotOptimize(boundary(u, w, mode_of(state)));
}

void BM_DdZero(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const CubeExpr T = sample_base_generator(rng, 4, 2, 2);
  const auto w = WeightVector::ints(ZZ, {1, 4, -2, 3});
  for (auto _ : state) benchmark::DoNotOptimize(verify_dd_zero(T, w, mode_of(state)));
}

void BM_AssembleTorus(benchmark::State& state) {
  const auto w = WeightVector::ints(ZZ, {2, 3, -1});
  const GeneratorSet gens = closure_generate(load_grid_model("t2"), w.L(), {3});
  for (auto _ : state) benchmark::DoNotOptimize(assemble(gens, w, mode_of(state)));
}

}  // namespace

BENCHMARK(BM_Boundary)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DdZero)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AssembleTorus)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
