#include <benchmark/benchmark.h>

#include "beamselect/bnb.hpp"
#include "beamselect/conic.hpp"
#include "beamselect/gnn.hpp"
#include "beamselect/imitation.hpp"

namespace {

using namespace beamselect;

ProblemInstance make_instance(int n, int m, int l, double eps,
                              std::uint64_t seed) {
  return generate_instance(
      InstanceConfig::uniform(n, m, l, 2.0, 1.0, eps, seed));
}

void BM_SocpSolve(benchmark::State& state) {
  auto inst = make_instance(static_cast<int>(state.range(0)), 4,
                            static_cast<int>(state.range(0)), 0.0, 1);
  auto prog = build_bf_socp(inst, {});
  for (auto _ : state) benchmark::DoNotOptimize(solve(prog));
}
BENCHMARK(BM_SocpSolve)->Arg(8)->Arg(12)->Arg(16);

void BM_SdrSolve(benchmark::State& state) {
  auto inst = make_instance(static_cast<int>(state.range(0)), 3,
                            static_cast<int>(state.range(0)), 0.1, 1);
  auto prog = build_rbf_sdr(inst, {});
  for (auto _ : state) benchmark::DoNotOptimize(solve(prog));
}
BENCHMARK(BM_SdrSolve)->Arg(6)->Arg(8);

void BM_GnnForward(benchmark::State& state) {
  auto inst = make_instance(8, 4, 4, 0.0, 1);
  BnbConfig bc;
  auto pairs = collect_data(inst, nullptr, 0.5, bc);
  auto params = init_params(static_cast<int>(state.range(0)), 7);
  for (auto _ : state)
    benchmark::DoNotOptimize(forward(params, pairs.front().sample));
}
BENCHMARK(BM_GnnForward)->Arg(16)->Arg(32);

void BM_GnnBackward(benchmark::State& state) {
  auto inst = make_instance(8, 4, 4, 0.0, 1);
  BnbConfig bc;
  auto pairs = collect_data(inst, nullptr, 0.5, bc);
  auto params = init_params(static_cast<int>(state.range(0)), 7);
  for (auto _ : state)
    benchmark::DoNotOptimize(backward(params, pairs.front().sample, 1, 1.0));
}
BENCHMARK(BM_GnnBackward)->Arg(16)->Arg(32);

void BM_BranchAndBound(benchmark::State& state) {
  auto inst = make_instance(static_cast<int>(state.range(0)), 4,
                            static_cast<int>(state.range(0)) / 2, 0.0, 3);
  BnbConfig bc;
  for (auto _ : state) benchmark::DoNotOptimize(run_bb(inst, bc));
}
BENCHMARK(BM_BranchAndBound)->Arg(8)->Arg(10);

}  // namespace

BENCHMARK_MAIN();
