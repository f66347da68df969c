#include <benchmark/benchmark.h>

#include "nsq/cauchy_green.hpp"
#include "nsq/dnls.hpp"
#include "nsq/smooth_suite.hpp"

using namespace nsq;

namespace {

void cg_nodal(benchmark::State& state, Exec exec) {
  auto g = DiscGrid::make(static_cast<int>(state.range(0)), 4 * static_cast<int>(state.range(0)));
  CauchyGreen eng(g, exec);
  auto f = GridField::sample(g, smooth_random(1).f);
  for (auto _ : state) benchmark::DoNotOptimize(eng.nodal(Transform::T2, f));
}

void cg_evaluate(benchmark::State& state, Exec exec) {
  auto g = DiscGrid::make(32, 128);
  CauchyGreen eng(g, exec);
  auto f = GridField::sample(g, smooth_random(1).f);
  auto probes = default_probes();
  for (auto _ : state) benchmark::DoNotOptimize(eng.evaluate(Transform::T, f, probes));
}

void dnls_flow(benchmark::State& state, Exec exec) {
  const int half = static_cast<int>(state.range(0));
  auto a = CouplingMatrix::nearest_neighbor(half);
  auto f = Nonlinearity::power(1.0);
  auto u0 = initial_state("sech", half, 0.8);
  for (auto _ : state) benchmark::DoNotOptimize(split_step_flow(u0, a, f, 0.1, 1e-3, exec));
}

void dnls_rhs(benchmark::State& state, Exec exec) {
  const int half = static_cast<int>(state.range(0));
  auto a = CouplingMatrix::nearest_neighbor(half);
  auto f = Nonlinearity::power(1.0);
  auto u0 = initial_state("sech", half, 0.8);
  for (auto _ : state) benchmark::DoNotOptimize(rhs(u0, a, f, exec));
}

}  // namespace

BENCHMARK_CAPTURE(cg_nodal, serial, Exec::serial)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(cg_nodal, parallel, Exec::parallel)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(cg_evaluate, serial, Exec::serial)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(cg_evaluate, parallel, Exec::parallel)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(dnls_flow, serial, Exec::serial)->Arg(32)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(dnls_flow, parallel, Exec::parallel)->Arg(32)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(dnls_rhs, serial, Exec::serial)->Arg(256)->Arg(1024);
BENCHMARK_CAPTURE(dnls_rhs, parallel, Exec::parallel)->Arg(256)->Arg(1024);

BENCHMARK_MAIN();
