#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "starnls/dynamics.hpp"
#include "starnls/kernels.hpp"

using namespace starnls;

namespace {

std::vector<cplx> sample_data(long n) {
  std::vector<cplx> v(static_cast<size_t>(n));
  for (long i = 0; i < n; ++i) {
    const double x = 0.001 * double(i);
    v[size_t(i)] = cplx(std::cos(x), std::sin(0.5 * x)) * std::exp(-1e-4 * x);
  }
  return v;
}

template <double (*Fn)(std::span<const cplx>, double, double)>
void BM_TrapezoidPower(benchmark::State& state) {
  const auto v = sample_data(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(Fn(v, 8.0, 0.02));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <double (*Fn)(std::span<const cplx>)>
void BM_DiffSq(benchmark::State& state) {
  const auto v = sample_data(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(Fn(v));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <void (*Fn)(std::span<cplx>, double, double)>
void BM_PhaseRotate(benchmark::State& state) {
  auto v = sample_data(state.range(0));
  for (auto _ : state) {
    Fn(v, 1e-3, 6.0);
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_StrangStep(benchmark::State& state) {
  const EdgeGrid grid = EdgeGrid::with_spacing(60.0, 0.02);
  const ModelParams mp(3, 1.0, 7.0, -1);
  auto u = GraphFunction::sample(grid, 3, [](int, double x) { return cplx(std::exp(-x * x)); });
  const StrangStepper stepper(grid, mp, 0.01,
                              state.range(0) ? LinearMethod::q_conjugated : LinearMethod::direct_cn);
  for (auto _ : state) {
    stepper.step(u);
    benchmark::ClobberMemory();
  }
}

}  // namespace

BENCHMARK(BM_TrapezoidPower<kernels::serial::trapezoid_power>)->Name("trapezoid_power/serial")->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_TrapezoidPower<kernels::parallel::trapezoid_power>)->Name("trapezoid_power/parallel")->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_DiffSq<kernels::serial::diff_sq>)->Name("diff_sq/serial")->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_DiffSq<kernels::parallel::diff_sq>)->Name("diff_sq/parallel")->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_PhaseRotate<kernels::serial::phase_rotate>)->Name("phase_rotate/serial")->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_PhaseRotate<kernels::parallel::phase_rotate>)->Name("phase_rotate/parallel")->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_StrangStep)->Name("strang_step/direct_cn")->Arg(0);
BENCHMARK(BM_StrangStep)->Name("strang_step/q_conjugated")->Arg(1);

BENCHMARK_MAIN();
