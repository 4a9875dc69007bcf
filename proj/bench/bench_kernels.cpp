#include "nlslab/evolution.hpp"
#include "nlslab/kernels.hpp"
#include "nlslab/radial_grid.hpp"
#include "nlslab/radial_spectral.hpp"
#include "nlslab/random.hpp"

#include <benchmark/benchmark.h>

#include <vector>

using namespace nlslab;

namespace {

CVec random_vector(std::size_t n, std::uint64_t seed) {
  CounterRng rng(seed);
  CVec v(n);
  for (auto& x : v) x = {rng.normal(), rng.normal()};
  return v;
}

std::vector<double> random_weights(std::size_t n) {
  CounterRng rng(3);
  std::vector<double> w(n);
  for (auto& x : w) x = rng.uniform();
  return w;
}

// -- Hankel transform (matrix-vector) ----------------------------------------------

void BM_hankel_parallel(benchmark::State& st) {
  const auto g = make_grid(static_cast<int>(st.range(0)), 20.0);
  const auto x = random_vector(g->size(), 1);
  CVec y(g->size());
  for (auto _ : st) {
    hankel_forward(*g, x, y);
    benchmark::DoNotOptimize(y.data());
  }
  st.SetComplexityN(st.range(0));
}

void BM_hankel_serial(benchmark::State& st) {
  const auto g = make_grid(static_cast<int>(st.range(0)), 20.0);
  const auto x = random_vector(g->size(), 1);
  CVec y(g->size());
  for (auto _ : st) {
    hankel_forward_reference(*g, x, y);
    benchmark::DoNotOptimize(y.data());
  }
  st.SetComplexityN(st.range(0));
}

// -- pointwise kernels --------------------------------------------------------------

void BM_cubic_phase_parallel(benchmark::State& st) {
  auto u = random_vector(st.range(0), 2);
  for (auto _ : st) {
    kernels::cubic_phase(u, 1e-3);
    benchmark::ClobberMemory();
  }
}

void BM_cubic_phase_serial(benchmark::State& st) {
  auto u = random_vector(st.range(0), 2);
  for (auto _ : st) {
    kernels::reference::cubic_phase(u, 1e-3);
    benchmark::ClobberMemory();
  }
}

void BM_diagonal_phase_parallel(benchmark::State& st) {
  auto u = random_vector(st.range(0), 2);
  const auto xi2 = random_weights(st.range(0));
  for (auto _ : st) {
    kernels::diagonal_phase(u, xi2, 1e-3);
    benchmark::ClobberMemory();
  }
}

void BM_diagonal_phase_serial(benchmark::State& st) {
  auto u = random_vector(st.range(0), 2);
  const auto xi2 = random_weights(st.range(0));
  for (auto _ : st) {
    kernels::reference::diagonal_phase(u, xi2, 1e-3);
    benchmark::ClobberMemory();
  }
}

void BM_power_sum_parallel(benchmark::State& st) {
  const auto u = random_vector(st.range(0), 2);
  const auto w = random_weights(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(kernels::weighted_power_sum(w, u, 4));
}

void BM_power_sum_serial(benchmark::State& st) {
  const auto u = random_vector(st.range(0), 2);
  const auto w = random_weights(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(kernels::reference::weighted_power_sum(w, u, 4));
}

// -- one full split step ----------------------------------------------------------

void BM_strang_step(benchmark::State& st) {
  const auto g = make_grid(static_cast<int>(st.range(0)), 20.0);
  RadialField u = sample(g, [](double r) { return cplx(std::exp(-r * r / 2), 0.0); });
  for (auto _ : st) {
    u = step_nls(u, 1e-3, -1.0);
    benchmark::DoNotOptimize(u.values.data());
  }
}

}  // namespace

BENCHMARK(BM_hankel_parallel)->RangeMultiplier(2)->Range(128, 1024)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_hankel_serial)->RangeMultiplier(2)->Range(128, 1024)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_cubic_phase_parallel)->Range(1 << 10, 1 << 16);
BENCHMARK(BM_cubic_phase_serial)->Range(1 << 10, 1 << 16);
BENCHMARK(BM_diagonal_phase_parallel)->Range(1 << 10, 1 << 16);
BENCHMARK(BM_diagonal_phase_serial)->Range(1 << 10, 1 << 16);
BENCHMARK(BM_power_sum_parallel)->Range(1 << 10, 1 << 16);
BENCHMARK(BM_power_sum_serial)->Range(1 << 10, 1 << 16);
BENCHMARK(BM_strang_step)->Arg(256)->Arg(512)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
