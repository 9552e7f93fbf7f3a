// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "adiab/kernels.hpp"

namespace k = adiab::kernels;
using adiab::kernels::cplx;

namespace {

std::vector<cplx> wave(std::size_t n) {
  std::vector<cplx> a(n);
  for (std::size_t j = 0; j < n; ++j) a[j] = std::polar(1.0 / std::cosh(1e-3 * j), 0.01 * j);
  return a;
}

std::vector<double> well(std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t j = 0; j < n; ++j) v[j] = -1.0 / std::pow(std::cosh(1e-3 * j), 2);
  return v;
}

template <auto Fn>
void BM_phase(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  auto a = wave(n);
  const auto v = well(n);
  for (auto _ : state) {
    Fn(a, v, 1e-3, 0.1, 1);
    benchmark::DoNotOptimize(a.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <auto Fn>
void BM_dot(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = wave(n), b = wave(n);
  for (auto _ : state) benchmark::DoNotOptimize(Fn(a, b));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <auto Fn>
void BM_sum_abs_pow(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = wave(n);
  for (auto _ : state) benchmark::DoNotOptimize(Fn(a, 4.0));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_phase<k::serial::potential_phase>)->Name("potential_phase/serial")->RangeMultiplier(8)->Range(512, 1 << 21);
BENCHMARK(BM_phase<k::parallel::potential_phase>)->Name("potential_phase/omp")->RangeMultiplier(8)->Range(512, 1 << 21);
BENCHMARK(BM_dot<k::serial::dot>)->Name("dot/serial")->RangeMultiplier(8)->Range(512, 1 << 21);
BENCHMARK(BM_dot<k::parallel::dot>)->Name("dot/omp")->RangeMultiplier(8)->Range(512, 1 << 21);
BENCHMARK(BM_sum_abs_pow<k::serial::sum_abs_pow>)->Name("sum_abs_pow/serial")->RangeMultiplier(8)->Range(512, 1 << 21);
BENCHMARK(BM_sum_abs_pow<k::parallel::sum_abs_pow>)->Name("sum_abs_pow/omp")->RangeMultiplier(8)->Range(512, 1 << 21);

BENCHMARK_MAIN();
