#include "mprk/kernels.hpp"

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

using namespace mprk;

namespace {

std::vector<double> random_vector(std::size_t n, unsigned seed, double lo, double hi) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

template <bool Parallel>
void BM_Upwind3(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto u = random_vector(n, 1, -1.0, 1.0);
  const auto speed = random_vector(n, 2, 0.5, 2.0);
  std::vector<double> out(n);
  for (auto _ : state) {
    if constexpr (Parallel)
      kernels::upwind3_flux_divergence(u, speed, 1.0 / n, {}, out);
    else
      kernels::serial::upwind3_flux_divergence(u, speed, 1.0 / n, {}, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool Parallel>
void BM_Diffusion(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto u = random_vector(n, 3, -1.0, 1.0);
  std::vector<double> out(n);
  for (auto _ : state) {
    if constexpr (Parallel)
      kernels::central_diffusion(u, 0.05, 1.0 / n, {}, out);
    else
      kernels::serial::central_diffusion(u, 0.05, 1.0 / n, {}, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool Parallel>
void BM_StageCombine(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto y = random_vector(n, 4, -1.0, 1.0);
  std::vector<std::vector<double>> stages;
  for (unsigned i = 0; i < 4; ++i) stages.push_back(random_vector(n, 10 + i, -1.0, 1.0));
  const std::vector<const double*> derivs{stages[0].data(), stages[1].data(), stages[2].data(), stages[3].data()};
  const std::vector<double> fast{0.25, 0.25, 0.5, 0.0}, slow{0.0, 0.0, 1.0, 0.0};
  const std::vector<kernels::StageRow> rows{{fast}, {slow}};
  std::vector<std::uint8_t> part(n);
  for (std::size_t k = 0; k < n; ++k) part[k] = static_cast<std::uint8_t>(k < n / 3 || k > 2 * n / 3);
  const std::vector<double> implicit{0.5, 0.5, 0.5};
  std::vector<double> out(n);
  for (auto _ : state) {
    if constexpr (Parallel)
      kernels::stage_combine(y, 0.01, rows, part, derivs, implicit, derivs, out);
    else
      kernels::serial::stage_combine(y, 0.01, rows, part, derivs, implicit, derivs, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_Upwind3<false>)->RangeMultiplier(8)->Range(1 << 9, 1 << 21);
BENCHMARK(BM_Upwind3<true>)->RangeMultiplier(8)->Range(1 << 9, 1 << 21);
BENCHMARK(BM_Diffusion<false>)->RangeMultiplier(8)->Range(1 << 9, 1 << 21);
BENCHMARK(BM_Diffusion<true>)->RangeMultiplier(8)->Range(1 << 9, 1 << 21);
BENCHMARK(BM_StageCombine<false>)->RangeMultiplier(8)->Range(1 << 9, 1 << 21);
BENCHMARK(BM_StageCombine<true>)->RangeMultiplier(8)->Range(1 << 9, 1 << 21);

BENCHMARK_MAIN();
