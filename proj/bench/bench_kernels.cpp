// Serial reference vs OpenMP kernels, plus one full Strang step.

#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <vector>

#include "dwlab/kernels.hpp"
#include "dwlab/semilinear.hpp"

namespace k = dwlab::kernels;

namespace {

std::vector<double> random_field(std::size_t n) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g(0.0, 1e-2);
  std::vector<double> x(n);
  for (auto& v : x) v = g(rng);
  return x;
}

const dwlab::Nonlinearity& critical_h() {
  static const auto h = dwlab::parse_nonlinearity("invlog:p=1", 1);
  return h;
}

template <bool Omp>
void BM_Kick(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  const auto u = random_field(n);
  std::vector<double> v(n, 0.0);
  for (auto _ : st) {
    if constexpr (Omp) k::omp::kick(v, u, 0.025, critical_h());
    else k::serial::kick(v, u, 0.025, critical_h());
    benchmark::DoNotOptimize(v.data());
  }
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

template <bool Omp>
void BM_SumPow(benchmark::State& st) {
  const auto u = random_field(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) {
    double s = Omp ? k::omp::sum_pow(u, 3.0) : k::serial::sum_pow(u, 3.0);
    benchmark::DoNotOptimize(s);
  }
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

template <bool Omp>
void BM_Propagator(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  std::vector<k::cplx> u(n, {1.0, 0.5}), v(n, {0.2, -0.1});
  std::vector<k::PropagatorEntry> table(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double c = std::cos(1e-3 * i), s = std::sin(1e-3 * i);
    table[i] = {c, s, -s, c};
  }
  for (auto _ : st) {
    if constexpr (Omp) k::omp::apply_propagator(u, v, table);
    else k::serial::apply_propagator(u, v, table);
    benchmark::DoNotOptimize(u.data());
  }
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_StrangStep(benchmark::State& st) {
  const dwlab::GridSpec grid(1, 512.0, static_cast<int>(st.range(0)));
  dwlab::Stepper stepper(grid, critical_h());
  const dwlab::WaveState s0(
      0.0, dwlab::GridField::from_function(grid, [](double x, double) { return 1e-2 * std::exp(-x * x); }),
      dwlab::GridField(grid));
  for (auto _ : st) {
    auto s = stepper.step(s0, 0.05);
    benchmark::DoNotOptimize(s);
  }
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

}  // namespace

BENCHMARK(BM_Kick<false>)->Name("kick/serial")->RangeMultiplier(4)->Range(1 << 12, 1 << 20);
BENCHMARK(BM_Kick<true>)->Name("kick/omp")->RangeMultiplier(4)->Range(1 << 12, 1 << 20);
BENCHMARK(BM_SumPow<false>)->Name("sum_pow/serial")->RangeMultiplier(4)->Range(1 << 12, 1 << 20);
BENCHMARK(BM_SumPow<true>)->Name("sum_pow/omp")->RangeMultiplier(4)->Range(1 << 12, 1 << 20);
BENCHMARK(BM_Propagator<false>)->Name("propagator/serial")->RangeMultiplier(4)->Range(1 << 12, 1 << 20);
BENCHMARK(BM_Propagator<true>)->Name("propagator/omp")->RangeMultiplier(4)->Range(1 << 12, 1 << 20);
BENCHMARK(BM_StrangStep)->Name("strang_step")->RangeMultiplier(4)->Range(1 << 12, 1 << 16);

BENCHMARK_MAIN();
