// Serial reference kernels against their OpenMP counterparts.
//   ./build/bench/gevmle_bench --benchmark_filter=BlockMaxima

#include <benchmark/benchmark.h>

#include <vector>

#include "gevmle/gev.hpp"
#include "gevmle/kernels.hpp"
#include "gevmle/lab.hpp"
#include "gevmle/reference.hpp"

using namespace gevmle;

namespace {

const std::vector<double>& raw() {
  static const auto v = sample_iid(pareto(1.0), 1 << 24, 1);
  return v;
}

const std::vector<double>& maxima() {
  static const auto v = gev_sample({0.3, 1.0, 2.0}, 1 << 22, 2);
  return v;
}

template <auto Kernel>
void BlockMaxima(benchmark::State& state) {
  const std::size_t m = static_cast<std::size_t>(state.range(0));
  const auto& data = raw();
  std::vector<double> out(data.size() / m);
  for (auto _ : state) {
    Kernel(data, m, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * data.size() * sizeof(double)));
}

template <auto Kernel>
void SumLoglik(benchmark::State& state) {
  const auto& data = maxima();
  for (auto _ : state) benchmark::DoNotOptimize(Kernel({0.25, 1.1, 1.9}, data));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * data.size()));
}

template <auto Kernel>
void SumGradient(benchmark::State& state) {
  const auto& data = maxima();
  for (auto _ : state) benchmark::DoNotOptimize(Kernel({0.25, 1.1, 1.9}, data));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * data.size()));
}

void Study(benchmark::State& state) {
  const auto exec = state.range(0) ? Execution::parallel : Execution::serial;
  const std::vector<std::size_t> grid{400};
  for (auto _ : state) {
    auto r = run_consistency_study(exponential(), grid, GrowthRule::poly_log(), 32, 3, exec);
    benchmark::DoNotOptimize(r.rows.data());
  }
}

}  // namespace

BENCHMARK(BlockMaxima<kernels::serial::block_maxima>)->Name("BlockMaxima/serial")->Arg(16)->Arg(256);
BENCHMARK(BlockMaxima<kernels::omp::block_maxima>)->Name("BlockMaxima/omp")->Arg(16)->Arg(256)->UseRealTime();
BENCHMARK(SumLoglik<kernels::serial::sum_loglik>)->Name("SumLoglik/serial");
BENCHMARK(SumLoglik<kernels::omp::sum_loglik>)->Name("SumLoglik/omp")->UseRealTime();
BENCHMARK(SumGradient<kernels::serial::sum_gradient>)->Name("SumGradient/serial");
BENCHMARK(SumGradient<kernels::omp::sum_gradient>)->Name("SumGradient/omp")->UseRealTime();
BENCHMARK(Study)->Name("Study/serial")->Arg(0)->Unit(benchmark::kMillisecond);
BENCHMARK(Study)->Name("Study/parallel")->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
