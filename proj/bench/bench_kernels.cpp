// OpenMP kernels against their serial references.
//
//   ./build/bench/bench_kernels --benchmark_filter=dot

#include <random>

#include <benchmark/benchmark.h>

#include "pareto_tracer/kernels.hpp"
#include "pareto_tracer/metrics.hpp"
#include "pareto_tracer/problems.hpp"

namespace pt = pareto_tracer;

namespace {

pt::Vector random_vector(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  pt::Vector v(n);
  for (double& x : v) x = normal(rng);
  return v;
}

std::vector<pt::ObjectiveVec> random_points(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<pt::ObjectiveVec> out(count);
  for (pt::ObjectiveVec& p : out) p = {u(rng), u(rng)};
  return out;
}

template <bool Parallel>
void BM_Dot(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const pt::Vector x = random_vector(n, 1), y = random_vector(n, 2);
  for (auto _ : state) {
    if constexpr (Parallel) {
      benchmark::DoNotOptimize(pt::kernels::dot(x, y));
    } else {
      benchmark::DoNotOptimize(pt::kernels::serial::dot(x, y));
    }
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * 2 * n * sizeof(double)));
}

template <bool Parallel>
void BM_Axpy(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const pt::Vector x = random_vector(n, 1);
  pt::Vector y = random_vector(n, 2);
  for (auto _ : state) {
    if constexpr (Parallel) {
      pt::kernels::axpy(1e-9, x, y);
    } else {
      pt::kernels::serial::axpy(1e-9, x, y);
    }
    benchmark::ClobberMemory();
  }
}

template <pt::Execution Exec>
void BM_FairnessGradients(benchmark::State& state) {
  const auto samples = static_cast<std::size_t>(state.range(0));
  const pt::SyntheticFairness problem(pt::generate_fairness_dataset(0, samples, 20, 0.3), Exec);
  const pt::Vector x = random_vector(problem.dimension(), 3);
  for (auto _ : state) benchmark::DoNotOptimize(problem.gradients(x));
}

template <bool Parallel>
void BM_DominatedMask(benchmark::State& state) {
  const auto pts = random_points(static_cast<std::size_t>(state.range(0)), 4);
  for (auto _ : state) {
    if constexpr (Parallel) {
      benchmark::DoNotOptimize(pt::dominated_mask(pts));
    } else {
      benchmark::DoNotOptimize(pt::serial::dominated_mask(pts));
    }
  }
}

template <bool Parallel>
void BM_GenerationalDistance(benchmark::State& state) {
  const auto front = random_points(static_cast<std::size_t>(state.range(0)), 5);
  const auto truth = random_points(20000, 6);
  for (auto _ : state) {
    if constexpr (Parallel) {
      benchmark::DoNotOptimize(pt::generational_distance(front, truth));
    } else {
      benchmark::DoNotOptimize(pt::serial::generational_distance(front, truth));
    }
  }
}

}  // namespace

BENCHMARK(BM_Dot<false>)->Name("dot/serial")->Arg(1 << 12)->Arg(1 << 20);
BENCHMARK(BM_Dot<true>)->Name("dot/openmp")->Arg(1 << 12)->Arg(1 << 20);
BENCHMARK(BM_Axpy<false>)->Name("axpy/serial")->Arg(1 << 12)->Arg(1 << 20);
BENCHMARK(BM_Axpy<true>)->Name("axpy/openmp")->Arg(1 << 12)->Arg(1 << 20);
BENCHMARK(BM_FairnessGradients<pt::Execution::kSerial>)->Name("fairness_gradients/serial")->Arg(500)->Arg(50000);
BENCHMARK(BM_FairnessGradients<pt::Execution::kParallel>)->Name("fairness_gradients/openmp")->Arg(500)->Arg(50000);
BENCHMARK(BM_DominatedMask<false>)->Name("dominated_mask/serial")->Arg(2000);
BENCHMARK(BM_DominatedMask<true>)->Name("dominated_mask/openmp")->Arg(2000);
BENCHMARK(BM_GenerationalDistance<false>)->Name("generational_distance/serial")->Arg(200);
BENCHMARK(BM_GenerationalDistance<true>)->Name("generational_distance/openmp")->Arg(200);

BENCHMARK_MAIN();
