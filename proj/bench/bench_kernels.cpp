// Parallel kernels against their serial references.

#include "ssbm/operators.hpp"
#include "ssbm/rng.hpp"
#include "ssbm/sampler.hpp"

#include <benchmark/benchmark.h>

#include <cmath>

using namespace ssbm;

namespace {

ModelSpec bench_model(int n) {
  const double alpha = 10.0 * std::log(double(n)) / n;
  return preset_planted_partition(n, 2, alpha, 0.5, balanced_sizes(n, 2));
}

void BM_SampleParallel(benchmark::State& state) {
  const ModelSpec spec = bench_model(static_cast<int>(state.range(0)));
  std::uint64_t rep = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sample_adjacency(spec, {1, rep++}));
}

void BM_SampleSerial(benchmark::State& state) {
  const ModelSpec spec = bench_model(static_cast<int>(state.range(0)));
  std::uint64_t rep = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sample_adjacency_serial(spec, {1, rep++}));
}

struct MatvecFixture {
  AdjacencyMatrix A;
  Matrix X, Y;
  explicit MatvecFixture(int n) : A(sample_adjacency(bench_model(n), {2, 0})), X(n, 8), Y(n, 8) {
    Engine rng = make_engine({3});
    for (Eigen::Index i = 0; i < X.size(); ++i) X.data()[i] = draw_unit(rng);
  }
};

void BM_MatvecParallel(benchmark::State& state) {
  MatvecFixture f(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    adjacency_multiply(f.A, f.X, f.Y);
    benchmark::DoNotOptimize(f.Y.data());
  }
}

void BM_MatvecSerial(benchmark::State& state) {
  MatvecFixture f(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    adjacency_multiply_serial(f.A, f.X, f.Y);
    benchmark::DoNotOptimize(f.Y.data());
  }
}

}  // namespace

BENCHMARK(BM_SampleParallel)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SampleSerial)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MatvecParallel)->Arg(2000)->Arg(20000)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_MatvecSerial)->Arg(2000)->Arg(20000)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
