#include <benchmark/benchmark.h>

#include <random>

#include "alk/boxcount.hpp"
#include "alk/oracles.hpp"

using namespace alk;

namespace {

EuclideanLattice lattice(int n) {
  std::mt19937_64 rng(11);
  return EuclideanLattice::from_rational(oracle::random_gram(n, rng));
}

// squared radius giving about 10^5 points in rank 4
constexpr double kR2 = 1500.0;

void BM_gaussian_sum_serial(benchmark::State& st) {
  auto L = lattice(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(gaussian_sum_serial(L, kR2));
}
void BM_gaussian_sum_parallel(benchmark::State& st) {
  auto L = lattice(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(gaussian_sum_parallel(L, kR2));
}

RadiusFamily box(long d, long r) {
  RadiusFamily f = RadiusFamily::unit(d == 1 ? QuadField::rationals() : QuadField(d));
  for (auto& x : f.infinite) x = r;
  return f;
}

void BM_count_box_serial(benchmark::State& st) {
  auto f = box(st.range(0), st.range(1));
  for (auto _ : st) benchmark::DoNotOptimize(count_box(f, kDefaultBudget, false));
}
void BM_count_box_parallel(benchmark::State& st) {
  auto f = box(st.range(0), st.range(1));
  for (auto _ : st) benchmark::DoNotOptimize(count_box(f, kDefaultBudget, true));
}

}  // namespace

BENCHMARK(BM_gaussian_sum_serial)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_gaussian_sum_parallel)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_count_box_serial)->Args({-1, 20000})->Args({5, 300})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_count_box_parallel)->Args({-1, 20000})->Args({5, 300})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
