// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include <random>

#include "sparls/penalty.hpp"

using namespace sparls;

namespace {

CVec random_vec(int size, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  CVec v(size);
  for (int j = 0; j < size; ++j) v[j] = Complex(normal(rng), normal(rng));
  return v;
}

}  // namespace

static void BM_prox_vector_firm(benchmark::State& state) {
  const CVec r = random_vec(static_cast<int>(state.range(0)), 1);
  for (auto _ : state) {
    CVec out = prox_vector(r, 0.5, 2.0);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_prox_vector_firm)->Arg(100)->Arg(1000)->Arg(100000);

static void BM_prox_vector_hard(benchmark::State& state) {
  const CVec r = random_vec(static_cast<int>(state.range(0)), 2);
  for (auto _ : state) {
    CVec out = prox_vector(r, 2.0, 0.5);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_prox_vector_hard)->Arg(1000);

static void BM_prox_group(benchmark::State& state) {
  const int groups = static_cast<int>(state.range(0));
  const CVec r = random_vec(groups * 10, 3);
  const GroupLayout layout = GroupLayout::uniform(groups, 10);
  for (auto _ : state) {
    CVec out = prox_group(r, layout, 0.5, 2.0);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_prox_group)->Arg(16)->Arg(256);

static void BM_prox_soft_vector(benchmark::State& state) {
  const CVec r = random_vec(static_cast<int>(state.range(0)), 4);
  for (auto _ : state) {
    CVec out = prox_soft_vector(r, 0.7);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_prox_soft_vector)->Arg(1000);
