// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "sparls/estimators.hpp"

using namespace sparls;

namespace {

struct StreamData {
  std::vector<CVec> xs;
  std::vector<Complex> ds;
};

StreamData make_data(int n, int m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  StreamData data;
  for (int t = 0; t < n; ++t) {
    CVec x(m);
    for (int j = 0; j < m; ++j) x[j] = Complex(normal(rng), normal(rng));
    data.xs.push_back(std::move(x));
    data.ds.push_back(Complex(normal(rng), normal(rng)));
  }
  return data;
}

PenaltyConfig bench_penalty(int m) {
  PenaltyConfig p;
  p.alpha = 0.5;
  p.gamma = 10.0;
  p.xi2 = 1e-3 / m;
  p.sigma2 = 0.1;
  return p;
}

}  // namespace

static void BM_sparls_mcp_step(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const int K = static_cast<int>(state.range(1));
  const StreamData data = make_data(64, m, 5);
  FilterState init = sparls_mcp_init(data.xs[0], data.ds[0], bench_penalty(m), K, 0.99);
  for (auto _ : state) {
    FilterState s = init;
    for (int t = 1; t < 64; ++t)
      sparls_mcp_step(s, data.xs[static_cast<size_t>(t)], data.ds[static_cast<size_t>(t)]);
    benchmark::DoNotOptimize(s.w_hat.data());
  }
}
BENCHMARK(BM_sparls_mcp_step)->Args({72, 5})->Args({100, 1})->Args({100, 5})->Args({160, 5});

static void BM_rls_step(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const StreamData data = make_data(64, m, 6);
  for (auto _ : state) {
    RlsState s = rls_init(m, 0.99);
    for (int t = 0; t < 64; ++t)
      rls_step(s, data.xs[static_cast<size_t>(t)], data.ds[static_cast<size_t>(t)]);
    benchmark::DoNotOptimize(s.w_hat.data());
  }
}
BENCHMARK(BM_rls_step)->Arg(100);

static void BM_select_xi2(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const StreamData data = make_data(2 * m, m, 7);
  CMat X(2 * m, m);
  for (int i = 0; i < 2 * m; ++i) X.row(i) = data.xs[static_cast<size_t>(i)].adjoint();
  for (auto _ : state) {
    benchmark::DoNotOptimize(select_xi2(X, 0.99, 1.0, 0.9));
  }
}
BENCHMARK(BM_select_xi2)->Arg(100);

static void BM_max_weighted_gram_eigenvalue(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const StreamData data = make_data(1000, m, 8);
  for (auto _ : state) {
    benchmark::DoNotOptimize(max_weighted_gram_eigenvalue(data.xs, 0.99));
  }
}
BENCHMARK(BM_max_weighted_gram_eigenvalue)->Arg(72)->Arg(160);
