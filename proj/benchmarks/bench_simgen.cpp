// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include "sparls/simgen.hpp"

using namespace sparls;

static void BM_jakes_stream(benchmark::State& state) {
  JakesConfig cfg;
  cfg.n = static_cast<int>(state.range(0));
  cfg.switch_time = cfg.n / 2 + 1;
  for (auto _ : state) {
    Stream s = jakes_stream(cfg);
    benchmark::DoNotOptimize(s.d.data());
  }
}
BENCHMARK(BM_jakes_stream)->Arg(1000);

static void BM_volterra_stream(benchmark::State& state) {
  VolterraConfig cfg;
  cfg.n = static_cast<int>(state.range(0));
  cfg.switch_time = cfg.n / 2 + 1;
  for (auto _ : state) {
    Stream s = volterra_stream(cfg);
    benchmark::DoNotOptimize(s.d.data());
  }
}
BENCHMARK(BM_volterra_stream)->Arg(1000);

static void BM_mts_stream(benchmark::State& state) {
  MTSConfig cfg;
  cfg.n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    Stream s = mts_stream(cfg);
    benchmark::DoNotOptimize(s.d.data());
  }
}
BENCHMARK(BM_mts_stream)->Arg(1000);

static void BM_quad_spline_basis(benchmark::State& state) {
  double x = -3.0;
  for (auto _ : state) {
    RVec b = quad_spline_basis(x, 10, -3.0, 3.0);
    benchmark::DoNotOptimize(b.data());
    x += 0.01;
    if (x > 3.0) x = -3.0;
  }
}
BENCHMARK(BM_quad_spline_basis);
