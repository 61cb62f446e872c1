// Copyright 2026 The admitsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include "admitsim/gamma.h"

namespace admitsim {
namespace {

void BM_GammaCdf(benchmark::State& state) {
  const GammaParams p(static_cast<double>(state.range(0)) / 2.0, 0.1);
  const auto grid = log_spaced_grid(1e-4, 10.0 * p.mean(), 1024);
  for (auto _ : state) {
    double sum = 0.0;
    for (double q : grid) sum += gamma_cdf(p, LogScore(q));
    benchmark::DoNotOptimize(sum);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(grid.size()));
}
BENCHMARK(BM_GammaCdf)->Arg(1)->Arg(4)->Arg(12)->Arg(40);

void BM_GammaQuantile(benchmark::State& state) {
  const GammaParams p(static_cast<double>(state.range(0)) / 2.0, 0.1);
  for (auto _ : state) {
    double sum = 0.0;
    for (int pct = 1; pct <= 99; ++pct) sum += gamma_quantile(p, pct / 100.0).value();
    benchmark::DoNotOptimize(sum);
  }
  state.SetItemsProcessed(state.iterations() * 99);
}
BENCHMARK(BM_GammaQuantile)->Arg(1)->Arg(4)->Arg(12)->Arg(40);

void BM_CdfRatioSup(benchmark::State& state) {
  const GammaParams rich(3.0, 0.1), poor(2.0, 0.3);
  for (auto _ : state) benchmark::DoNotOptimize(cdf_ratio_sup(rich, poor));
}
BENCHMARK(BM_CdfRatioSup);

}  // namespace
}  // namespace admitsim

BENCHMARK_MAIN();
