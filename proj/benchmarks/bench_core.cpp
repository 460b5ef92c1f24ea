// Copyright 2026 The TreeDOX Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "treedox/analysis.hpp"
#include "treedox/etr.hpp"
#include "treedox/hyperparams.hpp"
#include "treedox/random.hpp"
#include "treedox/systems.hpp"

namespace {

using treedox::Matrix;
using treedox::Rng;

struct Problem {
  Matrix x;
  Matrix y;
};

Problem make_problem(std::size_t n, std::size_t features) {
  Rng rng(42);
  Problem p{Matrix(n, features), Matrix(n, 1)};
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t f = 0; f < features; ++f) {
      p.x(i, f) = rng.uniform();
      s += std::sin(3.0 * p.x(i, f));
    }
    p.y(i, 0) = s;
  }
  return p;
}

void BM_EtrFit(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto p = make_problem(n, 16);
  treedox::etr::EtrConfig cfg;
  cfg.n_trees = 20;
  for (auto _ : state) {
    benchmark::DoNotOptimize(treedox::etr::EtrEnsemble::fit(p.x, p.y, cfg));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_EtrFit)->Arg(1000)->Arg(4000)->Arg(16000)->Unit(benchmark::kMillisecond);

void BM_EtrPredict(benchmark::State& state) {
  const auto p = make_problem(4000, 16);
  treedox::etr::EtrConfig cfg;
  cfg.n_trees = 100;
  const auto model = treedox::etr::EtrEnsemble::fit(p.x, p.y, cfg);
  const auto rows = static_cast<std::size_t>(state.range(0));
  const auto probe = make_problem(rows, 16).x;
  for (auto _ : state) benchmark::DoNotOptimize(model.predict(probe));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(rows));
}
BENCHMARK(BM_EtrPredict)->Arg(1)->Arg(1000)->Unit(benchmark::kMicrosecond);

void BM_AmiCurve(benchmark::State& state) {
  const auto run = treedox::systems::lorenz({}, {1, 1, 1}, 0.01, 20000, 1000);
  const auto tau_max = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(treedox::hyperparams::ami_curve(run.series, 0, tau_max));
  }
}
BENCHMARK(BM_AmiCurve)->Arg(50)->Arg(400)->Unit(benchmark::kMillisecond);

void BM_CorrelationDimension(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto run = treedox::systems::henon(1.4, 0.3, 0.0, 0.0, n, 100);
  for (auto _ : state) {
    benchmark::DoNotOptimize(treedox::analysis::correlation_dimension(run.series.data()));
  }
}
BENCHMARK(BM_CorrelationDimension)->Arg(5000)->Arg(20000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
