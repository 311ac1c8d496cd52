// Copyright 2026 The rrbins Authors
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

// Serial reference vs OpenMP kernels.

#include <cmath>
#include <vector>

#include "benchmark/benchmark.h"
#include "rrbins/binopt.h"
#include "rrbins/core.h"
#include "rrbins/losses.h"
#include "rrbins/pipeline.h"
#include "rrbins/rng.h"

namespace rrbins {
namespace {

Prior ZipfPrior(size_t k) {
  std::vector<double> w(k);
  for (size_t i = 0; i < k; ++i) w[i] = 1.0 / (i + 1.0);
  auto labels = LabelSet::Range(0, k - 1.0, 1);
  return *Prior::Create(*labels, w);
}

Execution ExecutionArg(const benchmark::State& state) {
  return state.range(1) == 0 ? Execution::kSerial : Execution::kParallel;
}

void BM_FillTiltedCosts(benchmark::State& state) {
  const Prior prior = ZipfPrior(state.range(0));
  const LossSpec loss =
      state.range(2) == 0 ? LossSpec::Squared() : LossSpec::Absolute();
  for (auto _ : state) {
    auto table = FillTiltedCosts(prior, 1.0, loss, ExecutionArg(state));
    benchmark::DoNotOptimize(table);
  }
}
BENCHMARK(BM_FillTiltedCosts)
    ->ArgsProduct({{100, 200, 401, 800}, {0, 1}, {0, 1}})
    ->ArgNames({"k", "parallel", "absolute"})
    ->Unit(benchmark::kMillisecond);

void BM_PartitionSolver(benchmark::State& state) {
  const Prior prior = ZipfPrior(state.range(0));
  auto costs = FillTiltedCosts(prior, 1.0, LossSpec::Squared(),
                               Execution::kSerial);
  for (auto _ : state) {
    if (state.range(1) == 0) {
      benchmark::DoNotOptimize(SolveRatioPartition(*costs, std::exp(-1.0)));
    } else {
      PartitionTables tables = FillPartitionTables(*costs, Execution::kParallel);
      benchmark::DoNotOptimize(tables);
    }
  }
}
BENCHMARK(BM_PartitionSolver)
    ->ArgsProduct({{100, 200, 401}, {0, 1}})
    ->ArgNames({"k", "full_table"})
    ->Unit(benchmark::kMillisecond);

void BM_OptimizeBins(benchmark::State& state) {
  const Prior prior = ZipfPrior(state.range(0));
  const BinOptOptions options{.execution = ExecutionArg(state)};
  for (auto _ : state) {
    auto layout = OptimizeBins(prior, 1.0, LossSpec::Squared(), options);
    benchmark::DoNotOptimize(layout);
  }
}
BENCHMARK(BM_OptimizeBins)
    ->ArgsProduct({{100, 200, 401}, {0, 1}})
    ->ArgNames({"k", "parallel"})
    ->Unit(benchmark::kMillisecond);

void BM_RandomizeWithLayout(benchmark::State& state) {
  const Prior prior = ZipfPrior(401);
  auto layout = OptimizeBins(prior, 1.0, LossSpec::Squared());
  std::vector<size_t> indices(state.range(0));
  Rng rng(7);
  for (size_t& i : indices) i = rng.UniformInt(401);
  for (auto _ : state) {
    auto noisy = RandomizeWithLayout(indices, *layout, 1.0, 11,
                                     ExecutionArg(state));
    benchmark::DoNotOptimize(noisy);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RandomizeWithLayout)
    ->ArgsProduct({{100000, 1000000}, {0, 1}})
    ->ArgNames({"n", "parallel"})
    ->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace rrbins

BENCHMARK_MAIN();
