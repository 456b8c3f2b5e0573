// Copyright 2026 The supersage Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include "supersage/condense.hpp"
#include "supersage/graph.hpp"
#include "supersage/partition.hpp"
#include "supersage/rng.hpp"

namespace {

using namespace supersage;

Matrix random_rows(std::size_t n, std::size_t dim) {
  Rng rng(42);
  Matrix m(n, dim);
  for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = rng.normal();
  return m;
}

void BM_CondenseMean(benchmark::State& state) {
  const Matrix rows = random_rows(static_cast<std::size_t>(state.range(0)), 64);
  for (auto _ : state) {
    auto super = condense_mean(rows);
    benchmark::DoNotOptimize(super);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_CondenseMean)->RangeMultiplier(4)->Range(8, 512);

void BM_CondenseWeighted(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const Matrix rows = random_rows(n, 64);
  const std::vector<double> degrees(n, 3.0);
  for (auto _ : state) {
    auto super = condense_weighted(rows, degrees);
    benchmark::DoNotOptimize(super);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_CondenseWeighted)->RangeMultiplier(4)->Range(8, 512);

void BM_CondenseAttention(benchmark::State& state) {
  const Matrix rows = random_rows(static_cast<std::size_t>(state.range(0)), 64);
  const std::vector<double> attention(64, 0.1);
  for (auto _ : state) {
    auto result = condense_attention(rows, attention);
    benchmark::DoNotOptimize(result);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_CondenseAttention)->RangeMultiplier(4)->Range(8, 512);

void BM_BuildGroupingKmeans(benchmark::State& state) {
  const Graph g = generate_sbm({static_cast<std::size_t>(state.range(0)), 4, 0.15, 0.01,
                                16, 1.0, 7});
  const Partition p = partition_graph(g, 4, PartitionMethod::Hash, 7);
  for (auto _ : state) {
    auto plan = build_grouping(p, g.features, 0.5, GroupingStrategy::Kmeans, 7);
    benchmark::DoNotOptimize(plan);
  }
}
BENCHMARK(BM_BuildGroupingKmeans)->Arg(200)->Arg(400)->Arg(800);

void BM_BuildGroupingChunk(benchmark::State& state) {
  const Graph g = generate_sbm({static_cast<std::size_t>(state.range(0)), 4, 0.15, 0.01,
                                16, 1.0, 7});
  const Partition p = partition_graph(g, 4, PartitionMethod::Hash, 7);
  for (auto _ : state) {
    auto plan = build_grouping(p, g.features, 0.5, GroupingStrategy::Chunk, 7);
    benchmark::DoNotOptimize(plan);
  }
}
BENCHMARK(BM_BuildGroupingChunk)->Arg(200)->Arg(400)->Arg(800);

}  // namespace
