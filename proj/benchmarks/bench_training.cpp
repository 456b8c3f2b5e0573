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

#include "supersage/trainer.hpp"

namespace {

using namespace supersage;

TrainSettings epoch_settings(Phi phi) {
  TrainSettings s;
  s.num_workers = 4;
  s.phi = phi;
  if (phi != Phi::None) s.ratio = 0.5;
  s.grouping = GroupingStrategy::Chunk;
  s.hidden_dim = 32;
  s.epochs = 1;
  s.learning_rate = 0.1;
  s.seed = 7;
  return s;
}

void BM_EpochBaseline(benchmark::State& state) {
  const Graph g = generate_sbm({static_cast<std::size_t>(state.range(0)), 4, 0.15, 0.01,
                                16, 1.0, 7});
  const TrainSettings s = epoch_settings(Phi::None);
  for (auto _ : state) {
    auto report = run_training(g, s);
    benchmark::DoNotOptimize(report);
  }
}
BENCHMARK(BM_EpochBaseline)->Arg(400)->Arg(800)->Unit(benchmark::kMillisecond);

void BM_EpochCompressed(benchmark::State& state) {
  const Graph g = generate_sbm({static_cast<std::size_t>(state.range(0)), 4, 0.15, 0.01,
                                16, 1.0, 7});
  const TrainSettings s = epoch_settings(Phi::Mean);
  for (auto _ : state) {
    auto report = run_training(g, s);
    benchmark::DoNotOptimize(report);
  }
}
BENCHMARK(BM_EpochCompressed)->Arg(400)->Arg(800)->Unit(benchmark::kMillisecond);

}  // namespace
