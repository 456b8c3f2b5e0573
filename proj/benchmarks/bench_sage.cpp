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

#include "supersage/graph.hpp"
#include "supersage/partition.hpp"
#include "supersage/sage.hpp"

namespace {

using namespace supersage;

struct Fixture {
  Graph graph;
  WorkerView view;
  Model model;

  explicit Fixture(std::size_t n)
      : graph(generate_sbm({n, 4, 0.1, 0.01, 32, 1.0, 7})),
        view(WorkerView::full_graph(graph)),
        model(Model::init(32, 64, 4, 2, 7)) {}
};

void BM_SageForward(benchmark::State& state) {
  Fixture f(static_cast<std::size_t>(state.range(0)));
  const Matrix empty_halo;
  for (auto _ : state) {
    auto fwd = sage_forward(f.model.layers[0], f.view.local_features, empty_halo, f.view, true);
    benchmark::DoNotOptimize(fwd.out);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SageForward)->Arg(256)->Arg(1024)->Arg(4096);

void BM_SageForwardBackward(benchmark::State& state) {
  Fixture f(static_cast<std::size_t>(state.range(0)));
  const Matrix empty_halo;
  for (auto _ : state) {
    auto fwd = sage_forward(f.model.layers[0], f.view.local_features, empty_halo, f.view, true);
    auto back = sage_backward(fwd.cache, fwd.out);
    benchmark::DoNotOptimize(back.grads);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SageForwardBackward)->Arg(256)->Arg(1024)->Arg(4096);

}  // namespace
