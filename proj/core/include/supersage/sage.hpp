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

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "supersage/matrix.hpp"
#include "supersage/partition.hpp"

namespace supersage {

/// One GraphSAGE-mean layer: out = act(h*w_self + mean_neighbors(h)*w_neigh + bias).
/// An empty neighborhood contributes a zero neighbor term. The version counter
/// invalidates forward caches when parameters change.
struct SageLayer {
  Matrix w_self;   // in_dim x out_dim
  Matrix w_neigh;  // in_dim x out_dim
  Matrix bias;     // 1 x out_dim
  std::uint64_t version = 0;

  std::size_t in_dim() const { return w_self.rows(); }
  std::size_t out_dim() const { return w_self.cols(); }
};

struct SageGrads {
  Matrix w_self;
  Matrix w_neigh;
  Matrix bias;

  void add(const SageGrads& other);
};

struct SageCache {
  Matrix inputs;          // local rows fed to the layer
  Matrix neighbor_means;  // per-row mean of neighbor features
  Matrix pre_activation;
  bool activated = false;
  const SageLayer* layer = nullptr;
  const WorkerView* view = nullptr;
  std::uint64_t layer_version = 0;
};

struct SageForwardResult {
  Matrix out;
  SageCache cache;
};

/// Neighbor features are resolved through the view's encoded targets: plain
/// indices read h_local, flagged indices read h_halo. Every halo row referenced
/// by the view must be present in h_halo.
SageForwardResult sage_forward(const SageLayer& layer, const Matrix& h_local,
                               const Matrix& h_halo, const WorkerView& view,
                               bool apply_activation);

struct SageBackwardResult {
  SageGrads grads;
  Matrix grad_local;  // gradient wrt the layer's local input rows
  Matrix grad_halo;   // gradient wrt the received halo rows
};

/// Exact gradients of sage_forward. Throws ContractError if the layer was
/// updated since the cache was produced.
SageBackwardResult sage_backward(const SageCache& cache, const Matrix& upstream);

/// Stack of SageLayers: feature_dim -> hidden -> ... -> num_classes. The final
/// layer emits raw logits (no activation).
struct Model {
  std::vector<SageLayer> layers;

  static Model init(std::size_t in_dim, std::size_t hidden_dim, int num_classes,
                    int num_layers, std::uint64_t seed);

  std::vector<Matrix*> param_ptrs();
  std::vector<const Matrix*> grad_ptrs(const std::vector<SageGrads>& grads) const;

  /// SGD step over all layer parameters; bumps layer versions.
  void apply(SgdState& sgd, const std::vector<SageGrads>& grads);

  /// Largest absolute parameter difference against another replica.
  double max_param_diff(const Model& other) const;
};

/// Fraction of masked rows whose argmax matches the label. Ties resolve to the
/// smallest column. Throws MetricError on an empty mask.
double accuracy(const Matrix& logits, std::span<const int> labels,
                std::span<const std::uint8_t> mask);

}  // namespace supersage
