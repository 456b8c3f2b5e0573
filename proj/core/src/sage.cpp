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

#include "supersage/sage.hpp"

#include <cmath>
#include <string>

#include "supersage/errors.hpp"
#include "supersage/rng.hpp"

namespace supersage {

void SageGrads::add(const SageGrads& other) {
  w_self.add_scaled(other.w_self, 1.0);
  w_neigh.add_scaled(other.w_neigh, 1.0);
  bias.add_scaled(other.bias, 1.0);
}

SageForwardResult sage_forward(const SageLayer& layer, const Matrix& h_local,
                               const Matrix& h_halo, const WorkerView& view,
                               bool apply_activation) {
  const std::size_t n = view.num_local();
  const std::size_t d = layer.in_dim();
  if (h_local.rows() != n || h_local.cols() != d) {
    throw ShapeError("sage_forward local input shape mismatch");
  }
  if (h_halo.rows() > 0 && h_halo.cols() != d) {
    throw ShapeError("sage_forward halo width mismatch");
  }

  Matrix means(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t begin = view.offsets[i];
    const std::size_t end = view.offsets[i + 1];
    if (begin == end) continue;  // empty neighborhood -> zero term
    auto acc = means.row(i);
    for (std::size_t t = begin; t < end; ++t) {
      const std::uint32_t enc = view.targets[t];
      std::span<const double> src;
      if (enc & WorkerView::kHaloFlag) {
        const std::size_t row = enc & ~WorkerView::kHaloFlag;
        if (row >= h_halo.rows()) {
          throw AggregationError("missing halo row for node " +
                                 std::to_string(view.halo_nodes[row]));
        }
        src = h_halo.row(row);
      } else {
        src = h_local.row(enc);
      }
      for (std::size_t c = 0; c < d; ++c) acc[c] += src[c];
    }
    const double inv = 1.0 / static_cast<double>(end - begin);
    for (std::size_t c = 0; c < d; ++c) acc[c] *= inv;
  }

  Matrix z = matmul(h_local, layer.w_self);
  const Matrix zn = matmul(means, layer.w_neigh);
  z.add_scaled(zn, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    auto row = z.row(i);
    for (std::size_t c = 0; c < layer.out_dim(); ++c) row[c] += layer.bias(0, c);
  }

  SageForwardResult result;
  result.cache.inputs = h_local;
  result.cache.neighbor_means = std::move(means);
  result.cache.pre_activation = z;
  result.cache.activated = apply_activation;
  result.cache.layer = &layer;
  result.cache.view = &view;
  result.cache.layer_version = layer.version;
  result.out = apply_activation ? relu(z) : std::move(z);
  return result;
}

SageBackwardResult sage_backward(const SageCache& cache, const Matrix& upstream) {
  if (cache.layer == nullptr || cache.view == nullptr) {
    throw ContractError("sage_backward called with an empty cache");
  }
  if (cache.layer_version != cache.layer->version) {
    throw ContractError("stale cache: layer parameters changed since forward");
  }
  if (!upstream.same_shape(cache.pre_activation)) {
    throw ShapeError("sage_backward upstream shape mismatch");
  }
  const SageLayer& layer = *cache.layer;
  const WorkerView& view = *cache.view;
  const std::size_t n = view.num_local();
  const std::size_t d = layer.in_dim();

  const Matrix dz = cache.activated ? relu_backward(cache.pre_activation, upstream) : upstream;

  SageBackwardResult result;
  result.grads.w_self = matmul_at(cache.inputs, dz);
  result.grads.w_neigh = matmul_at(cache.neighbor_means, dz);
  result.grads.bias = Matrix(1, layer.out_dim());
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = dz.row(i);
    for (std::size_t c = 0; c < layer.out_dim(); ++c) result.grads.bias(0, c) += row[c];
  }

  result.grad_local = matmul_bt(dz, layer.w_self);
  const Matrix d_means = matmul_bt(dz, layer.w_neigh);
  result.grad_halo = Matrix(view.num_halo(), d);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t begin = view.offsets[i];
    const std::size_t end = view.offsets[i + 1];
    if (begin == end) continue;
    const double inv = 1.0 / static_cast<double>(end - begin);
    const auto dm = d_means.row(i);
    for (std::size_t t = begin; t < end; ++t) {
      const std::uint32_t enc = view.targets[t];
      auto dst = (enc & WorkerView::kHaloFlag)
                     ? result.grad_halo.row(enc & ~WorkerView::kHaloFlag)
                     : result.grad_local.row(enc);
      for (std::size_t c = 0; c < d; ++c) dst[c] += inv * dm[c];
    }
  }
  return result;
}

Model Model::init(std::size_t in_dim, std::size_t hidden_dim, int num_classes,
                  int num_layers, std::uint64_t seed) {
  if (num_layers < 1) throw ParameterError("model needs at least one layer");
  if (num_classes < 1) throw ParameterError("model needs at least one class");
  Model model;
  for (int l = 0; l < num_layers; ++l) {
    const std::size_t d_in = l == 0 ? in_dim : hidden_dim;
    const std::size_t d_out =
        l == num_layers - 1 ? static_cast<std::size_t>(num_classes) : hidden_dim;
    SageLayer layer;
    layer.w_self = Matrix(d_in, d_out);
    layer.w_neigh = Matrix(d_in, d_out);
    layer.bias = Matrix(1, d_out);
    const double limit = std::sqrt(6.0 / static_cast<double>(d_in + d_out));
    Rng rng_self(Rng::derive(seed, 100 + static_cast<std::uint64_t>(l) * 2));
    Rng rng_neigh(Rng::derive(seed, 101 + static_cast<std::uint64_t>(l) * 2));
    for (std::size_t i = 0; i < layer.w_self.size(); ++i) {
      layer.w_self.data()[i] = rng_self.uniform(-limit, limit);
    }
    for (std::size_t i = 0; i < layer.w_neigh.size(); ++i) {
      layer.w_neigh.data()[i] = rng_neigh.uniform(-limit, limit);
    }
    model.layers.push_back(std::move(layer));
  }
  return model;
}

std::vector<Matrix*> Model::param_ptrs() {
  std::vector<Matrix*> out;
  out.reserve(layers.size() * 3);
  for (SageLayer& layer : layers) {
    out.push_back(&layer.w_self);
    out.push_back(&layer.w_neigh);
    out.push_back(&layer.bias);
  }
  return out;
}

std::vector<const Matrix*> Model::grad_ptrs(const std::vector<SageGrads>& grads) const {
  if (grads.size() != layers.size()) throw ShapeError("grad count does not match layers");
  std::vector<const Matrix*> out;
  out.reserve(grads.size() * 3);
  for (const SageGrads& g : grads) {
    out.push_back(&g.w_self);
    out.push_back(&g.w_neigh);
    out.push_back(&g.bias);
  }
  return out;
}

void Model::apply(SgdState& sgd, const std::vector<SageGrads>& grads) {
  auto params = param_ptrs();
  auto gptrs = grad_ptrs(grads);
  sgd.step(params, gptrs);
  for (SageLayer& layer : layers) ++layer.version;
}

double Model::max_param_diff(const Model& other) const {
  double max_diff = 0.0;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const Matrix* mine[] = {&layers[l].w_self, &layers[l].w_neigh, &layers[l].bias};
    const Matrix* theirs[] = {&other.layers[l].w_self, &other.layers[l].w_neigh,
                              &other.layers[l].bias};
    for (int i = 0; i < 3; ++i) {
      for (std::size_t j = 0; j < mine[i]->size(); ++j) {
        max_diff = std::max(max_diff, std::abs(mine[i]->data()[j] - theirs[i]->data()[j]));
      }
    }
  }
  return max_diff;
}

double accuracy(const Matrix& logits, std::span<const int> labels,
                std::span<const std::uint8_t> mask) {
  if (labels.size() != logits.rows() || mask.size() != logits.rows()) {
    throw ShapeError("accuracy row count mismatch");
  }
  std::size_t total = 0;
  std::size_t correct = 0;
  for (std::size_t r = 0; r < logits.rows(); ++r) {
    if (!mask[r]) continue;
    const auto row = logits.row(r);
    std::size_t best = 0;
    for (std::size_t c = 1; c < row.size(); ++c) {
      if (row[c] > row[best]) best = c;
    }
    correct += static_cast<int>(best) == labels[r] ? 1 : 0;
    ++total;
  }
  if (total == 0) throw MetricError("accuracy over an empty mask");
  return static_cast<double>(correct) / static_cast<double>(total);
}

}  // namespace supersage
