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

#include "supersage/feedback.hpp"

#include <algorithm>
#include <cmath>

#include "supersage/errors.hpp"

namespace supersage {

std::vector<double> ErrorAccumulator::compensate(NodeId v, int layer,
                                                 std::span<const double> h) const {
  std::vector<double> out(h.begin(), h.end());
  if (!enabled_) return out;
  const auto it = store_.find(key(v, layer));
  if (it == store_.end()) return out;
  const auto& residual = it->second;
  if (residual.size() != out.size()) {
    throw ShapeError("stored residual dimension mismatch");
  }
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += residual[i];
  return out;
}

void ErrorAccumulator::record(NodeId v, int layer, std::span<const double> compensated,
                              std::span<const double> reconstructed) {
  if (compensated.size() != reconstructed.size()) {
    throw ShapeError("record_error dimension mismatch");
  }
  if (!enabled_) return;
  std::vector<double> residual(compensated.size());
  for (std::size_t i = 0; i < residual.size(); ++i) {
    residual[i] = compensated[i] - reconstructed[i];
  }
  store_[key(v, layer)] = std::move(residual);
}

std::span<const double> ErrorAccumulator::residual(NodeId v, int layer) const {
  const auto it = store_.find(key(v, layer));
  if (it == store_.end()) return {};
  return it->second;
}

double ErrorAccumulator::max_residual_norm() const {
  double max_norm = 0.0;
  for (const auto& [unused, residual] : store_) {
    double sq = 0.0;
    for (double x : residual) sq += x * x;
    max_norm = std::max(max_norm, std::sqrt(sq));
  }
  return max_norm;
}

std::size_t ErrorAccumulator::stored_elements() const {
  std::size_t total = 0;
  for (const auto& [unused, residual] : store_) total += residual.size();
  return total;
}

void ErrorAccumulator::retain_only(std::span<const NodeId> boundary_nodes) {
  for (auto it = store_.begin(); it != store_.end();) {
    const auto node = static_cast<NodeId>(it->first & 0xffffffffull);
    const bool keep =
        std::binary_search(boundary_nodes.begin(), boundary_nodes.end(), node);
    it = keep ? std::next(it) : store_.erase(it);
  }
}

void DeltaLog::observe(double h_norm, double error_norm) {
  if (h_norm == 0.0 && error_norm == 0.0) return;
  ++stat_.pairs;
  if (h_norm == 0.0) {
    stat_.infinite = true;
    return;
  }
  stat_.delta = std::max(stat_.delta, error_norm / h_norm);
}

void DeltaLog::observe_vectors(std::span<const double> h, std::span<const double> e) {
  double h_sq = 0.0;
  double e_sq = 0.0;
  for (double x : h) h_sq += x * x;
  for (double x : e) e_sq += x * x;
  observe(std::sqrt(h_sq), std::sqrt(e_sq));
}

DeltaLog::Stat DeltaLog::measure() const {
  if (stat_.pairs == 0) throw MetricError("delta measured on an empty log");
  return stat_;
}

void DeltaLog::merge(const DeltaLog& other) {
  stat_.pairs += other.stat_.pairs;
  stat_.infinite |= other.stat_.infinite;
  stat_.delta = std::max(stat_.delta, other.stat_.delta);
}

}  // namespace supersage
