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
#include <map>
#include <span>
#include <vector>

#include "supersage/graph.hpp"

namespace supersage {

/// Per-worker compression residual store, keyed by (node, layer). Disabled
/// accumulators behave exactly as if every residual were zero: compensation is
/// the identity and nothing is ever recorded.
class ErrorAccumulator {
 public:
  explicit ErrorAccumulator(bool enabled = true) : enabled_(enabled) {}

  bool enabled() const { return enabled_; }

  /// compensated = h + residual(v, layer); plain h when absent or disabled.
  std::vector<double> compensate(NodeId v, int layer, std::span<const double> h) const;

  /// residual(v, layer) <- compensated - reconstructed.
  void record(NodeId v, int layer, std::span<const double> compensated,
              std::span<const double> reconstructed);

  /// Empty span when nothing is stored for (v, layer).
  std::span<const double> residual(NodeId v, int layer) const;

  double max_residual_norm() const;
  std::size_t stored_elements() const;
  std::size_t stored_entries() const { return store_.size(); }

  /// Drops residuals for nodes that left the boundary set (repartitioning).
  void retain_only(std::span<const NodeId> boundary_nodes);

 private:
  static std::uint64_t key(NodeId v, int layer) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(layer)) << 32) | v;
  }

  bool enabled_;
  std::map<std::uint64_t, std::vector<double>> store_;
};

/// Streaming log of (||h||, ||e||) pairs behind the per-epoch empirical
/// contraction factor delta = max ||e|| / ||h||. Pairs with both norms zero are
/// skipped; ||h|| = 0 with ||e|| > 0 flags delta as infinite.
class DeltaLog {
 public:
  void observe(double h_norm, double error_norm);
  void observe_vectors(std::span<const double> h, std::span<const double> e);

  struct Stat {
    double delta = 0.0;
    bool infinite = false;
    std::size_t pairs = 0;
  };

  /// Throws MetricError when no pair was logged.
  Stat measure() const;
  Stat measure_or_zero() const { return stat_; }

  void reset() { stat_ = Stat{}; }

  /// Merge another log's pairs into this one.
  void merge(const DeltaLog& other);

 private:
  Stat stat_;
};

}  // namespace supersage
