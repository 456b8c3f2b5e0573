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
#include <optional>
#include <vector>

#include "supersage/condense.hpp"
#include "supersage/graph.hpp"
#include "supersage/partition.hpp"

namespace supersage {

/// serial-deterministic steps workers round-robin on one thread and is the
/// reference mode; concurrent runs one thread per worker between barriers.
/// Both produce identical results because every reduction is evaluated in
/// canonical worker order.
enum class ExecMode { SerialDeterministic, Concurrent };

struct TrainSettings {
  int num_workers = 1;
  PartitionMethod partition_method = PartitionMethod::Hash;
  std::optional<std::uint64_t> partition_seed;  // defaults to the run seed
  Phi phi = Phi::None;
  std::optional<double> ratio;  // required iff phi != None
  bool feedback = true;
  GroupingStrategy grouping = GroupingStrategy::Kmeans;
  std::size_t hidden_dim = 256;
  int num_layers = 2;
  int epochs = 1;
  double learning_rate = 0.05;
  double momentum = 0.0;
  double aux_lr = 1e-3;
  std::uint64_t seed = 42;
  ExecMode mode = ExecMode::SerialDeterministic;

  void validate() const;
};

struct EpochMetrics {
  double loss = 0.0;
  double train_acc = 0.0;
  double val_acc = 0.0;
  double test_acc = 0.0;
  std::uint64_t payload_bytes = 0;
  std::uint64_t metadata_bytes = 0;
  std::uint64_t baseline_bytes = 0;
  std::uint64_t grad_bytes = 0;
  double delta_emp = 0.0;
  bool delta_infinite = false;
  double max_residual_norm = 0.0;
};

struct RunReport {
  std::vector<EpochMetrics> epochs;
  std::uint64_t graph_fingerprint = 0;
  std::uint64_t seed = 0;
  std::size_t num_nodes = 0;
  std::size_t accumulator_elements = 0;  // residual store footprint at end of run
  std::size_t feature_elements = 0;      // input feature matrix footprint

  double final_loss() const { return epochs.back().loss; }
  double final_test_acc() const { return epochs.back().test_acc; }
  std::uint64_t total_payload_bytes() const;
  std::uint64_t total_baseline_bytes() const;
  /// payload / baseline over the whole run; 1.0 when nothing was exchanged.
  double bytes_ratio() const;
};

/// Synchronous data-parallel training: per layer, boundary features are
/// (optionally) error-compensated, condensed per the grouping plan, exchanged,
/// reconstructed and aggregated; backward halo gradients travel uncompressed;
/// parameter gradients are summed all-reduce style so every replica steps
/// identically.
RunReport run_training(const Graph& graph, const TrainSettings& settings);

/// Single-process full-graph trainer with no partition, bus or compression;
/// the reference the distributed path is checked against.
RunReport run_monolithic(const Graph& graph, const TrainSettings& settings);

struct RunDiff {
  double d_test_acc = 0.0;   // b - a, final epoch
  double d_loss = 0.0;       // b - a, final epoch
  std::int64_t d_payload_bytes = 0;
  double d_delta_emp = 0.0;  // b - a, final epoch
};

/// Structured diff for ablations. Throws ComparabilityError unless both
/// reports come from the same graph, seed and epoch count.
RunDiff compare_runs(const RunReport& a, const RunReport& b);

}  // namespace supersage
