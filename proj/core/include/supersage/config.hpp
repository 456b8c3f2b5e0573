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

#include <optional>
#include <string>

#include "supersage/trainer.hpp"

namespace supersage {

/// Experiment description loaded from a flat "key = value" text file ('#'
/// comments allowed). Every key maps one-to-one onto a module contract;
/// parse -> serialize -> parse is the identity.
struct ExperimentConfig {
  enum class Source { Sbm, Files };

  Source source = Source::Sbm;

  // graph = sbm
  std::size_t sbm_num_nodes = 0;
  int sbm_num_classes = 0;
  double sbm_p_in = 0.0;
  double sbm_p_out = 0.0;
  std::size_t sbm_feature_dim = 0;
  double sbm_feature_noise = 0.0;

  // graph = files
  std::string files_edges;
  std::string files_features;
  std::string files_labels;
  std::optional<std::string> files_masks;

  int workers = 1;
  PartitionMethod partition_method = PartitionMethod::Hash;
  std::optional<std::uint64_t> partition_seed;  // run seed when absent
  Phi phi = Phi::Mean;
  std::optional<double> ratio;  // defaulted to 0.5 when phi != none
  bool feedback = true;
  GroupingStrategy grouping = GroupingStrategy::Kmeans;
  std::size_t hidden_dim = 256;
  int num_layers = 2;
  int epochs = 0;  // required
  double learning_rate = 0.05;
  double momentum = 0.0;
  double aux_lr = 1e-3;
  std::uint64_t seed = 42;
  std::optional<std::string> out_dir;

  static ExperimentConfig parse(const std::string& text);
  static ExperimentConfig parse_file(const std::string& path);

  std::string serialize() const;
  void validate() const;  // throws ConfigError naming the offending field

  /// Materializes the configured graph (SBM generation or file loading).
  Graph build_graph() const;
  TrainSettings settings(ExecMode mode) const;

  /// Same graph source and seed: reports from two such configs are comparable.
  bool same_experiment_identity(const ExperimentConfig& other) const;
};

std::string to_string(Phi phi);
std::string to_string(GroupingStrategy strategy);
std::string to_string(PartitionMethod method);

}  // namespace supersage
