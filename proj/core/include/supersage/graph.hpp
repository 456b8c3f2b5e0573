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
#include <span>
#include <string>
#include <vector>

#include "supersage/matrix.hpp"

namespace supersage {

using NodeId = std::uint32_t;

enum class Split : std::uint8_t { Train = 0, Val = 1, Test = 2 };

/// Immutable undirected graph in CSR form with node features, labels and a
/// train/val/test split. Adjacency is symmetric and self-loop free; num_edges
/// counts directed slots (twice the undirected edge count).
struct Graph {
  std::vector<std::size_t> csr_offsets;  // length num_nodes()+1
  std::vector<NodeId> csr_targets;       // length num_edges()
  Matrix features;                       // num_nodes() x feature_dim
  std::vector<int> labels;               // class id per node, in [0, num_classes)
  int num_classes = 0;
  std::vector<Split> split;              // one split per node

  std::size_t num_nodes() const { return csr_offsets.empty() ? 0 : csr_offsets.size() - 1; }
  std::size_t num_edges() const { return csr_targets.size(); }
  std::size_t feature_dim() const { return features.cols(); }

  std::span<const NodeId> neighbors(NodeId v) const {
    return {csr_targets.data() + csr_offsets[v], csr_offsets[v + 1] - csr_offsets[v]};
  }
  std::size_t degree(NodeId v) const { return csr_offsets[v + 1] - csr_offsets[v]; }

  std::vector<std::uint8_t> mask(Split s) const;
  std::size_t mask_count(Split s) const;

  /// Checks the CSR/feature/label/split invariants; throws on violation.
  void validate() const;

  /// Structural fingerprint used to tie run reports to their input graph.
  std::uint64_t fingerprint() const;
};

struct SbmParams {
  std::size_t num_nodes = 0;
  int num_classes = 0;
  double p_in = 0.0;
  double p_out = 0.0;
  std::size_t feature_dim = 0;
  double feature_noise = 0.0;
  std::uint64_t seed = 0;
};

/// Stochastic-block-model generator. Labels are contiguous balanced blocks,
/// features are class centroids plus Gaussian noise, and the 60/20/20 split is
/// a seeded permutation. Pure function of its parameters.
Graph generate_sbm(const SbmParams& params);

/// Loads the documented text formats: "u v" edge lines ('#' comments allowed),
/// one whitespace-separated feature row per node, one integer label per line,
/// and an optional {train|val|test} line per node. Edges are symmetrized and
/// deduplicated; without a masks file the split is a fixed hash of node id.
Graph load_edge_list(const std::string& edges_path, const std::string& features_path,
                     const std::string& labels_path,
                     const std::optional<std::string>& masks_path = std::nullopt);

/// Inverse of load_edge_list for dataset export: each undirected edge written
/// once as "u v" with u < v.
void write_graph_files(const Graph& graph, const std::string& edges_path,
                       const std::string& features_path, const std::string& labels_path,
                       const std::string& masks_path);

/// Builds a symmetric, deduplicated, self-loop-free CSR from an edge list.
std::pair<std::vector<std::size_t>, std::vector<NodeId>> build_symmetric_csr(
    std::size_t num_nodes, std::vector<std::pair<NodeId, NodeId>> edges);

}  // namespace supersage
