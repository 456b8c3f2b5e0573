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
#include <vector>

#include "supersage/graph.hpp"

namespace supersage {

enum class PartitionMethod { Hash, BfsGreedy };

/// Node-to-worker assignment with the derived boundary and halo sets.
/// boundary_nodes[k] are the locally owned nodes with at least one remote
/// neighbor; halo[k] are the remote nodes worker k needs (each listed once);
/// boundary_to[k][j] is the subset of boundary_nodes[k] that destination j
/// needs. All node lists are sorted ascending.
struct Partition {
  int num_workers = 0;
  std::vector<int> owner;
  std::vector<std::vector<NodeId>> local_nodes;
  std::vector<std::vector<NodeId>> boundary_nodes;
  std::vector<std::vector<NodeId>> halo;
  std::vector<std::vector<std::vector<NodeId>>> boundary_to;

  /// Checks the partition invariants against its graph; throws on violation.
  void validate(const Graph& graph) const;
};

/// hash: owner[v] = v mod K. bfs-greedy: K seeds spread by farthest-point
/// BFS, regions grown breadth-first with each new node assigned to the
/// currently smallest region. Deterministic given the seed.
Partition partition_graph(const Graph& graph, int num_workers, PartitionMethod method,
                          std::uint64_t seed);

/// Number of undirected edges whose endpoints live on different workers.
std::size_t edge_cut(const Graph& graph, const Partition& partition);

/// Per-worker view of the graph: dense local rows, dense halo rows, and a
/// local CSR whose targets address either space (high bit set for halo rows).
/// Neighbor order matches the global CSR so distributed aggregation sums in
/// exactly the monolithic order.
struct WorkerView {
  static constexpr std::uint32_t kHaloFlag = 1u << 31;
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  int worker = 0;
  std::vector<NodeId> local_nodes;  // sorted global ids
  std::vector<NodeId> halo_nodes;   // sorted global ids
  std::vector<std::size_t> offsets;
  std::vector<std::uint32_t> targets;
  std::vector<double> degrees;  // global degree per local row
  Matrix local_features;
  std::vector<int> local_labels;
  std::vector<Split> local_split;
  std::vector<std::vector<NodeId>> boundary_to;  // per destination, sorted
  std::vector<std::vector<NodeId>> halo_from;    // per source owner, sorted

  std::size_t num_local() const { return local_nodes.size(); }
  std::size_t num_halo() const { return halo_nodes.size(); }

  std::size_t local_row(NodeId global) const;  // npos if not local
  std::size_t halo_row(NodeId global) const;   // npos if not in halo

  static WorkerView build(const Graph& graph, const Partition& partition, int worker);
  /// Single view covering the whole graph with an empty halo.
  static WorkerView full_graph(const Graph& graph);
};

}  // namespace supersage
