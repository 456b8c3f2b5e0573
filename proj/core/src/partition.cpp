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

#include "supersage/partition.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <numeric>
#include <string>

#include "supersage/errors.hpp"
#include "supersage/rng.hpp"

namespace supersage {

namespace {

constexpr std::size_t kUnreached = std::numeric_limits<std::size_t>::max();

// Multi-source BFS distance from a seed set; unreachable stays kUnreached.
std::vector<std::size_t> bfs_distances(const Graph& g, const std::vector<NodeId>& sources) {
  std::vector<std::size_t> dist(g.num_nodes(), kUnreached);
  std::deque<NodeId> queue;
  for (NodeId s : sources) {
    dist[s] = 0;
    queue.push_back(s);
  }
  while (!queue.empty()) {
    const NodeId v = queue.front();
    queue.pop_front();
    for (NodeId u : g.neighbors(v)) {
      if (dist[u] == kUnreached) {
        dist[u] = dist[v] + 1;
        queue.push_back(u);
      }
    }
  }
  return dist;
}

std::vector<int> assign_hash(std::size_t n, int k) {
  std::vector<int> owner(n);
  for (std::size_t v = 0; v < n; ++v) owner[v] = static_cast<int>(v % static_cast<std::size_t>(k));
  return owner;
}

std::vector<int> assign_bfs_greedy(const Graph& g, int k, std::uint64_t seed) {
  const std::size_t n = g.num_nodes();
  Rng rng(Rng::derive(seed, 11));

  // Farthest-point seed spreading: disconnected components are infinitely far
  // away, so each new seed lands in an uncovered component when one exists.
  std::vector<NodeId> seeds;
  seeds.push_back(static_cast<NodeId>(rng.below(n)));
  while (seeds.size() < static_cast<std::size_t>(k)) {
    const auto dist = bfs_distances(g, seeds);
    NodeId best = 0;
    std::size_t best_dist = 0;
    bool found = false;
    for (NodeId v = 0; v < n; ++v) {
      if (std::find(seeds.begin(), seeds.end(), v) != seeds.end()) continue;
      if (!found || dist[v] > best_dist) {
        best = v;
        best_dist = dist[v];
        found = true;
      }
    }
    seeds.push_back(best);
  }

  std::vector<int> owner(n, -1);
  std::vector<std::deque<NodeId>> frontier(static_cast<std::size_t>(k));
  std::vector<std::size_t> size(static_cast<std::size_t>(k), 0);
  std::size_t assigned = 0;

  auto assign = [&](NodeId v, int region) {
    owner[v] = region;
    ++size[static_cast<std::size_t>(region)];
    ++assigned;
    for (NodeId u : g.neighbors(v)) {
      if (owner[u] < 0) frontier[static_cast<std::size_t>(region)].push_back(u);
    }
  };

  for (int r = 0; r < k; ++r) assign(seeds[static_cast<std::size_t>(r)], r);

  while (assigned < n) {
    // Smallest region with a nonempty frontier grows next (ties by index).
    int region = -1;
    for (int r = 0; r < k; ++r) {
      if (frontier[static_cast<std::size_t>(r)].empty()) continue;
      if (region < 0 || size[static_cast<std::size_t>(r)] < size[static_cast<std::size_t>(region)]) {
        region = r;
      }
    }
    if (region < 0) {
      // All frontiers exhausted: respawn the smallest region at the smallest
      // unassigned node id.
      region = static_cast<int>(std::min_element(size.begin(), size.end()) - size.begin());
      for (NodeId v = 0; v < n; ++v) {
        if (owner[v] < 0) {
          assign(v, region);
          break;
        }
      }
      continue;
    }
    auto& q = frontier[static_cast<std::size_t>(region)];
    while (!q.empty() && owner[q.front()] >= 0) q.pop_front();
    if (q.empty()) continue;
    const NodeId v = q.front();
    q.pop_front();
    assign(v, region);
  }
  return owner;
}

}  // namespace

void Partition::validate(const Graph& graph) const {
  const std::size_t n = graph.num_nodes();
  if (owner.size() != n) throw ShapeError("owner size mismatch");
  std::size_t covered = 0;
  for (int k = 0; k < num_workers; ++k) {
    covered += local_nodes[static_cast<std::size_t>(k)].size();
    for (NodeId v : local_nodes[static_cast<std::size_t>(k)]) {
      if (owner[v] != k) throw ShapeError("local_nodes disagrees with owner");
    }
  }
  if (covered != n) throw ShapeError("local_nodes do not cover the graph");
  for (int k = 0; k < num_workers; ++k) {
    const auto& boundary = boundary_nodes[static_cast<std::size_t>(k)];
    for (NodeId v : local_nodes[static_cast<std::size_t>(k)]) {
      bool has_remote = false;
      for (NodeId u : graph.neighbors(v)) has_remote |= owner[u] != k;
      const bool listed = std::binary_search(boundary.begin(), boundary.end(), v);
      if (has_remote != listed) throw ShapeError("boundary set incorrect");
    }
    // Halo is exactly the deduplicated remote neighborhood.
    std::vector<NodeId> expected;
    for (NodeId v : local_nodes[static_cast<std::size_t>(k)]) {
      for (NodeId u : graph.neighbors(v)) {
        if (owner[u] != k) expected.push_back(u);
      }
    }
    std::sort(expected.begin(), expected.end());
    expected.erase(std::unique(expected.begin(), expected.end()), expected.end());
    if (expected != halo[static_cast<std::size_t>(k)]) throw ShapeError("halo set incorrect");
  }
}

Partition partition_graph(const Graph& graph, int num_workers, PartitionMethod method,
                          std::uint64_t seed) {
  const std::size_t n = graph.num_nodes();
  if (num_workers < 1) throw ParameterError("num_workers must be >= 1");
  if (static_cast<std::size_t>(num_workers) > n) {
    throw ParameterError("num_workers exceeds node count");
  }

  Partition p;
  p.num_workers = num_workers;
  p.owner = method == PartitionMethod::Hash ? assign_hash(n, num_workers)
                                            : assign_bfs_greedy(graph, num_workers, seed);

  const auto k = static_cast<std::size_t>(num_workers);
  p.local_nodes.assign(k, {});
  p.boundary_nodes.assign(k, {});
  p.halo.assign(k, {});
  p.boundary_to.assign(k, std::vector<std::vector<NodeId>>(k));

  for (NodeId v = 0; v < n; ++v) {
    const auto own = static_cast<std::size_t>(p.owner[v]);
    p.local_nodes[own].push_back(v);
    bool is_boundary = false;
    std::uint64_t dest_bits = 0;
    for (NodeId u : graph.neighbors(v)) {
      const auto other = static_cast<std::size_t>(p.owner[u]);
      if (other != own) {
        is_boundary = true;
        if (k <= 64) {
          dest_bits |= 1ull << other;
        } else if (p.boundary_to[own][other].empty() ||
                   p.boundary_to[own][other].back() != v) {
          p.boundary_to[own][other].push_back(v);
        }
        p.halo[other].push_back(v);
      }
    }
    if (is_boundary) {
      p.boundary_nodes[own].push_back(v);
      if (k <= 64) {
        for (std::size_t j = 0; j < k; ++j) {
          if (dest_bits & (1ull << j)) p.boundary_to[own][j].push_back(v);
        }
      }
    }
  }
  for (auto& h : p.halo) {
    std::sort(h.begin(), h.end());
    h.erase(std::unique(h.begin(), h.end()), h.end());
  }
  return p;
}

std::size_t edge_cut(const Graph& graph, const Partition& partition) {
  std::size_t cut = 0;
  for (NodeId v = 0; v < graph.num_nodes(); ++v) {
    for (NodeId u : graph.neighbors(v)) {
      if (v < u && partition.owner[v] != partition.owner[u]) ++cut;
    }
  }
  return cut;
}

std::size_t WorkerView::local_row(NodeId global) const {
  const auto it = std::lower_bound(local_nodes.begin(), local_nodes.end(), global);
  if (it == local_nodes.end() || *it != global) return npos;
  return static_cast<std::size_t>(it - local_nodes.begin());
}

std::size_t WorkerView::halo_row(NodeId global) const {
  const auto it = std::lower_bound(halo_nodes.begin(), halo_nodes.end(), global);
  if (it == halo_nodes.end() || *it != global) return npos;
  return static_cast<std::size_t>(it - halo_nodes.begin());
}

WorkerView WorkerView::build(const Graph& graph, const Partition& partition, int worker) {
  WorkerView view;
  view.worker = worker;
  view.local_nodes = partition.local_nodes[static_cast<std::size_t>(worker)];
  view.halo_nodes = partition.halo[static_cast<std::size_t>(worker)];
  view.boundary_to = partition.boundary_to[static_cast<std::size_t>(worker)];

  const auto k = static_cast<std::size_t>(partition.num_workers);
  view.halo_from.assign(k, {});
  for (NodeId u : view.halo_nodes) {
    view.halo_from[static_cast<std::size_t>(partition.owner[u])].push_back(u);
  }

  const std::size_t n_local = view.local_nodes.size();
  view.offsets.assign(n_local + 1, 0);
  view.degrees.resize(n_local);
  view.local_labels.resize(n_local);
  view.local_split.resize(n_local);
  view.local_features = Matrix(n_local, graph.feature_dim());

  for (std::size_t i = 0; i < n_local; ++i) {
    const NodeId v = view.local_nodes[i];
    view.offsets[i + 1] = view.offsets[i] + graph.degree(v);
    view.degrees[i] = static_cast<double>(graph.degree(v));
    view.local_labels[i] = graph.labels[v];
    view.local_split[i] = graph.split[v];
    const auto src = graph.features.row(v);
    std::copy(src.begin(), src.end(), view.local_features.row(i).begin());
  }
  view.targets.resize(view.offsets.back());
  std::size_t pos = 0;
  for (std::size_t i = 0; i < n_local; ++i) {
    const NodeId v = view.local_nodes[i];
    for (NodeId u : graph.neighbors(v)) {
      if (partition.owner[u] == worker) {
        view.targets[pos++] = static_cast<std::uint32_t>(view.local_row(u));
      } else {
        view.targets[pos++] = static_cast<std::uint32_t>(view.halo_row(u)) | kHaloFlag;
      }
    }
  }
  return view;
}

WorkerView WorkerView::full_graph(const Graph& graph) {
  WorkerView view;
  view.worker = 0;
  const std::size_t n = graph.num_nodes();
  view.local_nodes.resize(n);
  std::iota(view.local_nodes.begin(), view.local_nodes.end(), NodeId{0});
  view.offsets = graph.csr_offsets;
  view.targets.assign(graph.csr_targets.begin(), graph.csr_targets.end());
  view.degrees.resize(n);
  for (NodeId v = 0; v < n; ++v) view.degrees[v] = static_cast<double>(graph.degree(v));
  view.local_features = graph.features;
  view.local_labels = graph.labels;
  view.local_split = graph.split;
  view.boundary_to.assign(1, {});
  view.halo_from.assign(1, {});
  return view;
}

}  // namespace supersage
