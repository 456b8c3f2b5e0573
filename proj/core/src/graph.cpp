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

#include "supersage/graph.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <sstream>

#include "supersage/errors.hpp"
#include "supersage/rng.hpp"

namespace supersage {

namespace {

constexpr double kTrainFraction = 0.6;
constexpr double kValFraction = 0.2;

std::vector<Split> seeded_split(std::size_t num_nodes, std::uint64_t seed) {
  std::vector<NodeId> order(num_nodes);
  std::iota(order.begin(), order.end(), NodeId{0});
  Rng rng(Rng::derive(seed, /*stream=*/3));
  rng.shuffle(order);
  const auto n_train = static_cast<std::size_t>(kTrainFraction * static_cast<double>(num_nodes));
  const auto n_val = static_cast<std::size_t>(kValFraction * static_cast<double>(num_nodes));
  std::vector<Split> split(num_nodes, Split::Test);
  for (std::size_t i = 0; i < num_nodes; ++i) {
    if (i < n_train) {
      split[order[i]] = Split::Train;
    } else if (i < n_train + n_val) {
      split[order[i]] = Split::Val;
    }
  }
  return split;
}

// Default split for file-loaded graphs without a masks file: a fixed hash of
// the node id, 60/20/20.
Split hashed_split(NodeId v) {
  const std::uint64_t h = splitmix64(static_cast<std::uint64_t>(v) + 0x51ab1e);
  const std::uint64_t bucket = h % 10;
  if (bucket < 6) return Split::Train;
  if (bucket < 8) return Split::Val;
  return Split::Test;
}

bool is_blank_or_comment(const std::string& line) {
  for (char c : line) {
    if (c == '#') return true;
    if (!std::isspace(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open file: " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

}  // namespace

std::vector<std::uint8_t> Graph::mask(Split s) const {
  std::vector<std::uint8_t> out(split.size(), 0);
  for (std::size_t i = 0; i < split.size(); ++i) out[i] = split[i] == s ? 1 : 0;
  return out;
}

std::size_t Graph::mask_count(Split s) const {
  std::size_t n = 0;
  for (Split v : split) n += v == s ? 1 : 0;
  return n;
}

void Graph::validate() const {
  const std::size_t n = num_nodes();
  if (csr_offsets.empty() || csr_offsets.front() != 0 || csr_offsets.back() != csr_targets.size()) {
    throw ShapeError("csr_offsets endpoints invalid");
  }
  for (std::size_t i = 0; i + 1 < csr_offsets.size(); ++i) {
    if (csr_offsets[i] > csr_offsets[i + 1]) throw ShapeError("csr_offsets not nondecreasing");
  }
  for (NodeId t : csr_targets) {
    if (t >= n) throw RangeError("csr target out of range");
  }
  if (features.rows() != n) throw ShapeError("feature row count does not match num_nodes");
  if (labels.size() != n) throw ShapeError("label count does not match num_nodes");
  if (split.size() != n) throw ShapeError("split count does not match num_nodes");
  for (int label : labels) {
    if (label < 0 || label >= num_classes) throw RangeError("label out of class range");
  }
  // Symmetry and no self loops.
  for (NodeId v = 0; v < n; ++v) {
    for (NodeId u : neighbors(v)) {
      if (u == v) throw ShapeError("self loop at node " + std::to_string(v));
      const auto back = neighbors(u);
      if (!std::binary_search(back.begin(), back.end(), v)) {
        throw ShapeError("asymmetric edge " + std::to_string(v) + "-" + std::to_string(u));
      }
    }
  }
}

std::uint64_t Graph::fingerprint() const {
  std::uint64_t h = 0xcbf29ce484222325ull;
  auto mix = [&h](std::uint64_t v) {
    h ^= v;
    h *= 0x100000001b3ull;
  };
  mix(num_nodes());
  mix(num_edges());
  mix(features.cols());
  mix(static_cast<std::uint64_t>(num_classes));
  for (NodeId t : csr_targets) mix(t);
  for (int label : labels) mix(static_cast<std::uint64_t>(label) + 1);
  for (std::size_t i = 0; i < features.size(); ++i) {
    std::uint64_t bits;
    static_assert(sizeof(bits) == sizeof(double));
    std::memcpy(&bits, features.data() + i, sizeof(bits));
    mix(bits);
  }
  for (Split s : split) mix(static_cast<std::uint64_t>(s) + 7);
  return h;
}

std::pair<std::vector<std::size_t>, std::vector<NodeId>> build_symmetric_csr(
    std::size_t num_nodes, std::vector<std::pair<NodeId, NodeId>> edges) {
  std::vector<std::pair<NodeId, NodeId>> directed;
  directed.reserve(edges.size() * 2);
  for (auto [u, v] : edges) {
    if (u == v) continue;  // self loops dropped
    directed.emplace_back(u, v);
    directed.emplace_back(v, u);
  }
  std::sort(directed.begin(), directed.end());
  directed.erase(std::unique(directed.begin(), directed.end()), directed.end());

  std::vector<std::size_t> offsets(num_nodes + 1, 0);
  for (auto [u, v] : directed) ++offsets[u + 1];
  for (std::size_t i = 0; i < num_nodes; ++i) offsets[i + 1] += offsets[i];
  std::vector<NodeId> targets(directed.size());
  for (std::size_t i = 0; i < directed.size(); ++i) targets[i] = directed[i].second;
  return {std::move(offsets), std::move(targets)};
}

Graph generate_sbm(const SbmParams& params) {
  if (!(params.p_out >= 0.0 && params.p_out < params.p_in && params.p_in <= 1.0)) {
    throw ParameterError("SBM probabilities must satisfy 0 <= p_out < p_in <= 1");
  }
  if (params.num_classes < 1 || params.num_nodes < static_cast<std::size_t>(params.num_classes)) {
    throw ParameterError("SBM requires num_nodes >= num_classes >= 1");
  }
  if (params.feature_dim == 0) throw ParameterError("SBM feature_dim must be >= 1");
  if (params.feature_noise < 0.0) throw ParameterError("SBM feature_noise must be >= 0");

  const std::size_t n = params.num_nodes;
  const auto c = static_cast<std::size_t>(params.num_classes);

  // Contiguous balanced blocks: node v belongs to block v*C/n.
  std::vector<int> labels(n);
  for (std::size_t v = 0; v < n; ++v) {
    labels[v] = static_cast<int>(v * c / n);
  }

  Rng edge_rng(Rng::derive(params.seed, 0));
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double p = labels[i] == labels[j] ? params.p_in : params.p_out;
      if (edge_rng.uniform() < p) {
        edges.emplace_back(static_cast<NodeId>(i), static_cast<NodeId>(j));
      }
    }
  }

  Rng centroid_rng(Rng::derive(params.seed, 1));
  Matrix centroids(c, params.feature_dim);
  for (std::size_t i = 0; i < centroids.size(); ++i) centroids.data()[i] = centroid_rng.normal();

  Rng noise_rng(Rng::derive(params.seed, 2));
  Matrix features(n, params.feature_dim);
  for (std::size_t v = 0; v < n; ++v) {
    const auto centroid = centroids.row(static_cast<std::size_t>(labels[v]));
    auto out = features.row(v);
    for (std::size_t d = 0; d < params.feature_dim; ++d) {
      const double noise = params.feature_noise > 0.0
                               ? params.feature_noise * noise_rng.normal()
                               : 0.0;
      out[d] = centroid[d] + noise;
    }
  }

  Graph g;
  std::tie(g.csr_offsets, g.csr_targets) = build_symmetric_csr(n, std::move(edges));
  g.features = std::move(features);
  g.labels = std::move(labels);
  g.num_classes = params.num_classes;
  g.split = seeded_split(n, params.seed);
  return g;
}

Graph load_edge_list(const std::string& edges_path, const std::string& features_path,
                     const std::string& labels_path,
                     const std::optional<std::string>& masks_path) {
  // Edges.
  std::vector<std::pair<NodeId, NodeId>> edges;
  NodeId max_id = 0;
  bool any_edge = false;
  {
    const auto lines = read_lines(edges_path);
    for (std::size_t i = 0; i < lines.size(); ++i) {
      if (is_blank_or_comment(lines[i])) continue;
      std::istringstream ss(lines[i]);
      long long u = -1, v = -1;
      std::string rest;
      if (!(ss >> u >> v)) throw ParseError("malformed edge line '" + lines[i] + "'", i + 1);
      if (ss >> rest) throw ParseError("trailing tokens on edge line", i + 1);
      if (u < 0 || v < 0 || u > UINT32_MAX || v > UINT32_MAX) {
        throw RangeError("node id out of range on line " + std::to_string(i + 1));
      }
      edges.emplace_back(static_cast<NodeId>(u), static_cast<NodeId>(v));
      max_id = std::max({max_id, static_cast<NodeId>(u), static_cast<NodeId>(v)});
      any_edge = true;
    }
  }

  // Features: row count defines num_nodes (may exceed max edge id + 1 when
  // trailing nodes are isolated).
  std::vector<double> feature_data;
  std::size_t feature_rows = 0;
  std::size_t feature_dim = 0;
  {
    const auto lines = read_lines(features_path);
    for (std::size_t i = 0; i < lines.size(); ++i) {
      if (is_blank_or_comment(lines[i])) continue;
      std::istringstream ss(lines[i]);
      std::vector<double> row;
      double x;
      while (ss >> x) row.push_back(x);
      if (!ss.eof()) throw ParseError("malformed feature value", i + 1);
      if (row.empty()) throw ParseError("empty feature row", i + 1);
      if (feature_dim == 0) {
        feature_dim = row.size();
      } else if (row.size() != feature_dim) {
        throw ShapeError("feature row " + std::to_string(i + 1) + " has " +
                         std::to_string(row.size()) + " values, expected " +
                         std::to_string(feature_dim));
      }
      feature_data.insert(feature_data.end(), row.begin(), row.end());
      ++feature_rows;
    }
  }
  const std::size_t edge_nodes = any_edge ? static_cast<std::size_t>(max_id) + 1 : 0;
  if (feature_rows < edge_nodes) {
    throw ShapeError("feature file has " + std::to_string(feature_rows) +
                     " rows but the edge list references " + std::to_string(edge_nodes) +
                     " nodes");
  }
  const std::size_t num_nodes = feature_rows;

  // Labels.
  std::vector<int> labels;
  {
    const auto lines = read_lines(labels_path);
    for (std::size_t i = 0; i < lines.size(); ++i) {
      if (is_blank_or_comment(lines[i])) continue;
      std::istringstream ss(lines[i]);
      long long label;
      std::string rest;
      if (!(ss >> label)) throw ParseError("malformed label line '" + lines[i] + "'", i + 1);
      if (ss >> rest) throw ParseError("trailing tokens on label line", i + 1);
      if (label < 0) throw RangeError("negative label on line " + std::to_string(i + 1));
      labels.push_back(static_cast<int>(label));
    }
  }
  if (labels.size() != num_nodes) {
    throw ShapeError("label file has " + std::to_string(labels.size()) +
                     " rows, expected " + std::to_string(num_nodes));
  }

  // Masks (optional).
  std::vector<Split> split;
  if (masks_path) {
    const auto lines = read_lines(*masks_path);
    for (std::size_t i = 0; i < lines.size(); ++i) {
      if (is_blank_or_comment(lines[i])) continue;
      std::istringstream ss(lines[i]);
      std::string token, rest;
      ss >> token;
      if (ss >> rest) throw ParseError("trailing tokens on mask line", i + 1);
      if (token == "train") {
        split.push_back(Split::Train);
      } else if (token == "val") {
        split.push_back(Split::Val);
      } else if (token == "test") {
        split.push_back(Split::Test);
      } else {
        throw ParseError("unknown mask value '" + token + "'", i + 1);
      }
    }
    if (split.size() != num_nodes) {
      throw ShapeError("mask file has " + std::to_string(split.size()) +
                       " rows, expected " + std::to_string(num_nodes));
    }
  } else {
    split.resize(num_nodes);
    for (std::size_t v = 0; v < num_nodes; ++v) split[v] = hashed_split(static_cast<NodeId>(v));
  }

  Graph g;
  std::tie(g.csr_offsets, g.csr_targets) = build_symmetric_csr(num_nodes, std::move(edges));
  g.features = Matrix::validated(num_nodes, feature_dim, std::move(feature_data));
  g.labels = std::move(labels);
  g.num_classes = g.labels.empty() ? 0 : *std::max_element(g.labels.begin(), g.labels.end()) + 1;
  g.split = std::move(split);
  return g;
}

void write_graph_files(const Graph& graph, const std::string& edges_path,
                       const std::string& features_path, const std::string& labels_path,
                       const std::string& masks_path) {
  {
    std::ofstream out(edges_path);
    if (!out) throw Error("cannot write file: " + edges_path);
    out << "# one undirected edge per line: u v\n";
    for (NodeId v = 0; v < graph.num_nodes(); ++v) {
      for (NodeId u : graph.neighbors(v)) {
        if (v < u) out << v << ' ' << u << '\n';
      }
    }
  }
  {
    std::ofstream out(features_path);
    if (!out) throw Error("cannot write file: " + features_path);
    char buf[64];
    for (std::size_t r = 0; r < graph.features.rows(); ++r) {
      const auto row = graph.features.row(r);
      for (std::size_t c = 0; c < row.size(); ++c) {
        // Shortest form that loads back to the identical double.
        const auto result = std::to_chars(buf, buf + sizeof(buf), row[c]);
        out << (c ? " " : "") << std::string_view(buf, result.ptr);
      }
      out << '\n';
    }
  }
  {
    std::ofstream out(labels_path);
    if (!out) throw Error("cannot write file: " + labels_path);
    for (int label : graph.labels) out << label << '\n';
  }
  {
    std::ofstream out(masks_path);
    if (!out) throw Error("cannot write file: " + masks_path);
    for (Split s : graph.split) {
      out << (s == Split::Train ? "train" : s == Split::Val ? "val" : "test") << '\n';
    }
  }
}

}  // namespace supersage
