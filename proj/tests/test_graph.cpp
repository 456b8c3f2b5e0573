#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>

#include <doctest.h>

#include "supersage/errors.hpp"
#include "supersage/graph.hpp"
#include "supersage/partition.hpp"
#include "support/oracles.hpp"

using namespace supersage;

namespace {

std::filesystem::path temp_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("supersage_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path);
  out << contents;
}

bool graphs_identical(const Graph& a, const Graph& b) {
  return a.csr_offsets == b.csr_offsets && a.csr_targets == b.csr_targets &&
         a.features == b.features && a.labels == b.labels && a.split == b.split &&
         a.num_classes == b.num_classes;
}

// Brute-force cross-owner undirected edge count, independent of edge_cut().
std::size_t count_cut_edges(const Graph& g, const std::vector<int>& owner) {
  std::size_t cut = 0;
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    for (NodeId u : g.neighbors(v)) {
      if (v < u && owner[v] != owner[u]) ++cut;
    }
  }
  return cut;
}

Graph two_cliques(std::size_t clique_size) {
  std::vector<std::pair<NodeId, NodeId>> edges;
  const auto add_clique = [&edges](NodeId base, std::size_t size) {
    for (NodeId i = 0; i < size; ++i) {
      for (NodeId j = i + 1; j < size; ++j) edges.emplace_back(base + i, base + j);
    }
  };
  add_clique(0, clique_size);
  add_clique(static_cast<NodeId>(clique_size), clique_size);
  Graph g;
  std::tie(g.csr_offsets, g.csr_targets) = build_symmetric_csr(2 * clique_size, edges);
  g.features = Matrix(2 * clique_size, 2);
  for (std::size_t v = 0; v < 2 * clique_size; ++v) {
    g.features(v, 0) = v < clique_size ? 1.0 : -1.0;
  }
  g.labels.assign(2 * clique_size, 0);
  for (std::size_t v = clique_size; v < 2 * clique_size; ++v) g.labels[v] = 1;
  g.num_classes = 2;
  g.split.assign(2 * clique_size, Split::Train);
  return g;
}

}  // namespace

TEST_CASE("degenerate SBM: two disconnected cliques with identical block features") {
  const Graph g = generate_sbm({4, 2, 1.0, 0.0, 2, 0.0, 0});
  g.validate();
  CHECK(g.num_nodes() == 4);
  CHECK(g.num_edges() == 4);  // two undirected edges
  CHECK(g.labels == std::vector<int>{0, 0, 1, 1});
  // p_in = 1 within blocks {0,1} and {2,3}; p_out = 0 across.
  CHECK(std::vector<NodeId>(g.neighbors(0).begin(), g.neighbors(0).end()) ==
        std::vector<NodeId>{1});
  CHECK(std::vector<NodeId>(g.neighbors(2).begin(), g.neighbors(2).end()) ==
        std::vector<NodeId>{3});
  // Zero noise: features within a block identical.
  CHECK(g.features.row(0)[0] == g.features.row(1)[0]);
  CHECK(g.features.row(0)[1] == g.features.row(1)[1]);
  CHECK(g.features.row(2)[0] == g.features.row(3)[0]);
}

TEST_CASE("SBM intra-class edge fraction matches the closed-form expectation") {
  const Graph g = generate_sbm({200, 4, 0.2, 0.01, 16, 0.1, 7});
  g.validate();
  std::size_t intra = 0;
  std::size_t total = 0;
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    for (NodeId u : g.neighbors(v)) {
      if (v < u) {
        ++total;
        intra += g.labels[v] == g.labels[u] ? 1 : 0;
      }
    }
  }
  const double fraction = static_cast<double>(intra) / static_cast<double>(total);
  // Expectation from the SBM formula: p_in*intra_pairs / (p_in*intra_pairs +
  // p_out*inter_pairs); blocks of 50 give 4900 intra and 15000 inter pairs.
  const double expected = (0.2 * 4900.0) / (0.2 * 4900.0 + 0.01 * 15000.0);
  CHECK(expected > 0.85);
  CHECK(fraction > 0.8);
  CHECK(fraction == doctest::Approx(expected).epsilon(0.06));
}

TEST_CASE("SBM is a pure function of its parameters") {
  const SbmParams params{200, 4, 0.2, 0.01, 16, 0.1, 7};
  CHECK(graphs_identical(generate_sbm(params), generate_sbm(params)));
  // A different seed changes the graph.
  SbmParams other = params;
  other.seed = 8;
  CHECK_FALSE(graphs_identical(generate_sbm(params), generate_sbm(other)));
}

TEST_CASE("SBM masks are a 60/20/20 cover") {
  const Graph g = generate_sbm({100, 4, 0.2, 0.01, 4, 0.1, 3});
  CHECK(g.mask_count(Split::Train) == 60);
  CHECK(g.mask_count(Split::Val) == 20);
  CHECK(g.mask_count(Split::Test) == 20);
}

TEST_CASE("SBM rejects invalid parameters") {
  CHECK_THROWS_AS(generate_sbm({10, 2, 0.5, 0.6, 4, 0.0, 0}), ParameterError);
  CHECK_THROWS_AS(generate_sbm({10, 2, 1.5, 0.0, 4, 0.0, 0}), ParameterError);
  CHECK_THROWS_AS(generate_sbm({1, 2, 0.5, 0.1, 4, 0.0, 0}), ParameterError);
}

TEST_CASE("load_edge_list parses the documented formats") {
  const auto dir = temp_dir("load");
  write_file(dir / "edges.txt", "# path graph\n0 1\n1 2\n");
  write_file(dir / "features.txt", "1.0 0.0\n0.5 0.5\n0.0 1.0\n");
  write_file(dir / "labels.txt", "0\n1\n0\n");

  const Graph g = load_edge_list((dir / "edges.txt").string(), (dir / "features.txt").string(),
                                 (dir / "labels.txt").string());
  g.validate();
  CHECK(g.num_nodes() == 3);
  CHECK(g.degree(0) == 1);
  CHECK(g.degree(1) == 2);
  CHECK(g.degree(2) == 1);
  CHECK(g.num_classes == 2);
}

TEST_CASE("load_edge_list deduplicates and symmetrizes") {
  const auto dir = temp_dir("dedup");
  write_file(dir / "edges.txt", "0 1\n1 0\n");
  write_file(dir / "features.txt", "1\n2\n");
  write_file(dir / "labels.txt", "0\n0\n");
  const Graph g = load_edge_list((dir / "edges.txt").string(), (dir / "features.txt").string(),
                                 (dir / "labels.txt").string());
  CHECK(g.num_nodes() == 2);
  CHECK(g.num_edges() == 2);  // one undirected edge, two directed slots
}

TEST_CASE("load_edge_list error paths") {
  const auto dir = temp_dir("errors");
  write_file(dir / "edges.txt", "0 1\n1 2\n");
  write_file(dir / "short_features.txt", "1\n2\n");
  write_file(dir / "labels3.txt", "0\n1\n0\n");
  // Two feature rows for a three-node edge file.
  CHECK_THROWS_AS(load_edge_list((dir / "edges.txt").string(),
                                 (dir / "short_features.txt").string(),
                                 (dir / "labels3.txt").string()),
                  ShapeError);

  write_file(dir / "bad_edges.txt", "0 1\nnot an edge\n");
  write_file(dir / "features3.txt", "1\n2\n3\n");
  try {
    load_edge_list((dir / "bad_edges.txt").string(), (dir / "features3.txt").string(),
                   (dir / "labels3.txt").string());
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }

  write_file(dir / "neg_edges.txt", "0 -1\n");
  CHECK_THROWS_AS(load_edge_list((dir / "neg_edges.txt").string(),
                                 (dir / "features3.txt").string(),
                                 (dir / "labels3.txt").string()),
                  RangeError);

  write_file(dir / "labels2.txt", "0\n1\n");
  CHECK_THROWS_AS(load_edge_list((dir / "edges.txt").string(),
                                 (dir / "features3.txt").string(),
                                 (dir / "labels2.txt").string()),
                  ShapeError);
}

TEST_CASE("graph file round trip") {
  const auto dir = temp_dir("roundtrip");
  const Graph g = generate_sbm({60, 3, 0.3, 0.02, 5, 0.2, 11});
  write_graph_files(g, (dir / "edges.txt").string(), (dir / "features.txt").string(),
                    (dir / "labels.txt").string(), (dir / "masks.txt").string());
  const Graph loaded =
      load_edge_list((dir / "edges.txt").string(), (dir / "features.txt").string(),
                     (dir / "labels.txt").string(), (dir / "masks.txt").string());
  CHECK(graphs_identical(g, loaded));
}

TEST_CASE("hash partition of a path graph") {
  const auto dir = temp_dir("path4");
  write_file(dir / "edges.txt", "0 1\n1 2\n2 3\n");
  write_file(dir / "features.txt", "1\n2\n3\n4\n");
  write_file(dir / "labels.txt", "0\n0\n0\n0\n");
  const Graph g = load_edge_list((dir / "edges.txt").string(), (dir / "features.txt").string(),
                                 (dir / "labels.txt").string());
  const Partition p = partition_graph(g, 2, PartitionMethod::Hash, 0);
  p.validate(g);
  CHECK(p.owner == std::vector<int>{0, 1, 0, 1});
  CHECK(p.boundary_nodes[0] == std::vector<NodeId>{0, 2});
  CHECK(p.boundary_nodes[1] == std::vector<NodeId>{1, 3});
  CHECK(p.halo[0] == std::vector<NodeId>{1, 3});
  CHECK(p.halo[1] == std::vector<NodeId>{0, 2});
}

TEST_CASE("single worker has no boundary") {
  const Graph g = generate_sbm({30, 3, 0.4, 0.05, 4, 0.1, 5});
  const Partition p = partition_graph(g, 1, PartitionMethod::Hash, 0);
  p.validate(g);
  CHECK(p.boundary_nodes[0].empty());
  CHECK(p.halo[0].empty());
}

TEST_CASE("bfs-greedy separates two disconnected cliques") {
  const Graph g = two_cliques(10);
  const Partition p = partition_graph(g, 2, PartitionMethod::BfsGreedy, 0);
  p.validate(g);
  CHECK(count_cut_edges(g, p.owner) == 0);
  CHECK(edge_cut(g, p) == 0);
  CHECK(p.local_nodes[0].size() == 10);
  CHECK(p.local_nodes[1].size() == 10);
}

TEST_CASE("partition invariants hold on random graphs") {
  for (const std::uint64_t seed : {1ull, 2ull, 3ull}) {
    const Graph g = generate_sbm({80, 4, 0.25, 0.03, 6, 0.3, seed});
    for (const auto method : {PartitionMethod::Hash, PartitionMethod::BfsGreedy}) {
      for (const int k : {1, 2, 3, 5}) {
        const Partition p = partition_graph(g, k, method, seed);
        p.validate(g);

        // Disjoint cover.
        std::size_t covered = 0;
        for (const auto& nodes : p.local_nodes) covered += nodes.size();
        CHECK(covered == g.num_nodes());

        // Every cross-owner edge has both endpoints flagged boundary.
        for (NodeId v = 0; v < g.num_nodes(); ++v) {
          for (NodeId u : g.neighbors(v)) {
            if (p.owner[v] != p.owner[u]) {
              const auto& bv = p.boundary_nodes[static_cast<std::size_t>(p.owner[v])];
              const auto& bu = p.boundary_nodes[static_cast<std::size_t>(p.owner[u])];
              CHECK(std::binary_search(bv.begin(), bv.end(), v));
              CHECK(std::binary_search(bu.begin(), bu.end(), u));
            }
          }
        }

        // Reassembling local feature slices reproduces the global features.
        Matrix reassembled(g.num_nodes(), g.feature_dim());
        for (int w = 0; w < k; ++w) {
          const WorkerView view = WorkerView::build(g, p, w);
          for (std::size_t i = 0; i < view.num_local(); ++i) {
            const auto src = view.local_features.row(i);
            std::copy(src.begin(), src.end(), reassembled.row(view.local_nodes[i]).begin());
          }
        }
        CHECK(reassembled == g.features);

        // Determinism.
        const Partition again = partition_graph(g, k, method, seed);
        CHECK(again.owner == p.owner);
      }
    }
  }
}

TEST_CASE("load_edge_list keeps trailing isolated nodes") {
  const auto dir = temp_dir("isolated");
  write_file(dir / "edges.txt", "0 1\n");
  write_file(dir / "features.txt", "1 0\n0 1\n0.5 0.5\n0.2 0.8\n");
  write_file(dir / "labels.txt", "0\n1\n0\n1\n");
  const Graph g = load_edge_list((dir / "edges.txt").string(), (dir / "features.txt").string(),
                                 (dir / "labels.txt").string());
  g.validate();
  CHECK(g.num_nodes() == 4);
  CHECK(g.degree(2) == 0);
  CHECK(g.degree(3) == 0);
}

TEST_CASE("mask file row-count mismatch is a shape error") {
  const auto dir = temp_dir("maskshape");
  write_file(dir / "edges.txt", "0 1\n1 2\n");
  write_file(dir / "features.txt", "1\n2\n3\n");
  write_file(dir / "labels.txt", "0\n1\n0\n");
  write_file(dir / "masks.txt", "train\nval\n");
  CHECK_THROWS_AS(load_edge_list((dir / "edges.txt").string(),
                                 (dir / "features.txt").string(),
                                 (dir / "labels.txt").string(),
                                 (dir / "masks.txt").string()),
                  ShapeError);
}

TEST_CASE("bfs-greedy handles isolated nodes via frontier respawn") {
  const auto dir = temp_dir("respawn");
  // One clique plus four isolated nodes: every frontier empties before the
  // isolated nodes are reached.
  write_file(dir / "edges.txt", "0 1\n0 2\n1 2\n");
  write_file(dir / "features.txt", "1\n1\n1\n2\n2\n2\n2\n");
  write_file(dir / "labels.txt", "0\n0\n0\n1\n1\n1\n1\n");
  const Graph g = load_edge_list((dir / "edges.txt").string(), (dir / "features.txt").string(),
                                 (dir / "labels.txt").string());
  for (const int k : {2, 3}) {
    const Partition p = partition_graph(g, k, PartitionMethod::BfsGreedy, 1);
    p.validate(g);
    std::size_t covered = 0;
    for (const auto& nodes : p.local_nodes) covered += nodes.size();
    CHECK(covered == g.num_nodes());
  }
}

TEST_CASE("partitioning works beyond 64 workers") {
  const Graph g = generate_sbm({130, 2, 0.2, 0.05, 3, 0.1, 4});
  const Partition p = partition_graph(g, 70, PartitionMethod::Hash, 0);
  p.validate(g);
  // Spot-check the per-destination boundary tables against the halo identity:
  // boundary_to[k][j] must equal the j-owned halo view from worker j's side.
  for (int k = 0; k < 70; k += 17) {
    const WorkerView view = WorkerView::build(g, p, k);
    for (int j = 0; j < 70; j += 13) {
      if (j == k) continue;
      CHECK(view.halo_from[static_cast<std::size_t>(j)] ==
            p.boundary_to[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)]);
    }
  }
}

TEST_CASE("partition parameter errors") {
  const Graph g = generate_sbm({10, 2, 0.5, 0.1, 2, 0.0, 0});
  CHECK_THROWS_AS(partition_graph(g, 0, PartitionMethod::Hash, 0), ParameterError);
  CHECK_THROWS_AS(partition_graph(g, 11, PartitionMethod::Hash, 0), ParameterError);
}

TEST_CASE("worker view halo bookkeeping") {
  const Graph g = generate_sbm({50, 2, 0.3, 0.05, 4, 0.1, 9});
  const Partition p = partition_graph(g, 3, PartitionMethod::Hash, 0);
  for (int w = 0; w < 3; ++w) {
    const WorkerView view = WorkerView::build(g, p, w);
    // halo_from[j] must equal boundary_to[j][w] of worker j.
    for (int j = 0; j < 3; ++j) {
      if (j == w) {
        CHECK(view.halo_from[static_cast<std::size_t>(j)].empty());
        continue;
      }
      CHECK(view.halo_from[static_cast<std::size_t>(j)] ==
            p.boundary_to[static_cast<std::size_t>(j)][static_cast<std::size_t>(w)]);
    }
    // Local CSR row lengths equal global degrees.
    for (std::size_t i = 0; i < view.num_local(); ++i) {
      CHECK(view.offsets[i + 1] - view.offsets[i] == g.degree(view.local_nodes[i]));
    }
  }
}
