#include <cmath>
#include <vector>

#include <doctest.h>

#include "supersage/errors.hpp"
#include "supersage/graph.hpp"
#include "supersage/report.hpp"
#include "supersage/trainer.hpp"

using namespace supersage;

namespace {

TrainSettings base_settings() {
  TrainSettings s;
  s.num_workers = 3;
  s.partition_method = PartitionMethod::Hash;
  s.phi = Phi::None;
  s.feedback = true;
  s.grouping = GroupingStrategy::Chunk;
  s.hidden_dim = 8;
  s.num_layers = 2;
  s.epochs = 5;
  s.learning_rate = 0.1;
  s.seed = 7;
  return s;
}

Graph test_graph(std::uint64_t seed = 7) {
  return generate_sbm({90, 3, 0.25, 0.02, 6, 0.5, seed});
}

double max_loss_diff(const RunReport& a, const RunReport& b) {
  REQUIRE(a.epochs.size() == b.epochs.size());
  double max_diff = 0.0;
  for (std::size_t e = 0; e < a.epochs.size(); ++e) {
    max_diff = std::max(max_diff, std::abs(a.epochs[e].loss - b.epochs[e].loss));
  }
  return max_diff;
}

// Ring of K cliques joined by single bridge edges: a tiny boundary set.
Graph ring_of_cliques(std::size_t cliques, std::size_t size, std::size_t dim) {
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (std::size_t c = 0; c < cliques; ++c) {
    const NodeId base = static_cast<NodeId>(c * size);
    for (NodeId i = 0; i < size; ++i) {
      for (NodeId j = i + 1; j < size; ++j) edges.emplace_back(base + i, base + j);
    }
    const NodeId next_base = static_cast<NodeId>(((c + 1) % cliques) * size);
    edges.emplace_back(base, next_base);
  }
  const std::size_t n = cliques * size;
  Graph g;
  std::tie(g.csr_offsets, g.csr_targets) = build_symmetric_csr(n, edges);
  g.features = Matrix(n, dim);
  for (std::size_t v = 0; v < n; ++v) {
    g.features(v, 0) = static_cast<double>(v / size) + 1.0;
       g.features(v, 1) = 0.5;
  }
  g.labels.resize(n);
  for (std::size_t v = 0; v < n; ++v) g.labels[v] = static_cast<int>(v / size);
  g.num_classes = static_cast<int>(cliques);
  g.split.resize(n);
  for (std::size_t v = 0; v < n; ++v) {
    g.split[v] = v % 10 < 6 ? Split::Train : (v % 10 < 8 ? Split::Val : Split::Test);
  }
  return g;
}

}  // namespace

TEST_CASE("K=1 run is bit-identical to the monolithic trainer and moves no bytes") {
  const Graph g = test_graph();
  TrainSettings s = base_settings();
  s.num_workers = 1;
  const RunReport distributed = run_training(g, s);
  const RunReport monolithic = run_monolithic(g, s);
  CHECK(max_loss_diff(distributed, monolithic) == 0.0);
  for (std::size_t e = 0; e < distributed.epochs.size(); ++e) {
    CHECK(distributed.epochs[e].payload_bytes == 0);
    CHECK(distributed.epochs[e].metadata_bytes == 0);
    CHECK(distributed.epochs[e].grad_bytes == 0);
    CHECK(distributed.epochs[e].train_acc == monolithic.epochs[e].train_acc);
    CHECK(distributed.epochs[e].test_acc == monolithic.epochs[e].test_acc);
  }
}

TEST_CASE("uncompressed multi-worker run matches the monolithic loss trace") {
  const Graph g = test_graph();
  const TrainSettings s = base_settings();
  const RunReport distributed = run_training(g, s);
  const RunReport monolithic = run_monolithic(g, s);
  CHECK(max_loss_diff(distributed, monolithic) < 1e-10);
  for (const EpochMetrics& e : distributed.epochs) {
    CHECK(e.payload_bytes == e.baseline_bytes);  // phi = none sends everything
    CHECK(e.delta_emp == 0.0);
  }
}

TEST_CASE("singleton groups reduce to the lossless baseline") {
  const Graph g = test_graph();
  TrainSettings none = base_settings();
  TrainSettings singleton = base_settings();
  singleton.phi = Phi::Mean;
  singleton.ratio = 1e-9;  // m = round((1-r)|B|) = |B|: every group is one node
  const RunReport a = run_training(g, none);
  const RunReport b = run_training(g, singleton);
  CHECK(max_loss_diff(a, b) == 0.0);
  for (const EpochMetrics& e : b.epochs) {
    CHECK(e.payload_bytes == e.baseline_bytes);
    CHECK(e.delta_emp == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(e.max_residual_norm == doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("compression halves the payload at r = 0.5") {
  const Graph g = generate_sbm({200, 4, 0.2, 0.02, 8, 0.5, 11});
  TrainSettings s = base_settings();
  s.num_workers = 4;
  s.phi = Phi::Mean;
  s.ratio = 0.5;
  s.epochs = 3;
  const RunReport report = run_training(g, s);
  for (const EpochMetrics& e : report.epochs) {
    const double ratio =
        static_cast<double>(e.payload_bytes) / static_cast<double>(e.baseline_bytes);
    CHECK(ratio > 0.45);
    CHECK(ratio < 0.55);
  }
}

TEST_CASE("payload is monotone non-increasing in the compression ratio") {
  const Graph g = test_graph();
  std::uint64_t previous = UINT64_MAX;
  for (const double r : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    TrainSettings s = base_settings();
    s.phi = Phi::Mean;
    s.ratio = r;
    s.epochs = 2;
    const RunReport report = run_training(g, s);
    const std::uint64_t payload = report.total_payload_bytes();
    CHECK(payload <= previous);
    previous = payload;
  }
}

TEST_CASE("serial and concurrent modes produce identical traces") {
  const Graph g = test_graph();
  for (const Phi phi : {Phi::None, Phi::Mean, Phi::Attention}) {
    TrainSettings serial = base_settings();
    serial.phi = phi;
    if (phi != Phi::None) serial.ratio = 0.5;
    TrainSettings concurrent = serial;
    concurrent.mode = ExecMode::Concurrent;
    const RunReport a = run_training(g, serial);
    const RunReport b = run_training(g, concurrent);
    CHECK(max_loss_diff(a, b) <= 1e-9);
    CHECK(a.total_payload_bytes() == b.total_payload_bytes());
    CHECK(metrics_to_csv(a) == metrics_to_csv(b));
  }
}

TEST_CASE("runs are a pure function of the settings") {
  const Graph g = test_graph();
  TrainSettings s = base_settings();
  s.phi = Phi::Weighted;
  s.ratio = 0.4;
  const RunReport a = run_training(g, s);
  const RunReport b = run_training(g, s);
  CHECK(metrics_to_csv(a) == metrics_to_csv(b));
}

TEST_CASE("all condensers train end to end with feedback on and off") {
  const Graph g = test_graph();
  for (const Phi phi : {Phi::Mean, Phi::Weighted, Phi::Attention}) {
    for (const bool feedback : {true, false}) {
      TrainSettings s = base_settings();
      s.phi = phi;
      s.ratio = 0.5;
      s.feedback = feedback;
      s.epochs = 3;
      const RunReport report = run_training(g, s);
      CHECK(report.epochs.size() == 3);
      CHECK(std::isfinite(report.final_loss()));
      if (!feedback) {
        for (const EpochMetrics& e : report.epochs) CHECK(e.max_residual_norm == 0.0);
      }
    }
  }
}

TEST_CASE("config contradictions are rejected") {
  TrainSettings s = base_settings();
  s.phi = Phi::None;
  s.ratio = 0.5;
  CHECK_THROWS_AS(s.validate(), ConfigError);

  TrainSettings missing = base_settings();
  missing.phi = Phi::Mean;
  missing.ratio.reset();
  CHECK_THROWS_AS(missing.validate(), ConfigError);

  TrainSettings bad_ratio = base_settings();
  bad_ratio.phi = Phi::Mean;
  bad_ratio.ratio = 1.5;
  try {
    bad_ratio.validate();
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.field() == "ratio");
  }
}

TEST_CASE("compare_runs") {
  const Graph g = test_graph();
  TrainSettings s = base_settings();
  const RunReport a = run_training(g, s);

  const RunDiff self_diff = compare_runs(a, a);
  CHECK(self_diff.d_test_acc == 0.0);
  CHECK(self_diff.d_loss == 0.0);
  CHECK(self_diff.d_payload_bytes == 0);

  TrainSettings compressed = s;
  compressed.phi = Phi::Mean;
  compressed.ratio = 0.5;
  const RunReport b = run_training(g, compressed);
  const RunDiff diff = compare_runs(a, b);
  CHECK(diff.d_payload_bytes < 0);  // compression sends fewer bytes

  TrainSettings other_seed = s;
  other_seed.seed = 8;
  const RunReport c = run_training(test_graph(8), other_seed);
  CHECK_THROWS_AS(compare_runs(a, c), ComparabilityError);
}

TEST_CASE("residual store stays under 5% of feature storage on a low-cut graph") {
  const Graph g = ring_of_cliques(4, 75, 32);
  const Partition p = partition_graph(g, 4, PartitionMethod::BfsGreedy, 3);
  // The partitioner should settle on the four cliques: only the bridges cut.
  CHECK(edge_cut(g, p) == 4);

  TrainSettings s;
  s.num_workers = 4;
  s.partition_method = PartitionMethod::BfsGreedy;
  s.phi = Phi::Mean;
  s.ratio = 0.5;
  s.feedback = true;
  s.hidden_dim = 8;
  s.epochs = 3;
  s.learning_rate = 0.05;
  s.seed = 3;
  const RunReport report = run_training(g, s);
  CHECK(report.accumulator_elements > 0);
  CHECK(static_cast<double>(report.accumulator_elements) <
        0.05 * static_cast<double>(report.feature_elements));
}
