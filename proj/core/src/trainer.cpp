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

#include "supersage/trainer.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <barrier>
#include <cmath>
#include <functional>
#include <limits>
#include <mutex>
#include <optional>
#include <string>
#include <thread>

#include "supersage/errors.hpp"
#include "supersage/feedback.hpp"
#include "supersage/message.hpp"
#include "supersage/sage.hpp"

namespace supersage {

namespace {

constexpr double kReplicaTolerance = 1e-9;

std::vector<std::uint8_t> split_mask(const std::vector<Split>& split, Split which) {
  std::vector<std::uint8_t> mask(split.size(), 0);
  for (std::size_t i = 0; i < split.size(); ++i) mask[i] = split[i] == which ? 1 : 0;
  return mask;
}

void count_correct(const Matrix& logits, const std::vector<int>& labels,
                   const std::vector<Split>& split, std::size_t correct[3]) {
  for (std::size_t r = 0; r < logits.rows(); ++r) {
    const auto row = logits.row(r);
    std::size_t best = 0;
    for (std::size_t c = 1; c < row.size(); ++c) {
      if (row[c] > row[best]) best = c;
    }
    if (static_cast<int>(best) == labels[r]) {
      ++correct[static_cast<std::size_t>(split[r])];
    }
  }
}

class Trainer {
 public:
  Trainer(const Graph& graph, const TrainSettings& settings)
      : graph_(graph),
        settings_(settings),
        ledger_(settings.num_workers),
        bus_(settings.num_workers, &ledger_) {
    settings_.validate();
    const auto k = static_cast<std::size_t>(settings_.num_workers);

    partition_ = partition_graph(graph_, settings_.num_workers, settings_.partition_method,
                                 settings_.partition_seed.value_or(settings_.seed));
    for (std::size_t w = 0; w < k; ++w) {
      views_.push_back(WorkerView::build(graph_, partition_, static_cast<int>(w)));
    }

    global_counts_[0] = graph_.mask_count(Split::Train);
    global_counts_[1] = graph_.mask_count(Split::Val);
    global_counts_[2] = graph_.mask_count(Split::Test);
    if (global_counts_[0] == 0) throw MetricError("graph has no training nodes");

    const Model prototype =
        Model::init(graph_.feature_dim(), settings_.hidden_dim, graph_.num_classes,
                    settings_.num_layers, settings_.seed);
    workers_.resize(k);
    for (std::size_t w = 0; w < k; ++w) {
      WorkerState& ws = workers_[w];
      ws.model = prototype;  // identical replicas
      ws.sgd.emplace(SgdConfig{settings_.learning_rate, settings_.momentum});
      ws.accumulator = ErrorAccumulator(settings_.feedback && settings_.phi != Phi::None);
      ws.h.assign(static_cast<std::size_t>(settings_.num_layers) + 1, Matrix());
      ws.h[0] = views_[w].local_features;
      ws.halo.assign(static_cast<std::size_t>(settings_.num_layers), Matrix());
      ws.caches.resize(static_cast<std::size_t>(settings_.num_layers));
      ws.grads.resize(static_cast<std::size_t>(settings_.num_layers));
      for (int l = 0; l < settings_.num_layers; ++l) {
        ws.attention.emplace_back(layer_input_dim(l), 0.0);
      }
      ws.param_slots.resize(k);
    }
    loss_parts_.assign(k, 0.0);
    correct_parts_.assign(k, {0, 0, 0});
  }

  RunReport run() {
    build_phases();
    if (settings_.mode == ExecMode::SerialDeterministic) {
      run_serial();
    } else {
      run_concurrent();
    }

    RunReport report;
    report.epochs = std::move(metrics_);
    report.graph_fingerprint = graph_.fingerprint();
    report.seed = settings_.seed;
    report.num_nodes = graph_.num_nodes();
    report.feature_elements = graph_.features.size();
    for (const WorkerState& ws : workers_) {
      report.accumulator_elements += ws.accumulator.stored_elements();
    }
    return report;
  }

 private:
  struct WorkerState {
    Model model;
    std::optional<SgdState> sgd;
    ErrorAccumulator accumulator{false};
    std::vector<std::vector<double>> attention;  // per layer
    std::vector<Matrix> h;      // h[0] = inputs, h[l+1] = layer l output
    std::vector<Matrix> halo;   // received halo features per layer
    std::vector<SageCache> caches;
    std::vector<SageGrads> grads;
    Matrix upstream;            // gradient wrt h[l] during backward
    DeltaLog delta;
    std::vector<std::optional<ParamSyncBody>> param_slots;
  };

  std::size_t layer_input_dim(int layer) const {
    return layer == 0 ? graph_.feature_dim() : settings_.hidden_dim;
  }

  // ---- phases -------------------------------------------------------------

  void phase_prepare(int k) {
    if (k != 0) return;
    if (settings_.phi != Phi::None) {
      // Groups are refreshed from the (static) layer-0 features each epoch.
      plan_ = build_grouping(partition_, graph_.features, *settings_.ratio,
                             settings_.grouping, settings_.seed);
    }
  }

  void phase_send(int k, int layer) {
    WorkerState& ws = workers_[static_cast<std::size_t>(k)];
    const WorkerView& view = views_[static_cast<std::size_t>(k)];
    const Matrix& h = ws.h[static_cast<std::size_t>(layer)];
    const std::size_t dim = h.cols();

    if (settings_.phi == Phi::None) {
      for (int j = 0; j < settings_.num_workers; ++j) {
        const auto& ids = view.boundary_to[static_cast<std::size_t>(j)];
        if (ids.empty()) continue;
        ledger_.add_baseline(k, kBytesPerElement * ids.size() * dim);
        RawHaloBody body;
        body.layer = layer;
        body.ids = ids;
        body.rows = Matrix(ids.size(), dim);
        for (std::size_t i = 0; i < ids.size(); ++i) {
          const auto src = h.row(view.local_row(ids[i]));
          std::copy(src.begin(), src.end(), body.rows.row(i).begin());
        }
        bus_.post(make_raw_halo_message(k, j, std::move(body)));
      }
      return;
    }

    // Union of everything this worker sends at this layer.
    std::vector<NodeId> sent;
    for (int j = 0; j < settings_.num_workers; ++j) {
      const auto& ids = view.boundary_to[static_cast<std::size_t>(j)];
      sent.insert(sent.end(), ids.begin(), ids.end());
    }
    std::sort(sent.begin(), sent.end());
    sent.erase(std::unique(sent.begin(), sent.end()), sent.end());
    if (sent.empty()) return;

    auto sent_index = [&sent](NodeId v) {
      return static_cast<std::size_t>(
          std::lower_bound(sent.begin(), sent.end(), v) - sent.begin());
    };

    // Error-compensated features (Eq. 7 style): compensate once per node even
    // when it is sent to several destinations.
    std::vector<std::vector<double>> compensated(sent.size());
    for (std::size_t i = 0; i < sent.size(); ++i) {
      compensated[i] =
          ws.accumulator.compensate(sent[i], layer, h.row(view.local_row(sent[i])));
    }

    std::vector<std::vector<double>> recon_sum(sent.size(), std::vector<double>(dim, 0.0));
    std::vector<int> recon_count(sent.size(), 0);

    for (int j = 0; j < settings_.num_workers; ++j) {
      const auto& groups = plan_.groups[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)];
      if (groups.empty()) continue;
      const auto& ids = view.boundary_to[static_cast<std::size_t>(j)];
      ledger_.add_baseline(k, kBytesPerElement * ids.size() * dim);

      SuperNodeBatch batch;
      batch.layer = layer;
      batch.source = k;
      batch.destination = j;
      for (std::size_t g = 0; g < groups.size(); ++g) {
        const auto& members = groups[g];
        Matrix rows(members.size(), dim);
        std::vector<double> degrees(members.size());
        for (std::size_t i = 0; i < members.size(); ++i) {
          const auto& comp = compensated[sent_index(members[i])];
          std::copy(comp.begin(), comp.end(), rows.row(i).begin());
          degrees[i] = view.degrees[view.local_row(members[i])];
        }

        std::vector<double> super;
        switch (settings_.phi) {
          case Phi::Mean:
            super = condense_mean(rows);
            break;
          case Phi::Weighted:
            super = condense_weighted(rows, degrees);
            break;
          case Phi::Attention: {
            auto& attn = ws.attention[static_cast<std::size_t>(layer)];
            AttentionResult res = condense_attention(rows, attn);
            update_attention_param(attn, rows, res.super, res.weights, settings_.aux_lr);
            super = std::move(res.super);
            break;
          }
          case Phi::None:
            break;  // unreachable
        }

        for (std::size_t i = 0; i < members.size(); ++i) {
          const std::size_t idx = sent_index(members[i]);
          for (std::size_t c = 0; c < dim; ++c) recon_sum[idx][c] += super[c];
          ++recon_count[idx];
          // Assumption-2 diagnostic on the raw (uncompensated) feature.
          const auto raw = h.row(view.local_row(members[i]));
          std::vector<double> err(dim);
          for (std::size_t c = 0; c < dim; ++c) err[c] = raw[c] - super[c];
          ws.delta.observe_vectors(raw, err);
        }

        SuperNodeGroup out;
        out.id = static_cast<std::uint32_t>(g);
        out.members = members;
        out.super = std::move(super);
        batch.groups.push_back(std::move(out));
      }
      bus_.post(make_super_nodes_message(std::move(batch)));
    }

    // Residual update against the average reconstruction a node received
    // across its destinations (one residual per node and layer).
    for (std::size_t i = 0; i < sent.size(); ++i) {
      std::vector<double> recon(dim);
      const double inv = 1.0 / static_cast<double>(recon_count[i]);
      for (std::size_t c = 0; c < dim; ++c) recon[c] = recon_sum[i][c] * inv;
      ws.accumulator.record(sent[i], layer, compensated[i], recon);
    }
  }

  void phase_recv(int k, int layer) {
    WorkerState& ws = workers_[static_cast<std::size_t>(k)];
    const WorkerView& view = views_[static_cast<std::size_t>(k)];
    const std::size_t dim = layer_input_dim(layer);

    Matrix& halo = ws.halo[static_cast<std::size_t>(layer)];
    halo = Matrix(view.num_halo(), dim);
    std::vector<std::uint8_t> filled(view.num_halo(), 0);
    auto row_of = [&view](NodeId v) { return view.halo_row(v); };

    for (Message& message : bus_.drain(k)) {
      if (message.layer != layer ||
          (message.kind != MessageKind::SuperNodes && message.kind != MessageKind::RawHalo)) {
        throw ContractError("unexpected message during halo exchange");
      }
      if (message.kind == MessageKind::RawHalo) {
        const auto& body = std::get<RawHaloBody>(message.body);
        for (std::size_t i = 0; i < body.ids.size(); ++i) {
          const std::size_t row = view.halo_row(body.ids[i]);
          if (row == WorkerView::npos) {
            throw ContractError("raw halo row for unknown node " + std::to_string(body.ids[i]));
          }
          const auto src = body.rows.row(i);
          std::copy(src.begin(), src.end(), halo.row(row).begin());
          ++filled[row];
        }
      } else {
        const auto& batch = std::get<SuperNodeBatch>(message.body);
        reconstruct(batch, row_of, halo);
        for (const SuperNodeGroup& group : batch.groups) {
          for (NodeId member : group.members) ++filled[view.halo_row(member)];
        }
      }
    }
    for (std::size_t row = 0; row < filled.size(); ++row) {
      if (filled[row] != 1) {
        throw AggregationError("halo row for node " + std::to_string(view.halo_nodes[row]) +
                               (filled[row] == 0 ? " missing" : " filled twice"));
      }
    }

    const bool last = layer == settings_.num_layers - 1;
    SageForwardResult fwd = sage_forward(ws.model.layers[static_cast<std::size_t>(layer)],
                                         ws.h[static_cast<std::size_t>(layer)], halo, view,
                                         /*apply_activation=*/!last);
    ws.h[static_cast<std::size_t>(layer) + 1] = std::move(fwd.out);
    ws.caches[static_cast<std::size_t>(layer)] = std::move(fwd.cache);
  }

  void phase_loss(int k) {
    WorkerState& ws = workers_[static_cast<std::size_t>(k)];
    const WorkerView& view = views_[static_cast<std::size_t>(k)];
    const Matrix& logits = ws.h[static_cast<std::size_t>(settings_.num_layers)];

    const auto train_mask = split_mask(view.local_split, Split::Train);
    CrossEntropyPartial part = cross_entropy_sum(logits, view.local_labels, train_mask);
    loss_parts_[static_cast<std::size_t>(k)] = part.loss_sum;
    part.grad.scale(1.0 / static_cast<double>(global_counts_[0]));
    ws.upstream = std::move(part.grad);

    auto& correct = correct_parts_[static_cast<std::size_t>(k)];
    correct = {0, 0, 0};
    count_correct(logits, view.local_labels, view.local_split, correct.data());
  }

  void phase_backward(int k, int layer) {
    WorkerState& ws = workers_[static_cast<std::size_t>(k)];
    const WorkerView& view = views_[static_cast<std::size_t>(k)];

    SageBackwardResult back =
        sage_backward(ws.caches[static_cast<std::size_t>(layer)], ws.upstream);
    ws.grads[static_cast<std::size_t>(layer)] = std::move(back.grads);
    ws.upstream = std::move(back.grad_local);

    // Layer-0 inputs are the fixed features; their gradient stops here.
    if (layer == 0) return;
    for (int j = 0; j < settings_.num_workers; ++j) {
      const auto& ids = view.halo_from[static_cast<std::size_t>(j)];
      if (ids.empty()) continue;
      GradHaloBody body;
      body.layer = layer;
      body.ids = ids;
      body.rows = Matrix(ids.size(), back.grad_halo.cols());
      for (std::size_t i = 0; i < ids.size(); ++i) {
        const auto src = back.grad_halo.row(view.halo_row(ids[i]));
        std::copy(src.begin(), src.end(), body.rows.row(i).begin());
      }
      bus_.post(make_grad_halo_message(k, j, std::move(body)));
    }
  }

  void phase_backward_recv(int k, int layer) {
    WorkerState& ws = workers_[static_cast<std::size_t>(k)];
    const WorkerView& view = views_[static_cast<std::size_t>(k)];
    for (Message& message : bus_.drain(k)) {
      if (message.kind != MessageKind::GradHalo || message.layer != layer) {
        throw ContractError("unexpected message during gradient exchange");
      }
      const auto& body = std::get<GradHaloBody>(message.body);
      for (std::size_t i = 0; i < body.ids.size(); ++i) {
        const std::size_t row = view.local_row(body.ids[i]);
        if (row == WorkerView::npos) {
          throw ContractError("gradient for non-local node " + std::to_string(body.ids[i]));
        }
        const auto src = body.rows.row(i);
        auto dst = ws.upstream.row(row);
        for (std::size_t c = 0; c < src.size(); ++c) dst[c] += src[c];
      }
    }
  }

  void phase_param_post(int k) {
    WorkerState& ws = workers_[static_cast<std::size_t>(k)];
    ParamSyncBody body;
    for (const SageGrads& g : ws.grads) {
      body.grads.push_back(g.w_self);
      body.grads.push_back(g.w_neigh);
      body.grads.push_back(g.bias);
    }
    for (int j = 0; j < settings_.num_workers; ++j) {
      if (j == k) continue;
      bus_.post(make_param_sync_message(k, j, body));
    }
  }

  void phase_param_apply(int k) {
    WorkerState& ws = workers_[static_cast<std::size_t>(k)];
    for (auto& slot : ws.param_slots) slot.reset();
    for (Message& message : bus_.drain(k)) {
      if (message.kind != MessageKind::ParamSync) {
        throw ContractError("unexpected message during parameter sync");
      }
      ws.param_slots[static_cast<std::size_t>(message.source)] =
          std::move(std::get<ParamSyncBody>(message.body));
    }

    // Canonical-order sum over worker shards; gradients already carry the
    // global 1/|train| scaling, so the sum is the exact global mean gradient.
    std::vector<SageGrads> total(ws.grads.size());
    for (std::size_t l = 0; l < total.size(); ++l) {
      const SageLayer& layer = ws.model.layers[l];
      total[l].w_self = Matrix(layer.w_self.rows(), layer.w_self.cols());
      total[l].w_neigh = Matrix(layer.w_neigh.rows(), layer.w_neigh.cols());
      total[l].bias = Matrix(1, layer.bias.cols());
    }
    for (int src = 0; src < settings_.num_workers; ++src) {
      const ParamSyncBody* shard = nullptr;
      ParamSyncBody own;
      if (src == k) {
        for (const SageGrads& g : ws.grads) {
          own.grads.push_back(g.w_self);
          own.grads.push_back(g.w_neigh);
          own.grads.push_back(g.bias);
        }
        shard = &own;
      } else {
        const auto& slot = ws.param_slots[static_cast<std::size_t>(src)];
        if (!slot.has_value()) throw ContractError("missing parameter shard");
        shard = &*slot;
      }
      for (std::size_t l = 0; l < total.size(); ++l) {
        total[l].w_self.add_scaled(shard->grads[l * 3 + 0], 1.0);
        total[l].w_neigh.add_scaled(shard->grads[l * 3 + 1], 1.0);
        total[l].bias.add_scaled(shard->grads[l * 3 + 2], 1.0);
      }
    }
    ws.model.apply(*ws.sgd, total);
  }

  void phase_finalize(int k) {
    if (k != 0) return;

    for (std::size_t w = 1; w < workers_.size(); ++w) {
      const double diff = workers_[w].model.max_param_diff(workers_[0].model);
      if (diff > kReplicaTolerance) {
        throw ConsistencyError("replica divergence " + std::to_string(diff) +
                               " on worker " + std::to_string(w));
      }
    }

    EpochMetrics row;
    double loss_sum = 0.0;
    for (double part : loss_parts_) loss_sum += part;
    row.loss = loss_sum / static_cast<double>(global_counts_[0]);

    std::size_t correct[3] = {0, 0, 0};
    for (const auto& part : correct_parts_) {
      for (int s = 0; s < 3; ++s) correct[s] += part[static_cast<std::size_t>(s)];
    }
    row.train_acc = global_counts_[0] ? static_cast<double>(correct[0]) /
                                            static_cast<double>(global_counts_[0])
                                      : 0.0;
    row.val_acc = global_counts_[1] ? static_cast<double>(correct[1]) /
                                          static_cast<double>(global_counts_[1])
                                    : 0.0;
    row.test_acc = global_counts_[2] ? static_cast<double>(correct[2]) /
                                           static_cast<double>(global_counts_[2])
                                     : 0.0;

    const auto totals = ledger_.current_totals();
    row.payload_bytes = totals.payload_bytes;
    row.metadata_bytes = totals.metadata_bytes;
    row.baseline_bytes = totals.baseline_bytes;
    row.grad_bytes = totals.grad_bytes;

    DeltaLog merged;
    for (WorkerState& ws : workers_) {
      merged.merge(ws.delta);
      ws.delta.reset();
      row.max_residual_norm = std::max(row.max_residual_norm, ws.accumulator.max_residual_norm());
    }
    const DeltaLog::Stat stat = merged.measure_or_zero();
    row.delta_emp = stat.infinite ? std::numeric_limits<double>::infinity() : stat.delta;
    row.delta_infinite = stat.infinite;

    // Conservation: everything posted this epoch was drained exactly once.
    const std::size_t epoch = ledger_.num_epochs() - 1;
    for (int src = 0; src < settings_.num_workers; ++src) {
      for (int dst = 0; dst < settings_.num_workers; ++dst) {
        for (int kind = 0; kind < 4; ++kind) {
          const auto mk = static_cast<MessageKind>(kind);
          if (ledger_.sent_bytes(epoch, src, dst, mk) !=
              ledger_.received_bytes(epoch, src, dst, mk)) {
            throw ConsistencyError("ledger imbalance between workers " +
                                   std::to_string(src) + " and " + std::to_string(dst));
          }
        }
      }
    }

    metrics_.push_back(row);
    ledger_.begin_epoch();
  }

  // ---- executors ----------------------------------------------------------

  void build_phases() {
    phases_.clear();
    phases_.emplace_back([this](int k) { phase_prepare(k); });
    for (int l = 0; l < settings_.num_layers; ++l) {
      phases_.emplace_back([this, l](int k) { phase_send(k, l); });
      phases_.emplace_back([this, l](int k) { phase_recv(k, l); });
    }
    phases_.emplace_back([this](int k) { phase_loss(k); });
    for (int l = settings_.num_layers - 1; l >= 0; --l) {
      phases_.emplace_back([this, l](int k) { phase_backward(k, l); });
      if (l > 0) {
        phases_.emplace_back([this, l](int k) { phase_backward_recv(k, l); });
      }
    }
    phases_.emplace_back([this](int k) { phase_param_post(k); });
    phases_.emplace_back([this](int k) { phase_param_apply(k); });
    phases_.emplace_back([this](int k) { phase_finalize(k); });
  }

  void run_serial() {
    for (int epoch = 0; epoch < settings_.epochs; ++epoch) {
      for (const auto& phase : phases_) {
        for (int k = 0; k < settings_.num_workers; ++k) phase(k);
      }
    }
  }

  void run_concurrent() {
    std::barrier sync(settings_.num_workers);
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex error_mutex;

    auto body = [&](int k) {
      for (int epoch = 0; epoch < settings_.epochs; ++epoch) {
        for (const auto& phase : phases_) {
          if (!failed.load(std::memory_order_acquire)) {
            try {
              phase(k);
            } catch (...) {
              std::lock_guard lock(error_mutex);
              if (!first_error) first_error = std::current_exception();
              failed.store(true, std::memory_order_release);
            }
          }
          sync.arrive_and_wait();
        }
      }
    };

    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(settings_.num_workers));
    for (int k = 0; k < settings_.num_workers; ++k) threads.emplace_back(body, k);
    for (std::thread& t : threads) t.join();
    if (first_error) std::rethrow_exception(first_error);
  }

  const Graph& graph_;
  TrainSettings settings_;
  Partition partition_;
  std::vector<WorkerView> views_;
  CommLedger ledger_;
  MessageBus bus_;
  GroupingPlan plan_;
  std::vector<WorkerState> workers_;
  std::vector<double> loss_parts_;
  std::vector<std::array<std::size_t, 3>> correct_parts_;
  std::size_t global_counts_[3] = {0, 0, 0};
  std::vector<std::function<void(int)>> phases_;
  std::vector<EpochMetrics> metrics_;
};

}  // namespace

void TrainSettings::validate() const {
  if (num_workers < 1) throw ConfigError("workers", "must be >= 1");
  if (epochs < 1) throw ConfigError("epochs", "must be >= 1");
  if (num_layers < 1) throw ConfigError("model.layers", "must be >= 1");
  if (hidden_dim < 1) throw ConfigError("model.hidden_dim", "must be >= 1");
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate", "must be > 0");
  if (momentum < 0.0 || momentum >= 1.0) throw ConfigError("momentum", "must be in [0, 1)");
  if (aux_lr < 0.0) throw ConfigError("aux_lr", "must be >= 0");
  if (phi == Phi::None) {
    if (ratio.has_value()) {
      throw ConfigError("ratio", "must not be set when phi = none");
    }
  } else {
    if (!ratio.has_value()) throw ConfigError("ratio", "required when phi != none");
    if (!(*ratio > 0.0 && *ratio < 1.0)) throw ConfigError("ratio", "must lie in (0, 1)");
  }
}

std::uint64_t RunReport::total_payload_bytes() const {
  std::uint64_t total = 0;
  for (const EpochMetrics& e : epochs) total += e.payload_bytes;
  return total;
}

std::uint64_t RunReport::total_baseline_bytes() const {
  std::uint64_t total = 0;
  for (const EpochMetrics& e : epochs) total += e.baseline_bytes;
  return total;
}

double RunReport::bytes_ratio() const {
  const std::uint64_t baseline = total_baseline_bytes();
  if (baseline == 0) return 1.0;
  return static_cast<double>(total_payload_bytes()) / static_cast<double>(baseline);
}

RunReport run_training(const Graph& graph, const TrainSettings& settings) {
  Trainer trainer(graph, settings);
  return trainer.run();
}

RunReport run_monolithic(const Graph& graph, const TrainSettings& settings) {
  settings.validate();
  const WorkerView view = WorkerView::full_graph(graph);
  Model model = Model::init(graph.feature_dim(), settings.hidden_dim, graph.num_classes,
                            settings.num_layers, settings.seed);
  SgdState sgd(SgdConfig{settings.learning_rate, settings.momentum});

  const auto train_mask = split_mask(view.local_split, Split::Train);
  const std::size_t counts[3] = {graph.mask_count(Split::Train), graph.mask_count(Split::Val),
                                 graph.mask_count(Split::Test)};
  if (counts[0] == 0) throw MetricError("graph has no training nodes");

  RunReport report;
  report.graph_fingerprint = graph.fingerprint();
  report.seed = settings.seed;
  report.num_nodes = graph.num_nodes();
  report.feature_elements = graph.features.size();

  const Matrix empty_halo;
  for (int epoch = 0; epoch < settings.epochs; ++epoch) {
    std::vector<Matrix> h(static_cast<std::size_t>(settings.num_layers) + 1);
    std::vector<SageCache> caches(static_cast<std::size_t>(settings.num_layers));
    h[0] = view.local_features;
    for (int l = 0; l < settings.num_layers; ++l) {
      const bool last = l == settings.num_layers - 1;
      SageForwardResult fwd =
          sage_forward(model.layers[static_cast<std::size_t>(l)],
                       h[static_cast<std::size_t>(l)], empty_halo, view, !last);
      h[static_cast<std::size_t>(l) + 1] = std::move(fwd.out);
      caches[static_cast<std::size_t>(l)] = std::move(fwd.cache);
    }

    const Matrix& logits = h[static_cast<std::size_t>(settings.num_layers)];
    CrossEntropyPartial part = cross_entropy_sum(logits, view.local_labels, train_mask);
    const double inv = 1.0 / static_cast<double>(counts[0]);

    EpochMetrics row;
    row.loss = part.loss_sum / static_cast<double>(counts[0]);
    std::size_t correct[3] = {0, 0, 0};
    count_correct(logits, view.local_labels, view.local_split, correct);
    row.train_acc = static_cast<double>(correct[0]) / static_cast<double>(counts[0]);
    row.val_acc = counts[1] ? static_cast<double>(correct[1]) / static_cast<double>(counts[1]) : 0.0;
    row.test_acc = counts[2] ? static_cast<double>(correct[2]) / static_cast<double>(counts[2]) : 0.0;
    report.epochs.push_back(row);

    Matrix upstream = std::move(part.grad);
    upstream.scale(inv);
    std::vector<SageGrads> grads(static_cast<std::size_t>(settings.num_layers));
    for (int l = settings.num_layers - 1; l >= 0; --l) {
      SageBackwardResult back = sage_backward(caches[static_cast<std::size_t>(l)], upstream);
      grads[static_cast<std::size_t>(l)] = std::move(back.grads);
      upstream = std::move(back.grad_local);
    }
    model.apply(sgd, grads);
  }
  return report;
}

RunDiff compare_runs(const RunReport& a, const RunReport& b) {
  if (a.graph_fingerprint != b.graph_fingerprint || a.seed != b.seed ||
      a.epochs.size() != b.epochs.size()) {
    throw ComparabilityError("reports come from different experiments");
  }
  RunDiff diff;
  diff.d_test_acc = b.final_test_acc() - a.final_test_acc();
  diff.d_loss = b.final_loss() - a.final_loss();
  diff.d_payload_bytes = static_cast<std::int64_t>(b.total_payload_bytes()) -
                         static_cast<std::int64_t>(a.total_payload_bytes());
  diff.d_delta_emp = b.epochs.back().delta_emp - a.epochs.back().delta_emp;
  return diff;
}

}  // namespace supersage
