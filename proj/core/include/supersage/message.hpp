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
#include <mutex>
#include <variant>
#include <vector>

#include "supersage/condense.hpp"
#include "supersage/matrix.hpp"

namespace supersage {

// Wire conventions: features travel as 32-bit floats, node ids as 32-bit
// integers, and every message pays one fixed header. Byte counts are computed
// from content, never declared.
inline constexpr std::uint64_t kBytesPerElement = 4;
inline constexpr std::uint64_t kBytesPerNodeId = 4;
inline constexpr std::uint64_t kHeaderBytes = 8;

enum class MessageKind : int { SuperNodes = 0, RawHalo = 1, GradHalo = 2, ParamSync = 3 };

struct RawHaloBody {
  int layer = 0;
  std::vector<NodeId> ids;
  Matrix rows;
};

struct GradHaloBody {
  int layer = 0;
  std::vector<NodeId> ids;
  Matrix rows;
};

struct ParamSyncBody {
  // Flattened gradient shards in canonical order: per layer w_self, w_neigh, bias.
  std::vector<Matrix> grads;
};

struct Message {
  MessageKind kind = MessageKind::SuperNodes;
  int source = 0;
  int destination = 0;
  int layer = 0;  // duplicated out of the body for canonical ordering
  std::variant<SuperNodeBatch, RawHaloBody, GradHaloBody, ParamSyncBody> body;
};

struct WireSize {
  std::uint64_t payload = 0;   // feature/gradient elements
  std::uint64_t metadata = 0;  // header, node ids, group tables
  std::uint64_t total() const { return payload + metadata; }
};

WireSize wire_size(const Message& message);

Message make_super_nodes_message(SuperNodeBatch batch);
Message make_raw_halo_message(int source, int destination, RawHaloBody body);
Message make_grad_halo_message(int source, int destination, GradHaloBody body);
Message make_param_sync_message(int source, int destination, ParamSyncBody body);

/// Per-epoch, per-worker, per-kind byte accounting. payload/metadata cover the
/// forward feature stream (SuperNodes + RawHalo); GradHalo and ParamSync are
/// tracked whole under their own counters; baseline is what an uncompressed
/// halo exchange would have cost in feature payload.
class CommLedger {
 public:
  explicit CommLedger(int num_workers);

  void begin_epoch();
  std::size_t num_epochs() const { return epochs_.size(); }

  void on_sent(const Message& message);
  void on_received(const Message& message);
  void add_baseline(int worker, std::uint64_t bytes);

  struct EpochTotals {
    std::uint64_t payload_bytes = 0;
    std::uint64_t metadata_bytes = 0;
    std::uint64_t baseline_bytes = 0;
    std::uint64_t grad_bytes = 0;
    std::uint64_t param_bytes = 0;
  };

  EpochTotals totals(std::size_t epoch) const;
  EpochTotals current_totals() const;

  std::uint64_t sent_bytes(std::size_t epoch, int source, int destination,
                           MessageKind kind) const;
  std::uint64_t received_bytes(std::size_t epoch, int source, int destination,
                               MessageKind kind) const;

 private:
  struct Epoch {
    EpochTotals totals;
    // [source][destination][kind]
    std::vector<std::vector<std::vector<std::uint64_t>>> sent;
    std::vector<std::vector<std::vector<std::uint64_t>>> received;
  };

  Epoch make_epoch() const;

  int num_workers_;
  std::vector<Epoch> epochs_;
  mutable std::mutex mutex_;
};

/// In-process mailbox router. post() and drain() are thread safe; drain
/// returns the destination's pending messages sorted by (source, kind, layer)
/// so processing order never depends on arrival order.
class MessageBus {
 public:
  MessageBus(int num_workers, CommLedger* ledger);

  void post(Message message);
  std::vector<Message> drain(int worker);
  std::size_t pending(int worker) const;

 private:
  int num_workers_;
  CommLedger* ledger_;
  std::vector<std::vector<Message>> mailboxes_;
  mutable std::mutex mutex_;
};

}  // namespace supersage
