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

#include "supersage/message.hpp"

#include <algorithm>
#include <string>

#include "supersage/errors.hpp"

namespace supersage {

WireSize wire_size(const Message& message) {
  WireSize size;
  switch (message.kind) {
    case MessageKind::SuperNodes: {
      const auto& batch = std::get<SuperNodeBatch>(message.body);
      size.metadata = kHeaderBytes;
      for (const SuperNodeGroup& group : batch.groups) {
        size.payload += kBytesPerElement * group.super.size();
        size.metadata += kBytesPerNodeId * (1 + group.members.size());
      }
      break;
    }
    case MessageKind::RawHalo: {
      const auto& body = std::get<RawHaloBody>(message.body);
      size.payload = kBytesPerElement * body.rows.size();
      size.metadata = kHeaderBytes + kBytesPerNodeId * body.ids.size();
      break;
    }
    case MessageKind::GradHalo: {
      const auto& body = std::get<GradHaloBody>(message.body);
      size.payload = kBytesPerElement * body.rows.size();
      size.metadata = kHeaderBytes + kBytesPerNodeId * body.ids.size();
      break;
    }
    case MessageKind::ParamSync: {
      const auto& body = std::get<ParamSyncBody>(message.body);
      for (const Matrix& m : body.grads) size.payload += kBytesPerElement * m.size();
      size.metadata = kHeaderBytes;
      break;
    }
  }
  return size;
}

Message make_super_nodes_message(SuperNodeBatch batch) {
  Message m;
  m.kind = MessageKind::SuperNodes;
  m.source = batch.source;
  m.destination = batch.destination;
  m.layer = batch.layer;
  m.body = std::move(batch);
  return m;
}

Message make_raw_halo_message(int source, int destination, RawHaloBody body) {
  Message m;
  m.kind = MessageKind::RawHalo;
  m.source = source;
  m.destination = destination;
  m.layer = body.layer;
  m.body = std::move(body);
  return m;
}

Message make_grad_halo_message(int source, int destination, GradHaloBody body) {
  Message m;
  m.kind = MessageKind::GradHalo;
  m.source = source;
  m.destination = destination;
  m.layer = body.layer;
  m.body = std::move(body);
  return m;
}

Message make_param_sync_message(int source, int destination, ParamSyncBody body) {
  Message m;
  m.kind = MessageKind::ParamSync;
  m.source = source;
  m.destination = destination;
  m.layer = 0;
  m.body = std::move(body);
  return m;
}

CommLedger::CommLedger(int num_workers) : num_workers_(num_workers) {
  epochs_.push_back(make_epoch());
}

CommLedger::Epoch CommLedger::make_epoch() const {
  Epoch e;
  const auto k = static_cast<std::size_t>(num_workers_);
  e.sent.assign(k, std::vector<std::vector<std::uint64_t>>(k, std::vector<std::uint64_t>(4, 0)));
  e.received = e.sent;
  return e;
}

void CommLedger::begin_epoch() {
  std::lock_guard lock(mutex_);
  epochs_.push_back(make_epoch());
}

namespace {

void classify(CommLedger::EpochTotals& totals, const Message& message, const WireSize& size) {
  switch (message.kind) {
    case MessageKind::SuperNodes:
    case MessageKind::RawHalo:
      totals.payload_bytes += size.payload;
      totals.metadata_bytes += size.metadata;
      break;
    case MessageKind::GradHalo:
      totals.grad_bytes += size.total();
      break;
    case MessageKind::ParamSync:
      totals.param_bytes += size.total();
      break;
  }
}

}  // namespace

void CommLedger::on_sent(const Message& message) {
  const WireSize size = wire_size(message);
  std::lock_guard lock(mutex_);
  Epoch& epoch = epochs_.back();
  classify(epoch.totals, message, size);
  epoch.sent[static_cast<std::size_t>(message.source)][static_cast<std::size_t>(
      message.destination)][static_cast<std::size_t>(message.kind)] += size.total();
}

void CommLedger::on_received(const Message& message) {
  const WireSize size = wire_size(message);
  std::lock_guard lock(mutex_);
  Epoch& epoch = epochs_.back();
  epoch.received[static_cast<std::size_t>(message.source)][static_cast<std::size_t>(
      message.destination)][static_cast<std::size_t>(message.kind)] += size.total();
}

void CommLedger::add_baseline(int worker, std::uint64_t bytes) {
  (void)worker;
  std::lock_guard lock(mutex_);
  epochs_.back().totals.baseline_bytes += bytes;
}

CommLedger::EpochTotals CommLedger::totals(std::size_t epoch) const {
  std::lock_guard lock(mutex_);
  return epochs_.at(epoch).totals;
}

CommLedger::EpochTotals CommLedger::current_totals() const {
  std::lock_guard lock(mutex_);
  return epochs_.back().totals;
}

std::uint64_t CommLedger::sent_bytes(std::size_t epoch, int source, int destination,
                                     MessageKind kind) const {
  std::lock_guard lock(mutex_);
  return epochs_.at(epoch).sent[static_cast<std::size_t>(source)]
                               [static_cast<std::size_t>(destination)]
                               [static_cast<std::size_t>(kind)];
}

std::uint64_t CommLedger::received_bytes(std::size_t epoch, int source, int destination,
                                         MessageKind kind) const {
  std::lock_guard lock(mutex_);
  return epochs_.at(epoch).received[static_cast<std::size_t>(source)]
                                   [static_cast<std::size_t>(destination)]
                                   [static_cast<std::size_t>(kind)];
}

MessageBus::MessageBus(int num_workers, CommLedger* ledger)
    : num_workers_(num_workers), ledger_(ledger) {
  mailboxes_.resize(static_cast<std::size_t>(num_workers));
}

void MessageBus::post(Message message) {
  if (message.destination < 0 || message.destination >= num_workers_ ||
      message.source < 0 || message.source >= num_workers_) {
    throw RoutingError("undeliverable message " + std::to_string(message.source) +
                       " -> " + std::to_string(message.destination));
  }
  if (ledger_ != nullptr) ledger_->on_sent(message);
  std::lock_guard lock(mutex_);
  mailboxes_[static_cast<std::size_t>(message.destination)].push_back(std::move(message));
}

std::vector<Message> MessageBus::drain(int worker) {
  std::vector<Message> out;
  {
    std::lock_guard lock(mutex_);
    out.swap(mailboxes_[static_cast<std::size_t>(worker)]);
  }
  std::sort(out.begin(), out.end(), [](const Message& a, const Message& b) {
    if (a.source != b.source) return a.source < b.source;
    if (a.kind != b.kind) return static_cast<int>(a.kind) < static_cast<int>(b.kind);
    return a.layer < b.layer;
  });
  if (ledger_ != nullptr) {
    for (const Message& m : out) ledger_->on_received(m);
  }
  return out;
}

std::size_t MessageBus::pending(int worker) const {
  std::lock_guard lock(mutex_);
  return mailboxes_[static_cast<std::size_t>(worker)].size();
}

}  // namespace supersage
