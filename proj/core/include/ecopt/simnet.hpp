// Copyright 2026 The ecopt Authors. All Rights Reserved.
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
// =============================================================================

#ifndef ECOPT_SIMNET_HPP
#define ECOPT_SIMNET_HPP

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "ecopt/dataset.hpp"
#include "ecopt/types.hpp"

namespace ecopt {

/// Equal-size split of a dataset over n simulated nodes. Node tau owns the
/// global sample indices [tau*m, (tau+1)*m).
class NodePartition {
 public:
  /// Shuffle with `seed`, deal round-robin, drop the trailing N mod n rows
  /// (with a logged warning).
  static NodePartition shuffled(std::shared_ptr<const Dataset> data, int nodes,
                                std::uint64_t seed);

  /// Node tau gets dataset rows [tau*m, (tau+1)*m) in order. Used by tests
  /// that need a specific layout.
  static NodePartition contiguous(std::shared_ptr<const Dataset> data,
                                  int nodes);

  int nodes() const noexcept { return nodes_; }
  int per_node() const noexcept { return per_node_; }
  std::size_t total() const noexcept { return order_.size(); }
  int dim() const noexcept { return data_->dim; }
  std::size_t dropped() const noexcept { return data_->size() - order_.size(); }

  std::size_t global_index(int node, int i) const noexcept {
    return static_cast<std::size_t>(node) * per_node_ + i;
  }
  std::pair<std::size_t, std::size_t> range(int node) const noexcept {
    return {global_index(node, 0), global_index(node, 0) + per_node_};
  }
  std::size_t dataset_row(int node, int i) const noexcept {
    return order_[global_index(node, i)];
  }
  const SparseRow& row(int node, int i) const noexcept {
    return data_->rows[dataset_row(node, i)];
  }
  const SparseRow& row(std::size_t global) const noexcept {
    return data_->rows[order_[global]];
  }

  const Dataset& dataset() const noexcept { return *data_; }
  std::shared_ptr<const Dataset> dataset_ptr() const noexcept { return data_; }

  /// Hash of the partitioned sample set in partition order.
  std::uint64_t content_hash() const;

 private:
  NodePartition(std::shared_ptr<const Dataset> data, std::vector<std::size_t> order,
                int nodes, int per_node);

  std::shared_ptr<const Dataset> data_;
  std::vector<std::size_t> order_;
  int nodes_ = 0;
  int per_node_ = 0;
};

/// The `partition` operation: shuffled round-robin split.
NodePartition partition(std::shared_ptr<const Dataset> data, int nodes,
                        std::uint64_t seed);

enum class MessageKind : std::uint8_t {
  kCompressed,      // y_tau (EC-LSVRG, EC-SDCA) or Delta_tau (ECSPDC)
  kLearnerUpdate,   // z_tau = Q1(...) learner increments
  kCheckpointCoin,  // EC-LSVRG shared Bernoulli flag
  kFullVector,      // uncompressed synchronisation
  kBroadcast,       // server -> nodes, only with downlink accounting
};

std::string_view to_string(MessageKind kind) noexcept;
MessageKind message_kind_from_string(std::string_view text);

struct LedgerEntry {
  std::uint64_t round = 0;
  int node = 0;  // -1 for the server
  MessageKind kind = MessageKind::kCompressed;
  std::uint64_t bits = 0;

  bool operator==(const LedgerEntry&) const = default;
};

/// Bit-exact record of every node->server message. Single writer.
class CommLedger {
 public:
  struct Options {
    bool record_entries = true;
    bool count_downlink = false;
  };

  CommLedger() = default;
  explicit CommLedger(Options options) : options_(options) {}

  /// Opens a new communication round and returns its id.
  std::uint64_t next_round() noexcept { return ++round_; }
  std::uint64_t current_round() const noexcept { return round_; }

  void charge(int node, MessageKind kind, std::uint64_t bits);

  std::uint64_t cumulative_bits() const noexcept { return cumulative_; }
  const std::vector<LedgerEntry>& entries() const noexcept { return entries_; }
  bool recording() const noexcept { return options_.record_entries; }
  bool count_downlink() const noexcept { return options_.count_downlink; }

  /// Sum of logged entries; equals cumulative_bits() when recording.
  std::uint64_t recount() const noexcept;

  void write_csv(std::ostream& out) const;

 private:
  Options options_;
  std::uint64_t round_ = 0;
  std::uint64_t cumulative_ = 0;
  std::vector<LedgerEntry> entries_;
};

/// Average one message per node in fixed node order, charging bits_each[tau]
/// uplink bits for node tau in the ledger's current round. With downlink
/// accounting the dense broadcast of the average (64*d bits per receiving
/// node) is charged too.
Vector aggregate_average(std::span<const Vector> messages,
                         std::span<const std::uint64_t> bits_each,
                         CommLedger& ledger,
                         MessageKind kind = MessageKind::kCompressed);

/// Runs node-local phases. Work is split statically over `workers` threads;
/// callers must only touch node-local state inside the callback.
class Cluster {
 public:
  explicit Cluster(int workers = 1);

  int workers() const noexcept { return workers_; }

  void for_each_node(int nodes, const std::function<void(int)>& fn) const;

 private:
  int workers_;
};

}  // namespace ecopt

#endif  // ECOPT_SIMNET_HPP
