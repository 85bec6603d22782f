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

#include "ecopt/simnet.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>
#include <string>
#include <thread>

#include "ecopt/errors.hpp"
#include "ecopt/logging.hpp"
#include "ecopt/random.hpp"

namespace ecopt {

NodePartition::NodePartition(std::shared_ptr<const Dataset> data,
                             std::vector<std::size_t> order, int nodes,
                             int per_node)
    : data_(std::move(data)),
      order_(std::move(order)),
      nodes_(nodes),
      per_node_(per_node) {}

NodePartition NodePartition::shuffled(std::shared_ptr<const Dataset> data,
                                      int nodes, std::uint64_t seed) {
  if (!data) throw ConfigError("partition: no dataset");
  if (nodes < 1) throw ConfigError("partition: need at least one node");
  const std::size_t total = data->size();
  if (static_cast<std::size_t>(nodes) > total)
    throw ConfigError("partition: " + std::to_string(nodes) +
                      " nodes for " + std::to_string(total) + " samples");

  std::vector<std::size_t> perm(total);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Rng rng = RngStreams(seed).stream(Stream::kPartition, 0, 0);
  for (std::size_t i = total; i > 1; --i) {
    const std::size_t j = rng.below(i);
    std::swap(perm[i - 1], perm[j]);
  }

  const int m = static_cast<int>(total / nodes);
  const std::size_t kept = static_cast<std::size_t>(m) * nodes;
  if (kept < total) {
    log_warning("partition: dropping " + std::to_string(total - kept) +
                " trailing samples so every node holds " + std::to_string(m));
  }
  // Shuffled row j goes to node j mod n as that node's (j / n)-th sample.
  std::vector<std::size_t> order(kept);
  for (std::size_t j = 0; j < kept; ++j) {
    const int node = static_cast<int>(j % nodes);
    const int local = static_cast<int>(j / nodes);
    order[static_cast<std::size_t>(node) * m + local] = perm[j];
  }
  return NodePartition(std::move(data), std::move(order), nodes, m);
}

NodePartition NodePartition::contiguous(std::shared_ptr<const Dataset> data,
                                        int nodes) {
  if (!data) throw ConfigError("partition: no dataset");
  if (nodes < 1 || static_cast<std::size_t>(nodes) > data->size())
    throw ConfigError("partition: invalid node count");
  const int m = static_cast<int>(data->size() / nodes);
  std::vector<std::size_t> order(static_cast<std::size_t>(m) * nodes);
  std::iota(order.begin(), order.end(), std::size_t{0});
  return NodePartition(std::move(data), std::move(order), nodes, m);
}

std::uint64_t NodePartition::content_hash() const {
  std::uint64_t h = data_->content_hash();
  h = mix64(h ^ static_cast<std::uint64_t>(nodes_));
  for (std::size_t idx : order_) h = mix64(h ^ idx);
  return h;
}

NodePartition partition(std::shared_ptr<const Dataset> data, int nodes,
                        std::uint64_t seed) {
  return NodePartition::shuffled(std::move(data), nodes, seed);
}

std::string_view to_string(MessageKind kind) noexcept {
  switch (kind) {
    case MessageKind::kCompressed: return "compressed";
    case MessageKind::kLearnerUpdate: return "learner";
    case MessageKind::kCheckpointCoin: return "coin";
    case MessageKind::kFullVector: return "full";
    case MessageKind::kBroadcast: return "broadcast";
  }
  return "unknown";
}

MessageKind message_kind_from_string(std::string_view text) {
  for (auto kind : {MessageKind::kCompressed, MessageKind::kLearnerUpdate,
                    MessageKind::kCheckpointCoin, MessageKind::kFullVector,
                    MessageKind::kBroadcast}) {
    if (to_string(kind) == text) return kind;
  }
  throw ConfigError("unknown message kind: " + std::string(text));
}

void CommLedger::charge(int node, MessageKind kind, std::uint64_t bits) {
  cumulative_ += bits;
  if (options_.record_entries) entries_.push_back({round_, node, kind, bits});
}

std::uint64_t CommLedger::recount() const noexcept {
  std::uint64_t total = 0;
  for (const auto& entry : entries_) total += entry.bits;
  return total;
}

void CommLedger::write_csv(std::ostream& out) const {
  out << "round,node,kind,bits\n";
  for (const auto& entry : entries_) {
    out << entry.round << ',' << entry.node << ',' << to_string(entry.kind)
        << ',' << entry.bits << '\n';
  }
}

Vector aggregate_average(std::span<const Vector> messages,
                         std::span<const std::uint64_t> bits_each,
                         CommLedger& ledger, MessageKind kind) {
  if (messages.empty()) throw DimensionMismatch("aggregate of zero messages");
  if (bits_each.size() != messages.size())
    throw DimensionMismatch("one bit count per message required");
  const Eigen::Index dim = messages.front().size();
  Vector sum = Vector::Zero(dim);
  for (std::size_t tau = 0; tau < messages.size(); ++tau) {
    if (messages[tau].size() != dim)
      throw DimensionMismatch("message " + std::to_string(tau) +
                              " has dimension " +
                              std::to_string(messages[tau].size()));
    sum += messages[tau];
    ledger.charge(static_cast<int>(tau), kind, bits_each[tau]);
  }
  if (ledger.count_downlink()) {
    ledger.charge(-1, MessageKind::kBroadcast,
                  static_cast<std::uint64_t>(messages.size()) * 64u *
                      static_cast<std::uint64_t>(dim));
  }
  return sum / static_cast<double>(messages.size());
}

Cluster::Cluster(int workers) : workers_(std::max(1, workers)) {}

void Cluster::for_each_node(int nodes, const std::function<void(int)>& fn) const {
  const int workers = std::min(workers_, nodes);
  if (workers <= 1) {
    for (int tau = 0; tau < nodes; ++tau) fn(tau);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (int tau = w; tau < nodes; tau += workers) fn(tau);
    });
  }
}

}  // namespace ecopt
