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

#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "ecopt/errors.hpp"
#include "ecopt/logging.hpp"
#include "ecopt/simnet.hpp"
#include "fixtures.hpp"

namespace ecopt {
namespace {

TEST(PartitionTest, EqualSizesAndDroppedTail) {
  set_quiet(true);
  auto data = testing::random_dataset(23, 4, 0.5, 1);
  const auto part = partition(data, 5, 42);
  EXPECT_EQ(part.per_node(), 4);
  EXPECT_EQ(part.total(), 20u);
  EXPECT_EQ(part.dropped(), 3u);
  std::set<std::size_t> seen;
  for (int tau = 0; tau < 5; ++tau) {
    const auto [lo, hi] = part.range(tau);
    EXPECT_EQ(hi - lo, 4u);
    EXPECT_EQ(lo, static_cast<std::size_t>(tau) * 4);
    for (int i = 0; i < 4; ++i) seen.insert(part.dataset_row(tau, i));
  }
  EXPECT_EQ(seen.size(), 20u);
  set_quiet(false);
}

TEST(PartitionTest, SeedDeterminesLayout) {
  auto data = testing::random_dataset(40, 3, 0.5, 2);
  const auto a = partition(data, 4, 7);
  const auto b = partition(data, 4, 7);
  const auto c = partition(data, 4, 8);
  EXPECT_EQ(a.content_hash(), b.content_hash());
  EXPECT_NE(a.content_hash(), c.content_hash());
}

TEST(PartitionTest, RejectsTooManyNodes) {
  auto data = testing::random_dataset(3, 2, 0.5, 3);
  EXPECT_THROW(partition(data, 4, 1), ConfigError);
  EXPECT_THROW(partition(data, 0, 1), ConfigError);
}

TEST(LedgerTest, CumulativeMatchesEntries) {
  CommLedger ledger;
  const auto r1 = ledger.next_round();
  ledger.charge(0, MessageKind::kCompressed, 71);
  ledger.charge(1, MessageKind::kLearnerUpdate, 10);
  const auto r2 = ledger.next_round();
  ledger.charge(0, MessageKind::kCheckpointCoin, 1);
  EXPECT_EQ(r2, r1 + 1);
  EXPECT_EQ(ledger.cumulative_bits(), 82u);
  EXPECT_EQ(ledger.recount(), 82u);
  ASSERT_EQ(ledger.entries().size(), 3u);
  EXPECT_EQ(ledger.entries()[2], (LedgerEntry{r2, 0, MessageKind::kCheckpointCoin, 1}));
  std::ostringstream csv;
  ledger.write_csv(csv);
  EXPECT_EQ(csv.str(), "round,node,kind,bits\n1,0,compressed,71\n1,1,learner,10\n2,0,coin,1\n");
}

TEST(LedgerTest, MessageKindNames) {
  for (auto kind : {MessageKind::kCompressed, MessageKind::kLearnerUpdate,
                    MessageKind::kCheckpointCoin, MessageKind::kFullVector, MessageKind::kBroadcast})
    EXPECT_EQ(message_kind_from_string(to_string(kind)), kind);
  EXPECT_THROW(message_kind_from_string("gossip"), ConfigError);
}

TEST(AggregateTest, AveragesInNodeOrderAndCharges) {
  CommLedger ledger;
  ledger.next_round();
  std::vector<Vector> msgs{Vector::Constant(3, 1.0), Vector::Constant(3, 2.0),
                           Vector::Constant(3, 6.0)};
  std::vector<std::uint64_t> bits{5, 6, 7};
  const Vector avg = aggregate_average(msgs, bits, ledger);
  EXPECT_EQ(avg, Vector::Constant(3, 3.0));
  EXPECT_EQ(ledger.cumulative_bits(), 18u);
}

TEST(AggregateTest, DownlinkAccounting) {
  CommLedger ledger(CommLedger::Options{true, true});
  ledger.next_round();
  std::vector<Vector> msgs(4, Vector::Zero(10));
  std::vector<std::uint64_t> bits(4, 1);
  aggregate_average(msgs, bits, ledger);
  EXPECT_EQ(ledger.cumulative_bits(), 4u + 4u * 640u);
}

TEST(AggregateTest, Mismatches) {
  CommLedger ledger;
  std::vector<Vector> msgs{Vector::Zero(2), Vector::Zero(3)};
  std::vector<std::uint64_t> bits{1, 1};
  EXPECT_THROW(aggregate_average(msgs, bits, ledger), DimensionMismatch);
  std::vector<std::uint64_t> short_bits{1};
  std::vector<Vector> ok{Vector::Zero(2), Vector::Zero(2)};
  EXPECT_THROW(aggregate_average(ok, short_bits, ledger), DimensionMismatch);
}

TEST(ClusterTest, VisitsEveryNodeOnceWithWorkers) {
  for (int workers : {1, 3, 8}) {
    Cluster cluster(workers);
    std::vector<int> hits(13, 0);
    cluster.for_each_node(13, [&](int tau) { ++hits[tau]; });
    for (int h : hits) EXPECT_EQ(h, 1);
  }
}

TEST(RngTest, StreamsArePureFunctions) {
  RngStreams s(5);
  Rng a = s.stream(Stream::kSampling, 3, 9);
  Rng b = s.stream(Stream::kSampling, 3, 9);
  Rng c = s.stream(Stream::kCompressorQ, 3, 9);
  const auto va = a();
  EXPECT_EQ(va, b());
  EXPECT_NE(va, c());
  Rng r(1);
  for (int t = 0; t < 10000; ++t) {
    ASSERT_LT(r.below(7), 7u);
    const double u = r.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(DatasetTest, FoldIsIdempotentAndHashChanges) {
  auto data = testing::random_dataset(5, 3, 1.0, 4, false);
  const auto before = data->content_hash();
  const auto first = data->rows[0].values;
  data->fold_labels();
  const auto after = data->content_hash();
  data->fold_labels();
  EXPECT_EQ(data->content_hash(), after);
  EXPECT_NE(before, after);
  for (std::size_t k = 0; k < first.size(); ++k)
    EXPECT_EQ(data->rows[0].values[k], -data->labels[0] * first[k]);
}

TEST(DatasetTest, AddValidatesRows) {
  Dataset data;
  data.dim = 2;
  EXPECT_THROW(data.add(SparseRow{{0, 3}, {1.0, 1.0}}, 1.0), DimensionMismatch);
  EXPECT_THROW(data.add(SparseRow{{0}, {1.0, 1.0}}, 1.0), DimensionMismatch);
}

}  // namespace
}  // namespace ecopt
