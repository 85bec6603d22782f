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

#ifndef ECOPT_SOLVER_COMMON_HPP
#define ECOPT_SOLVER_COMMON_HPP

#include <cstdint>
#include <vector>

#include "ecopt/problem.hpp"
#include "ecopt/random.hpp"
#include "ecopt/simnet.hpp"

namespace ecopt {

/// Everything a solver step reads besides its own state. `problem` may carry
/// a Catalyst shift; the rest is fixed for a run.
struct SimContext {
  const ProblemSpec& problem;
  const NodePartition& partition;
  CommLedger& ledger;
  const Cluster& cluster;
  const RngStreams& streams;
};

struct StepReport {
  std::uint64_t round = 0;
  std::vector<std::uint64_t> uplink_bits_per_node;
  std::uint64_t total_bits = 0;  // everything charged during the step
};

/// Charges one uncompressed d-vector per node (64*d bits each) in a fresh
/// round. Used by exact initializations.
std::uint64_t charge_full_sync(CommLedger& ledger, int nodes, int dim);

}  // namespace ecopt

#endif  // ECOPT_SOLVER_COMMON_HPP
