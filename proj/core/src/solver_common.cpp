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

#include "ecopt/solver_common.hpp"

namespace ecopt {

std::uint64_t charge_full_sync(CommLedger& ledger, int nodes, int dim) {
  ledger.next_round();
  const std::uint64_t each = 64u * static_cast<std::uint64_t>(dim);
  for (int tau = 0; tau < nodes; ++tau)
    ledger.charge(tau, MessageKind::kFullVector, each);
  return each * static_cast<std::uint64_t>(nodes);
}

}  // namespace ecopt
