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

#ifndef ECOPT_TRACE_HPP
#define ECOPT_TRACE_HPP

#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ecopt/problem.hpp"
#include "ecopt/simnet.hpp"

namespace ecopt {

struct TraceRecord {
  std::int64_t outer_k = 0;
  std::int64_t inner_k = 0;
  std::uint64_t cumulative_bits = 0;
  double primal_gap = 0.0;
  double wall_seconds = 0.0;

  bool operator==(const TraceRecord&) const = default;
};

struct Trace {
  std::vector<TraceRecord> records;
  nlohmann::json metadata = nlohmann::json::object();

  /// Columns: outer_k,inner_k,cumulative_bits,primal_gap,wall_seconds.
  /// Reals are written with 17 significant digits so reading back is exact.
  void write_csv(std::ostream& out) const;
  static Trace read_csv(std::istream& in);

  /// First record whose gap is <= target, if any.
  std::optional<TraceRecord> first_below(double target) const;
  double final_gap() const;
};

/// Stop conditions shared by every run.
struct RunLimits {
  std::uint64_t max_steps = 1'000'000;
  std::optional<std::uint64_t> bit_cap;
  /// Stop once a recorded gap drops to this level.
  std::optional<double> stop_gap;
};

/// Samples P(x) - P* every `stride` global steps.
class TraceRecorder {
 public:
  TraceRecorder(const ProblemSpec& problem, const NodePartition& partition,
                double p_star, std::uint64_t stride);

  /// Records when `step` is a multiple of the stride or `force` is set.
  /// Returns the gap when it was evaluated.
  std::optional<double> observe(std::int64_t outer_k, std::int64_t inner_k,
                                std::uint64_t step, std::uint64_t bits,
                                const Vector& x, bool force = false);

  const Trace& trace() const noexcept { return trace_; }
  Trace& trace() noexcept { return trace_; }
  std::optional<double> last_gap() const noexcept { return last_gap_; }

 private:
  ProblemSpec problem_;
  const NodePartition& partition_;
  double p_star_;
  std::uint64_t stride_;
  std::chrono::steady_clock::time_point start_;
  std::optional<std::uint64_t> last_step_;
  std::optional<double> last_gap_;
  Trace trace_;
};

/// True once the limits say the run must end before another step.
bool limits_reached(const RunLimits& limits, std::uint64_t steps_done,
                    std::uint64_t bits, std::optional<double> last_gap);

}  // namespace ecopt

#endif  // ECOPT_TRACE_HPP
