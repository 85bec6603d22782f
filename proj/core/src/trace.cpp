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

#include "ecopt/trace.hpp"

#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "ecopt/errors.hpp"

namespace ecopt {

namespace {
constexpr const char* kHeader = "outer_k,inner_k,cumulative_bits,primal_gap,wall_seconds";
}  // namespace

void Trace::write_csv(std::ostream& out) const {
  out << kHeader << '\n';
  char buf[160];
  for (const auto& r : records) {
    std::snprintf(buf, sizeof buf, "%" PRId64 ",%" PRId64 ",%" PRIu64 ",%.17g,%.17g\n",
                  r.outer_k, r.inner_k, r.cumulative_bits, r.primal_gap,
                  r.wall_seconds);
    out << buf;
  }
}

namespace {

// strtod keeps subnormals that std::stod rejects as out of range.
double parse_real(const std::string& field) {
  char* end = nullptr;
  const double value = std::strtod(field.c_str(), &end);
  if (field.empty() || end != field.c_str() + field.size())
    throw std::invalid_argument("not a number");
  return value;
}

}  // namespace

Trace Trace::read_csv(std::istream& in) {
  Trace trace;
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw ParseError(1, "empty trace");
  ++line_no;
  if (line != kHeader) throw ParseError(line_no, "unexpected trace header");
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::istringstream row(line);
    for (std::string field; std::getline(row, field, ',');) fields.push_back(field);
    if (fields.size() != 5) throw ParseError(line_no, "expected 5 trace columns");
    TraceRecord r;
    try {
      r.outer_k = std::stoll(fields[0]);
      r.inner_k = std::stoll(fields[1]);
      r.cumulative_bits = std::stoull(fields[2]);
      r.primal_gap = parse_real(fields[3]);
      r.wall_seconds = parse_real(fields[4]);
    } catch (const std::exception&) {
      throw ParseError(line_no, "malformed number in trace row");
    }
    trace.records.push_back(r);
  }
  return trace;
}

std::optional<TraceRecord> Trace::first_below(double target) const {
  for (const auto& r : records)
    if (r.primal_gap <= target) return r;
  return std::nullopt;
}

double Trace::final_gap() const {
  return records.empty() ? std::numeric_limits<double>::infinity()
                         : records.back().primal_gap;
}

TraceRecorder::TraceRecorder(const ProblemSpec& problem,
                             const NodePartition& partition, double p_star,
                             std::uint64_t stride)
    : problem_(problem.unshifted()),
      partition_(partition),
      p_star_(p_star),
      stride_(stride == 0 ? 1 : stride),
      start_(std::chrono::steady_clock::now()) {}

std::optional<double> TraceRecorder::observe(std::int64_t outer_k,
                                             std::int64_t inner_k,
                                             std::uint64_t step,
                                             std::uint64_t bits, const Vector& x,
                                             bool force) {
  if (!force && step % stride_ != 0) return std::nullopt;
  if (last_step_ && *last_step_ == step && !trace_.records.empty() &&
      trace_.records.back().cumulative_bits == bits)
    return std::nullopt;
  const double gap = primal_value(problem_, partition_, x) - p_star_;
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  trace_.records.push_back({outer_k, inner_k, bits, gap, elapsed});
  last_step_ = step;
  last_gap_ = gap;
  return gap;
}

bool limits_reached(const RunLimits& limits, std::uint64_t steps_done,
                    std::uint64_t bits, std::optional<double> last_gap) {
  if (steps_done >= limits.max_steps) return true;
  if (limits.bit_cap && bits >= *limits.bit_cap) return true;
  if (limits.stop_gap && last_gap && *last_gap <= *limits.stop_gap) return true;
  return false;
}

}  // namespace ecopt
