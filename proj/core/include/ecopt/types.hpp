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

#ifndef ECOPT_TYPES_HPP
#define ECOPT_TYPES_HPP

#include <cstdint>
#include <vector>

#include <Eigen/Core>

namespace ecopt {

/// Dense iterate / message vector. Every iterate in the library is dense.
using Vector = Eigen::VectorXd;

/// One dense vector per simulated node.
using NodeTable = std::vector<Vector>;

inline NodeTable zero_table(int nodes, Eigen::Index dim) {
  return NodeTable(static_cast<std::size_t>(nodes), Vector::Zero(dim));
}

/// Arithmetic mean of a node table summed in node order.
inline Vector table_mean(const NodeTable& table) {
  Vector acc = Vector::Zero(table.empty() ? 0 : table.front().size());
  for (const auto& v : table) acc += v;
  if (!table.empty()) acc /= static_cast<double>(table.size());
  return acc;
}

}  // namespace ecopt

#endif  // ECOPT_TYPES_HPP
