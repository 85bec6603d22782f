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

#ifndef ECOPT_DATASET_HPP
#define ECOPT_DATASET_HPP

#include <cstdint>
#include <vector>

#include "ecopt/types.hpp"

namespace ecopt {

/// Sparse feature row with 0-based, strictly increasing indices.
struct SparseRow {
  std::vector<std::int32_t> indices;
  std::vector<double> values;

  std::size_t nonzeros() const noexcept { return indices.size(); }

  double dot(const Vector& x) const noexcept {
    double acc = 0.0;
    for (std::size_t k = 0; k < indices.size(); ++k)
      acc += values[k] * x[indices[k]];
    return acc;
  }

  /// y += a * row
  void axpy(double a, Vector& y) const noexcept {
    for (std::size_t k = 0; k < indices.size(); ++k)
      y[indices[k]] += a * values[k];
  }

  double squared_norm() const noexcept {
    double acc = 0.0;
    for (double v : values) acc += v * v;
    return acc;
  }

  void scale(double a) noexcept {
    for (double& v : values) v *= a;
  }

  Vector to_dense(Eigen::Index dim) const {
    Vector out = Vector::Zero(dim);
    axpy(1.0, out);
    return out;
  }

  static SparseRow from_dense(const Vector& x);
};

/// Labelled samples. After fold_labels() each row holds -y_i * A_i and the
/// labels are no longer consulted by any loss.
struct Dataset {
  std::vector<SparseRow> rows;
  std::vector<double> labels;
  int dim = 0;
  bool labels_folded = false;

  std::size_t size() const noexcept { return rows.size(); }

  void add(SparseRow row, double label);

  /// A_i <- -y_i * A_i. Idempotent.
  void fold_labels();

  /// FNV-1a over dimension, rows and labels; stable across runs.
  std::uint64_t content_hash() const;
};

}  // namespace ecopt

#endif  // ECOPT_DATASET_HPP
