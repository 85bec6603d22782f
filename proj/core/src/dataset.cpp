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

#include "ecopt/dataset.hpp"

#include <bit>
#include <cstring>

#include "ecopt/errors.hpp"

namespace ecopt {

namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

void fnv_bytes(std::uint64_t& h, const void* data, std::size_t size) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < size; ++i) {
    h ^= bytes[i];
    h *= kFnvPrime;
  }
}

template <class T>
void fnv_value(std::uint64_t& h, const T& value) {
  fnv_bytes(h, &value, sizeof(T));
}

}  // namespace

SparseRow SparseRow::from_dense(const Vector& x) {
  SparseRow row;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    if (x[j] != 0.0) {
      row.indices.push_back(static_cast<std::int32_t>(j));
      row.values.push_back(x[j]);
    }
  }
  return row;
}

void Dataset::add(SparseRow row, double label) {
  if (row.indices.size() != row.values.size())
    throw DimensionMismatch("sparse row has mismatched index/value lengths");
  if (!row.indices.empty() && row.indices.back() >= dim)
    throw DimensionMismatch("sparse row index exceeds dataset dimension");
  rows.push_back(std::move(row));
  labels.push_back(label);
}

void Dataset::fold_labels() {
  if (labels_folded) return;
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i].scale(-labels[i]);
  labels_folded = true;
}

std::uint64_t Dataset::content_hash() const {
  std::uint64_t h = kFnvOffset;
  fnv_value(h, dim);
  fnv_value(h, labels_folded);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    fnv_value(h, labels[i]);
    fnv_value(h, rows[i].indices.size());
    fnv_bytes(h, rows[i].indices.data(),
              rows[i].indices.size() * sizeof(std::int32_t));
    fnv_bytes(h, rows[i].values.data(), rows[i].values.size() * sizeof(double));
  }
  return h;
}

}  // namespace ecopt
