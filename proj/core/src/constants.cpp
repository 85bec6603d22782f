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

#include "ecopt/constants.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "ecopt/errors.hpp"
#include "ecopt/random.hpp"

namespace ecopt {

namespace {

Vector gram_apply(std::span<const SparseRow* const> rows, const Vector& v) {
  Vector out = Vector::Zero(v.size());
  for (const SparseRow* row : rows) row->axpy(row->dot(v), out);
  return out;
}

}  // namespace

double largest_gram_eigenvalue(std::span<const SparseRow* const> rows, int dim,
                               const PowerIterationOptions& options) {
  if (rows.empty() || dim == 0) return 0.0;
  Rng rng(options.seed);
  Vector v(dim);
  for (int j = 0; j < dim; ++j) v[j] = 0.5 + rng.uniform();
  v.normalize();

  double estimate = 0.0;
  for (int it = 0; it < options.max_iterations; ++it) {
    Vector w = gram_apply(rows, v);
    const double rayleigh = v.dot(w);
    const double norm = w.norm();
    if (!std::isfinite(norm)) throw ConstantEstimationError("power iteration overflowed", v);
    if (norm == 0.0) return 0.0;
    if (it > 0 && std::abs(rayleigh - estimate) <=
                      options.relative_tolerance * std::abs(rayleigh))
      return rayleigh;
    estimate = rayleigh;
    v = w / norm;
  }
  throw ConstantEstimationError(
      "power iteration did not reach relative tolerance in " +
          std::to_string(options.max_iterations) + " iterations",
      v);
}

ProblemConstants compute_constants(const NodePartition& partition, double gamma,
                                   const PowerIterationOptions& options) {
  if (partition.total() == 0) throw ConfigError("empty partition");
  if (!(gamma > 0.0)) throw ConfigError("gamma must be positive");
  ProblemConstants c;

  std::vector<const SparseRow*> all;
  all.reserve(partition.total());
  double max_sq = 0.0;
  for (std::size_t g = 0; g < partition.total(); ++g) {
    all.push_back(&partition.row(g));
    max_sq = std::max(max_sq, partition.row(g).squared_norm());
  }
  c.R_m = std::sqrt(max_sq);

  const int m = partition.per_node();
  for (int tau = 0; tau < partition.nodes(); ++tau) {
    std::span<const SparseRow* const> node_rows(
        all.data() + partition.global_index(tau, 0), static_cast<std::size_t>(m));
    c.R_bar_sq = std::max(
        c.R_bar_sq, largest_gram_eigenvalue(node_rows, partition.dim(), options) / m);
  }
  c.R_sq = largest_gram_eigenvalue(all, partition.dim(), options) /
           static_cast<double>(partition.total());

  c.L = max_sq / gamma;
  c.L_bar = c.R_bar_sq / gamma;
  c.L_f = c.R_sq / gamma;
  return c;
}

}  // namespace ecopt
