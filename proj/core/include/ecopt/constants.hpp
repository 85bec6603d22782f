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

#ifndef ECOPT_CONSTANTS_HPP
#define ECOPT_CONSTANTS_HPP

#include <cstdint>
#include <span>

#include "ecopt/dataset.hpp"
#include "ecopt/simnet.hpp"

namespace ecopt {

/// Data-dependent constants shared by the solvers and the kappa selectors.
struct ProblemConstants {
  double R_m = 0.0;       // max_i ||A_i||
  double R_bar_sq = 0.0;  // max_tau lambda_max((1/m) sum_{i in tau} A_i A_i^T)
  double R_sq = 0.0;      // (1/N) lambda_max(sum_i A_i A_i^T)
  double L = 0.0;         // R_m^2 / gamma
  double L_bar = 0.0;     // R_bar^2 / gamma
  double L_f = 0.0;       // R^2 / gamma
};

struct PowerIterationOptions {
  double relative_tolerance = 1e-9;
  int max_iterations = 5000;
  std::uint64_t seed = 0x5eed;
};

/// lambda_max(sum_{row in rows} row row^T) by power iteration on the Gram
/// operator. Throws ConstantEstimationError on non-convergence.
double largest_gram_eigenvalue(std::span<const SparseRow* const> rows, int dim,
                               const PowerIterationOptions& options = {});

ProblemConstants compute_constants(const NodePartition& partition, double gamma,
                                   const PowerIterationOptions& options = {});

}  // namespace ecopt

#endif  // ECOPT_CONSTANTS_HPP
