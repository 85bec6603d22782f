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

#ifndef ECOPT_REFERENCE_HPP
#define ECOPT_REFERENCE_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "ecopt/problem.hpp"
#include "ecopt/simnet.hpp"

namespace ecopt {

struct ReferenceOptions {
  /// Stop when ||grad P|| <= tolerance.
  double tolerance = 1e-12;
  int max_newton_iterations = 100;
  std::uint64_t max_gradient_iterations = 2'000'000;
  /// Dense Newton is used up to this dimension; beyond it the accelerated
  /// gradient route is primary.
  int newton_max_dim = 4096;
  /// Run the second, independent route and require agreement on P*.
  bool cross_check = false;
  double agreement = 1e-10;
};

struct ReferenceResult {
  double p_star = 0.0;
  Vector x_star;
  double gradient_norm = 0.0;
  std::uint64_t iterations = 0;
  std::optional<double> cross_check_value;
};

/// Minimiser of the strongly convex P. Primary route: damped Newton with a
/// dense Hessian; second route: restarted Nesterov acceleration with step
/// 1/(L_f + lambda). Throws ReferenceError when a route stalls or the two
/// disagree.
ReferenceResult reference_optimum(const ProblemSpec& spec,
                                  const NodePartition& partition,
                                  const ReferenceOptions& options = {});

/// Restarted accelerated gradient descent on P alone.
ReferenceResult accelerated_gradient_optimum(const ProblemSpec& spec,
                                             const NodePartition& partition,
                                             const ReferenceOptions& options = {});

/// alpha_i = -phi'(<A_i, x>), the dual matched to a primal point.
Vector matched_dual(const ProblemSpec& spec, const NodePartition& partition,
                    const Vector& x);

/// P* cache on disk keyed by (data hash, loss, lambda, ridge target).
class ReferenceCache {
 public:
  explicit ReferenceCache(std::filesystem::path directory);

  static std::string key(const ProblemSpec& spec, const NodePartition& partition);

  std::optional<double> lookup(const std::string& key) const;
  void store(const std::string& key, const ReferenceResult& result) const;

 private:
  std::filesystem::path directory_;
};

}  // namespace ecopt

#endif  // ECOPT_REFERENCE_HPP
