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

#ifndef ECOPT_ECSDCA_HPP
#define ECOPT_ECSDCA_HPP

#include <cstdint>
#include <optional>

#include "ecopt/compressor.hpp"
#include "ecopt/constants.hpp"
#include "ecopt/solver_common.hpp"

namespace ecopt {

struct EcsdcaParams {
  double theta = 0.0;
  CompressorSpec q = CompressorSpec::identity(1);
};

/// alpha defaults to zero. Without `u` the aggregate is computed exactly
/// from alpha (one dense message per node). A provided `u` needs the matching
/// error table `e`, otherwise the aggregate identity would break.
struct EcsdcaInit {
  std::optional<Vector> alpha = std::nullopt;
  std::optional<Vector> u = std::nullopt;
  std::optional<NodeTable> e = std::nullopt;
};

struct EcsdcaState {
  EcsdcaParams params;
  Vector alpha;  // one dual per global sample
  Vector u;      // compressed aggregate, scaled by 1/(lambda_tilde N)
  NodeTable e;
  Vector x;      // grad g*(u) from the latest step
  double lambda_tilde = 0.0;
  std::uint64_t step = 0;
};

/// theta = (1/m) * lt*gamma*N / (v + lt*gamma*N) with v = R_m^2 + n R^2.
double default_sdca_theta(const ProblemConstants& constants, int m, int n,
                          double gamma, double lambda_tilde);

EcsdcaState ecsdca_init(const SimContext& ctx, const EcsdcaParams& params,
                        EcsdcaInit init, std::uint64_t first_step = 0);

StepReport ecsdca_step(EcsdcaState& state, const SimContext& ctx);

/// x^{K+1} = grad g*(u^K), the iterate the next step would use.
Vector ecsdca_primal(const EcsdcaState& state, const ProblemSpec& problem);

/// u + (1/n) sum e_tau.
Vector ecsdca_virtual_aggregate(const EcsdcaState& state);

/// (1/(lambda_tilde N)) sum_i A_i alpha_i.
Vector ecsdca_exact_aggregate(const EcsdcaState& state,
                              const NodePartition& partition);

}  // namespace ecopt

#endif  // ECOPT_ECSDCA_HPP
