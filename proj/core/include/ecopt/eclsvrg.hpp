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

#ifndef ECOPT_ECLSVRG_HPP
#define ECOPT_ECLSVRG_HPP

#include <cstdint>
#include <optional>

#include "ecopt/compressor.hpp"
#include "ecopt/solver_common.hpp"

namespace ecopt {

enum class LsvrgMode {
  /// f_i = phi(<A_i, .>), regularizer handled by prox.
  kComposite,
  /// Regularizer and Catalyst term folded into every f_i; prox is identity.
  kSmooth,
};

struct EclsvrgParams {
  double eta = 0.1;
  double p = 1.0;
  CompressorSpec q = CompressorSpec::identity(1);
  CompressorSpec q1 = CompressorSpec::identity(1);
  LsvrgMode mode = LsvrgMode::kComposite;
};

/// Missing tables mean FullGradientAt(x0) for h and zero for e.
struct EclsvrgInit {
  Vector x0;
  std::optional<NodeTable> h_table = std::nullopt;
  std::optional<NodeTable> e_table = std::nullopt;
};

struct EclsvrgState {
  EclsvrgParams params;
  Vector x;
  Vector w;
  NodeTable e;       // error memory per node
  NodeTable h_node;  // gradient learners
  Vector h;          // (1/n) sum h_node, maintained incrementally
  NodeTable grad_w;  // cached grad f^(tau)(w)
  std::uint64_t step = 0;  // global step id, keys the RNG streams
  Vector x_sum;            // running sum of x^1..x^K for averaged output
  std::uint64_t x_count = 0;
};

/// gradient of f^(tau) at x under `mode` (loss only for composite, loss plus
/// regularizer and shift for smooth).
Vector eclsvrg_node_gradient(const ProblemSpec& problem,
                             const NodePartition& partition, int node,
                             const Vector& x, LsvrgMode mode);

/// FullGradientAt(x0) costs one dense message per node.
EclsvrgState eclsvrg_init(const SimContext& ctx, const EclsvrgParams& params,
                          EclsvrgInit init, std::uint64_t first_step = 0);

StepReport eclsvrg_step(EclsvrgState& state, const SimContext& ctx);

/// Refresh the cached checkpoint gradients after w or the problem changed.
void eclsvrg_refresh_checkpoint(EclsvrgState& state, const SimContext& ctx);

/// Uniform average of the iterates produced since init (x0 if none).
Vector eclsvrg_average_iterate(const EclsvrgState& state);

}  // namespace ecopt

#endif  // ECOPT_ECLSVRG_HPP
