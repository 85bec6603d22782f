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

#include "ecopt/ecsdca.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "ecopt/errors.hpp"

namespace ecopt {

double default_sdca_theta(const ProblemConstants& constants, int m, int n,
                          double gamma, double lambda_tilde) {
  const double v = constants.R_m * constants.R_m + n * constants.R_sq;
  const double big = lambda_tilde * gamma * static_cast<double>(m) * n;
  return big / (v + big) / m;
}

EcsdcaState ecsdca_init(const SimContext& ctx, const EcsdcaParams& params,
                        EcsdcaInit init, std::uint64_t first_step) {
  const int n = ctx.partition.nodes();
  const int d = ctx.partition.dim();
  const auto total = static_cast<Eigen::Index>(ctx.partition.total());
  ctx.problem.validate(d);
  if (ctx.problem.custom_regularizer)
    throw ConfigError("EC-SDCA needs the quadratic regularizer");
  if (!(params.theta > 0.0 && params.theta <= 1.0))
    throw ConfigError("EC-SDCA needs theta in (0, 1]");
  if (params.q.dim() != d) throw DimensionMismatch("Q has wrong dimension");
  if (!params.q.is_contraction())
    throw ConfigError("Q must be a contraction compressor, got " + params.q.name());

  EcsdcaState state;
  state.params = params;
  state.step = first_step;
  state.lambda_tilde = ctx.problem.strong_convexity();
  if (!(state.lambda_tilde > 0.0))
    throw ConfigError("EC-SDCA needs lambda + kappa > 0");

  state.alpha = init.alpha ? std::move(*init.alpha) : Vector::Zero(total);
  if (state.alpha.size() != total)
    throw DimensionMismatch("alpha needs one entry per sample");
  if (ctx.problem.loss == LossKind::kLogistic) {
    for (Eigen::Index g = 0; g < total; ++g)
      if (!(-state.alpha[g] >= 0.0 && -state.alpha[g] <= 1.0))
        throw DomainError("initial alpha outside [-1, 0]");
  }

  if (init.u) {
    if (!init.e) throw ConfigError("a provided u needs the matching error table e");
    if (init.u->size() != d) throw DimensionMismatch("u has wrong dimension");
    state.u = std::move(*init.u);
  } else {
    if (init.e) throw ConfigError("an error table needs the matching provided u");
    state.u = ecsdca_exact_aggregate(state, ctx.partition);
    charge_full_sync(ctx.ledger, n, d);
  }
  if (init.e) {
    if (static_cast<int>(init.e->size()) != n)
      throw DimensionMismatch("e table needs one row per node");
    for (const auto& row : *init.e)
      if (row.size() != d) throw DimensionMismatch("e row has wrong dimension");
    state.e = std::move(*init.e);
  } else {
    state.e = zero_table(n, d);
  }
  state.x = grad_gstar(ctx.problem, state.u);
  return state;
}

StepReport ecsdca_step(EcsdcaState& state, const SimContext& ctx) {
  const int n = ctx.partition.nodes();
  const int m = ctx.partition.per_node();
  const double theta_m = state.params.theta * m;
  const double scale = 1.0 / (state.lambda_tilde * m);
  const bool logistic = ctx.problem.loss == LossKind::kLogistic;
  const std::uint64_t k = state.step;
  const std::uint64_t bits_before = ctx.ledger.cumulative_bits();

  StepReport report;
  report.round = ctx.ledger.next_round();
  state.x = grad_gstar(ctx.problem, state.u);

  std::vector<Vector> y_msg(static_cast<std::size_t>(n));
  std::vector<std::uint64_t> y_bits(static_cast<std::size_t>(n));
  ctx.cluster.for_each_node(n, [&](int tau) {
    const int i = sample_index(ctx.streams, tau, k, m);
    const auto g = static_cast<Eigen::Index>(ctx.partition.global_index(tau, i));
    const SparseRow& row = ctx.partition.row(tau, i);
    const double grad = loss_value_grad(ctx.problem, row, state.x).derivative;
    double next = state.alpha[g] - theta_m * (state.alpha[g] + grad);
    if (logistic) next = -std::clamp(-next, kDualClip, 1.0 - kDualClip);
    const double delta_alpha = next - state.alpha[g];
    state.alpha[g] = next;

    Vector v = state.e[tau];
    row.axpy(scale * delta_alpha, v);
    Rng rq = ctx.streams.stream(Stream::kCompressorQ, tau, k);
    CompressionResult y = compress(state.params.q, v, rq);
    state.e[tau] = v - y.vector;
    y_msg[tau] = std::move(y.vector);
    y_bits[tau] = y.bits;
  });

  state.u += aggregate_average(y_msg, y_bits, ctx.ledger, MessageKind::kCompressed);
  if (!state.u.allFinite()) throw NumericalOverflow("EC-SDCA aggregate is not finite");
  ++state.step;

  report.uplink_bits_per_node = std::move(y_bits);
  report.total_bits = ctx.ledger.cumulative_bits() - bits_before;
  return report;
}

Vector ecsdca_primal(const EcsdcaState& state, const ProblemSpec& problem) {
  return grad_gstar(problem, state.u);
}

Vector ecsdca_virtual_aggregate(const EcsdcaState& state) {
  return state.u + table_mean(state.e);
}

Vector ecsdca_exact_aggregate(const EcsdcaState& state,
                              const NodePartition& partition) {
  return dual_aggregate(partition, state.alpha) / state.lambda_tilde;
}

}  // namespace ecopt
