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

#include "ecopt/eclsvrg.hpp"

#include <string>
#include <vector>

#include "ecopt/errors.hpp"

namespace ecopt {

namespace {

void check_compressor(const CompressorSpec& spec, int dim, const char* role) {
  if (spec.dim() != dim)
    throw DimensionMismatch(std::string(role) + " compressor has dimension " +
                            std::to_string(spec.dim()) + ", data has " +
                            std::to_string(dim));
  if (!spec.is_contraction())
    throw ConfigError(std::string(role) + " must be a contraction compressor, got " +
                      spec.name());
}

void check_table(const NodeTable& table, int nodes, int dim, const char* what) {
  if (static_cast<int>(table.size()) != nodes)
    throw DimensionMismatch(std::string(what) + " table needs one row per node");
  for (const auto& row : table)
    if (row.size() != dim)
      throw DimensionMismatch(std::string(what) + " table row has wrong dimension");
}

// grad f_i at x for one sample; smooth mode adds the folded regularizer.
void sample_gradient(const ProblemSpec& problem, const SparseRow& row,
                     const Vector& x, LsvrgMode mode, double scale, Vector& out) {
  row.axpy(scale * loss_value_grad(problem, row, x).derivative, out);
  if (mode == LsvrgMode::kSmooth) out += scale * regularizer_gradient(problem, x);
}

}  // namespace

Vector eclsvrg_node_gradient(const ProblemSpec& problem,
                             const NodePartition& partition, int node,
                             const Vector& x, LsvrgMode mode) {
  Vector g = node_loss_gradient(problem, partition, node, x);
  if (mode == LsvrgMode::kSmooth) g += regularizer_gradient(problem, x);
  return g;
}

EclsvrgState eclsvrg_init(const SimContext& ctx, const EclsvrgParams& params,
                          EclsvrgInit init, std::uint64_t first_step) {
  const int n = ctx.partition.nodes();
  const int d = ctx.partition.dim();
  if (!(params.eta > 0.0)) throw ConfigError("EC-LSVRG needs eta > 0");
  if (!(params.p > 0.0 && params.p <= 1.0))
    throw ConfigError("EC-LSVRG needs checkpoint probability p in (0, 1]");
  check_compressor(params.q, d, "Q");
  check_compressor(params.q1, d, "Q1");
  if (init.x0.size() != d) throw DimensionMismatch("x0 has wrong dimension");
  ctx.problem.validate(d);
  if (params.mode == LsvrgMode::kSmooth && ctx.problem.custom_regularizer)
    throw ConfigError("smooth EC-LSVRG needs a differentiable regularizer");

  EclsvrgState state;
  state.params = params;
  state.x = init.x0;
  state.w = init.x0;
  state.step = first_step;
  state.x_sum = Vector::Zero(d);
  state.grad_w.resize(static_cast<std::size_t>(n));
  eclsvrg_refresh_checkpoint(state, ctx);

  if (init.h_table) {
    check_table(*init.h_table, n, d, "h");
    state.h_node = std::move(*init.h_table);
  } else {
    state.h_node = state.grad_w;
    charge_full_sync(ctx.ledger, n, d);
  }
  if (init.e_table) {
    check_table(*init.e_table, n, d, "e");
    state.e = std::move(*init.e_table);
  } else {
    state.e = zero_table(n, d);
  }
  state.h = table_mean(state.h_node);
  return state;
}

void eclsvrg_refresh_checkpoint(EclsvrgState& state, const SimContext& ctx) {
  const int n = ctx.partition.nodes();
  state.grad_w.resize(static_cast<std::size_t>(n));
  ctx.cluster.for_each_node(n, [&](int tau) {
    state.grad_w[tau] = eclsvrg_node_gradient(ctx.problem, ctx.partition, tau,
                                              state.w, state.params.mode);
  });
}

StepReport eclsvrg_step(EclsvrgState& state, const SimContext& ctx) {
  const int n = ctx.partition.nodes();
  const int m = ctx.partition.per_node();
  const double eta = state.params.eta;
  const std::uint64_t k = state.step;
  const std::uint64_t bits_before = ctx.ledger.cumulative_bits();

  StepReport report;
  report.round = ctx.ledger.next_round();
  std::vector<Vector> y_msg(static_cast<std::size_t>(n));
  std::vector<Vector> z_msg(static_cast<std::size_t>(n));
  std::vector<std::uint64_t> y_bits(static_cast<std::size_t>(n));
  std::vector<std::uint64_t> z_bits(static_cast<std::size_t>(n));

  ctx.cluster.for_each_node(n, [&](int tau) {
    const int i = sample_index(ctx.streams, tau, k, m);
    const SparseRow& row = ctx.partition.row(tau, i);
    Vector g = state.grad_w[tau] - state.h_node[tau];
    sample_gradient(ctx.problem, row, state.x, state.params.mode, 1.0, g);
    sample_gradient(ctx.problem, row, state.w, state.params.mode, -1.0, g);

    Vector v = eta * g + state.e[tau];
    Rng rq = ctx.streams.stream(Stream::kCompressorQ, tau, k);
    CompressionResult y = compress(state.params.q, v, rq);
    state.e[tau] = v - y.vector;

    Rng rq1 = ctx.streams.stream(Stream::kCompressorQ1, tau, k);
    CompressionResult z =
        compress(state.params.q1, state.grad_w[tau] - state.h_node[tau], rq1);
    state.h_node[tau] += z.vector;

    y_msg[tau] = std::move(y.vector);
    y_bits[tau] = y.bits;
    z_msg[tau] = std::move(z.vector);
    z_bits[tau] = z.bits;
  });

  const Vector y_bar = aggregate_average(y_msg, y_bits, ctx.ledger,
                                         MessageKind::kCompressed);
  const Vector z_bar = aggregate_average(z_msg, z_bits, ctx.ledger,
                                         MessageKind::kLearnerUpdate);
  ctx.ledger.charge(0, MessageKind::kCheckpointCoin, 1);

  Vector x_half = state.x - (y_bar + eta * state.h);
  Vector x_next = state.params.mode == LsvrgMode::kSmooth
                      ? std::move(x_half)
                      : prox_reg(ctx.problem, x_half, eta);
  if (!x_next.allFinite()) throw NumericalOverflow("EC-LSVRG iterate is not finite");

  Rng coin = ctx.streams.stream(Stream::kCheckpoint, 0, k);
  if (coin.bernoulli(state.params.p)) {
    state.w = state.x;
    eclsvrg_refresh_checkpoint(state, ctx);
  }
  state.x = std::move(x_next);
  state.h += z_bar;
  state.x_sum += state.x;
  ++state.x_count;
  ++state.step;

  report.uplink_bits_per_node.resize(static_cast<std::size_t>(n));
  for (int tau = 0; tau < n; ++tau)
    report.uplink_bits_per_node[tau] = y_bits[tau] + z_bits[tau] + (tau == 0 ? 1 : 0);
  report.total_bits = ctx.ledger.cumulative_bits() - bits_before;
  return report;
}

Vector eclsvrg_average_iterate(const EclsvrgState& state) {
  if (state.x_count == 0) return state.x;
  return state.x_sum / static_cast<double>(state.x_count);
}

}  // namespace ecopt
