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

#include "ecopt/ecspdc.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "ecopt/errors.hpp"
#include "ecopt/logging.hpp"

namespace ecopt {

double spdc_radius_squared(const ProblemConstants& c, int m, int n, double delta,
                           double delta1, SpdcRadius mode) {
  if (!(delta > 0.0 && delta <= 1.0) || !(delta1 > 0.0 && delta1 <= 1.0))
    throw ConfigError("delta and delta1 must lie in (0, 1]");
  const double r2 = c.R_sq;
  const double rb2 = c.R_bar_sq;
  const double rm2 = c.R_m * c.R_m;
  const double dd = delta * delta;
  const double mm = static_cast<double>(m) * m;
  const double base = 2.0 * r2 + 2.0 * rm2 / n;
  if (mode == SpdcRadius::kR2) {
    const double bracket = 14.0 * rb2 / dd + 7.0 * rm2 / (2.0 * delta) +
                           84.0 * (1.0 - delta1) * rb2 / (dd * delta1 * delta1 * mm) +
                           42.0 * rm2 / (dd * delta1 * mm);
    return base + 0.75 * (1.0 - delta) * bracket;
  }
  const double bracket =
      2.0 * r2 / dd + 11.0 * rm2 / (2.0 * delta * n) +
      12.0 * (1.0 - delta) * rb2 / (dd * n) +
      12.0 * r2 / (5.0 * dd * delta1 * delta1 * mm) +
      228.0 * rm2 / (5.0 * dd * delta1 * mm * n) +
      432.0 * (1.0 - delta1) * rb2 / (5.0 * dd * delta1 * delta1 * mm * n);
  return base + 5.25 * (1.0 - delta) * bracket;
}

SpdcParameters spdc_parameters(double radius_sq, int m, double lambda,
                               double gamma, double delta, double delta1) {
  if (!(radius_sq > 0.0)) throw ConfigError("SPDC radius must be positive");
  if (!(lambda > 0.0) || !(gamma > 0.0))
    throw ConfigError("SPDC parameters need lambda > 0 and gamma > 0");
  const double r = std::sqrt(radius_sq);
  SpdcParameters p;
  p.radius_sq = radius_sq;
  p.sigma = std::sqrt(m * lambda / gamma) / (2.0 * r);
  p.eta = std::sqrt(gamma / (m * lambda)) / (2.0 * r);
  const double rate = 1.0 / (m + 4.0 * r * std::sqrt(m / (lambda * gamma)));
  p.theta = 1.0 - std::min({rate, delta / 6.0, delta1 / 6.0});
  return p;
}

SpdcParameters ecspdc_configure(const ProblemConstants& constants, int m, int n,
                                double lambda, double gamma, double delta,
                                double delta1, SpdcRadius mode,
                                bool allow_small_radius) {
  const double radius_sq = spdc_radius_squared(constants, m, n, delta, delta1, mode);
  const double ratio = radius_sq / (lambda * gamma);
  if (ratio < 1.0) {
    const std::string msg = "SPDC radius^2/(lambda gamma) = " + std::to_string(ratio) +
                            " < 1, outside the analysed regime";
    if (!allow_small_radius) throw ConfigError(msg);
    log_warning(msg);
  }
  return spdc_parameters(radius_sq, m, lambda, gamma, delta, delta1);
}

EcspdcState ecspdc_init(const SimContext& ctx, const EcspdcParams& params,
                        EcspdcInit init, std::uint64_t first_step) {
  const int n = ctx.partition.nodes();
  const int m = ctx.partition.per_node();
  const int d = ctx.partition.dim();
  const auto total = static_cast<Eigen::Index>(ctx.partition.total());
  ctx.problem.validate(d);
  if (!(params.sigma > 0.0) || !(params.eta > 0.0))
    throw ConfigError("ECSPDC needs sigma > 0 and eta > 0");
  if (!(params.theta >= 0.0 && params.theta < 1.0))
    throw ConfigError("ECSPDC needs theta in [0, 1)");
  for (const auto* q : {&params.q, &params.q1}) {
    if (q->dim() != d) throw DimensionMismatch("compressor has wrong dimension");
    if (!q->is_contraction())
      throw ConfigError("ECSPDC needs contraction compressors, got " + q->name());
  }
  if (init.x0.size() != d) throw DimensionMismatch("x0 has wrong dimension");

  EcspdcState state;
  state.params = params;
  state.step = first_step;
  state.x = init.x0;
  state.z = init.x0;
  state.y = init.y ? std::move(*init.y) : Vector::Zero(total);
  if (state.y.size() != total) throw DimensionMismatch("y needs one entry per sample");
  const auto [lo, hi] = dual_domain(ctx.problem);
  for (Eigen::Index g = 0; g < total; ++g)
    if (!(state.y[g] >= lo && state.y[g] <= hi))
      throw DomainError("initial dual outside the conjugate domain");

  state.u = zero_table(n, d);
  for (int tau = 0; tau < n; ++tau) {
    for (int i = 0; i < m; ++i) {
      const auto g = static_cast<Eigen::Index>(ctx.partition.global_index(tau, i));
      ctx.partition.row(tau, i).axpy(state.y[g] / m, state.u[tau]);
    }
  }
  if (init.h_table) {
    if (static_cast<int>(init.h_table->size()) != n)
      throw DimensionMismatch("h table needs one row per node");
    for (const auto& row : *init.h_table)
      if (row.size() != d) throw DimensionMismatch("h row has wrong dimension");
    state.h_node = std::move(*init.h_table);
  } else if (init.h_init == SpdcLearnerInit::kSynchronized) {
    state.h_node = state.u;
    charge_full_sync(ctx.ledger, n, d);
  } else {
    state.h_node = zero_table(n, d);
  }
  state.e = zero_table(n, d);
  state.h = table_mean(state.h_node);
  return state;
}

StepReport ecspdc_step(EcspdcState& state, const SimContext& ctx) {
  const int n = ctx.partition.nodes();
  const int m = ctx.partition.per_node();
  const auto& prm = state.params;
  const std::uint64_t k = state.step;
  const std::uint64_t bits_before = ctx.ledger.cumulative_bits();

  StepReport report;
  report.round = ctx.ledger.next_round();
  std::vector<Vector> delta_msg(static_cast<std::size_t>(n));
  std::vector<Vector> learn_msg(static_cast<std::size_t>(n));
  std::vector<std::uint64_t> delta_bits(static_cast<std::size_t>(n));
  std::vector<std::uint64_t> learn_bits(static_cast<std::size_t>(n));

  ctx.cluster.for_each_node(n, [&](int tau) {
    const int i = sample_index(ctx.streams, tau, k, m);
    const auto g = static_cast<Eigen::Index>(ctx.partition.global_index(tau, i));
    const SparseRow& row = ctx.partition.row(tau, i);
    const double y_new = dual_prox(ctx.problem, row.dot(state.z), state.y[g], prm.sigma);
    const double dy = y_new - state.y[g];

    const Vector gap = state.u[tau] - state.h_node[tau];
    Vector v = gap + state.e[tau];
    row.axpy(dy, v);
    Rng rq = ctx.streams.stream(Stream::kCompressorQ, tau, k);
    CompressionResult delta = compress(prm.q, v, rq);
    state.e[tau] = v - delta.vector;

    Rng rq1 = ctx.streams.stream(Stream::kCompressorQ1, tau, k);
    CompressionResult learn = compress(prm.q1, gap, rq1);

    row.axpy(dy / m, state.u[tau]);
    state.h_node[tau] += learn.vector;
    state.y[g] = y_new;

    delta_msg[tau] = std::move(delta.vector);
    delta_bits[tau] = delta.bits;
    learn_msg[tau] = std::move(learn.vector);
    learn_bits[tau] = learn.bits;
  });

  const Vector delta_bar = aggregate_average(delta_msg, delta_bits, ctx.ledger,
                                             MessageKind::kCompressed);
  const Vector learn_bar = aggregate_average(learn_msg, learn_bits, ctx.ledger,
                                             MessageKind::kLearnerUpdate);

  Vector x_next = prox_reg(ctx.problem, state.x - prm.eta * (state.h + delta_bar), prm.eta);
  if (!x_next.allFinite()) throw NumericalOverflow("ECSPDC iterate is not finite");
  state.h += learn_bar;
  state.z = x_next + prm.theta * (x_next - state.x);
  state.x = std::move(x_next);
  ++state.step;

  report.uplink_bits_per_node.resize(static_cast<std::size_t>(n));
  for (int tau = 0; tau < n; ++tau)
    report.uplink_bits_per_node[tau] = delta_bits[tau] + learn_bits[tau];
  report.total_bits = ctx.ledger.cumulative_bits() - bits_before;
  return report;
}

}  // namespace ecopt
