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

#include "ecopt/catalyst.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ecopt/errors.hpp"

namespace ecopt {

double alpha_next(double alpha_prev, double q) {
  const double a2 = alpha_prev * alpha_prev;
  const double b = a2 - q;
  return 0.5 * (-b + std::sqrt(b * b + 4.0 * a2));
}

double beta_coeff(double alpha_prev, double alpha) {
  return alpha_prev * (1.0 - alpha_prev) / (alpha_prev * alpha_prev + alpha);
}

double epsilon_k(int k, double epsilon0, double rho0) {
  return (2.0 / 9.0) * epsilon0 * std::pow(1.0 - rho0, k);
}

double cost_ratio(const CompressorSpec& q, int dim) {
  const auto bits = message_bits(q, q.k(), dim);
  return 64.0 * dim / static_cast<double>(bits);
}

double optimal_kappa_lsvrg(const ProblemConstants& c, double delta, int n,
                           double cost_ratio, bool assume_mean_delta,
                           double lambda) {
  const double slack = std::sqrt(1.0 - delta);
  double a = c.L_f + c.L / n;
  if (assume_mean_delta) {
    a += slack * c.L_f / delta;
  } else {
    a += slack * (std::sqrt(c.L_f * c.L_bar) + std::sqrt(delta * c.L_f * c.L)) / delta;
  }
  const double lambda1 = a / (1.0 / delta + cost_ratio);
  return std::max(lambda1, lambda) - lambda;
}

double optimal_kappa_sdca(const ProblemConstants& c, double delta, int m, int n,
                          double gamma, double cost_ratio,
                          bool assume_mean_delta, double lambda) {
  const double slack = std::sqrt(1.0 - delta);
  const double r = std::sqrt(c.R_sq);
  const double r_bar = std::sqrt(c.R_bar_sq);
  double a = c.R_m * c.R_m / (n * gamma) + c.R_sq / gamma;
  if (assume_mean_delta) {
    a += slack * c.R_sq / (delta * gamma);
  } else {
    a += slack * r * r_bar / (delta * gamma) +
         slack * r * c.R_m / (std::sqrt(delta) * gamma);
  }
  const double lambda3 = a / (1.0 / delta + m + cost_ratio);
  return std::max(lambda, lambda3) - lambda;
}

CatalystSchedule CatalystSchedule::make(double lambda, double kappa,
                                        double epsilon0, WarmStart warm_start,
                                        InnerBudget budget,
                                        std::optional<double> rho0) {
  if (!(lambda > 0.0)) throw ConfigError("Catalyst needs lambda > 0");
  if (!(kappa >= 0.0)) throw ConfigError("Catalyst needs kappa >= 0");
  CatalystSchedule s;
  s.kappa = kappa;
  s.q = lambda / (lambda + kappa);
  s.alpha0 = std::sqrt(s.q);
  s.rho0 = rho0 ? *rho0 : 0.9 * s.alpha0;
  s.epsilon0 = epsilon0;
  s.warm_start = warm_start;
  s.budget = std::move(budget);
  s.validate();
  return s;
}

void CatalystSchedule::validate() const {
  if (!(kappa >= 0.0)) throw ConfigError("kappa must be nonnegative");
  if (!(q > 0.0 && q <= 1.0)) throw ConfigError("q must lie in (0, 1]");
  const double sq = std::sqrt(q);
  if (!(rho0 > 0.0 && rho0 < sq))
    throw ConfigError("rho0 must lie strictly between 0 and sqrt(q) = " +
                      std::to_string(sq));
  if (std::abs(alpha0 - sq) > 1e-15) throw ConfigError("alpha0 must equal sqrt(q)");
  if (!(epsilon0 > 0.0) || !std::isfinite(epsilon0))
    throw ConfigError("epsilon0 must be positive");
}

double catalyst_epsilon0(const ProblemSpec& problem,
                         const NodePartition& partition, const Vector& x0,
                         bool dual_available) {
  const ProblemSpec base = problem.unshifted();
  double eps0 = primal_value(base, partition, x0);
  if (dual_available)
    eps0 -= dual_value(base, partition,
                       Vector::Zero(static_cast<Eigen::Index>(partition.total())));
  return eps0;
}

namespace {

struct BudgetPlan {
  std::uint64_t max_steps = 0;
  std::uint64_t stride = 0;  // 0: no gap checks
  bool oracle = false;
  bool duality = false;
};

BudgetPlan plan_for(const InnerBudget& budget) {
  BudgetPlan plan;
  if (const auto* f = std::get_if<FixedIters>(&budget)) {
    plan.max_steps = f->iterations;
  } else if (const auto* o = std::get_if<OracleGap>(&budget)) {
    plan.max_steps = o->max_iterations;
    plan.stride = std::max<std::uint64_t>(o->check_stride, 1);
    plan.oracle = true;
  } else {
    const auto& g = std::get<DualityGapBudget>(budget);
    plan.max_steps = g.max_iterations;
    plan.stride = std::max<std::uint64_t>(g.check_stride, 1);
    plan.duality = true;
  }
  return plan;
}

}  // namespace

CatalystResult catalyst_run(const CatalystRun& run, const InnerConfig& inner,
                            const CatalystSchedule& schedule, int outer_iters,
                            const Vector& x0, TraceRecorder* recorder,
                            const RunLimits& limits, const CatalystHooks& hooks) {
  schedule.validate();
  const ProblemSpec base = run.problem.unshifted();
  const int d = run.partition.dim();
  const int n = run.partition.nodes();
  const int m = run.partition.per_node();
  base.validate(d);
  if (!(base.lambda > 0.0)) throw ConfigError("Catalyst needs lambda > 0");
  if (x0.size() != d) throw DimensionMismatch("x0 has wrong dimension");

  const bool use_sdca = std::holds_alternative<EcsdcaInnerConfig>(inner);
  const BudgetPlan plan = plan_for(schedule.budget);
  if (plan.duality && !use_sdca)
    throw ConfigError("the duality-gap budget needs the EC-SDCA inner solver");
  const bool carry = schedule.warm_start == WarmStart::kCompressedCarry;
  const double kappa = schedule.kappa;

  CatalystResult result;
  Vector x_prev = x0;
  Vector y_prev = x0;   // y^{k-1}
  Vector y_prev2 = x0;  // y^{k-2}
  double alpha = schedule.alpha0;
  std::optional<EclsvrgState> lsvrg;
  std::optional<EcsdcaState> sdca;

  for (int k = 1; k <= outer_iters; ++k) {
    if (limits_reached(limits, result.total_steps, run.ledger.cumulative_bits(),
                       recorder ? recorder->last_gap() : std::nullopt)) {
      result.stopped_by_limits = true;
      break;
    }
    const double eps = epsilon_k(k, schedule.epsilon0, schedule.rho0);
    const ProblemSpec gk = base.shifted(kappa, y_prev);
    const SimContext ctx{gk, run.partition, run.ledger, run.cluster, run.streams};

    if (use_sdca) {
      const auto& cfg = std::get<EcsdcaInnerConfig>(inner);
      EcsdcaParams params;
      params.q = cfg.q;
      params.theta = cfg.theta ? *cfg.theta
                               : default_sdca_theta(run.constants, m, n, base.gamma,
                                                    base.lambda + kappa);
      EcsdcaInit init;
      if (sdca) init.alpha = sdca->alpha;
      if (carry) {
        if (sdca) {
          init.u = sdca->u;
          init.e = sdca->e;
        } else {
          init.u = Vector::Zero(d);
          init.e = zero_table(n, d);
        }
      }
      sdca = ecsdca_init(ctx, params, std::move(init), result.total_steps);
      if (hooks.sdca) hooks.sdca(k, *sdca, gk, true);
    } else {
      const auto& cfg = std::get<EclsvrgInnerConfig>(inner);
      EclsvrgParams params;
      params.eta = cfg.eta;
      params.q = cfg.q;
      params.q1 = cfg.q1;
      params.p = cfg.p ? *cfg.p : cfg.q1.delta_bound();
      params.mode = LsvrgMode::kSmooth;
      EclsvrgInit init;
      init.x0 = x_prev;
      if (carry) {
        if (lsvrg) {
          NodeTable h = lsvrg->h_node;
          if (cfg.h_carry == LsvrgHCarry::kKappaCorrected) {
            const Vector shift = kappa * (y_prev2 - y_prev);
            for (auto& row : h) row += shift;
          }
          init.h_table = std::move(h);
          init.e_table = lsvrg->e;
        } else {
          init.h_table = zero_table(n, d);
          init.e_table = zero_table(n, d);
        }
      }
      lsvrg = eclsvrg_init(ctx, params, std::move(init), result.total_steps);
      if (hooks.lsvrg) hooks.lsvrg(k, *lsvrg, gk, true);
    }

    auto current_output = [&]() -> Vector {
      if (use_sdca) return ecsdca_primal(*sdca, gk);
      const auto& cfg = std::get<EclsvrgInnerConfig>(inner);
      return cfg.output == LsvrgOutput::kAveraged ? eclsvrg_average_iterate(*lsvrg)
                                                  : lsvrg->x;
    };
    auto current_iterate = [&]() -> Vector {
      return use_sdca ? ecsdca_primal(*sdca, gk) : lsvrg->x;
    };

    const double g_start = primal_value(gk, run.partition, current_iterate());
    const double diverge_at = 1e6 * std::max(std::abs(g_start), 1e-300);
    const double g_star = plan.oracle
                              ? std::get<OracleGap>(schedule.budget).subproblem_optimum(gk)
                              : 0.0;

    OuterRecord record;
    record.k = k;
    record.epsilon = eps;
    record.budget_met = !plan.oracle && !plan.duality;

    auto check_gap = [&]() {
      const Vector out = current_output();
      const double value = primal_value(gk, run.partition, out);
      if (!(value <= diverge_at))
        throw InnerDivergence("inner objective grew from " + std::to_string(g_start) +
                              " to " + std::to_string(value) + " at outer step " +
                              std::to_string(k));
      const double gap = plan.oracle ? value - g_star
                                     : value - dual_value(gk, run.partition, sdca->alpha);
      record.subproblem_gap = gap;
      return gap <= eps;
    };

    std::uint64_t t = 0;
    bool done = plan.stride > 0 && check_gap();
    if (done) record.budget_met = true;
    while (!done && t < plan.max_steps) {
      if (limits_reached(limits, result.total_steps, run.ledger.cumulative_bits(),
                         recorder ? recorder->last_gap() : std::nullopt)) {
        result.stopped_by_limits = true;
        break;
      }
      if (use_sdca) {
        ecsdca_step(*sdca, ctx);
      } else {
        eclsvrg_step(*lsvrg, ctx);
      }
      ++t;
      ++result.total_steps;
      if (recorder)
        recorder->observe(k, static_cast<std::int64_t>(t), result.total_steps,
                          run.ledger.cumulative_bits(), current_iterate());
      if (plan.stride > 0 && t % plan.stride == 0 && check_gap()) {
        record.budget_met = true;
        done = true;
      }
    }
    if (plan.stride == 0) {
      const double value = primal_value(gk, run.partition, current_output());
      if (!(value <= diverge_at))
        throw InnerDivergence("inner objective grew from " + std::to_string(g_start) +
                              " to " + std::to_string(value) + " at outer step " +
                              std::to_string(k));
    }
    if (hooks.sdca && use_sdca) hooks.sdca(k, *sdca, gk, false);
    if (hooks.lsvrg && !use_sdca) hooks.lsvrg(k, *lsvrg, gk, false);

    const Vector x_k = current_output();
    const double alpha_k = alpha_next(alpha, schedule.q);
    const double beta = beta_coeff(alpha, alpha_k);
    Vector y_k = x_k + beta * (x_k - x_prev);

    record.inner_steps = t;
    record.alpha = alpha_k;
    record.beta = beta;
    record.bits_after = run.ledger.cumulative_bits();
    record.x = x_k;
    result.outer.push_back(std::move(record));
    if (recorder)
      recorder->observe(k, static_cast<std::int64_t>(t), result.total_steps,
                        run.ledger.cumulative_bits(), x_k, true);

    alpha = alpha_k;
    x_prev = x_k;
    y_prev2 = std::move(y_prev);
    y_prev = std::move(y_k);
    if (result.stopped_by_limits) break;
  }
  result.x = x_prev;
  return result;
}

}  // namespace ecopt
