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

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "ecopt/catalyst.hpp"
#include "ecopt/errors.hpp"
#include "fixtures.hpp"

namespace ecopt {
namespace {

using testing::Sim;

TEST(CatalystScheduleTest, AlphaExamples) {
  EXPECT_DOUBLE_EQ(alpha_next(1.0, 1.0), 1.0);
  // a^2 + 0.21 a - 0.25 = 0
  const double a = alpha_next(0.5, 0.04);
  EXPECT_NEAR(a, (-0.21 + std::sqrt(0.0441 + 1.0)) / 2.0, 1e-15);
  EXPECT_NEAR(a * a, (1.0 - a) * 0.25 + 0.04 * a, 1e-15);
}

TEST(CatalystScheduleTest, SqrtQIsAFixedPoint) {
  for (double q : {1e-6, 1e-3, 0.04, 0.5, 1.0}) {
    const double s = std::sqrt(q);
    EXPECT_NEAR(alpha_next(s, q), s, 1e-15 * (1.0 + s));
    EXPECT_NEAR(beta_coeff(s, s), (1.0 - s) / (1.0 + s), 1e-14);
  }
}

TEST(CatalystScheduleTest, AlphaStaysInUnitInterval) {
  double a = 1.0;
  for (int k = 0; k < 200; ++k) {
    const double next = alpha_next(a, 1e-4);
    ASSERT_GT(next, 0.0);
    ASSERT_LE(next, a);
    a = next;
  }
  EXPECT_GE(a, 1e-2 - 1e-12);
}

TEST(CatalystScheduleTest, EpsilonExamples) {
  EXPECT_DOUBLE_EQ(epsilon_k(0, 9.0, 0.5), 2.0);
  EXPECT_DOUBLE_EQ(epsilon_k(3, 9.0, 0.5), 0.25);
}

TEST(CatalystScheduleTest, MakeAndValidate) {
  const auto s = CatalystSchedule::make(0.01, 0.99, 1.0, WarmStart::kFullSync, FixedIters{5});
  EXPECT_DOUBLE_EQ(s.q, 0.01);
  EXPECT_DOUBLE_EQ(s.alpha0, 0.1);
  EXPECT_DOUBLE_EQ(s.rho0, 0.09);
  EXPECT_THROW(CatalystSchedule::make(0.01, 0.99, 1.0, WarmStart::kFullSync, FixedIters{5}, 0.1),
               ConfigError);
  EXPECT_THROW(CatalystSchedule::make(0.0, 1.0, 1.0, WarmStart::kFullSync, FixedIters{5}),
               ConfigError);
  EXPECT_THROW(CatalystSchedule::make(0.1, -1.0, 1.0, WarmStart::kFullSync, FixedIters{5}),
               ConfigError);
  EXPECT_THROW(CatalystSchedule::make(0.1, 1.0, 0.0, WarmStart::kFullSync, FixedIters{5}),
               ConfigError);
}

TEST(CatalystKappaTest, Examples) {
  ProblemConstants c;
  c.L_f = 1.0;
  c.L = 2.0;
  c.L_bar = 1.5;
  c.R_m = 2.0;
  c.R_sq = 1.0;
  c.R_bar_sq = 1.5;
  // delta = 1: a_1 = L_f + L/n = 2
  EXPECT_DOUBLE_EQ(optimal_kappa_lsvrg(c, 1.0, 2, 0.0, false, 0.5), 1.5);
  EXPECT_DOUBLE_EQ(optimal_kappa_lsvrg(c, 1.0, 2, 3.0, false, 0.5), 0.0);
  // a_3 = R_m^2/(n gamma) + R^2/gamma = 4/8 + 1/4 = 0.75; lambda_3 = 0.75/(1 + 4 + 0)
  EXPECT_DOUBLE_EQ(optimal_kappa_sdca(c, 1.0, 4, 2, 4.0, 0.0, false, 0.01), 0.15 - 0.01);
}

TEST(CatalystKappaTest, MonotoneInCostRatioAndCompression) {
  ProblemConstants c;
  c.L_f = 1.0;
  c.L = 5.0;
  c.L_bar = 3.0;
  c.R_m = 3.0;
  c.R_sq = 4.0;
  c.R_bar_sq = 9.0;
  double last = std::numeric_limits<double>::infinity();
  for (double ratio : {0.0, 1.0, 10.0, 100.0}) {
    const double k = optimal_kappa_lsvrg(c, 0.1, 10, ratio, false, 1e-6);
    EXPECT_LE(k, last);
    EXPECT_GE(k, 0.0);
    last = k;
  }
  EXPECT_LE(optimal_kappa_lsvrg(c, 0.1, 10, 5.0, true, 1e-6),
            optimal_kappa_lsvrg(c, 0.1, 10, 5.0, false, 1e-6));
  last = std::numeric_limits<double>::infinity();
  for (double ratio : {0.0, 1.0, 10.0, 100.0}) {
    const double k = optimal_kappa_sdca(c, 0.1, 50, 10, 4.0, ratio, false, 1e-6);
    EXPECT_LE(k, last);
    last = k;
  }
}

TEST(CatalystKappaTest, CostRatio) {
  EXPECT_DOUBLE_EQ(cost_ratio(CompressorSpec::identity(123), 123), 1.0);
  EXPECT_DOUBLE_EQ(cost_ratio(CompressorSpec::top_k(1, 123), 123), 64.0 * 123 / 71.0);
}

struct CatalystFixture {
  explicit CatalystFixture(ProblemSpec spec, int samples = 40, int dim = 5, int nodes = 4)
      : sim(testing::random_dataset(samples, dim, 0.6, 51), nodes, spec),
        constants(compute_constants(sim.partition, spec.gamma)),
        dense(testing::dense_rows(sim.partition)) {}
  CatalystRun run() {
    return CatalystRun{sim.problem, sim.partition, constants, sim.ledger, sim.cluster,
                       sim.streams};
  }
  Sim sim;
  ProblemConstants constants;
  Eigen::MatrixXd dense;
};

TEST(CatalystRunTest, LsvrgFullSyncVersusCarryLedger) {
  const int outer = 4;
  std::uint64_t bits[2];
  for (int variant = 0; variant < 2; ++variant) {
    CatalystFixture f(ProblemSpec::logistic(0.01));
    EclsvrgInnerConfig cfg;
    cfg.eta = 0.05;
    cfg.q = CompressorSpec::top_k(1, 5);
    cfg.q1 = CompressorSpec::top_k(1, 5);
    const auto warm = variant == 0 ? WarmStart::kFullSync : WarmStart::kCompressedCarry;
    const auto s = CatalystSchedule::make(0.01, 0.1, 1.0, warm, FixedIters{30});
    catalyst_run(f.run(), cfg, s, outer, Vector::Zero(5));
    bits[variant] = f.sim.ledger.cumulative_bits();
  }
  // per step: 2 * 4 * (64 + 3) + 1 bits under either warm start
  EXPECT_EQ(bits[1], static_cast<std::uint64_t>(outer) * 30u * (2u * 4u * 67u + 1u));
  EXPECT_EQ(bits[0] - bits[1], static_cast<std::uint64_t>(outer) * 4u * 64u * 5u);
}

TEST(CatalystRunTest, SdcaFullSyncVersusCarryLedger) {
  std::uint64_t bits[2];
  for (int variant = 0; variant < 2; ++variant) {
    CatalystFixture f(ProblemSpec::ridge(0.05, -1.0));
    const auto warm = variant == 0 ? WarmStart::kFullSync : WarmStart::kCompressedCarry;
    const auto s = CatalystSchedule::make(0.05, 0.2, 1.0, warm, FixedIters{25});
    catalyst_run(f.run(), EcsdcaInnerConfig{std::nullopt, CompressorSpec::top_k(2, 5)}, s, 3,
                 Vector::Zero(5));
    bits[variant] = f.sim.ledger.cumulative_bits();
  }
  EXPECT_EQ(bits[0] - bits[1], 3u * 4u * 64u * 5u);
}

TEST(CatalystRunTest, CarriedSdcaAggregateStaysConsistent) {
  CatalystFixture f(ProblemSpec::logistic(0.01));
  CatalystHooks hooks;
  int checks = 0;
  hooks.sdca = [&](int, const EcsdcaState& state, const ProblemSpec&, bool) {
    const Vector exact = ecsdca_exact_aggregate(state, f.sim.partition);
    EXPECT_LE((ecsdca_virtual_aggregate(state) - exact).norm(), 1e-12 * (1.0 + exact.norm()));
    ++checks;
  };
  const auto s = CatalystSchedule::make(0.01, 0.3, 1.0, WarmStart::kCompressedCarry,
                                        FixedIters{40});
  catalyst_run(f.run(), EcsdcaInnerConfig{std::nullopt, CompressorSpec::top_k(1, 5)}, s, 5,
               Vector::Zero(5), nullptr, {}, hooks);
  EXPECT_EQ(checks, 10);
}

// The corrected carry keeps h_tau - grad f_tau(x) unchanged across the anchor move.
TEST(CatalystRunTest, KappaCorrectedCarryPreservesLearnerOffset) {
  CatalystFixture f(ProblemSpec::logistic(0.01));
  NodeTable offset_end;
  NodeTable e_end;
  int compared = 0;
  CatalystHooks hooks;
  hooks.lsvrg = [&](int k, const EclsvrgState& state, const ProblemSpec& gk, bool at_start) {
    NodeTable offset(4);
    for (int tau = 0; tau < 4; ++tau)
      offset[tau] = state.h_node[tau] -
                    eclsvrg_node_gradient(gk, f.sim.partition, tau, state.x, LsvrgMode::kSmooth);
    if (!at_start) {
      offset_end = offset;
      e_end = state.e;
      return;
    }
    if (k == 1) return;
    for (int tau = 0; tau < 4; ++tau) {
      EXPECT_LE((offset[tau] - offset_end[tau]).norm(), 1e-12);
      EXPECT_EQ(state.e[tau], e_end[tau]);
    }
    ++compared;
  };
  EclsvrgInnerConfig cfg;
  cfg.eta = 0.05;
  cfg.q = CompressorSpec::top_k(2, 5);
  cfg.q1 = CompressorSpec::top_k(2, 5);
  const auto s = CatalystSchedule::make(0.01, 0.5, 1.0, WarmStart::kCompressedCarry,
                                        FixedIters{20});
  catalyst_run(f.run(), cfg, s, 4, Vector::Zero(5), nullptr, {}, hooks);
  EXPECT_EQ(compared, 3);
}

TEST(CatalystRunTest, OracleGapBudgetMeetsEveryTolerance) {
  CatalystFixture f(ProblemSpec::ridge(0.05, -1.0));
  OracleGap budget;
  budget.subproblem_optimum = [&](const ProblemSpec& gk) {
    return testing::oracle_primal(gk, f.dense, testing::oracle_minimizer(gk, f.dense));
  };
  budget.check_stride = 5;
  budget.max_iterations = 200000;
  const double eps0 = catalyst_epsilon0(f.sim.problem, f.sim.partition, Vector::Zero(5), true);
  const auto s = CatalystSchedule::make(0.05, 0.3, eps0, WarmStart::kCompressedCarry, budget);
  const auto result = catalyst_run(
      f.run(), EcsdcaInnerConfig{std::nullopt, CompressorSpec::top_k(2, 5)}, s, 6,
      Vector::Zero(5));
  ASSERT_EQ(result.outer.size(), 6u);
  for (const auto& rec : result.outer) {
    EXPECT_TRUE(rec.budget_met);
    ASSERT_TRUE(rec.subproblem_gap.has_value());
    EXPECT_LE(*rec.subproblem_gap, rec.epsilon);
  }
}

TEST(CatalystRunTest, DualityGapBudgetNeedsSdca) {
  CatalystFixture f(ProblemSpec::logistic(0.01));
  EclsvrgInnerConfig cfg;
  cfg.q = CompressorSpec::identity(5);
  cfg.q1 = CompressorSpec::identity(5);
  const auto s = CatalystSchedule::make(0.01, 0.1, 1.0, WarmStart::kFullSync, DualityGapBudget{});
  EXPECT_THROW(catalyst_run(f.run(), cfg, s, 2, Vector::Zero(5)), ConfigError);
}

TEST(CatalystRunTest, AcceleratedSdcaConverges) {
  CatalystFixture f(ProblemSpec::ridge(0.01, -1.0), 60, 5, 3);
  const Vector opt = testing::oracle_minimizer(f.sim.problem, f.dense);
  const double p_star = testing::oracle_primal(f.sim.problem, f.dense, opt);
  const double kappa = optimal_kappa_sdca(f.constants, 0.4, 20, 3, 1.0, 0.0, false, 0.01);
  const double eps0 = catalyst_epsilon0(f.sim.problem, f.sim.partition, Vector::Zero(5), true);
  const auto s = CatalystSchedule::make(0.01, kappa, eps0, WarmStart::kCompressedCarry,
                                        DualityGapBudget{20, 200000});
  const auto result = catalyst_run(
      f.run(), EcsdcaInnerConfig{std::nullopt, CompressorSpec::top_k(2, 5)}, s, 400,
      Vector::Zero(5));
  EXPECT_LT(testing::oracle_primal(f.sim.problem, f.dense, result.x) - p_star, 1e-9);
  for (const auto& rec : result.outer) EXPECT_TRUE(rec.budget_met);
}

TEST(CatalystRunTest, BitCapStopsBeforeOverrun) {
  CatalystFixture f(ProblemSpec::logistic(0.01));
  RunLimits limits;
  limits.bit_cap = 5000;
  const auto s = CatalystSchedule::make(0.01, 0.1, 1.0, WarmStart::kCompressedCarry,
                                        FixedIters{1000});
  const auto result = catalyst_run(
      f.run(), EcsdcaInnerConfig{std::nullopt, CompressorSpec::top_k(1, 5)}, s, 10,
      Vector::Zero(5), nullptr, limits);
  EXPECT_TRUE(result.stopped_by_limits);
  EXPECT_LT(f.sim.ledger.cumulative_bits(), 5000u + 4u * 67u);
}

}  // namespace
}  // namespace ecopt
