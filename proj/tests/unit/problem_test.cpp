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
#include <numbers>

#include <gtest/gtest.h>

#include "ecopt/constants.hpp"
#include "ecopt/errors.hpp"
#include "ecopt/problem.hpp"
#include "ecopt/reference.hpp"
#include "fixtures.hpp"

namespace ecopt {
namespace {

using testing::dense_dataset;
using testing::random_dataset;

TEST(LossTest, LogisticAtZero) {
  const auto eval = loss_value_grad(ProblemSpec::logistic(1e-3), 0.0);
  EXPECT_DOUBLE_EQ(eval.value, std::log(2.0));
  EXPECT_DOUBLE_EQ(eval.derivative, 0.5);
}

TEST(LossTest, LogisticSaturatesWithoutOverflow) {
  const auto spec = ProblemSpec::logistic(1e-3);
  const auto big = loss_value_grad(spec, 100.0);
  EXPECT_NEAR(big.value, 100.0, 1e-12);
  EXPECT_NEAR(big.derivative, 1.0, 1e-12);
  const auto huge = loss_value_grad(spec, 800.0);
  EXPECT_TRUE(std::isfinite(huge.value));
  EXPECT_DOUBLE_EQ(huge.value, 800.0);
  const auto neg = loss_value_grad(spec, -800.0);
  EXPECT_GE(neg.value, 0.0);
  EXPECT_LT(neg.value, 1e-300);
}

TEST(LossTest, NonFiniteMarginThrows) {
  EXPECT_THROW(loss_value_grad(ProblemSpec::logistic(1.0), INFINITY), NumericalOverflow);
  EXPECT_THROW(loss_value_grad(ProblemSpec::ridge(1.0), NAN), NumericalOverflow);
}

TEST(LossTest, RidgeWithTarget) {
  const auto eval = loss_value_grad(ProblemSpec::ridge(1.0, 1.0), 3.0);
  EXPECT_DOUBLE_EQ(eval.value, 2.0);
  EXPECT_DOUBLE_EQ(eval.derivative, 2.0);
}

TEST(LossTest, RowOverloadUsesDotProduct) {
  SparseRow row{{0, 2}, {1.0, -2.0}};
  Vector x(3);
  x << 3.0, 5.0, 1.0;
  const auto eval = loss_value_grad(ProblemSpec::ridge(1.0), row, x);
  EXPECT_DOUBLE_EQ(eval.value, 0.5);
  EXPECT_DOUBLE_EQ(eval.derivative, 1.0);
}

TEST(ConjugateTest, LogisticValues) {
  const auto spec = ProblemSpec::logistic(1.0);
  EXPECT_NEAR(conjugate_value(spec, 0.5), std::log(0.5), 1e-15);
  EXPECT_EQ(conjugate_value(spec, 0.0), 0.0);
  EXPECT_EQ(conjugate_value(spec, 1.0), 0.0);
  EXPECT_THROW(conjugate_value(spec, 1.5), DomainError);
  EXPECT_THROW(conjugate_value(spec, -1e-9), DomainError);
}

TEST(ConjugateTest, RidgeValue) {
  EXPECT_DOUBLE_EQ(conjugate_value(ProblemSpec::ridge(1.0), 2.0), 2.0);
  EXPECT_DOUBLE_EQ(conjugate_value(ProblemSpec::ridge(1.0, 1.0), 2.0), 4.0);
}

TEST(ConjugateTest, FenchelIdentityOnGrid) {
  const auto spec = ProblemSpec::logistic(1.0);
  for (double z : {-5.0, -1.0, -0.2, 0.0, 0.3, 1.0, 4.0}) {
    double best = -INFINITY;
    for (int k = 0; k <= 10000; ++k) {
      const double beta = k / 10000.0;
      best = std::max(best, beta * z - conjugate_value(spec, beta));
    }
    EXPECT_NEAR(best, loss_value_grad(spec, z).value, 1e-6) << "z=" << z;
  }
}

TEST(DualProxTest, StationaryPoint) {
  const auto spec = ProblemSpec::logistic(1.0);
  for (double sigma : {1e-3, 1.0, 1e3}) EXPECT_NEAR(dual_prox(spec, 0.0, 0.5, sigma), 0.5, 1e-15);
}

TEST(DualProxTest, TinySigmaPinsToPrevious) {
  EXPECT_NEAR(dual_prox(ProblemSpec::logistic(1.0), 1.0, 0.5, 1e-9), 0.5, 1e-6);
}

TEST(DualProxTest, MatchesBisectionOracle) {
  const double y = dual_prox(ProblemSpec::logistic(1.0), 1.0, 0.5, 1.0);
  EXPECT_NEAR(y, testing::bisect_dual_prox(1.0, 0.5, 1.0), 1e-10);
}

TEST(DualProxTest, OptimalityResidualProperty) {
  const auto spec = ProblemSpec::logistic(1.0);
  Rng rng(11);
  for (int t = 0; t < 500; ++t) {
    const double u = 3.0 * rng.normal();
    const double y_prev = rng.uniform();
    const double sigma = std::pow(10.0, -3.0 + 4.0 * rng.uniform());
    const double y = dual_prox(spec, u, y_prev, sigma);
    ASSERT_GE(y, kDualClip);
    ASSERT_LE(y, 1.0 - kDualClip);
    if (y <= kDualClip || y >= 1.0 - kDualClip) continue;
    const double res = sigma * u - sigma * conjugate_derivative(spec, y) - (y - y_prev);
    EXPECT_LE(std::abs(res), 1e-10) << "u=" << u << " y_prev=" << y_prev << " sigma=" << sigma;
  }
}

TEST(DualProxTest, RidgeClosedForm) {
  const auto spec = ProblemSpec::ridge(1.0, 0.5);
  const double y = dual_prox(spec, 2.0, 1.0, 0.5);
  // Maximizer of y u - y^2/2 - b y - (y - y_prev)^2/(2 sigma).
  EXPECT_NEAR(2.0 - y - 0.5 - (y - 1.0) / 0.5, 0.0, 1e-15);
}

TEST(DualProxTest, RejectsNonPositiveSigma) {
  EXPECT_THROW(dual_prox(ProblemSpec::logistic(1.0), 0.0, 0.5, 0.0), ConfigError);
}

TEST(ProxTest, Examples) {
  auto spec = ProblemSpec::ridge(1.0);
  Vector v(1);
  v << 2.0;
  EXPECT_DOUBLE_EQ(prox_reg(spec, v, 1.0)[0], 1.0);
  EXPECT_DOUBLE_EQ(prox_reg(spec, v, 0.0)[0], 2.0);
  Vector anchor(1);
  anchor << 4.0;
  const auto shifted = spec.shifted(3.0, anchor);
  // (v + eta kappa a)/(1 + eta (lambda + kappa)) = (2 + 0.5*12)/(1 + 2)
  EXPECT_DOUBLE_EQ(prox_reg(shifted, v, 0.5)[0], 8.0 / 3.0);
}

TEST(ProxTest, GradGstar) {
  auto spec = ProblemSpec::logistic(0.5);
  Vector u(2);
  u << 1.0, -2.0;
  EXPECT_EQ(grad_gstar(spec, u), u);
  Vector anchor(2);
  anchor << 3.0, 3.0;
  const auto shifted = spec.shifted(1.5, anchor);
  const Vector x = grad_gstar(shifted, u);
  EXPECT_DOUBLE_EQ(x[0], 1.0 + 1.5 * 3.0 / 2.0);
  EXPECT_DOUBLE_EQ(x[1], -2.0 + 1.5 * 3.0 / 2.0);
}

TEST(ProxTest, CustomRegularizerThroughProx) {
  auto l1 = std::make_shared<CustomRegularizer>();
  l1->value = [](const Vector& x) { return x.lpNorm<1>(); };
  l1->prox = [](const Vector& v, double eta) {
    return Vector(v.array().sign() * (v.array().abs() - eta).max(0.0));
  };
  ProblemSpec spec = ProblemSpec::logistic(0.0);
  spec.custom_regularizer = l1;
  Vector v(3);
  v << 2.0, -0.5, 0.1;
  const Vector x = prox_reg(spec, v, 0.3);
  EXPECT_DOUBLE_EQ(x[0], 1.7);
  EXPECT_DOUBLE_EQ(x[1], -0.2);
  EXPECT_DOUBLE_EQ(x[2], 0.0);
  EXPECT_THROW(regularizer_gradient(spec, v), ConfigError);
}

TEST(ProblemSpecTest, Validation) {
  EXPECT_THROW(ProblemSpec::logistic(-1.0).validate(2), ConfigError);
  ProblemSpec bad_gamma = ProblemSpec::logistic(1.0);
  bad_gamma.gamma = 0.0;
  EXPECT_THROW(bad_gamma.validate(2), ConfigError);
  EXPECT_THROW(ProblemSpec::logistic(1.0).shifted(-1.0, Vector::Zero(2)).validate(2), ConfigError);
  EXPECT_THROW(ProblemSpec::logistic(1.0).shifted(1.0, Vector::Zero(3)).validate(2),
               DimensionMismatch);
  EXPECT_NO_THROW(ProblemSpec::logistic(1.0).shifted(1.0, Vector::Zero(2)).validate(2));
  EXPECT_EQ(loss_from_string("ridge"), LossKind::kRidge);
  EXPECT_THROW(loss_from_string("hinge"), ConfigError);
}

TEST(ConstantsTest, IdentityRows) {
  auto data = dense_dataset({{1, 0}, {0, 1}}, {1, 1});
  const auto part = NodePartition::contiguous(data, 1);
  const auto c = compute_constants(part, 4.0);
  EXPECT_DOUBLE_EQ(c.R_m, 1.0);
  EXPECT_NEAR(c.R_sq, 0.5, 1e-9);
  EXPECT_NEAR(c.R_bar_sq, 0.5, 1e-9);
  EXPECT_NEAR(c.L, 0.25, 1e-12);
  EXPECT_NEAR(c.L_f, 0.125, 1e-9);
}

TEST(ConstantsTest, SingleRow) {
  auto data = dense_dataset({{3, 4}}, {1});
  const auto c = compute_constants(NodePartition::contiguous(data, 1), 1.0);
  EXPECT_DOUBLE_EQ(c.R_m, 5.0);
  EXPECT_NEAR(c.R_sq, 25.0, 25e-9);
  EXPECT_NEAR(c.R_bar_sq, 25.0, 25e-9);
}

TEST(ConstantsTest, DuplicatedNodesShareRbar) {
  auto single = random_dataset(6, 4, 1.0, 3);
  auto doubled = std::make_shared<Dataset>(*single);
  for (std::size_t i = 0; i < single->size(); ++i) doubled->rows.push_back(single->rows[i]);
  doubled->labels.insert(doubled->labels.end(), single->labels.begin(), single->labels.end());
  const auto one = compute_constants(NodePartition::contiguous(single, 1), 1.0);
  const auto two = compute_constants(NodePartition::contiguous(doubled, 2), 1.0);
  EXPECT_NEAR(two.R_bar_sq, one.R_bar_sq, 1e-8 * one.R_bar_sq);
}

TEST(ConstantsTest, MatchesEigensolverAndOrdering) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto data = random_dataset(60, 8, 0.4, seed);
    const auto part = NodePartition::shuffled(data, 3, seed);
    const auto c = compute_constants(part, 1.0);
    const Eigen::MatrixXd a = testing::dense_rows(part);
    EXPECT_NEAR(c.R_sq, testing::oracle_lambda_max(a) / 60.0, 1e-7 * c.R_sq);
    double rbar = 0.0;
    for (int tau = 0; tau < 3; ++tau)
      rbar = std::max(rbar, testing::oracle_lambda_max(a.middleRows(tau * 20, 20)) / 20.0);
    EXPECT_NEAR(c.R_bar_sq, rbar, 1e-7 * rbar);
    EXPECT_LE(c.R_bar_sq, 3 * c.R_sq * (1 + 1e-8));
    EXPECT_LE(c.R_m * c.R_m, 20 * c.R_bar_sq * (1 + 1e-8));
  }
}

TEST(ConstantsTest, NonConvergenceCarriesIterate) {
  auto data = random_dataset(30, 6, 1.0, 5);
  PowerIterationOptions opts;
  opts.max_iterations = 2;
  opts.relative_tolerance = 1e-300;
  try {
    compute_constants(NodePartition::contiguous(data, 1), 1.0, opts);
    FAIL() << "expected ConstantEstimationError";
  } catch (const ConstantEstimationError& e) {
    EXPECT_EQ(e.last_iterate().size(), 6);
  }
}

TEST(ObjectiveTest, ZeroIterate) {
  auto data = random_dataset(10, 5, 0.5, 2);
  const auto part = NodePartition::contiguous(data, 2);
  EXPECT_NEAR(primal_value(ProblemSpec::logistic(0.3), part, Vector::Zero(5)), std::log(2.0), 1e-15);
  const auto ridge = ProblemSpec::ridge(0.3);
  EXPECT_DOUBLE_EQ(dual_value(ridge, part, Vector::Zero(10)), -conjugate_value(ridge, 0.0));
}

TEST(ObjectiveTest, MatchesDenseOracle) {
  auto data = random_dataset(24, 5, 0.6, 4);
  const auto part = NodePartition::shuffled(data, 3, 9);
  const Eigen::MatrixXd a = testing::dense_rows(part);
  Rng rng(3);
  for (auto spec : {ProblemSpec::logistic(0.01), ProblemSpec::ridge(0.2, -1.0)}) {
    Vector x(5);
    for (int j = 0; j < 5; ++j) x[j] = rng.normal();
    EXPECT_NEAR(primal_value(spec, part, x), testing::oracle_primal(spec, a, x), 1e-13);
    EXPECT_LT((primal_gradient(spec, part, x) - testing::oracle_gradient(spec, a, x)).norm(), 1e-13);
  }
}

TEST(ObjectiveTest, GradientMatchesFiniteDifferences) {
  Rng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    auto data = random_dataset(15 + trial, 4, 0.7, 100 + trial);
    const auto part = NodePartition::contiguous(data, 1);
    const auto spec = trial % 2 ? ProblemSpec::logistic(0.05)
                                : ProblemSpec::ridge(0.05).shifted(0.7, Vector::Ones(4));
    Vector x(4);
    for (int j = 0; j < 4; ++j) x[j] = rng.normal();
    const Vector g = primal_gradient(spec, part, x);
    Vector fd(4);
    for (int j = 0; j < 4; ++j) {
      Vector xp = x, xm = x;
      xp[j] += 1e-6;
      xm[j] -= 1e-6;
      fd[j] = (primal_value(spec, part, xp) - primal_value(spec, part, xm)) / 2e-6;
    }
    EXPECT_LE((g - fd).norm(), 1e-5 * std::max(1.0, g.norm())) << "trial " << trial;
  }
}

TEST(ObjectiveTest, WeakDualityOnRandomPoints) {
  auto data = random_dataset(12, 3, 1.0, 21);
  const auto part = NodePartition::contiguous(data, 2);
  Rng rng(5);
  for (auto spec : {ProblemSpec::ridge(0.1), ProblemSpec::ridge(0.1).shifted(2.0, Vector::Ones(3)),
                    ProblemSpec::logistic(0.1)}) {
    for (int t = 0; t < 100; ++t) {
      Vector x(3), alpha(12);
      for (int j = 0; j < 3; ++j) x[j] = 3.0 * rng.normal();
      for (int i = 0; i < 12; ++i)
        alpha[i] = spec.loss == LossKind::kLogistic ? -rng.uniform() : 2.0 * rng.normal();
      EXPECT_LE(dual_value(spec, part, alpha), primal_value(spec, part, x) + 1e-12);
    }
  }
}

TEST(ObjectiveTest, DualDomainViolationThrows) {
  auto data = random_dataset(4, 2, 1.0, 1);
  const auto part = NodePartition::contiguous(data, 1);
  Vector alpha = Vector::Constant(4, 0.5);  // -alpha outside [0, 1]
  EXPECT_THROW(dual_value(ProblemSpec::logistic(1.0), part, alpha), DomainError);
}

TEST(ObjectiveTest, StrongDualityAtOptimum) {
  auto data = random_dataset(4, 3, 1.0, 8);
  const auto part = NodePartition::contiguous(data, 1);
  const auto spec = ProblemSpec::ridge(0.5);
  const Eigen::MatrixXd a = testing::dense_rows(part);
  const Vector x = testing::oracle_minimizer(spec, a);
  const Vector alpha = matched_dual(spec, part, x);
  EXPECT_LE(primal_value(spec, part, x) - dual_value(spec, part, alpha), 1e-10);
}

}  // namespace
}  // namespace ecopt
