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

#ifndef ECOPT_PROBLEM_HPP
#define ECOPT_PROBLEM_HPP

#include <functional>
#include <memory>
#include <optional>
#include <string_view>
#include <utility>

#include "ecopt/dataset.hpp"
#include "ecopt/simnet.hpp"
#include "ecopt/types.hpp"

namespace ecopt {

enum class LossKind {
  kLogistic,  // phi(z) = log(1 + e^z) on label-folded rows
  kRidge,     // phi(z) = (z - b)^2 / 2
};

std::string_view to_string(LossKind loss) noexcept;
LossKind loss_from_string(std::string_view text);

/// Catalyst proximal term (kappa/2)||x - anchor||^2 added to the regularizer.
struct KappaShift {
  double kappa = 0.0;
  Vector anchor;
};

/// Non-quadratic regularizers are only reachable through their prox.
struct CustomRegularizer {
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector& v, double eta)> prox;
};

/// Regularized finite sum P(x) = (1/N) sum phi(<A_i, x>) + g(x) with
/// g(x) = (lambda/2)||x||^2 [+ (kappa/2)||x - anchor||^2].
struct ProblemSpec {
  LossKind loss = LossKind::kLogistic;
  double lambda = 1e-5;
  double gamma = 4.0;
  double ridge_target = 0.0;
  std::optional<KappaShift> kappa_shift;
  std::shared_ptr<const CustomRegularizer> custom_regularizer;

  static ProblemSpec logistic(double lambda);
  /// For label-folded +-1 data, target -1 reproduces least squares on labels.
  static ProblemSpec ridge(double lambda, double target = 0.0);

  double kappa() const noexcept {
    return kappa_shift ? kappa_shift->kappa : 0.0;
  }
  /// lambda + kappa, the strong convexity of g.
  double strong_convexity() const noexcept { return lambda + kappa(); }

  /// Copy with g replaced by g + (kappa/2)||. - anchor||^2. Any previous shift
  /// is dropped.
  ProblemSpec shifted(double kappa, Vector anchor) const;
  ProblemSpec unshifted() const;

  /// Throws ConfigError on lambda < 0, gamma <= 0, kappa < 0 or an anchor of
  /// the wrong dimension.
  void validate(Eigen::Index dim) const;
};

/// Lower bound on -alpha (SDCA) or y (SPDC) for logistic duals.
inline constexpr double kDualClip = 1e-12;

struct LossEval {
  double value = 0.0;
  double derivative = 0.0;
};

/// phi(z) and phi'(z). Stable for any finite z; throws NumericalOverflow
/// when z is not finite.
LossEval loss_value_grad(const ProblemSpec& spec, double z);
LossEval loss_value_grad(const ProblemSpec& spec, const SparseRow& row,
                         const Vector& x);

/// phi*(beta) with 0 log 0 = 0. DomainError outside [0, 1] for logistic.
double conjugate_value(const ProblemSpec& spec, double beta);
/// (phi*)'(beta); only finite in the interior of the domain.
double conjugate_derivative(const ProblemSpec& spec, double beta);

/// argmax_y { y*u - phi*(y) - (y - y_prev)^2 / (2 sigma) }. Closed form for
/// ridge; bisection on the monotone optimality condition for logistic, run to
/// double precision and clipped to [kDualClip, 1 - kDualClip].
double dual_prox(const ProblemSpec& spec, double u, double y_prev, double sigma);

/// Interval of admissible SPDC duals y (== -alpha for SDCA).
std::pair<double, double> dual_domain(const ProblemSpec& spec) noexcept;

double regularizer_value(const ProblemSpec& spec, const Vector& x);
Vector regularizer_gradient(const ProblemSpec& spec, const Vector& x);

/// prox_{eta g}(v) = (v + eta*kappa*anchor) / (1 + eta*(lambda + kappa)).
Vector prox_reg(const ProblemSpec& spec, const Vector& v, double eta);

/// x = u + kappa*anchor/(lambda + kappa), where u already carries the
/// 1/((lambda + kappa) N) scaling of the SDCA aggregate.
Vector grad_gstar(const ProblemSpec& spec, const Vector& u);

/// g*(v) for the (shifted) quadratic regularizer.
double conjugate_regularizer(const ProblemSpec& spec, const Vector& v);

/// P(x) over the partitioned samples.
double primal_value(const ProblemSpec& spec, const NodePartition& partition,
                    const Vector& x);

/// Full gradient of P, regularizer included.
Vector primal_gradient(const ProblemSpec& spec, const NodePartition& partition,
                       const Vector& x);

/// grad f^(tau)(x) = (1/m) sum_i phi'(<A_i, x>) A_i over node tau, loss only.
Vector node_loss_gradient(const ProblemSpec& spec,
                          const NodePartition& partition, int node,
                          const Vector& x);

/// D(alpha) = -(1/N) sum phi*(-alpha_i) - g*((1/N) A alpha), alpha indexed by
/// global sample index. Quadratic regularizers only.
double dual_value(const ProblemSpec& spec, const NodePartition& partition,
                  const Vector& alpha);

/// (1/N) sum_i A_i alpha_i.
Vector dual_aggregate(const NodePartition& partition, const Vector& alpha);

}  // namespace ecopt

#endif  // ECOPT_PROBLEM_HPP
