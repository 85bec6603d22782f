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

#include "ecopt/problem.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "ecopt/errors.hpp"

namespace ecopt {

std::string_view to_string(LossKind loss) noexcept {
  switch (loss) {
    case LossKind::kLogistic: return "logistic";
    case LossKind::kRidge: return "ridge";
  }
  return "unknown";
}

LossKind loss_from_string(std::string_view text) {
  if (text == "logistic") return LossKind::kLogistic;
  if (text == "ridge") return LossKind::kRidge;
  throw ConfigError("unknown loss: " + std::string(text));
}

ProblemSpec ProblemSpec::logistic(double lambda) {
  ProblemSpec spec;
  spec.loss = LossKind::kLogistic;
  spec.lambda = lambda;
  spec.gamma = 4.0;
  return spec;
}

ProblemSpec ProblemSpec::ridge(double lambda, double target) {
  ProblemSpec spec;
  spec.loss = LossKind::kRidge;
  spec.lambda = lambda;
  spec.gamma = 1.0;
  spec.ridge_target = target;
  return spec;
}

ProblemSpec ProblemSpec::shifted(double kappa, Vector anchor) const {
  ProblemSpec out = *this;
  out.kappa_shift = KappaShift{kappa, std::move(anchor)};
  return out;
}

ProblemSpec ProblemSpec::unshifted() const {
  ProblemSpec out = *this;
  out.kappa_shift.reset();
  return out;
}

void ProblemSpec::validate(Eigen::Index dim) const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw ConfigError("lambda must be a finite nonnegative number");
  if (!(gamma > 0.0) || !std::isfinite(gamma))
    throw ConfigError("gamma must be positive");
  if (kappa_shift) {
    if (!(kappa_shift->kappa >= 0.0) || !std::isfinite(kappa_shift->kappa))
      throw ConfigError("kappa must be nonnegative");
    if (kappa_shift->anchor.size() != dim)
      throw DimensionMismatch("kappa anchor has dimension " +
                              std::to_string(kappa_shift->anchor.size()) +
                              ", expected " + std::to_string(dim));
  }
  if (custom_regularizer && (!custom_regularizer->prox || !custom_regularizer->value))
    throw ConfigError("custom regularizer needs both value and prox");
}

LossEval loss_value_grad(const ProblemSpec& spec, double z) {
  if (!std::isfinite(z)) throw NumericalOverflow("non-finite margin in loss");
  switch (spec.loss) {
    case LossKind::kLogistic: {
      const double t = std::exp(-std::abs(z));
      const double value = std::log1p(t) + std::max(z, 0.0);
      const double derivative = z >= 0.0 ? 1.0 / (1.0 + t) : t / (1.0 + t);
      return {value, derivative};
    }
    case LossKind::kRidge: {
      const double r = z - spec.ridge_target;
      return {0.5 * r * r, r};
    }
  }
  return {};
}

LossEval loss_value_grad(const ProblemSpec& spec, const SparseRow& row,
                         const Vector& x) {
  return loss_value_grad(spec, row.dot(x));
}

namespace {

double xlogx(double v) { return v > 0.0 ? v * std::log(v) : 0.0; }

void check_logistic_beta(double beta) {
  if (!(beta >= 0.0 && beta <= 1.0))
    throw DomainError("logistic conjugate evaluated at " + std::to_string(beta) +
                      ", outside [0, 1]");
}

double logit(double beta) { return std::log(beta) - std::log1p(-beta); }

}  // namespace

double conjugate_value(const ProblemSpec& spec, double beta) {
  switch (spec.loss) {
    case LossKind::kLogistic:
      check_logistic_beta(beta);
      return xlogx(beta) + xlogx(1.0 - beta);
    case LossKind::kRidge:
      if (!std::isfinite(beta)) throw DomainError("non-finite ridge dual");
      return 0.5 * beta * beta + spec.ridge_target * beta;
  }
  return 0.0;
}

double conjugate_derivative(const ProblemSpec& spec, double beta) {
  switch (spec.loss) {
    case LossKind::kLogistic:
      check_logistic_beta(beta);
      return logit(beta);
    case LossKind::kRidge:
      return beta + spec.ridge_target;
  }
  return 0.0;
}

double dual_prox(const ProblemSpec& spec, double u, double y_prev,
                 double sigma) {
  if (!(sigma > 0.0)) throw ConfigError("dual_prox needs sigma > 0");
  if (spec.loss == LossKind::kRidge)
    return (sigma * (u - spec.ridge_target) + y_prev) / (1.0 + sigma);

  // Residual of the optimality condition, strictly decreasing in y.
  auto residual = [&](double y) { return sigma * (u - logit(y)) - (y - y_prev); };
  double lo = kDualClip;
  double hi = 1.0 - kDualClip;
  if (residual(lo) <= 0.0) return lo;
  if (residual(hi) >= 0.0) return hi;
  for (int it = 0; it < 4096; ++it) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    if (residual(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return std::abs(residual(lo)) <= std::abs(residual(hi)) ? lo : hi;
}

std::pair<double, double> dual_domain(const ProblemSpec& spec) noexcept {
  if (spec.loss == LossKind::kLogistic) return {0.0, 1.0};
  const double inf = std::numeric_limits<double>::infinity();
  return {-inf, inf};
}

double regularizer_value(const ProblemSpec& spec, const Vector& x) {
  double value = spec.custom_regularizer ? spec.custom_regularizer->value(x)
                                         : 0.5 * spec.lambda * x.squaredNorm();
  if (spec.kappa_shift)
    value += 0.5 * spec.kappa_shift->kappa *
             (x - spec.kappa_shift->anchor).squaredNorm();
  return value;
}

Vector regularizer_gradient(const ProblemSpec& spec, const Vector& x) {
  if (spec.custom_regularizer)
    throw ConfigError("custom regularizer has no gradient");
  Vector g = spec.lambda * x;
  if (spec.kappa_shift)
    g += spec.kappa_shift->kappa * (x - spec.kappa_shift->anchor);
  return g;
}

Vector prox_reg(const ProblemSpec& spec, const Vector& v, double eta) {
  const double kappa = spec.kappa();
  if (spec.custom_regularizer) {
    if (!spec.kappa_shift) return spec.custom_regularizer->prox(v, eta);
    const double scale = 1.0 + eta * kappa;
    return spec.custom_regularizer->prox(
        (v + eta * kappa * spec.kappa_shift->anchor) / scale, eta / scale);
  }
  if (!spec.kappa_shift) return v / (1.0 + eta * spec.lambda);
  return (v + eta * kappa * spec.kappa_shift->anchor) /
         (1.0 + eta * (spec.lambda + kappa));
}

Vector grad_gstar(const ProblemSpec& spec, const Vector& u) {
  if (!spec.kappa_shift) return u;
  return u + (spec.kappa_shift->kappa / spec.strong_convexity()) *
                 spec.kappa_shift->anchor;
}

double conjugate_regularizer(const ProblemSpec& spec, const Vector& v) {
  if (spec.custom_regularizer)
    throw ConfigError("no closed-form conjugate for a custom regularizer");
  const double mu = spec.strong_convexity();
  if (!(mu > 0.0)) throw ConfigError("conjugate of g needs lambda + kappa > 0");
  if (!spec.kappa_shift) return v.squaredNorm() / (2.0 * mu);
  const auto& a = spec.kappa_shift->anchor;
  const double kappa = spec.kappa_shift->kappa;
  return (v + kappa * a).squaredNorm() / (2.0 * mu) -
         0.5 * kappa * a.squaredNorm();
}

double primal_value(const ProblemSpec& spec, const NodePartition& partition,
                    const Vector& x) {
  if (x.size() != partition.dim())
    throw DimensionMismatch("iterate dimension does not match data");
  double loss = 0.0;
  for (std::size_t g = 0; g < partition.total(); ++g)
    loss += loss_value_grad(spec, partition.row(g), x).value;
  return loss / static_cast<double>(partition.total()) +
         regularizer_value(spec, x);
}

Vector primal_gradient(const ProblemSpec& spec, const NodePartition& partition,
                       const Vector& x) {
  if (x.size() != partition.dim())
    throw DimensionMismatch("iterate dimension does not match data");
  Vector grad = Vector::Zero(x.size());
  for (std::size_t g = 0; g < partition.total(); ++g) {
    const auto& row = partition.row(g);
    row.axpy(loss_value_grad(spec, row, x).derivative, grad);
  }
  grad /= static_cast<double>(partition.total());
  grad += regularizer_gradient(spec, x);
  return grad;
}

Vector node_loss_gradient(const ProblemSpec& spec,
                          const NodePartition& partition, int node,
                          const Vector& x) {
  Vector grad = Vector::Zero(x.size());
  const int m = partition.per_node();
  for (int i = 0; i < m; ++i) {
    const auto& row = partition.row(node, i);
    row.axpy(loss_value_grad(spec, row, x).derivative, grad);
  }
  return grad / static_cast<double>(m);
}

Vector dual_aggregate(const NodePartition& partition, const Vector& alpha) {
  if (static_cast<std::size_t>(alpha.size()) != partition.total())
    throw DimensionMismatch("alpha must have one entry per sample");
  Vector v = Vector::Zero(partition.dim());
  for (std::size_t g = 0; g < partition.total(); ++g)
    partition.row(g).axpy(alpha[static_cast<Eigen::Index>(g)], v);
  return v / static_cast<double>(partition.total());
}

double dual_value(const ProblemSpec& spec, const NodePartition& partition,
                  const Vector& alpha) {
  const Vector v = dual_aggregate(partition, alpha);
  double conj = 0.0;
  for (Eigen::Index g = 0; g < alpha.size(); ++g)
    conj += conjugate_value(spec, -alpha[g]);
  return -conj / static_cast<double>(alpha.size()) -
         conjugate_regularizer(spec, v);
}

}  // namespace ecopt
