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

#include "ecopt/reference.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <nlohmann/json.hpp>

#include "ecopt/constants.hpp"
#include "ecopt/errors.hpp"
#include "ecopt/random.hpp"

namespace ecopt {

namespace {

void check_problem(const ProblemSpec& spec, const NodePartition& partition) {
  spec.validate(partition.dim());
  if (spec.custom_regularizer)
    throw ConfigError("reference optimum needs the quadratic regularizer");
  if (!(spec.strong_convexity() > 0.0))
    throw ConfigError("reference optimum needs lambda > 0");
}

double curvature(const ProblemSpec& spec, double z) {
  if (spec.loss == LossKind::kRidge) return 1.0;
  const double s = loss_value_grad(spec, z).derivative;
  return s * (1.0 - s);
}

Eigen::MatrixXd hessian(const ProblemSpec& spec, const NodePartition& partition,
                        const Vector& x) {
  const int d = partition.dim();
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(d, d);
  for (std::size_t g = 0; g < partition.total(); ++g) {
    const SparseRow& row = partition.row(g);
    const double c = curvature(spec, row.dot(x));
    if (c == 0.0) continue;
    for (std::size_t a = 0; a < row.indices.size(); ++a) {
      const double ca = c * row.values[a];
      for (std::size_t b = 0; b <= a; ++b)
        h(row.indices[a], row.indices[b]) += ca * row.values[b];
    }
  }
  h /= static_cast<double>(partition.total());
  h.diagonal().array() += spec.strong_convexity();
  return h.selfadjointView<Eigen::Lower>();
}

ReferenceResult newton(const ProblemSpec& spec, const NodePartition& partition,
                       const ReferenceOptions& options) {
  ReferenceResult result;
  Vector x = Vector::Zero(partition.dim());
  double value = primal_value(spec, partition, x);
  for (int it = 0; it <= options.max_newton_iterations; ++it) {
    const Vector grad = primal_gradient(spec, partition, x);
    result.gradient_norm = grad.norm();
    result.iterations = static_cast<std::uint64_t>(it);
    if (result.gradient_norm <= options.tolerance) break;
    if (it == options.max_newton_iterations)
      throw ReferenceError("Newton reached its iteration cap with gradient norm " +
                           std::to_string(result.gradient_norm));
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(hessian(spec, partition, x));
    const Vector direction = -ldlt.solve(grad);
    const double slope = grad.dot(direction);
    // Predicted decrease below rounding of P: the sufficient-decrease test is
    // meaningless there, take the full Newton step.
    if (-slope <= 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(value))) {
      x += direction;
      value = primal_value(spec, partition, x);
      continue;
    }
    double t = 1.0;
    bool moved = false;
    for (int ls = 0; ls < 60; ++ls) {
      const Vector trial = x + t * direction;
      const double trial_value = primal_value(spec, partition, trial);
      if (trial_value <= value + 1e-4 * t * slope) {
        moved = trial_value < value || (trial - x).norm() > 0.0;
        x = trial;
        value = trial_value;
        break;
      }
      t *= 0.5;
    }
    if (!moved) {
      // Objective differences are below rounding; accept a near-stationary point.
      if (result.gradient_norm <= 1e3 * options.tolerance) break;
      throw ReferenceError("Newton line search stalled with gradient norm " +
                           std::to_string(result.gradient_norm));
    }
  }
  result.x_star = std::move(x);
  result.p_star = primal_value(spec, partition, result.x_star);
  return result;
}

}  // namespace

ReferenceResult accelerated_gradient_optimum(const ProblemSpec& spec,
                                             const NodePartition& partition,
                                             const ReferenceOptions& options) {
  check_problem(spec, partition);
  std::vector<const SparseRow*> rows;
  rows.reserve(partition.total());
  for (std::size_t g = 0; g < partition.total(); ++g) rows.push_back(&partition.row(g));
  const double smooth = largest_gram_eigenvalue(rows, partition.dim()) /
                        static_cast<double>(partition.total()) / spec.gamma;
  const double mu = spec.strong_convexity();
  const double lip = smooth + mu;
  const double step = 1.0 / lip;
  const double momentum = (std::sqrt(lip) - std::sqrt(mu)) / (std::sqrt(lip) + std::sqrt(mu));

  ReferenceResult result;
  Vector x = Vector::Zero(partition.dim());
  Vector x_prev = x;
  Vector v = x;
  for (std::uint64_t it = 0;; ++it) {
    const Vector grad = primal_gradient(spec, partition, v);
    const Vector x_next = v - step * grad;
    // Gradient restart: drop momentum when it points uphill.
    const bool restart = grad.dot(x_next - x) > 0.0;
    x_prev = std::move(x);
    x = x_next;
    v = restart ? x : Vector(x + momentum * (x - x_prev));
    if (it % 16 == 0 || it + 1 >= options.max_gradient_iterations) {
      const double norm = primal_gradient(spec, partition, x).norm();
      result.gradient_norm = norm;
      result.iterations = it + 1;
      if (norm <= options.tolerance) break;
      if (!std::isfinite(norm)) throw ReferenceError("accelerated gradient diverged");
    }
    if (it + 1 >= options.max_gradient_iterations)
      throw ReferenceError("accelerated gradient reached its iteration cap with gradient norm " +
                           std::to_string(result.gradient_norm));
  }
  result.x_star = std::move(x);
  result.p_star = primal_value(spec, partition, result.x_star);
  return result;
}

ReferenceResult reference_optimum(const ProblemSpec& spec,
                                  const NodePartition& partition,
                                  const ReferenceOptions& options) {
  check_problem(spec, partition);
  const bool dense = partition.dim() <= options.newton_max_dim;
  ReferenceResult result = dense ? newton(spec, partition, options)
                                 : accelerated_gradient_optimum(spec, partition, options);
  if (options.cross_check) {
    const ReferenceResult other = dense ? accelerated_gradient_optimum(spec, partition, options)
                                        : newton(spec, partition, options);
    result.cross_check_value = other.p_star;
    const double diff = std::abs(other.p_star - result.p_star);
    if (diff > options.agreement)
      throw ReferenceError("reference routes disagree on P* by " + std::to_string(diff));
  }
  return result;
}

Vector matched_dual(const ProblemSpec& spec, const NodePartition& partition,
                    const Vector& x) {
  Vector alpha(static_cast<Eigen::Index>(partition.total()));
  for (std::size_t g = 0; g < partition.total(); ++g)
    alpha[static_cast<Eigen::Index>(g)] = -loss_value_grad(spec, partition.row(g), x).derivative;
  return alpha;
}

ReferenceCache::ReferenceCache(std::filesystem::path directory)
    : directory_(std::move(directory)) {}

std::string ReferenceCache::key(const ProblemSpec& spec, const NodePartition& partition) {
  std::uint64_t h = partition.content_hash();
  h = mix64(h ^ static_cast<std::uint64_t>(spec.loss));
  h = mix64(h ^ std::bit_cast<std::uint64_t>(spec.lambda));
  h = mix64(h ^ std::bit_cast<std::uint64_t>(spec.ridge_target));
  char buf[40];
  std::snprintf(buf, sizeof buf, "pstar-%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::optional<double> ReferenceCache::lookup(const std::string& key) const {
  std::ifstream in(directory_ / (key + ".json"));
  if (!in) return std::nullopt;
  try {
    const auto doc = nlohmann::json::parse(in);
    return doc.at("p_star").get<double>();
  } catch (const nlohmann::json::exception&) {
    return std::nullopt;
  }
}

void ReferenceCache::store(const std::string& key, const ReferenceResult& result) const {
  std::filesystem::create_directories(directory_);
  nlohmann::json doc;
  doc["p_star"] = result.p_star;
  doc["gradient_norm"] = result.gradient_norm;
  doc["iterations"] = result.iterations;
  const auto tmp = directory_ / (key + ".json.tmp");
  {
    std::ofstream out(tmp);
    out << doc.dump(2) << '\n';
  }
  std::filesystem::rename(tmp, directory_ / (key + ".json"));
}

}  // namespace ecopt
