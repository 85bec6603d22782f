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

#include "fixtures.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace ecopt::testing {

std::shared_ptr<Dataset> random_dataset(int samples, int dim, double density,
                                        std::uint64_t seed, bool fold) {
  auto data = std::make_shared<Dataset>();
  data->dim = dim;
  Rng rng(mix64(seed));
  for (int i = 0; i < samples; ++i) {
    SparseRow row;
    const int forced = static_cast<int>(rng.below(static_cast<std::uint64_t>(dim)));
    for (int j = 0; j < dim; ++j) {
      if (j == forced || rng.uniform() < density) {
        row.indices.push_back(j);
        row.values.push_back(rng.normal());
      }
    }
    data->add(std::move(row), rng.bernoulli(0.5) ? 1.0 : -1.0);
  }
  if (fold) data->fold_labels();
  return data;
}

std::shared_ptr<Dataset> dense_dataset(const std::vector<std::vector<double>>& rows,
                                       const std::vector<double>& labels) {
  auto data = std::make_shared<Dataset>();
  data->dim = rows.empty() ? 0 : static_cast<int>(rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    Vector v = Eigen::Map<const Vector>(rows[i].data(), static_cast<Eigen::Index>(rows[i].size()));
    data->add(SparseRow::from_dense(v), labels[i]);
  }
  data->fold_labels();
  return data;
}

Sim::Sim(std::shared_ptr<const Dataset> d, int nodes, ProblemSpec p,
         std::uint64_t seed, bool contiguous)
    : data(std::move(d)),
      partition(contiguous ? NodePartition::contiguous(data, nodes)
                           : NodePartition::shuffled(data, nodes, seed)),
      problem(std::move(p)),
      streams(seed) {}

Eigen::MatrixXd dense_rows(const NodePartition& partition) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(partition.total()),
                                            partition.dim());
  for (std::size_t g = 0; g < partition.total(); ++g) {
    const SparseRow& row = partition.row(g);
    for (std::size_t k = 0; k < row.indices.size(); ++k)
      a(static_cast<Eigen::Index>(g), row.indices[k]) = row.values[k];
  }
  return a;
}

namespace {

double phi(const ProblemSpec& spec, double z) {
  if (spec.loss == LossKind::kRidge) return 0.5 * (z - spec.ridge_target) * (z - spec.ridge_target);
  return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

double dphi(const ProblemSpec& spec, double z) {
  if (spec.loss == LossKind::kRidge) return z - spec.ridge_target;
  return 1.0 / (1.0 + std::exp(-z));
}

}  // namespace

double oracle_primal(const ProblemSpec& spec, const Eigen::MatrixXd& a, const Vector& x) {
  const Vector z = a * x;
  double loss = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) loss += phi(spec, z[i]);
  double reg = 0.5 * spec.lambda * x.squaredNorm();
  if (spec.kappa_shift)
    reg += 0.5 * spec.kappa_shift->kappa * (x - spec.kappa_shift->anchor).squaredNorm();
  return loss / static_cast<double>(a.rows()) + reg;
}

Vector oracle_gradient(const ProblemSpec& spec, const Eigen::MatrixXd& a, const Vector& x) {
  const Vector z = a * x;
  Vector s(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) s[i] = dphi(spec, z[i]);
  Vector g = a.transpose() * s / static_cast<double>(a.rows()) + spec.lambda * x;
  if (spec.kappa_shift) g += spec.kappa_shift->kappa * (x - spec.kappa_shift->anchor);
  return g;
}

Vector oracle_minimizer(const ProblemSpec& spec, const Eigen::MatrixXd& a, double tol,
                        int max_iter) {
  const double curvature = spec.loss == LossKind::kLogistic ? 0.25 : 1.0;
  const double mu = spec.strong_convexity();
  const double lip = curvature * oracle_lambda_max(a) / static_cast<double>(a.rows()) + mu;
  Vector x = Vector::Zero(a.cols());
  for (int it = 0; it < max_iter; ++it) {
    const Vector g = oracle_gradient(spec, a, x);
    if (g.norm() <= tol) break;
    x -= g / lip;
  }
  return x;
}

double oracle_lambda_max(const Eigen::MatrixXd& rows) {
  const Eigen::MatrixXd gram = rows.transpose() * rows;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().maxCoeff();
}

double fit_rate(const std::vector<double>& gaps) {
  std::vector<double> ks;
  std::vector<double> logs;
  for (std::size_t k = 0; k < gaps.size(); ++k) {
    if (gaps[k] > 0.0) {
      ks.push_back(static_cast<double>(k));
      logs.push_back(std::log(gaps[k]));
    }
  }
  if (ks.size() < 2) return 0.0;
  double mk = 0.0;
  double ml = 0.0;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    mk += ks[i];
    ml += logs[i];
  }
  mk /= static_cast<double>(ks.size());
  ml /= static_cast<double>(ks.size());
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    num += (ks[i] - mk) * (logs[i] - ml);
    den += (ks[i] - mk) * (ks[i] - mk);
  }
  return std::exp(num / den);
}

double bisect_dual_prox(double u, double y_prev, double sigma, int steps) {
  auto f = [&](double y) { return u - std::log(y / (1.0 - y)) - (y - y_prev) / sigma; };
  double lo = 1e-15;
  double hi = 1.0 - 1e-15;
  for (int s = 0; s < steps; ++s) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace ecopt::testing
