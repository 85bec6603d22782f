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

#ifndef ECOPT_TESTS_FIXTURES_HPP
#define ECOPT_TESTS_FIXTURES_HPP

#include <cstdint>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "ecopt/dataset.hpp"
#include "ecopt/problem.hpp"
#include "ecopt/random.hpp"
#include "ecopt/simnet.hpp"
#include "ecopt/solver_common.hpp"

namespace ecopt::testing {

/// Random +-1 labelled data with Gaussian entries; each entry is kept with
/// probability `density` (at least one per row). Labels are folded.
std::shared_ptr<Dataset> random_dataset(int samples, int dim, double density,
                                        std::uint64_t seed, bool fold = true);

/// Rows given densely, labels folded.
std::shared_ptr<Dataset> dense_dataset(const std::vector<std::vector<double>>& rows,
                                       const std::vector<double>& labels);

/// Owns everything a solver context refers to.
struct Sim {
  Sim(std::shared_ptr<const Dataset> data, int nodes, ProblemSpec problem,
      std::uint64_t seed = 1, bool contiguous = false);

  SimContext ctx() { return SimContext{problem, partition, ledger, cluster, streams}; }
  SimContext ctx(const ProblemSpec& shifted) {
    return SimContext{shifted, partition, ledger, cluster, streams};
  }

  std::shared_ptr<const Dataset> data;
  NodePartition partition;
  ProblemSpec problem;
  CommLedger ledger;
  Cluster cluster;
  RngStreams streams;
};

/// N x d matrix of partition rows in global order.
Eigen::MatrixXd dense_rows(const NodePartition& partition);

/// Independent dense evaluations of P and its gradient.
double oracle_primal(const ProblemSpec& spec, const Eigen::MatrixXd& a, const Vector& x);
Vector oracle_gradient(const ProblemSpec& spec, const Eigen::MatrixXd& a, const Vector& x);

/// Minimum of P by plain gradient descent on the dense form, run to a
/// gradient norm of `tol`.
Vector oracle_minimizer(const ProblemSpec& spec, const Eigen::MatrixXd& a,
                        double tol = 1e-13, int max_iter = 2'000'000);

/// Largest eigenvalue by a dense symmetric eigensolver.
double oracle_lambda_max(const Eigen::MatrixXd& rows);

/// Least-squares geometric rate r of gaps[k] ~ c r^k over positive gaps.
double fit_rate(const std::vector<double>& gaps);

/// Logistic phi* derivative bisected for `steps` halvings (independent of the
/// library implementation).
double bisect_dual_prox(double u, double y_prev, double sigma, int steps = 200);

}  // namespace ecopt::testing

#endif  // ECOPT_TESTS_FIXTURES_HPP
