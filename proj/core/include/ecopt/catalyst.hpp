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

#ifndef ECOPT_CATALYST_HPP
#define ECOPT_CATALYST_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <variant>
#include <vector>

#include "ecopt/compressor.hpp"
#include "ecopt/constants.hpp"
#include "ecopt/eclsvrg.hpp"
#include "ecopt/ecsdca.hpp"
#include "ecopt/solver_common.hpp"
#include "ecopt/trace.hpp"

namespace ecopt {

/// Positive root of a^2 = (1 - a) a_prev^2 + q a.
double alpha_next(double alpha_prev, double q);

/// beta_k = a_prev (1 - a_prev) / (a_prev^2 + a).
double beta_coeff(double alpha_prev, double alpha);

/// eps_k = (2/9) eps0 (1 - rho0)^k.
double epsilon_k(int k, double epsilon0, double rho0);

/// U_d / r_Q for one message of `q` on R^dim.
double cost_ratio(const CompressorSpec& q, int dim);

/// kappa = max{lambda_1, lambda} - lambda with lambda_1 = a_1/(1/delta +
/// cost_ratio) (a_2 under the mean assumption).
double optimal_kappa_lsvrg(const ProblemConstants& constants, double delta,
                           int n, double cost_ratio, bool assume_mean_delta,
                           double lambda);

/// kappa = max{lambda, lambda_3} - lambda with lambda_3 = a_3/(1/delta + m +
/// cost_ratio) (a_4 under the mean assumption).
double optimal_kappa_sdca(const ProblemConstants& constants, double delta,
                          int m, int n, double gamma, double cost_ratio,
                          bool assume_mean_delta, double lambda);

enum class WarmStart {
  /// e = 0 and exact h (EC-LSVRG) or u (EC-SDCA); n dense messages/boundary.
  kFullSync,
  /// Carry h, e (EC-LSVRG) or alpha, u, e (EC-SDCA); no extra messages.
  kCompressedCarry,
};

struct FixedIters {
  std::uint64_t iterations = 0;
};

/// Stop the k-th inner solve once G_k(x) - G_k* <= eps_k. Test-only: the
/// callback must return the exact minimum of the shifted problem.
struct OracleGap {
  std::function<double(const ProblemSpec&)> subproblem_optimum;
  std::uint64_t check_stride = 1;
  std::uint64_t max_iterations = 1'000'000;
};

/// EC-SDCA only: stop once G_k(x) - D_k(alpha) <= eps_k.
struct DualityGapBudget {
  std::uint64_t check_stride = 1;
  std::uint64_t max_iterations = 1'000'000;
};

using InnerBudget = std::variant<FixedIters, OracleGap, DualityGapBudget>;

struct CatalystSchedule {
  double kappa = 0.0;
  double q = 1.0;
  double rho0 = 0.9;
  double alpha0 = 1.0;
  double epsilon0 = 1.0;
  WarmStart warm_start = WarmStart::kCompressedCarry;
  InnerBudget budget = FixedIters{100};

  /// q = lambda/(lambda + kappa), alpha0 = sqrt(q), rho0 = 0.9 sqrt(q) unless
  /// given.
  static CatalystSchedule make(double lambda, double kappa, double epsilon0,
                               WarmStart warm_start, InnerBudget budget,
                               std::optional<double> rho0 = std::nullopt);

  /// q in (0,1], 0 < rho0 < sqrt(q), alpha0 = sqrt(q).
  void validate() const;
};

enum class LsvrgHCarry {
  kPlain,           // h_tau carried as is
  kKappaCorrected,  // h_tau + kappa (y^{k-2} - y^{k-1})
};

enum class LsvrgOutput { kLastIterate, kAveraged };

struct EclsvrgInnerConfig {
  double eta = 0.1;
  std::optional<double> p;  // defaults to delta of Q1
  CompressorSpec q = CompressorSpec::identity(1);
  CompressorSpec q1 = CompressorSpec::identity(1);
  LsvrgHCarry h_carry = LsvrgHCarry::kKappaCorrected;
  LsvrgOutput output = LsvrgOutput::kLastIterate;
};

struct EcsdcaInnerConfig {
  std::optional<double> theta;  // defaults to default_sdca_theta with lambda+kappa
  CompressorSpec q = CompressorSpec::identity(1);
};

using InnerConfig = std::variant<EclsvrgInnerConfig, EcsdcaInnerConfig>;

struct OuterRecord {
  int k = 0;
  std::uint64_t inner_steps = 0;
  double epsilon = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  std::uint64_t bits_after = 0;
  bool budget_met = true;
  std::optional<double> subproblem_gap;  // last checked gap, gap budgets only
  Vector x;
};

/// Optional inspection points, called right after the warm start and right
/// after the last inner step of outer iteration k.
struct CatalystHooks {
  std::function<void(int k, const EcsdcaState&, const ProblemSpec&, bool at_start)>
      sdca;
  std::function<void(int k, const EclsvrgState&, const ProblemSpec&, bool at_start)>
      lsvrg;
};

struct CatalystResult {
  Vector x;
  std::vector<OuterRecord> outer;
  std::uint64_t total_steps = 0;
  bool stopped_by_limits = false;
};

struct CatalystRun {
  const ProblemSpec& problem;  // unshifted
  const NodePartition& partition;
  const ProblemConstants& constants;
  CommLedger& ledger;
  const Cluster& cluster;
  const RngStreams& streams;
};

/// eps0 surrogate: P(x0) - D(0) when a dual exists, else P(x0).
double catalyst_epsilon0(const ProblemSpec& problem,
                         const NodePartition& partition, const Vector& x0,
                         bool dual_available);

/// Outer loop: minimise G_k = P + (kappa/2)||. - y^{k-1}||^2 approximately
/// with the inner solver, then extrapolate y^k = x^k + beta_k (x^k - x^{k-1}).
/// Throws InnerDivergence when G_k at a check exceeds 1e6 times its start.
CatalystResult catalyst_run(const CatalystRun& run, const InnerConfig& inner,
                            const CatalystSchedule& schedule, int outer_iters,
                            const Vector& x0, TraceRecorder* recorder = nullptr,
                            const RunLimits& limits = {},
                            const CatalystHooks& hooks = {});

}  // namespace ecopt

#endif  // ECOPT_CATALYST_HPP
