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

#ifndef ECOPT_ECSPDC_HPP
#define ECOPT_ECSPDC_HPP

#include <cstdint>
#include <optional>

#include "ecopt/compressor.hpp"
#include "ecopt/constants.hpp"
#include "ecopt/solver_common.hpp"

namespace ecopt {

struct EcspdcParams {
  double sigma = 1.0;
  double eta = 1.0;
  double theta = 0.5;
  CompressorSpec q = CompressorSpec::identity(1);
  CompressorSpec q1 = CompressorSpec::identity(1);
};

enum class SpdcLearnerInit {
  kZero,
  /// h_tau = u_tau; the server needs h, so one dense message per node.
  kSynchronized,
};

struct EcspdcInit {
  Vector x0;
  std::optional<Vector> y = std::nullopt;  // defaults to zero
  SpdcLearnerInit h_init = SpdcLearnerInit::kZero;
  std::optional<NodeTable> h_table = std::nullopt;  // overrides h_init
};

struct EcspdcState {
  EcspdcParams params;
  Vector x;
  Vector z;       // extrapolated point
  Vector y;       // one dual per global sample
  NodeTable u;    // (1/m) sum_i A_i y_i per node
  NodeTable h_node;
  NodeTable e;
  Vector h;
  std::uint64_t step = 0;
};

enum class SpdcRadius {
  kR2,  // contraction compressors only
  kR3,  // additionally E[Q(x)] = delta x
};

/// R_2^2 or R_3^2 from the constants and compressor parameters.
double spdc_radius_squared(const ProblemConstants& constants, int m, int n,
                           double delta, double delta1, SpdcRadius mode);

struct SpdcParameters {
  double sigma = 0.0;
  double eta = 0.0;
  double theta = 0.0;
  double radius_sq = 0.0;
};

/// sigma = sqrt(m lambda/gamma)/(2R), eta = sqrt(gamma/(m lambda))/(2R),
/// theta = 1 - min{1/(m + 4R sqrt(m/(lambda gamma))), delta/6, delta1/6}.
SpdcParameters spdc_parameters(double radius_sq, int m, double lambda,
                               double gamma, double delta, double delta1);

/// Requires radius_sq/(lambda gamma) >= 1; otherwise ConfigError unless
/// `allow_small_radius`, in which case a warning is logged.
SpdcParameters ecspdc_configure(const ProblemConstants& constants, int m, int n,
                                double lambda, double gamma, double delta,
                                double delta1, SpdcRadius mode,
                                bool allow_small_radius = false);

EcspdcState ecspdc_init(const SimContext& ctx, const EcspdcParams& params,
                        EcspdcInit init, std::uint64_t first_step = 0);

StepReport ecspdc_step(EcspdcState& state, const SimContext& ctx);

}  // namespace ecopt

#endif  // ECOPT_ECSPDC_HPP
