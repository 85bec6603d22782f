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

#ifndef ECOPT_EXPERIMENT_HPP
#define ECOPT_EXPERIMENT_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "ecopt/catalyst.hpp"
#include "ecopt/compressor.hpp"
#include "ecopt/constants.hpp"
#include "ecopt/dataset.hpp"
#include "ecopt/ecspdc.hpp"
#include "ecopt/problem.hpp"
#include "ecopt/simnet.hpp"
#include "ecopt/trace.hpp"

namespace ecopt {

enum class Algorithm {
  kEcLsvrg,
  kEcSdca,
  kEcSpdc,
  kEcLsvrgCatalyst,
  kEcSdcaCatalyst,
};

std::string_view to_string(Algorithm algorithm) noexcept;
Algorithm algorithm_from_string(std::string_view text);

/// Everything needed to reproduce one experiment or grid. Defaults follow the
/// logistic-regression profile: lambda = 1e-5, 20 nodes, Q1 = Q, p = delta,
/// dithering with round(sqrt(d)) levels, inner budgets {1,2,5,10,100} * d.
struct ExperimentConfig {
  std::string dataset_path;
  /// In-memory data (label-folded) used instead of dataset_path; not part of
  /// the serialized config, so set `dataset_tag` to keep hashes distinct.
  std::shared_ptr<const Dataset> dataset;
  std::string dataset_tag;
  std::optional<int> dim;

  LossKind loss = LossKind::kLogistic;
  double lambda = 1e-5;
  double ridge_target = -1.0;
  int nodes = 20;
  std::uint64_t partition_seed = 0;

  Algorithm algorithm = Algorithm::kEcSdcaCatalyst;
  std::string compressor = "top:1";
  std::optional<std::string> compressor_q1;  // defaults to `compressor`
  std::uint64_t compressor_seed = 7;         // omega measurement

  /// EC-LSVRG stepsize; ECSPDC eta override (sigma keeps sigma*eta = 1/(4R^2)).
  std::vector<double> eta_grid;
  /// EC-SDCA theta override.
  std::vector<double> theta_grid;
  /// Catalyst kappa; empty selects the communication-optimal kappa.
  std::vector<double> kappa_grid;
  /// Catalyst inner iterations T = multiplier * d.
  std::vector<double> inner_multipliers{1, 2, 5, 10, 100};
  std::vector<std::uint64_t> seeds{1};
  std::optional<double> checkpoint_probability;  // EC-LSVRG p, default delta(Q1)

  WarmStart warm_start = WarmStart::kCompressedCarry;
  LsvrgHCarry h_carry = LsvrgHCarry::kKappaCorrected;
  LsvrgOutput lsvrg_output = LsvrgOutput::kLastIterate;
  SpdcRadius spdc_radius = SpdcRadius::kR2;
  bool allow_small_radius = false;

  std::uint64_t max_steps = 100'000;
  std::optional<std::uint64_t> bit_cap;
  double target_gap = 1e-6;
  bool stop_at_target = false;
  std::optional<std::uint64_t> trace_stride;  // default: ceil(N/n)
  bool count_downlink = false;
  int workers = 1;
  int grid_jobs = 1;
  std::string reference_cache_dir;

  nlohmann::json to_json() const;
  static ExperimentConfig from_json(const nlohmann::json& json);

  /// FNV-1a of the canonical JSON form, as 16 hex digits.
  std::string hash() const;

  void validate() const;
};

/// Data, partition, problem, constants and P* shared by every grid point.
struct PreparedExperiment {
  std::shared_ptr<const Dataset> dataset;
  std::shared_ptr<const NodePartition> partition;
  ProblemSpec problem;
  ProblemConstants constants;
  CompressorSpec q = CompressorSpec::identity(1);
  CompressorSpec q1 = CompressorSpec::identity(1);
  double p_star = 0.0;
};

PreparedExperiment prepare_experiment(const ExperimentConfig& config);

/// One point of the search grid.
struct RunPoint {
  std::optional<double> eta;
  std::optional<double> theta;
  std::optional<double> kappa;
  std::optional<double> inner_multiplier;
  std::uint64_t seed = 1;

  nlohmann::json to_json() const;
};

std::vector<RunPoint> grid_points(const ExperimentConfig& config);

/// Run a single configured point; the trace metadata carries the config hash,
/// P*, seed and resolved parameters.
Trace run_experiment(const PreparedExperiment& prepared,
                     const ExperimentConfig& config, const RunPoint& point);

/// First grid point of `config`.
Trace run_experiment(const ExperimentConfig& config);

struct GridEntry {
  RunPoint point;
  Trace trace;
  std::optional<std::uint64_t> bits_to_target;
  double final_gap = 0.0;
  bool diverged = false;
  std::string error;
};

struct GridResult {
  std::size_t best = 0;
  std::vector<GridEntry> entries;
};

/// Ranks points by bits needed to reach config.target_gap, ties and
/// never-reaching points by final gap. Diverged points rank last.
GridResult grid_search(const ExperimentConfig& config);
GridResult grid_search(const PreparedExperiment& prepared,
                       const ExperimentConfig& config);

}  // namespace ecopt

#endif  // ECOPT_EXPERIMENT_HPP
