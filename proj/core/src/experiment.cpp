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

#include "ecopt/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <mutex>
#include <set>
#include <thread>
#include <tuple>

#include "ecopt/eclsvrg.hpp"
#include "ecopt/ecsdca.hpp"
#include "ecopt/errors.hpp"
#include "ecopt/libsvm.hpp"
#include "ecopt/logging.hpp"
#include "ecopt/reference.hpp"

namespace ecopt {

namespace {

constexpr std::pair<Algorithm, std::string_view> kAlgorithmNames[] = {
    {Algorithm::kEcLsvrg, "ec-lsvrg"},
    {Algorithm::kEcSdca, "ec-sdca"},
    {Algorithm::kEcSpdc, "ecspdc"},
    {Algorithm::kEcLsvrgCatalyst, "ec-lsvrg+catalyst"},
    {Algorithm::kEcSdcaCatalyst, "ec-sdca+catalyst"},
};

bool is_catalyst(Algorithm a) {
  return a == Algorithm::kEcLsvrgCatalyst || a == Algorithm::kEcSdcaCatalyst;
}
bool uses_eta(Algorithm a) {
  return a == Algorithm::kEcLsvrg || a == Algorithm::kEcLsvrgCatalyst ||
         a == Algorithm::kEcSpdc;
}
bool uses_theta(Algorithm a) {
  return a == Algorithm::kEcSdca || a == Algorithm::kEcSdcaCatalyst;
}

std::string_view to_string(WarmStart w) {
  return w == WarmStart::kFullSync ? "full-sync" : "compressed-carry";
}
std::string_view to_string(LsvrgHCarry h) {
  return h == LsvrgHCarry::kPlain ? "plain" : "kappa-corrected";
}
std::string_view to_string(LsvrgOutput o) {
  return o == LsvrgOutput::kLastIterate ? "last" : "averaged";
}
std::string_view to_string(SpdcRadius r) { return r == SpdcRadius::kR2 ? "r2" : "r3"; }

template <class E>
E enum_from(const nlohmann::json& j, std::initializer_list<E> values) {
  const auto text = j.get<std::string>();
  for (E v : values)
    if (to_string(v) == text) return v;
  throw ConfigError("unknown option value '" + text + "'");
}

template <class T>
nlohmann::json optional_json(const std::optional<T>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

template <class T>
std::optional<T> optional_from(const nlohmann::json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<T>();
}

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

std::string_view to_string(Algorithm algorithm) noexcept {
  for (const auto& [a, name] : kAlgorithmNames)
    if (a == algorithm) return name;
  return "unknown";
}

Algorithm algorithm_from_string(std::string_view text) {
  for (const auto& [a, name] : kAlgorithmNames)
    if (name == text) return a;
  throw ConfigError("unknown algorithm '" + std::string(text) + "'");
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json j;
  j["dataset_path"] = dataset_path;
  j["dataset_tag"] = dataset_tag;
  j["dim"] = optional_json(dim);
  j["loss"] = std::string(ecopt::to_string(loss));
  j["lambda"] = lambda;
  j["ridge_target"] = ridge_target;
  j["nodes"] = nodes;
  j["partition_seed"] = partition_seed;
  j["algorithm"] = std::string(ecopt::to_string(algorithm));
  j["compressor"] = compressor;
  j["compressor_q1"] = optional_json(compressor_q1);
  j["compressor_seed"] = compressor_seed;
  j["eta_grid"] = eta_grid;
  j["theta_grid"] = theta_grid;
  j["kappa_grid"] = kappa_grid;
  j["inner_multipliers"] = inner_multipliers;
  j["seeds"] = seeds;
  j["checkpoint_probability"] = optional_json(checkpoint_probability);
  j["warm_start"] = std::string(to_string(warm_start));
  j["h_carry"] = std::string(to_string(h_carry));
  j["lsvrg_output"] = std::string(to_string(lsvrg_output));
  j["spdc_radius"] = std::string(to_string(spdc_radius));
  j["allow_small_radius"] = allow_small_radius;
  j["max_steps"] = max_steps;
  j["bit_cap"] = optional_json(bit_cap);
  j["target_gap"] = target_gap;
  j["stop_at_target"] = stop_at_target;
  j["trace_stride"] = optional_json(trace_stride);
  j["count_downlink"] = count_downlink;
  j["workers"] = workers;
  j["grid_jobs"] = grid_jobs;
  j["reference_cache_dir"] = reference_cache_dir;
  return j;
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("experiment config must be a JSON object");
  const std::set<std::string> known = [] {
    std::set<std::string> keys;
    const nlohmann::json defaults = ExperimentConfig{}.to_json();
    for (const auto& [k, v] : defaults.items()) keys.insert(k);
    return keys;
  }();
  for (const auto& [k, v] : j.items())
    if (!known.count(k)) throw ConfigError("unknown config key '" + k + "'");

  ExperimentConfig c;
  try {
    auto get = [&](const char* key, auto& field) {
      if (j.contains(key)) j.at(key).get_to(field);
    };
    auto get_opt = [&](const char* key, auto& field) {
      using T = typename std::remove_reference_t<decltype(field)>::value_type;
      if (j.contains(key)) field = optional_from<T>(j.at(key));
    };
    get("dataset_path", c.dataset_path);
    get("dataset_tag", c.dataset_tag);
    get_opt("dim", c.dim);
    if (j.contains("loss")) c.loss = loss_from_string(j.at("loss").get<std::string>());
    get("lambda", c.lambda);
    get("ridge_target", c.ridge_target);
    get("nodes", c.nodes);
    get("partition_seed", c.partition_seed);
    if (j.contains("algorithm"))
      c.algorithm = algorithm_from_string(j.at("algorithm").get<std::string>());
    get("compressor", c.compressor);
    get_opt("compressor_q1", c.compressor_q1);
    get("compressor_seed", c.compressor_seed);
    get("eta_grid", c.eta_grid);
    get("theta_grid", c.theta_grid);
    get("kappa_grid", c.kappa_grid);
    get("inner_multipliers", c.inner_multipliers);
    get("seeds", c.seeds);
    get_opt("checkpoint_probability", c.checkpoint_probability);
    if (j.contains("warm_start"))
      c.warm_start = enum_from(j.at("warm_start"),
                               {WarmStart::kFullSync, WarmStart::kCompressedCarry});
    if (j.contains("h_carry"))
      c.h_carry = enum_from(j.at("h_carry"),
                            {LsvrgHCarry::kPlain, LsvrgHCarry::kKappaCorrected});
    if (j.contains("lsvrg_output"))
      c.lsvrg_output = enum_from(j.at("lsvrg_output"),
                                 {LsvrgOutput::kLastIterate, LsvrgOutput::kAveraged});
    if (j.contains("spdc_radius"))
      c.spdc_radius = enum_from(j.at("spdc_radius"), {SpdcRadius::kR2, SpdcRadius::kR3});
    get("allow_small_radius", c.allow_small_radius);
    get("max_steps", c.max_steps);
    get_opt("bit_cap", c.bit_cap);
    get("target_gap", c.target_gap);
    get("stop_at_target", c.stop_at_target);
    get_opt("trace_stride", c.trace_stride);
    get("count_downlink", c.count_downlink);
    get("workers", c.workers);
    get("grid_jobs", c.grid_jobs);
    get("reference_cache_dir", c.reference_cache_dir);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
  return c;
}

std::string ExperimentConfig::hash() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, fnv1a(to_json().dump()));
  return buf;
}

void ExperimentConfig::validate() const {
  if (dataset_path.empty() && !dataset)
    throw ConfigError("no dataset: set dataset_path");
  if (!(lambda > 0.0)) throw ConfigError("lambda must be positive");
  if (nodes < 1) throw ConfigError("nodes must be at least 1");
  if (seeds.empty()) throw ConfigError("seed list is empty");
  auto positive = [](const std::vector<double>& grid, const char* name) {
    for (double v : grid)
      if (!(v > 0.0) || !std::isfinite(v))
        throw ConfigError(std::string(name) + " entries must be positive");
  };
  positive(eta_grid, "eta grid");
  positive(theta_grid, "theta grid");
  for (double v : theta_grid)
    if (v > 1.0) throw ConfigError("theta grid entries must be <= 1");
  for (double v : kappa_grid)
    if (!(v >= 0.0)) throw ConfigError("kappa grid entries must be nonnegative");
  positive(inner_multipliers, "inner multiplier grid");
  if (is_catalyst(algorithm) && inner_multipliers.empty())
    throw ConfigError("inner multiplier grid is empty");
  if (checkpoint_probability &&
      !(*checkpoint_probability > 0.0 && *checkpoint_probability <= 1.0))
    throw ConfigError("checkpoint probability must lie in (0, 1]");
  if (!(target_gap > 0.0)) throw ConfigError("target gap must be positive");
  if (trace_stride && *trace_stride == 0) throw ConfigError("trace stride must be positive");
  if (workers < 1 || grid_jobs < 1) throw ConfigError("workers and jobs must be positive");
}

PreparedExperiment prepare_experiment(const ExperimentConfig& config) {
  config.validate();
  PreparedExperiment prep;
  if (config.dataset) {
    if (config.dataset->labels_folded) {
      prep.dataset = config.dataset;
    } else {
      auto copy = std::make_shared<Dataset>(*config.dataset);
      copy->fold_labels();
      prep.dataset = std::move(copy);
    }
  } else {
    prep.dataset = std::make_shared<const Dataset>(load_libsvm(config.dataset_path, config.dim));
  }
  if (prep.dataset->dim < 1) throw ConfigError("dataset has no features");
  prep.partition = std::make_shared<const NodePartition>(
      NodePartition::shuffled(prep.dataset, config.nodes, config.partition_seed));
  prep.problem = config.loss == LossKind::kLogistic
                     ? ProblemSpec::logistic(config.lambda)
                     : ProblemSpec::ridge(config.lambda, config.ridge_target);
  prep.constants = compute_constants(*prep.partition, prep.problem.gamma);

  const int d = prep.dataset->dim;
  Rng rq(config.compressor_seed);
  Rng rq1(mix64(config.compressor_seed + 1));
  prep.q = parse_compressor(config.compressor, d, rq);
  prep.q1 = parse_compressor(config.compressor_q1.value_or(config.compressor), d, rq1);

  std::optional<ReferenceCache> cache;
  std::string key;
  if (!config.reference_cache_dir.empty()) {
    cache.emplace(config.reference_cache_dir);
    key = ReferenceCache::key(prep.problem, *prep.partition);
    if (auto hit = cache->lookup(key)) {
      prep.p_star = *hit;
      return prep;
    }
  }
  const ReferenceResult ref = reference_optimum(prep.problem, *prep.partition);
  prep.p_star = ref.p_star;
  if (cache) cache->store(key, ref);
  return prep;
}

nlohmann::json RunPoint::to_json() const {
  nlohmann::json j;
  j["eta"] = optional_json(eta);
  j["theta"] = optional_json(theta);
  j["kappa"] = optional_json(kappa);
  j["inner_multiplier"] = optional_json(inner_multiplier);
  j["seed"] = seed;
  return j;
}

std::vector<RunPoint> grid_points(const ExperimentConfig& config) {
  auto or_unset = [](const std::vector<double>& grid, bool used) {
    std::vector<std::optional<double>> out;
    if (used)
      for (double v : grid) out.emplace_back(v);
    if (out.empty()) out.emplace_back(std::nullopt);
    return out;
  };
  const Algorithm a = config.algorithm;
  const auto etas = or_unset(config.eta_grid, uses_eta(a));
  const auto thetas = or_unset(config.theta_grid, uses_theta(a));
  const auto kappas = or_unset(config.kappa_grid, is_catalyst(a));
  const auto inners = or_unset(config.inner_multipliers, is_catalyst(a));
  std::vector<RunPoint> points;
  for (auto eta : etas)
    for (auto theta : thetas)
      for (auto kappa : kappas)
        for (auto inner : inners)
          for (auto seed : config.seeds) points.push_back({eta, theta, kappa, inner, seed});
  return points;
}

namespace {

double default_lsvrg_eta(const ProblemConstants& c, double strong_convexity) {
  return 1.0 / (4.0 * (c.L + strong_convexity));
}

}  // namespace

Trace run_experiment(const PreparedExperiment& prep, const ExperimentConfig& config,
                     const RunPoint& point) {
  const NodePartition& partition = *prep.partition;
  const ProblemSpec& problem = prep.problem;
  const int d = partition.dim();
  const int n = partition.nodes();
  const int m = partition.per_node();

  CommLedger ledger(CommLedger::Options{false, config.count_downlink});
  const Cluster cluster(config.workers);
  const RngStreams streams(point.seed);
  const SimContext ctx{problem, partition, ledger, cluster, streams};
  TraceRecorder recorder(problem, partition, prep.p_star,
                         config.trace_stride.value_or(static_cast<std::uint64_t>(m)));
  RunLimits limits;
  limits.max_steps = config.max_steps;
  limits.bit_cap = config.bit_cap;
  if (config.stop_at_target) limits.stop_gap = config.target_gap;

  const Vector x0 = Vector::Zero(d);
  nlohmann::json resolved = point.to_json();
  recorder.observe(0, 0, 0, 0, x0, true);

  auto stop = [&](std::uint64_t steps) {
    return limits_reached(limits, steps, ledger.cumulative_bits(), recorder.last_gap());
  };
  std::uint64_t steps = 0;

  if (!stop(0)) {
    switch (config.algorithm) {
      case Algorithm::kEcLsvrg: {
        EclsvrgParams params;
        params.eta = point.eta.value_or(default_lsvrg_eta(prep.constants, problem.lambda));
        params.p = config.checkpoint_probability.value_or(prep.q1.delta_bound());
        params.q = prep.q;
        params.q1 = prep.q1;
        resolved["eta"] = params.eta;
        resolved["p"] = params.p;
        EclsvrgState state = eclsvrg_init(ctx, params, EclsvrgInit{x0, {}, {}});
        while (!stop(steps)) {
          eclsvrg_step(state, ctx);
          ++steps;
          recorder.observe(0, static_cast<std::int64_t>(steps), steps,
                           ledger.cumulative_bits(), state.x);
        }
        recorder.observe(0, static_cast<std::int64_t>(steps), steps,
                         ledger.cumulative_bits(), state.x, true);
        break;
      }
      case Algorithm::kEcSdca: {
        EcsdcaParams params;
        params.q = prep.q;
        params.theta = point.theta.value_or(
            default_sdca_theta(prep.constants, m, n, problem.gamma, problem.lambda));
        resolved["theta"] = params.theta;
        EcsdcaState state = ecsdca_init(ctx, params, EcsdcaInit{});
        while (!stop(steps)) {
          ecsdca_step(state, ctx);
          ++steps;
          recorder.observe(0, static_cast<std::int64_t>(steps), steps,
                           ledger.cumulative_bits(), ecsdca_primal(state, problem));
        }
        recorder.observe(0, static_cast<std::int64_t>(steps), steps,
                         ledger.cumulative_bits(), ecsdca_primal(state, problem), true);
        break;
      }
      case Algorithm::kEcSpdc: {
        if (config.spdc_radius == SpdcRadius::kR3 &&
            !(prep.q.satisfies_mean_delta() && prep.q1.satisfies_mean_delta()))
          throw ConfigError("the r3 radius needs compressors with E[Q(x)] = delta x");
        SpdcParameters sp = ecspdc_configure(
            prep.constants, m, n, problem.lambda, problem.gamma, prep.q.delta_bound(),
            prep.q1.delta_bound(), config.spdc_radius, config.allow_small_radius);
        if (point.eta) {
          sp.eta = *point.eta;
          sp.sigma = 1.0 / (4.0 * sp.radius_sq * sp.eta);
        }
        EcspdcParams params{sp.sigma, sp.eta, sp.theta, prep.q, prep.q1};
        resolved["eta"] = sp.eta;
        resolved["sigma"] = sp.sigma;
        resolved["theta"] = sp.theta;
        resolved["radius_sq"] = sp.radius_sq;
        EcspdcState state = ecspdc_init(ctx, params, EcspdcInit{x0, {}, {}, {}});
        while (!stop(steps)) {
          ecspdc_step(state, ctx);
          ++steps;
          recorder.observe(0, static_cast<std::int64_t>(steps), steps,
                           ledger.cumulative_bits(), state.x);
        }
        recorder.observe(0, static_cast<std::int64_t>(steps), steps,
                         ledger.cumulative_bits(), state.x, true);
        break;
      }
      case Algorithm::kEcLsvrgCatalyst:
      case Algorithm::kEcSdcaCatalyst: {
        const bool sdca = config.algorithm == Algorithm::kEcSdcaCatalyst;
        const double ratio =
            config.warm_start == WarmStart::kFullSync ? cost_ratio(prep.q, d) : 0.0;
        double kappa = 0.0;
        if (point.kappa) {
          kappa = *point.kappa;
        } else if (sdca) {
          kappa = optimal_kappa_sdca(prep.constants, prep.q.delta_bound(), m, n,
                                     problem.gamma, ratio, prep.q.satisfies_mean_delta(),
                                     problem.lambda);
        } else {
          kappa = optimal_kappa_lsvrg(prep.constants, prep.q.delta_bound(), n, ratio,
                                      prep.q.satisfies_mean_delta(), problem.lambda);
        }
        const double multiplier = point.inner_multiplier.value_or(1.0);
        const auto inner_iters =
            static_cast<std::uint64_t>(std::max(1.0, std::ceil(multiplier * d)));
        InnerConfig inner;
        if (sdca) {
          inner = EcsdcaInnerConfig{point.theta, prep.q};
        } else {
          EclsvrgInnerConfig cfg;
          cfg.eta = point.eta.value_or(
              default_lsvrg_eta(prep.constants, problem.lambda + kappa));
          cfg.p = config.checkpoint_probability;
          cfg.q = prep.q;
          cfg.q1 = prep.q1;
          cfg.h_carry = config.h_carry;
          cfg.output = config.lsvrg_output;
          resolved["eta"] = cfg.eta;
          inner = cfg;
        }
        const double eps0 = catalyst_epsilon0(problem, partition, x0, sdca);
        const CatalystSchedule schedule = CatalystSchedule::make(
            problem.lambda, kappa, eps0, config.warm_start, FixedIters{inner_iters});
        resolved["kappa"] = kappa;
        resolved["inner_iterations"] = inner_iters;
        resolved["rho0"] = schedule.rho0;
        const int outer = static_cast<int>(std::min<std::uint64_t>(
            config.max_steps / inner_iters + 1, std::numeric_limits<int>::max() - 1));
        const CatalystRun run{problem, partition, prep.constants, ledger, cluster, streams};
        const CatalystResult result =
            catalyst_run(run, inner, schedule, outer, x0, &recorder, limits);
        steps = result.total_steps;
        break;
      }
    }
  }

  Trace trace = recorder.trace();
  trace.metadata["config_hash"] = config.hash();
  trace.metadata["config"] = config.to_json();
  trace.metadata["p_star"] = prep.p_star;
  trace.metadata["seed"] = point.seed;
  trace.metadata["resolved"] = resolved;
  trace.metadata["steps"] = steps;
  trace.metadata["total_bits"] = ledger.cumulative_bits();
  trace.metadata["q"] = prep.q.name();
  trace.metadata["q1"] = prep.q1.name();
  return trace;
}

Trace run_experiment(const ExperimentConfig& config) {
  const PreparedExperiment prep = prepare_experiment(config);
  return run_experiment(prep, config, grid_points(config).front());
}

GridResult grid_search(const PreparedExperiment& prep, const ExperimentConfig& config) {
  const std::vector<RunPoint> points = grid_points(config);
  GridResult result;
  result.entries.resize(points.size());

  std::atomic<std::size_t> next{0};
  std::exception_ptr fatal;
  std::mutex fatal_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      GridEntry& entry = result.entries[i];
      entry.point = points[i];
      try {
        entry.trace = run_experiment(prep, config, points[i]);
        entry.final_gap = entry.trace.final_gap();
        if (auto hit = entry.trace.first_below(config.target_gap))
          entry.bits_to_target = hit->cumulative_bits;
        const double start = entry.trace.records.empty()
                                 ? entry.final_gap
                                 : entry.trace.records.front().primal_gap;
        if (!std::isfinite(entry.final_gap) ||
            entry.final_gap > 1e6 * std::max(std::abs(start), 1e-300)) {
          entry.diverged = true;
          entry.error = "objective diverged";
        }
      } catch (const NumericalFailure& e) {
        entry.diverged = true;
        entry.error = e.what();
        entry.final_gap = std::numeric_limits<double>::infinity();
        log_warning("grid point " + points[i].to_json().dump() + " failed: " + e.what());
      } catch (...) {
        std::lock_guard lock(fatal_mutex);
        if (!fatal) fatal = std::current_exception();
        next = points.size();
      }
    }
  };
  const int jobs = std::max(1, std::min<int>(config.grid_jobs, static_cast<int>(points.size())));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }
  if (fatal) std::rethrow_exception(fatal);

  auto rank = [](const GridEntry& e) {
    return std::make_tuple(e.diverged, !e.bits_to_target.has_value(),
                           e.bits_to_target.value_or(0), e.final_gap);
  };
  for (std::size_t i = 1; i < result.entries.size(); ++i)
    if (rank(result.entries[i]) < rank(result.entries[result.best])) result.best = i;
  return result;
}

GridResult grid_search(const ExperimentConfig& config) {
  return grid_search(prepare_experiment(config), config);
}

}  // namespace ecopt
