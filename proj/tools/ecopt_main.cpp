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

// ecopt command line: certify, solve, grid, reference.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ecopt/compressor.hpp"
#include "ecopt/errors.hpp"
#include "ecopt/experiment.hpp"
#include "ecopt/logging.hpp"
#include "ecopt/random.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

std::string flag_name(const std::string& key) {
  std::string out = key;
  for (char& c : out)
    if (c == '_') c = '-';
  return out;
}

// Raw flag text converted to the JSON type of the field's default.
nlohmann::json flag_value(const nlohmann::json& default_value, const std::string& text) {
  if (default_value.is_string()) return text;
  if (default_value.is_array()) {
    const auto parsed = nlohmann::json::parse("[" + text + "]", nullptr, false);
    if (parsed.is_discarded()) throw ecopt::ConfigError("bad list '" + text + "'");
    return parsed;
  }
  if (default_value.is_boolean()) {
    if (text == "true" || text == "1") return true;
    if (text == "false" || text == "0") return false;
    throw ecopt::ConfigError("bad boolean '" + text + "'");
  }
  const auto parsed = nlohmann::json::parse(text, nullptr, false);
  if (!parsed.is_discarded()) return parsed;
  if (default_value.is_null()) return text;
  throw ecopt::ConfigError("bad value '" + text + "'");
}

// One --kebab-case option per ExperimentConfig field, plus --config FILE.
struct ConfigFlags {
  std::string config_file;
  std::map<std::string, std::string> values;

  void attach(CLI::App& app) {
    app.add_option("--config", config_file, "JSON experiment config used as the base");
    const nlohmann::json defaults = ecopt::ExperimentConfig{}.to_json();
    for (const auto& [key, value] : defaults.items()) {
      std::string description = "config field " + key;
      if (!value.is_null()) description += " (default " + value.dump() + ")";
      app.add_option("--" + flag_name(key), values[key], description);
    }
  }

  ecopt::ExperimentConfig resolve(const CLI::App& app) const {
    nlohmann::json j = nlohmann::json::object();
    if (!config_file.empty()) {
      std::ifstream in(config_file);
      if (!in) throw ecopt::ConfigError("cannot open config " + config_file);
      j = nlohmann::json::parse(in, nullptr, false);
      if (j.is_discarded()) throw ecopt::ConfigError("config " + config_file + " is not JSON");
    }
    const nlohmann::json defaults = ecopt::ExperimentConfig{}.to_json();
    for (const auto& [key, text] : values) {
      if (app.count("--" + flag_name(key)) == 0) continue;
      try {
        j[key] = flag_value(defaults.at(key), text);
      } catch (const ecopt::ConfigError& e) {
        throw ecopt::ConfigError("--" + flag_name(key) + ": " + e.what());
      }
    }
    return ecopt::ExperimentConfig::from_json(j);
  }
};

void write_trace(const ecopt::Trace& trace, const nlohmann::json& config,
                 const std::string& path) {
  if (path.empty() || path == "-") {
    trace.write_csv(std::cout);
    return;
  }
  std::ofstream csv(path);
  if (!csv) throw ecopt::ConfigError("cannot write " + path);
  trace.write_csv(csv);
  nlohmann::json sidecar = trace.metadata;
  sidecar["config"] = config;
  std::ofstream(path + ".json") << sidecar.dump(2) << '\n';
}

nlohmann::json certify(const std::string& text, int dim, int trials, std::uint64_t seed) {
  ecopt::Rng rng(seed);
  const ecopt::CompressorSpec spec = ecopt::parse_compressor(text, dim, rng);
  nlohmann::json report;
  report["compressor"] = spec.name();
  report["dim"] = dim;
  report["trials"] = trials;
  report["randomized"] = spec.is_randomized();
  report["unbiased"] = spec.is_unbiased();
  if (spec.is_contraction()) {
    const auto c = ecopt::certify_contraction(spec, trials, rng);
    report["delta"] = spec.delta_bound();
    report["contraction"] = {{"max_ratio", c.max_ratio},
                             {"standard_error", c.standard_error},
                             {"bound", c.bound},
                             {"holds", c.max_ratio <= c.bound + 3 * c.standard_error + 1e-12}};
  }
  if (spec.is_unbiased() || spec.satisfies_mean_delta()) {
    const auto m = ecopt::certify_mean(spec, trials, rng);
    report["mean"] = {{"max_error", m.max_mean_error}, {"sigma", m.sigma}, {"scale", m.scale}};
  }
  if (spec.is_unbiased()) {
    const auto w = ecopt::estimate_omega(spec, trials, rng);
    report["omega"] = {{"estimate", w.omega}, {"standard_error", w.standard_error}};
  }
  report["message_bits_dense_input"] = ecopt::message_bits(
      spec, spec.kind() == ecopt::CompressorSpec::Kind::kTopK ||
                    spec.kind() == ecopt::CompressorSpec::Kind::kRandK
                ? spec.k()
                : dim,
      dim);
  return report;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"error-compensated distributed optimization"};
  app.require_subcommand(1);
  bool quiet = false;
  app.add_flag("-q,--quiet", quiet, "suppress info and warning logs");

  auto* certify_cmd = app.add_subcommand("certify", "Monte Carlo compressor property report");
  std::string compressor = "top:1";
  int dim = 100;
  int trials = 100;
  std::uint64_t certify_seed = 1;
  certify_cmd->add_option("--compressor", compressor, "compressor expression")->capture_default_str();
  certify_cmd->add_option("--dim", dim, "vector dimension")->capture_default_str()->check(CLI::PositiveNumber);
  certify_cmd->add_option("--trials", trials, "probe vectors")->capture_default_str()->check(CLI::PositiveNumber);
  certify_cmd->add_option("--seed", certify_seed, "rng seed")->capture_default_str();

  auto* solve_cmd = app.add_subcommand("solve", "single run, CSV trace plus JSON sidecar");
  ConfigFlags solve_flags;
  solve_flags.attach(*solve_cmd);
  std::string solve_output = "-";
  solve_cmd->add_option("-o,--output", solve_output, "trace CSV path, '-' for stdout");

  auto* grid_cmd = app.add_subcommand("grid", "grid search ranked by bits to target");
  ConfigFlags grid_flags;
  grid_flags.attach(*grid_cmd);
  std::string grid_dir = "grid_out";
  grid_cmd->add_option("-o,--output-dir", grid_dir, "directory for traces and summary.json")->capture_default_str();

  auto* reference_cmd = app.add_subcommand("reference", "compute (and cache) P* and constants");
  ConfigFlags reference_flags;
  reference_flags.attach(*reference_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }
  ecopt::set_quiet(quiet);

  try {
    if (*certify_cmd) {
      std::cout << certify(compressor, dim, trials, certify_seed).dump(2) << '\n';
    } else if (*solve_cmd) {
      const auto config = solve_flags.resolve(*solve_cmd);
      const auto trace = ecopt::run_experiment(config);
      write_trace(trace, config.to_json(), solve_output);
    } else if (*grid_cmd) {
      const auto config = grid_flags.resolve(*grid_cmd);
      const auto result = ecopt::grid_search(config);
      std::filesystem::create_directories(grid_dir);
      nlohmann::json summary;
      summary["config"] = config.to_json();
      summary["config_hash"] = config.hash();
      summary["best"] = result.best;
      summary["entries"] = nlohmann::json::array();
      for (std::size_t i = 0; i < result.entries.size(); ++i) {
        const auto& entry = result.entries[i];
        const std::string file = "point_" + std::to_string(i) + ".csv";
        if (entry.error.empty())
          write_trace(entry.trace, config.to_json(), (std::filesystem::path(grid_dir) / file).string());
        summary["entries"].push_back(
            {{"point", entry.point.to_json()},
             {"trace", entry.error.empty() ? nlohmann::json(file) : nlohmann::json()},
             {"bits_to_target", entry.bits_to_target ? nlohmann::json(*entry.bits_to_target)
                                                     : nlohmann::json()},
             {"final_gap", entry.final_gap},
             {"diverged", entry.diverged},
             {"error", entry.error}});
      }
      std::ofstream(std::filesystem::path(grid_dir) / "summary.json") << summary.dump(2) << '\n';
      std::cout << result.entries[result.best].point.to_json().dump() << '\n';
    } else if (*reference_cmd) {
      const auto config = reference_flags.resolve(*reference_cmd);
      const auto prepared = ecopt::prepare_experiment(config);
      const auto& c = prepared.constants;
      nlohmann::json out;
      out["p_star"] = prepared.p_star;
      out["samples"] = prepared.dataset->size();
      out["dim"] = prepared.dataset->dim;
      out["constants"] = {{"R_m", c.R_m}, {"R_bar_sq", c.R_bar_sq}, {"R_sq", c.R_sq},
                          {"L", c.L},     {"L_bar", c.L_bar},       {"L_f", c.L_f}};
      out["q"] = prepared.q.name();
      out["q1"] = prepared.q1.name();
      std::cout << out.dump(2) << '\n';
    }
  } catch (const ecopt::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const ecopt::NumericalFailure& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kExitNumerical;
  } catch (const nlohmann::json::exception& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::filesystem::filesystem_error& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
