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

#include <algorithm>
#include <memory>
#include <random>

#include <benchmark/benchmark.h>

#include "ecopt/compressor.hpp"
#include "ecopt/constants.hpp"
#include "ecopt/dataset.hpp"
#include "ecopt/eclsvrg.hpp"
#include "ecopt/ecsdca.hpp"
#include "ecopt/problem.hpp"
#include "ecopt/random.hpp"
#include "ecopt/simnet.hpp"
#include "ecopt/solver_common.hpp"

namespace {

// 20 nodes of sparse logistic data, roughly a9a-shaped rows.
struct Setup {
  explicit Setup(int dim, int workers)
      : data(make_data(4000, dim)),
        partition(ecopt::NodePartition::shuffled(data, 20, 1)),
        problem(ecopt::ProblemSpec::logistic(1e-5)),
        cluster(workers),
        streams(1) {}

  static std::shared_ptr<const ecopt::Dataset> make_data(int samples, int dim) {
    auto data = std::make_shared<ecopt::Dataset>();
    data->dim = dim;
    ecopt::Rng rng(11);
    std::uniform_int_distribution<int> column(0, dim - 1);
    for (int i = 0; i < samples; ++i) {
      ecopt::SparseRow row;
      for (int j = 0; j < 14; ++j) {
        const int c = column(rng);
        bool seen = false;
        for (auto v : row.indices) seen |= v == c;
        if (seen) continue;
        row.indices.push_back(c);
        row.values.push_back(1.0);
      }
      std::sort(row.indices.begin(), row.indices.end());
      data->add(std::move(row), rng.uniform() < 0.5 ? 1.0 : -1.0);
    }
    data->fold_labels();
    return data;
  }

  ecopt::SimContext ctx() { return {problem, partition, ledger, cluster, streams}; }

  std::shared_ptr<const ecopt::Dataset> data;
  ecopt::NodePartition partition;
  ecopt::ProblemSpec problem;
  ecopt::CommLedger ledger;
  ecopt::Cluster cluster;
  ecopt::RngStreams streams;
};

void BM_EcLsvrgStep(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  Setup s(dim, static_cast<int>(state.range(1)));
  ecopt::EclsvrgParams params;
  params.eta = 0.05;
  params.p = 1.0 / dim;
  params.q = ecopt::CompressorSpec::top_k(1, dim);
  params.q1 = params.q;
  auto st = ecopt::eclsvrg_init(s.ctx(), params, {ecopt::Vector::Zero(dim), {}, {}});
  for (auto _ : state) benchmark::DoNotOptimize(ecopt::eclsvrg_step(st, s.ctx()));
}

void BM_EcSdcaStep(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  Setup s(dim, static_cast<int>(state.range(1)));
  const auto constants = ecopt::compute_constants(s.partition, s.problem.gamma);
  ecopt::EcsdcaParams params;
  params.q = ecopt::CompressorSpec::top_k(1, dim);
  params.theta = ecopt::default_sdca_theta(constants, s.partition.per_node(), 20,
                                           s.problem.gamma, s.problem.lambda);
  auto st = ecopt::ecsdca_init(s.ctx(), params, {});
  for (auto _ : state) benchmark::DoNotOptimize(ecopt::ecsdca_step(st, s.ctx()));
}

}  // namespace

BENCHMARK(BM_EcLsvrgStep)->ArgsProduct({{123, 1000}, {1, 4}})->UseRealTime();
BENCHMARK(BM_EcSdcaStep)->ArgsProduct({{123, 1000}, {1, 4}})->UseRealTime();

BENCHMARK_MAIN();
