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

#include <cmath>
#include <random>

#include <benchmark/benchmark.h>

#include "ecopt/compressor.hpp"
#include "ecopt/random.hpp"

namespace {

ecopt::Vector gaussian(int dim, ecopt::Rng& rng) {
  std::normal_distribution<double> normal;
  ecopt::Vector x(dim);
  for (int i = 0; i < dim; ++i) x[i] = normal(rng);
  return x;
}

template <typename Make>
void run(benchmark::State& state, Make make) {
  const int dim = static_cast<int>(state.range(0));
  ecopt::Rng rng(3);
  const ecopt::CompressorSpec spec = make(dim);
  const ecopt::Vector x = gaussian(dim, rng);
  for (auto _ : state) benchmark::DoNotOptimize(ecopt::compress(spec, x, rng));
  state.SetItemsProcessed(state.iterations() * dim);
}

using Spec = ecopt::CompressorSpec;

void BM_Top1(benchmark::State& s) { run(s, [](int d) { return Spec::top_k(1, d); }); }
void BM_TopSqrt(benchmark::State& s) {
  run(s, [](int d) { return Spec::top_k(static_cast<int>(std::sqrt(d)), d); });
}
void BM_Rand1(benchmark::State& s) { run(s, [](int d) { return Spec::rand_k(1, d); }); }
void BM_Dither(benchmark::State& s) {
  run(s, [](int d) { return Spec::random_dithering(static_cast<int>(std::lround(std::sqrt(d))), d); });
}
void BM_Natural(benchmark::State& s) { run(s, [](int d) { return Spec::natural(d); }); }

}  // namespace

BENCHMARK(BM_Top1)->RangeMultiplier(10)->Range(10, 100000);
BENCHMARK(BM_TopSqrt)->RangeMultiplier(10)->Range(10, 100000);
BENCHMARK(BM_Rand1)->RangeMultiplier(10)->Range(10, 100000);
BENCHMARK(BM_Dither)->RangeMultiplier(10)->Range(10, 100000);
BENCHMARK(BM_Natural)->RangeMultiplier(10)->Range(10, 100000);

BENCHMARK_MAIN();
