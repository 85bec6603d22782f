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

#ifndef ECOPT_RANDOM_HPP
#define ECOPT_RANDOM_HPP

#include <cmath>
#include <cstdint>
#include <limits>

namespace ecopt {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Small, cheaply constructible generator satisfying UniformRandomBitGenerator.
/// Simulated nodes create one per (purpose, node, iteration), so construction
/// cost matters more than period.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed = 0) noexcept : state_(seed) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() noexcept {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [0, bound). Lemire's multiply-shift with rejection.
  std::uint64_t below(std::uint64_t bound) noexcept {
    if (bound <= 1) return 0;
    unsigned __int128 product =
        static_cast<unsigned __int128>((*this)()) * bound;
    auto low = static_cast<std::uint64_t>(product);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        product = static_cast<unsigned __int128>((*this)()) * bound;
        low = static_cast<std::uint64_t>(product);
      }
    }
    return static_cast<std::uint64_t>(product >> 64);
  }

  bool bernoulli(double p) noexcept { return uniform() < p; }

  /// Standard normal via Box-Muller; consumes two draws.
  double normal() noexcept {
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

 private:
  std::uint64_t state_;
};

enum class Stream : std::uint64_t {
  kSampling = 1,
  kCompressorQ = 2,
  kCompressorQ1 = 3,
  kCheckpoint = 4,
  kPartition = 5,
  kCertify = 6,
  kData = 7,
};

/// Derives independent streams from one master seed. A stream is a pure
/// function of (master, purpose, node, iteration), so results do not depend
/// on execution order or worker count.
class RngStreams {
 public:
  explicit RngStreams(std::uint64_t master_seed = 0) noexcept
      : master_(master_seed) {}

  std::uint64_t master_seed() const noexcept { return master_; }

  Rng stream(Stream purpose, std::uint64_t node,
             std::uint64_t iteration) const noexcept {
    std::uint64_t h = mix64(master_);
    h = mix64(h ^ static_cast<std::uint64_t>(purpose));
    h = mix64(h ^ node);
    h = mix64(h ^ iteration);
    return Rng(h);
  }

 private:
  std::uint64_t master_;
};

/// Sample index i_k^tau uniformly in [0, m) on `node` at `iteration`.
inline int sample_index(const RngStreams& streams, int node,
                        std::uint64_t iteration, int m) {
  Rng rng = streams.stream(Stream::kSampling, static_cast<std::uint64_t>(node),
                           iteration);
  return static_cast<int>(rng.below(static_cast<std::uint64_t>(m)));
}

}  // namespace ecopt

#endif  // ECOPT_RANDOM_HPP
