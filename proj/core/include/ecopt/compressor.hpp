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

#ifndef ECOPT_COMPRESSOR_HPP
#define ECOPT_COMPRESSOR_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "ecopt/random.hpp"
#include "ecopt/types.hpp"

namespace ecopt {

/// Immutable description of a compression operator on R^dim.
///
/// Contraction compressors satisfy E||x - Q(x)||^2 <= (1 - delta)||x||^2.
/// Unbiased ones (dithering, natural compression) satisfy E[Q(x)] = x and
/// E||Q(x)||^2 <= (omega + 1)||x||^2; their omega is measured with
/// estimate_omega() and attached via with_omega(), and scaled() turns them
/// into contractions with delta = 1/(omega + 1).
class CompressorSpec {
 public:
  enum class Kind {
    kIdentity,
    kTopK,
    kRandK,
    kRandomDithering,
    kNaturalCompression,
    kScaled,
    kComposed,
  };

  static CompressorSpec identity(int dim);
  static CompressorSpec top_k(int k, int dim);
  static CompressorSpec rand_k(int k, int dim);
  /// l2-norm stochastic quantization with `levels` levels.
  static CompressorSpec random_dithering(int levels, int dim);
  static CompressorSpec natural(int dim);
  /// (1/(omega+1)) * inner; inner must be unbiased with omega attached.
  static CompressorSpec scaled(const CompressorSpec& inner);
  /// outer(inner(x)). inner: Identity, TopK or RandK; outer: Identity or
  /// Scaled. delta = delta_inner * delta_outer.
  static CompressorSpec composed(const CompressorSpec& outer,
                                 const CompressorSpec& inner);

  CompressorSpec with_omega(double omega) const;

  Kind kind() const noexcept { return kind_; }
  int dim() const noexcept { return dim_; }
  int k() const noexcept { return k_; }
  int levels() const noexcept { return levels_; }
  const CompressorSpec* inner() const noexcept { return inner_.get(); }
  const CompressorSpec* outer() const noexcept { return outer_.get(); }

  bool is_randomized() const noexcept;
  /// E[Q(x)] = x.
  bool is_unbiased() const noexcept;
  /// E[Q(x)] = delta x. False for TopK.
  bool satisfies_mean_delta() const noexcept;
  bool is_contraction() const noexcept;

  /// Contraction parameter in (0, 1]. ConfigError if not a contraction.
  double delta_bound() const;
  std::optional<double> omega_bound() const noexcept { return omega_; }
  /// delta such that E[Q(x)] = delta x; ConfigError unless satisfies_mean_delta.
  double mean_scale() const;

  /// Canonical text form, accepted by parse_compressor().
  std::string name() const;

  bool operator==(const CompressorSpec& other) const;

 private:
  CompressorSpec(Kind kind, int dim) : kind_(kind), dim_(dim) {}

  Kind kind_;
  int dim_ = 0;
  int k_ = 0;
  int levels_ = 0;
  std::optional<double> omega_;
  std::shared_ptr<const CompressorSpec> inner_;
  std::shared_ptr<const CompressorSpec> outer_;
};

struct CompressionResult {
  Vector vector;
  std::uint64_t bits = 0;
  int nonzeros = 0;
};

/// Fixed-width message cost in bits: 64*d dense, (64 + ceil(log2 d))*K sparse,
/// 64 + d*(1 + ceil(log2(s+1))) dithering, 9*d natural. Scaling is free;
/// a composition sends K indices plus the outer encoding of K values.
std::uint64_t message_bits(const CompressorSpec& spec, int nonzeros, int dim);

/// ceil(log2(d)) for d >= 1.
int index_bits(int dim) noexcept;

/// Apply Q to x. TopK ties go to the lower index. DimensionMismatch when
/// x.size() != spec.dim().
CompressionResult compress(const CompressorSpec& spec, const Vector& x, Rng& rng);

struct ContractionCertificate {
  double max_ratio = 0.0;       // max over x of (mean) ||x - Q(x)||^2 / ||x||^2
  double standard_error = 0.0;  // of the Monte Carlo mean attaining max_ratio
  double bound = 0.0;           // 1 - delta_bound
};

/// `trials` standard-normal x in R^dim; deterministic compressors report the
/// worst ratio, randomized ones the worst per-x mean over `inner_draws`.
ContractionCertificate certify_contraction(const CompressorSpec& spec,
                                           int trials, Rng& rng,
                                           int inner_draws = 1000);

struct MeanCertificate {
  double max_mean_error = 0.0;  // max over x of ||mean Q(x) - scale x|| / ||x||
  double sigma = 0.0;           // standard error of that estimate
  double scale = 1.0;           // 1 for unbiased kinds, delta otherwise
};

/// Monte Carlo check of E[Q(x)] = scale * x. ConfigError for compressors with
/// no mean guarantee (TopK).
MeanCertificate certify_mean(const CompressorSpec& spec, int trials, Rng& rng,
                             int inner_draws = 10000);

struct OmegaEstimate {
  double omega = 0.0;           // max over probes of mean ||Q(x)||^2/||x||^2 - 1
  double standard_error = 0.0;
};

/// Measures omega for an unbiased compressor over Gaussian and sparse probes.
OmegaEstimate estimate_omega(const CompressorSpec& spec, int trials, Rng& rng,
                             int inner_draws = 2000);

/// Parse "identity", "top:K", "rand:K", "dither:S" (S may be "sqrt" for
/// round(sqrt(d))), "natural", "scaled(<unbiased>)" and
/// "compose(<outer>,<inner>)". Unbiased compressors inside scaled() get their
/// omega measured with `rng`.
CompressorSpec parse_compressor(std::string_view text, int dim, Rng& rng);

}  // namespace ecopt

#endif  // ECOPT_COMPRESSOR_HPP
