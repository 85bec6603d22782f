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

#include "ecopt/compressor.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "ecopt/errors.hpp"

namespace ecopt {

namespace {

void check_dim(int dim) {
  if (dim < 1) throw ConfigError("compressor dimension must be positive");
}

bool is_sparsifier(CompressorSpec::Kind kind) {
  return kind == CompressorSpec::Kind::kIdentity ||
         kind == CompressorSpec::Kind::kTopK ||
         kind == CompressorSpec::Kind::kRandK;
}

bool raw_unbiased(CompressorSpec::Kind kind) {
  return kind == CompressorSpec::Kind::kRandomDithering ||
         kind == CompressorSpec::Kind::kNaturalCompression;
}

int ceil_log2(std::uint64_t v) noexcept {
  if (v <= 1) return 0;
  return static_cast<int>(std::bit_width(v - 1));
}

}  // namespace

int index_bits(int dim) noexcept {
  return ceil_log2(static_cast<std::uint64_t>(std::max(dim, 1)));
}

CompressorSpec CompressorSpec::identity(int dim) {
  check_dim(dim);
  return CompressorSpec(Kind::kIdentity, dim);
}

CompressorSpec CompressorSpec::top_k(int k, int dim) {
  check_dim(dim);
  if (k < 1 || k > dim)
    throw ConfigError("top-k needs 1 <= K <= d, got K=" + std::to_string(k) +
                      ", d=" + std::to_string(dim));
  CompressorSpec spec(Kind::kTopK, dim);
  spec.k_ = k;
  return spec;
}

CompressorSpec CompressorSpec::rand_k(int k, int dim) {
  check_dim(dim);
  if (k < 1 || k > dim)
    throw ConfigError("rand-k needs 1 <= K <= d, got K=" + std::to_string(k) +
                      ", d=" + std::to_string(dim));
  CompressorSpec spec(Kind::kRandK, dim);
  spec.k_ = k;
  return spec;
}

CompressorSpec CompressorSpec::random_dithering(int levels, int dim) {
  check_dim(dim);
  if (levels < 1) throw ConfigError("dithering needs at least one level");
  CompressorSpec spec(Kind::kRandomDithering, dim);
  spec.levels_ = levels;
  return spec;
}

CompressorSpec CompressorSpec::natural(int dim) {
  check_dim(dim);
  return CompressorSpec(Kind::kNaturalCompression, dim);
}

CompressorSpec CompressorSpec::scaled(const CompressorSpec& inner) {
  if (!inner.is_unbiased() || inner.kind() == Kind::kIdentity)
    throw ConfigError("scaled() needs an unbiased randomized compressor, got " +
                      inner.name());
  if (!inner.omega_)
    throw ConfigError("scaled() needs a measured omega for " + inner.name());
  CompressorSpec spec(Kind::kScaled, inner.dim());
  spec.inner_ = std::make_shared<const CompressorSpec>(inner);
  spec.omega_ = inner.omega_;
  return spec;
}

CompressorSpec CompressorSpec::composed(const CompressorSpec& outer,
                                        const CompressorSpec& inner) {
  if (!is_sparsifier(inner.kind()))
    throw ConfigError("composition inner must be identity, top-k or rand-k");
  if (outer.kind() != Kind::kIdentity && outer.kind() != Kind::kScaled)
    throw ConfigError("composition outer must be identity or scaled");
  if (outer.dim() != inner.dim())
    throw DimensionMismatch("composition of compressors on different dimensions");
  CompressorSpec spec(Kind::kComposed, inner.dim());
  spec.inner_ = std::make_shared<const CompressorSpec>(inner);
  spec.outer_ = std::make_shared<const CompressorSpec>(outer);
  spec.k_ = inner.kind() == Kind::kIdentity ? inner.dim() : inner.k();
  return spec;
}

CompressorSpec CompressorSpec::with_omega(double omega) const {
  if (!(omega >= 0.0) || !std::isfinite(omega))
    throw ConfigError("omega must be finite and nonnegative");
  CompressorSpec spec = *this;
  spec.omega_ = omega;
  return spec;
}

bool CompressorSpec::is_randomized() const noexcept {
  switch (kind_) {
    case Kind::kIdentity:
    case Kind::kTopK: return false;
    case Kind::kRandK:
    case Kind::kRandomDithering:
    case Kind::kNaturalCompression: return true;
    case Kind::kScaled: return inner_->is_randomized();
    case Kind::kComposed:
      return inner_->is_randomized() || outer_->is_randomized();
  }
  return false;
}

bool CompressorSpec::is_unbiased() const noexcept {
  return kind_ == Kind::kIdentity || raw_unbiased(kind_);
}

bool CompressorSpec::satisfies_mean_delta() const noexcept {
  switch (kind_) {
    case Kind::kIdentity:
    case Kind::kRandK:
    case Kind::kScaled: return true;
    case Kind::kComposed:
      return inner_->satisfies_mean_delta() && outer_->satisfies_mean_delta();
    default: return false;
  }
}

bool CompressorSpec::is_contraction() const noexcept {
  switch (kind_) {
    case Kind::kIdentity:
    case Kind::kTopK:
    case Kind::kRandK:
    case Kind::kScaled:
    case Kind::kComposed: return true;
    case Kind::kRandomDithering:
    case Kind::kNaturalCompression: return omega_ && *omega_ < 1.0;
  }
  return false;
}

double CompressorSpec::delta_bound() const {
  switch (kind_) {
    case Kind::kIdentity: return 1.0;
    case Kind::kTopK:
    case Kind::kRandK: return static_cast<double>(k_) / dim_;
    case Kind::kScaled: return 1.0 / (*omega_ + 1.0);
    case Kind::kComposed: return inner_->delta_bound() * outer_->delta_bound();
    case Kind::kRandomDithering:
    case Kind::kNaturalCompression:
      if (omega_ && *omega_ < 1.0) return 1.0 - *omega_;
      throw ConfigError(name() + " is not a contraction compressor" +
                        (omega_ ? " (omega >= 1); wrap it in scaled()"
                                : " without a measured omega"));
  }
  return 1.0;
}

double CompressorSpec::mean_scale() const {
  switch (kind_) {
    case Kind::kIdentity: return 1.0;
    case Kind::kRandK: return static_cast<double>(k_) / dim_;
    case Kind::kScaled: return 1.0 / (*omega_ + 1.0);
    case Kind::kComposed:
      if (satisfies_mean_delta())
        return inner_->mean_scale() * outer_->mean_scale();
      break;
    default: break;
  }
  throw ConfigError(name() + " has no mean guarantee E[Q(x)] = delta x");
}

std::string CompressorSpec::name() const {
  switch (kind_) {
    case Kind::kIdentity: return "identity";
    case Kind::kTopK: return "top:" + std::to_string(k_);
    case Kind::kRandK: return "rand:" + std::to_string(k_);
    case Kind::kRandomDithering: return "dither:" + std::to_string(levels_);
    case Kind::kNaturalCompression: return "natural";
    case Kind::kScaled: return "scaled(" + inner_->name() + ")";
    case Kind::kComposed:
      return "compose(" + outer_->name() + "," + inner_->name() + ")";
  }
  return "unknown";
}

bool CompressorSpec::operator==(const CompressorSpec& other) const {
  if (kind_ != other.kind_ || dim_ != other.dim_ || k_ != other.k_ ||
      levels_ != other.levels_ || omega_ != other.omega_)
    return false;
  auto same = [](const auto& a, const auto& b) {
    if (!a || !b) return !a && !b;
    return *a == *b;
  };
  return same(inner_, other.inner_) && same(outer_, other.outer_);
}

std::uint64_t message_bits(const CompressorSpec& spec, int nonzeros, int dim) {
  using Kind = CompressorSpec::Kind;
  const auto d = static_cast<std::uint64_t>(dim);
  switch (spec.kind()) {
    case Kind::kIdentity: return 64 * d;
    case Kind::kTopK:
    case Kind::kRandK:
      return (64 + static_cast<std::uint64_t>(index_bits(dim))) *
             static_cast<std::uint64_t>(spec.k());
    case Kind::kRandomDithering:
      return 64 + d * (1 + static_cast<std::uint64_t>(ceil_log2(
                               static_cast<std::uint64_t>(spec.levels()) + 1)));
    case Kind::kNaturalCompression: return 9 * d;
    case Kind::kScaled: return message_bits(*spec.inner(), nonzeros, dim);
    case Kind::kComposed: {
      if (spec.inner()->kind() == Kind::kIdentity)
        return message_bits(*spec.outer(), nonzeros, dim);
      const int k = spec.k();
      return static_cast<std::uint64_t>(k) * index_bits(dim) +
             message_bits(*spec.outer(), k, k);
    }
  }
  return 0;
}

namespace {

void keep_top_k(const Vector& x, int k, Vector& out) {
  std::vector<int> idx(static_cast<std::size_t>(x.size()));
  std::iota(idx.begin(), idx.end(), 0);
  auto before = [&](int a, int b) {
    const double fa = std::abs(x[a]);
    const double fb = std::abs(x[b]);
    return fa > fb || (fa == fb && a < b);
  };
  std::nth_element(idx.begin(), idx.begin() + (k - 1), idx.end(), before);
  out.setZero(x.size());
  for (int j = 0; j < k; ++j) out[idx[j]] = x[idx[j]];
}

void keep_random_k(const Vector& x, int k, Rng& rng, Vector& out) {
  const int d = static_cast<int>(x.size());
  out.setZero(d);
  if (k == d) {
    out = x;
    return;
  }
  // Floyd's sampling without replacement.
  std::vector<int> chosen;
  chosen.reserve(static_cast<std::size_t>(k));
  for (int j = d - k; j < d; ++j) {
    const int t = static_cast<int>(rng.below(static_cast<std::uint64_t>(j) + 1));
    if (std::find(chosen.begin(), chosen.end(), t) == chosen.end()) {
      chosen.push_back(t);
    } else {
      chosen.push_back(j);
    }
  }
  for (int j : chosen) out[j] = x[j];
}

void dither(const Vector& x, int s, Rng& rng, Vector& out) {
  out.setZero(x.size());
  const double norm = x.norm();
  if (norm == 0.0) return;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    if (x[j] == 0.0) continue;
    const double r = s * std::abs(x[j]) / norm;
    double level = std::floor(r);
    if (rng.uniform() < r - level) level += 1.0;
    out[j] = std::copysign(norm * level / s, x[j]);
  }
}

void natural_round(const Vector& x, Rng& rng, Vector& out) {
  out.setZero(x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double a = std::abs(x[j]);
    if (a == 0.0) continue;
    int e = 0;
    const double f = std::frexp(a, &e);  // a = f * 2^e, f in [0.5, 1)
    const double lower = std::ldexp(1.0, e - 1);
    double v = lower;
    if (f != 0.5 && rng.uniform() < (a - lower) / lower) v = 2.0 * lower;
    out[j] = std::copysign(v, x[j]);
  }
}

void apply(const CompressorSpec& spec, const Vector& x, Rng& rng, Vector& out) {
  using Kind = CompressorSpec::Kind;
  switch (spec.kind()) {
    case Kind::kIdentity: out = x; return;
    case Kind::kTopK: keep_top_k(x, spec.k(), out); return;
    case Kind::kRandK: keep_random_k(x, spec.k(), rng, out); return;
    case Kind::kRandomDithering: dither(x, spec.levels(), rng, out); return;
    case Kind::kNaturalCompression: natural_round(x, rng, out); return;
    case Kind::kScaled:
      apply(*spec.inner(), x, rng, out);
      out /= *spec.omega_bound() + 1.0;
      return;
    case Kind::kComposed: {
      Vector mid;
      apply(*spec.inner(), x, rng, mid);
      apply(*spec.outer(), mid, rng, out);
      return;
    }
  }
}

}  // namespace

CompressionResult compress(const CompressorSpec& spec, const Vector& x, Rng& rng) {
  if (x.size() != spec.dim())
    throw DimensionMismatch("compressor expects dimension " +
                            std::to_string(spec.dim()) + ", got " +
                            std::to_string(x.size()));
  CompressionResult result;
  apply(spec, x, rng, result.vector);
  result.nonzeros = static_cast<int>((result.vector.array() != 0.0).count());
  result.bits = message_bits(spec, result.nonzeros, spec.dim());
  return result;
}

namespace {

Vector gaussian(int dim, Rng& rng) {
  Vector x(dim);
  for (int j = 0; j < dim; ++j) x[j] = rng.normal();
  return x;
}

struct RunningMean {
  double sum = 0.0;
  double sum_sq = 0.0;
  int count = 0;

  void add(double v) {
    sum += v;
    sum_sq += v * v;
    ++count;
  }
  double mean() const { return count ? sum / count : 0.0; }
  double standard_error() const {
    if (count < 2) return 0.0;
    const double m = mean();
    const double var = std::max(0.0, (sum_sq - count * m * m) / (count - 1));
    return std::sqrt(var / count);
  }
};

}  // namespace

ContractionCertificate certify_contraction(const CompressorSpec& spec,
                                           int trials, Rng& rng,
                                           int inner_draws) {
  if (trials < 1) throw ConfigError("certify_contraction needs trials >= 1");
  ContractionCertificate cert;
  cert.bound = 1.0 - spec.delta_bound();
  const int draws = spec.is_randomized() ? std::max(inner_draws, 1) : 1;
  for (int t = 0; t < trials; ++t) {
    const Vector x = gaussian(spec.dim(), rng);
    const double norm_sq = x.squaredNorm();
    if (norm_sq == 0.0) continue;
    RunningMean ratio;
    for (int r = 0; r < draws; ++r)
      ratio.add((x - compress(spec, x, rng).vector).squaredNorm() / norm_sq);
    if (t == 0 || ratio.mean() > cert.max_ratio) {
      cert.max_ratio = ratio.mean();
      cert.standard_error = ratio.standard_error();
    }
  }
  return cert;
}

MeanCertificate certify_mean(const CompressorSpec& spec, int trials, Rng& rng,
                             int inner_draws) {
  if (!spec.is_unbiased() && !spec.satisfies_mean_delta())
    throw ConfigError(spec.name() + " has no mean guarantee E[Q(x)] = delta x");
  if (trials < 1) throw ConfigError("certify_mean needs trials >= 1");
  MeanCertificate cert;
  cert.scale = spec.is_unbiased() ? 1.0 : spec.mean_scale();
  const int draws = spec.is_randomized() ? std::max(inner_draws, 2) : 1;
  for (int t = 0; t < trials; ++t) {
    const Vector x = gaussian(spec.dim(), rng);
    const double norm = x.norm();
    if (norm == 0.0) continue;
    Vector sum = Vector::Zero(x.size());
    Vector sum_sq = Vector::Zero(x.size());
    for (int r = 0; r < draws; ++r) {
      const Vector q = compress(spec, x, rng).vector;
      sum += q;
      sum_sq += q.cwiseProduct(q);
    }
    const Vector mean = sum / draws;
    const double error = (mean - cert.scale * x).norm() / norm;
    double sigma = 0.0;
    if (draws > 1) {
      const Vector var =
          ((sum_sq - draws * mean.cwiseProduct(mean)) / (draws - 1)).cwiseMax(0.0);
      sigma = std::sqrt(var.sum() / draws) / norm;
    }
    if (t == 0 || error > cert.max_mean_error) {
      cert.max_mean_error = error;
      cert.sigma = sigma;
    }
  }
  return cert;
}

OmegaEstimate estimate_omega(const CompressorSpec& spec, int trials, Rng& rng,
                             int inner_draws) {
  if (!spec.is_unbiased())
    throw ConfigError("omega is only defined for unbiased compressors");
  OmegaEstimate est;
  if (!spec.is_randomized()) return est;
  const int d = spec.dim();

  std::vector<Vector> probes;
  for (int t = 0; t < trials; ++t) probes.push_back(gaussian(d, rng));
  // Equal-magnitude k-sparse probes put every coordinate at the same
  // quantization level, which is where dithering variance peaks.
  for (int k = 1;; k *= 2) {
    const int kk = std::min(k, d);
    Vector x = Vector::Zero(d);
    for (int j = 0; j < kk; ++j) x[j] = (rng.uniform() < 0.5 ? -1.0 : 1.0);
    probes.push_back(x);
    Vector y = Vector::Zero(d);
    for (int j = 0; j < kk; ++j) y[j] = rng.normal();
    probes.push_back(y);
    if (kk == d) break;
  }

  bool first = true;
  for (const Vector& x : probes) {
    const double norm_sq = x.squaredNorm();
    RunningMean ratio;
    for (int r = 0; r < inner_draws; ++r)
      ratio.add(compress(spec, x, rng).vector.squaredNorm() / norm_sq - 1.0);
    if (first || ratio.mean() > est.omega) {
      est.omega = ratio.mean();
      est.standard_error = ratio.standard_error();
      first = false;
    }
  }
  est.omega = std::max(est.omega, 0.0);
  return est;
}

namespace {

class Parser {
 public:
  Parser(std::string_view text, int dim, Rng& rng)
      : text_(text), dim_(dim), rng_(rng) {}

  CompressorSpec parse() {
    CompressorSpec spec = expression();
    skip_space();
    if (pos_ != text_.size()) fail("trailing characters");
    return spec;
  }

 private:
  CompressorSpec expression() {
    skip_space();
    const std::string word = identifier();
    if (word == "identity" || word == "id") return CompressorSpec::identity(dim_);
    if (word == "natural") return measured(CompressorSpec::natural(dim_));
    if (word == "top" || word == "rand") {
      expect(':');
      const int k = integer();
      return word == "top" ? CompressorSpec::top_k(k, dim_)
                           : CompressorSpec::rand_k(k, dim_);
    }
    if (word == "dither") {
      expect(':');
      skip_space();
      int levels = 0;
      if (text_.substr(pos_, 4) == "sqrt") {
        pos_ += 4;
        levels = std::max(1, static_cast<int>(std::lround(std::sqrt(dim_))));
      } else {
        levels = integer();
      }
      return measured(CompressorSpec::random_dithering(levels, dim_));
    }
    if (word == "scaled") {
      expect('(');
      CompressorSpec inner = expression();
      expect(')');
      return CompressorSpec::scaled(inner);
    }
    if (word == "compose") {
      expect('(');
      CompressorSpec outer = expression();
      expect(',');
      CompressorSpec inner = expression();
      expect(')');
      return CompressorSpec::composed(outer, inner);
    }
    fail("unknown compressor '" + word + "'");
    return CompressorSpec::identity(dim_);
  }

  CompressorSpec measured(const CompressorSpec& spec) {
    const OmegaEstimate est = estimate_omega(spec, 20, rng_);
    return spec.with_omega(est.omega + 3.0 * est.standard_error);
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }

  std::string identifier() {
    skip_space();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isalpha(static_cast<unsigned char>(text_[pos_])) ||
                                   text_[pos_] == '_'))
      ++pos_;
    if (start == pos_) fail("expected a compressor name");
    return std::string(text_.substr(start, pos_ - start));
  }

  int integer() {
    skip_space();
    int value = 0;
    const auto [ptr, ec] =
        std::from_chars(text_.data() + pos_, text_.data() + text_.size(), value);
    if (ec != std::errc()) fail("expected an integer");
    pos_ = static_cast<std::size_t>(ptr - text_.data());
    return value;
  }

  void expect(char c) {
    skip_space();
    if (pos_ >= text_.size() || text_[pos_] != c)
      fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  [[noreturn]] void fail(const std::string& why) const {
    throw ConfigError("bad compressor spec '" + std::string(text_) + "' at " +
                      std::to_string(pos_) + ": " + why);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int dim_;
  Rng& rng_;
};

}  // namespace

CompressorSpec parse_compressor(std::string_view text, int dim, Rng& rng) {
  return Parser(text, dim, rng).parse();
}

}  // namespace ecopt
