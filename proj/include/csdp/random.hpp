//
// Copyright 2026 The CSDP Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

// Seeded, platform-independent randomness.
//
// The uniform source is SplitMix64 run in counter mode: the i-th output of a
// stream keyed by `key` is Mix64(key + (i + 1) * kGoldenGamma). Every draw is
// a pure function of (key, i), so results do not depend on the standard
// library implementation or on evaluation order across threads.
//
// Seed splitting ("seed-split-v1"): a child seed for a grid cell is obtained
// by folding each coordinate into the root seed with DeriveSeed(). Changing
// this rule changes every emitted table and is a breaking change.

#ifndef CSDP_RANDOM_HPP
#define CSDP_RANDOM_HPP

#include <bit>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

#include "csdp/error.hpp"

namespace csdp {

inline constexpr const char* kSeedSplitVersion = "seed-split-v1";
inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

// SplitMix64 finalizer.
constexpr std::uint64_t Mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Folds one 64-bit word into a running seed.
constexpr std::uint64_t FoldSeed(std::uint64_t seed, std::uint64_t word) noexcept {
  return Mix64(seed ^ Mix64(word + kGoldenGamma));
}

// Grid coordinates may be integers or reals; reals are folded by bit pattern.
struct SeedCoordinate {
  std::uint64_t bits;
  SeedCoordinate(std::uint64_t v) : bits(v) {}                     // NOLINT
  SeedCoordinate(int v) : bits(static_cast<std::uint64_t>(v)) {}   // NOLINT
  SeedCoordinate(double v) : bits(std::bit_cast<std::uint64_t>(v)) {}  // NOLINT
};

inline std::uint64_t DeriveSeed(std::uint64_t root,
                                std::initializer_list<SeedCoordinate> coords) {
  std::uint64_t seed = Mix64(root);
  for (const SeedCoordinate& c : coords) seed = FoldSeed(seed, c.bits);
  return seed;
}

// Counter-based uniform generator. Cheap to copy; copies replay the stream.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) noexcept : key_(key) {}

  std::uint64_t NextU64() noexcept {
    ++counter_;
    return Mix64(key_ + counter_ * kGoldenGamma);
  }

  // Uniform on the open interval (0, 1) with 53-bit resolution.
  double NextUniform() noexcept {
    return (static_cast<double>(NextU64() >> 11) + 0.5) * 0x1.0p-53;
  }

  std::uint64_t key() const noexcept { return key_; }
  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// Inverse CDF of Lap(0, scale) evaluated at u in (0, 1).
inline double LaplaceQuantile(double u, double scale) noexcept {
  const double centered = u - 0.5;
  const double magnitude = -scale * std::log1p(-2.0 * std::fabs(centered));
  return centered < 0 ? -magnitude : magnitude;
}

// CDF of Lap(0, scale).
inline double LaplaceCdf(double x, double scale) noexcept {
  return x < 0 ? 0.5 * std::exp(x / scale) : 1.0 - 0.5 * std::exp(-x / scale);
}

// 1 - CDF of Lap(0, scale), evaluated without cancellation.
inline double LaplaceSurvival(double x, double scale) noexcept {
  return LaplaceCdf(-x, scale);
}

inline double DrawLaplace(CounterRng& rng, double scale) noexcept {
  return LaplaceQuantile(rng.NextUniform(), scale);
}

// `dim` i.i.d. draws from the Laplace density (1/2b) exp(-|x|/b), b = scale.
inline std::vector<double> LaplaceSample(double scale, std::size_t dim,
                                         std::uint64_t seed) {
  detail::Require(scale > 0 && std::isfinite(scale),
                  "laplace_sample: scale must be positive and finite");
  CounterRng rng(seed);
  std::vector<double> out(dim);
  for (double& v : out) v = DrawLaplace(rng, scale);
  return out;
}

// Samples an index from a discrete distribution by cumulative scan.
inline std::size_t SampleIndex(CounterRng& rng, std::span<const double> probs) {
  const double u = rng.NextUniform();
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] <= 0) continue;
    acc += probs[i];
    last_positive = i;
    if (u < acc) return i;
  }
  return last_positive;  // rounding: u landed above the accumulated mass
}

}  // namespace csdp

#endif  // CSDP_RANDOM_HPP
