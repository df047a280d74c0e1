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

// Likelihood-ratio oracle for the aged Laplace release.
//
// For neighbouring current snapshots x, x' (one user changed) the oracle
// evaluates |ln Pr[M in S | x] - ln Pr[M in S | x']| over the event family
// S in {M <= theta} U {M > theta}, theta on a 101-point grid spanning the
// query range widened by 6 noise scales on each side, and reports the largest
// value. The output law given x mixes Lap(f(z), b) over Pr[z | x].
//
// The exact path integrates the mixture in closed form. The sampling path
// draws stationary (aged, current) pairs, adds noise and counts events;
// each cell's half-width is the 95% normal interval of the log ratio,
// 1.96 sqrt((1 - p1)/n1 + (1 - p2)/n2) with n the event counts. Cells with
// fewer than 25 events on either side are not used. The reported cell is the
// one with the largest lower confidence limit.

#ifndef CSDP_ORACLE_HPP
#define CSDP_ORACLE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "csdp/cmc.hpp"
#include "csdp/error.hpp"
#include "csdp/joint.hpp"
#include "csdp/query.hpp"
#include "csdp/random.hpp"

namespace csdp {

// One FRAN release configuration: AoI vector, query and noise level.
struct FranConfig {
  AoiVector age;
  QuerySpec query;
  double eps_c = 1.0;

  double NoiseScale() const { return query.DeltaF() / eps_c; }
};

struct OracleEstimate {
  double estimate = 0;
  double half_width = 0;
  bool exact = false;
  std::size_t events_used = 0;
  std::string diagnostic;
};

inline constexpr int kOracleGridPoints = 101;
inline constexpr double kOracleGridSpan = 6.0;
inline constexpr std::size_t kOracleCountFloor = 25;
inline constexpr double kOracleZ = 1.96;

inline std::vector<double> ThetaGrid(double f_min, double f_max, double scale) {
  const double lo = f_min - kOracleGridSpan * scale;
  const double hi = f_max + kOracleGridSpan * scale;
  std::vector<double> grid(kOracleGridPoints);
  for (int i = 0; i < kOracleGridPoints; ++i) {
    grid[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (kOracleGridPoints - 1);
  }
  return grid;
}

namespace detail {

struct OracleSetup {
  std::vector<double> f;
  std::vector<double> theta;
  double scale;
};

inline OracleSetup PrepareOracle(const JointKernel& kernel, const FranConfig& config,
                                 std::size_t cap) {
  detail::Require(config.eps_c > 0 && std::isfinite(config.eps_c),
                  "oracle: eps_c must be positive");
  detail::Require(config.query.output_dim == 1, "oracle: only scalar queries are supported");
  detail::Require(config.query.space.num_sequences == kernel.space().num_sequences &&
                      config.query.space.num_states == kernel.space().num_states,
                  "oracle: query and kernel state spaces differ");
  config.age.Validate(kernel.space().num_sequences);
  OracleSetup setup;
  setup.f = ScalarQueryTable(config.query, cap);
  setup.scale = config.NoiseScale();
  const auto [lo, hi] = std::minmax_element(setup.f.begin(), setup.f.end());
  setup.theta = ThetaGrid(*lo, *hi, setup.scale);
  return setup;
}

// Calls fn(x, x') once per unordered neighbouring pair.
template <typename Fn>
void ForEachNeighbourPair(const StateSpace& space, std::size_t n, Fn&& fn) {
  const std::size_t m = static_cast<std::size_t>(space.num_states);
  for (std::size_t x = 0; x < n; ++x) {
    for (int i = 0; i < space.num_sequences; ++i) {
      const std::size_t w = space.Weight(i);
      const std::size_t digit = (x / w) % m;
      for (std::size_t v = digit + 1; v < m; ++v) fn(x, x + (v - digit) * w);
    }
  }
}

}  // namespace detail

inline OracleEstimate OracleLeakageExact(const JointKernel& kernel, const FranConfig& config,
                                         std::size_t cap = kDefaultEnumerationCap) {
  const detail::OracleSetup setup = detail::PrepareOracle(kernel, config, cap);
  const ConditionalTable cond = BackwardConditional(kernel, config.age);
  const std::size_t n = kernel.size();
  const std::size_t g = setup.theta.size();

  // log Pr[M <= theta | x] and log Pr[M > theta | x].
  std::vector<double> log_below(n * g), log_above(n * g);
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t t = 0; t < g; ++t) {
      double below = 0, above = 0;
      for (std::size_t z = 0; z < n; ++z) {
        const double p = cond(z, x);
        if (p == 0) continue;
        below += p * LaplaceCdf(setup.theta[t] - setup.f[z], setup.scale);
        above += p * LaplaceSurvival(setup.theta[t] - setup.f[z], setup.scale);
      }
      log_below[x * g + t] = std::log(below);
      log_above[x * g + t] = std::log(above);
    }
  }

  OracleEstimate out;
  out.exact = true;
  detail::ForEachNeighbourPair(kernel.space(), n, [&](std::size_t x, std::size_t y) {
    for (std::size_t t = 0; t < g; ++t) {
      out.estimate = std::max(out.estimate, std::fabs(log_below[x * g + t] - log_below[y * g + t]));
      out.estimate = std::max(out.estimate, std::fabs(log_above[x * g + t] - log_above[y * g + t]));
      out.events_used += 2;
    }
  });
  return out;
}

inline OracleEstimate OracleLeakageSampled(const JointKernel& kernel, const FranConfig& config,
                                           std::size_t samples, std::uint64_t seed,
                                           std::size_t cap = kDefaultEnumerationCap) {
  detail::Require(samples >= 1, "oracle: samples must be positive");
  const detail::OracleSetup setup = detail::PrepareOracle(kernel, config, cap);
  const std::size_t n = kernel.size();
  const std::size_t g = setup.theta.size();

  std::vector<std::size_t> visits(n, 0);
  std::vector<std::size_t> below(n * g, 0);
  CounterRng rng(seed);
  for (std::size_t draw = 0; draw < samples; ++draw) {
    const AgedDraw pair = SampleAgedPair(kernel, config.age, rng);
    const double value = setup.f[pair.aged] + DrawLaplace(rng, setup.scale);
    ++visits[pair.current];
    const auto first = std::lower_bound(setup.theta.begin(), setup.theta.end(), value);
    for (auto it = first; it != setup.theta.end(); ++it) {
      ++below[pair.current * g + static_cast<std::size_t>(it - setup.theta.begin())];
    }
  }

  OracleEstimate out;
  std::size_t skipped = 0;
  double best = -std::numeric_limits<double>::infinity();
  auto consider = [&](double k1, double c1, double k2, double c2) {
    if (k1 < kOracleCountFloor || k2 < kOracleCountFloor) {
      ++skipped;
      return;
    }
    const double p1 = k1 / c1, p2 = k2 / c2;
    const double value = std::fabs(std::log(p1) - std::log(p2));
    const double hw = kOracleZ * std::sqrt((1 - p1) / k1 + (1 - p2) / k2);
    ++out.events_used;
    if (value - hw > best) {
      best = value - hw;
      out.estimate = value;
      out.half_width = hw;
    }
  };
  detail::ForEachNeighbourPair(kernel.space(), n, [&](std::size_t x, std::size_t y) {
    const double cx = static_cast<double>(visits[x]);
    const double cy = static_cast<double>(visits[y]);
    for (std::size_t t = 0; t < g; ++t) {
      const double bx = static_cast<double>(below[x * g + t]);
      const double by = static_cast<double>(below[y * g + t]);
      consider(bx, cx, by, cy);
      consider(cx - bx, cx, cy - by, cy);
    }
  });

  if (out.events_used == 0) {
    out.estimate = 0;
    out.half_width = std::numeric_limits<double>::infinity();
    out.diagnostic = "no event cell reached " + std::to_string(kOracleCountFloor) +
                     " samples; interval unbounded";
    return out;
  }
  if (skipped > 0) {
    out.diagnostic = std::to_string(skipped) + " event cells below the count floor were skipped";
  }
  return out;
}

// samples == 0 selects the exact path.
inline OracleEstimate OracleLeakage(const JointKernel& kernel, const FranConfig& config,
                                    std::size_t samples, std::uint64_t seed,
                                    std::size_t cap = kDefaultEnumerationCap) {
  if (samples == 0) return OracleLeakageExact(kernel, config, cap);
  return OracleLeakageSampled(kernel, config, samples, seed, cap);
}

}  // namespace csdp

#endif  // CSDP_ORACLE_HPP
