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

// Sample statistics used by the distributional checks.

#ifndef CSDP_STATS_HPP
#define CSDP_STATS_HPP

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "csdp/error.hpp"

namespace csdp {

struct SampleMoments {
  double mean = 0;
  double variance = 0;  // unbiased
  std::size_t count = 0;

  double StandardError() const {
    return count ? std::sqrt(variance / static_cast<double>(count)) : 0;
  }
};

inline SampleMoments Moments(std::span<const double> xs) {
  SampleMoments out;
  double m2 = 0;
  for (double x : xs) {
    ++out.count;
    const double d = x - out.mean;
    out.mean += d / static_cast<double>(out.count);
    m2 += d * (x - out.mean);
  }
  out.variance = out.count > 1 ? m2 / static_cast<double>(out.count - 1) : 0;
  return out;
}

// Asymptotic Kolmogorov survival function Q(lambda) = 2 sum (-1)^{j-1} e^{-2 j^2 lambda^2}.
inline double KolmogorovSurvival(double lambda) {
  if (lambda < 0.2) return 1.0;
  double sum = 0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    sum += (j % 2 ? term : -term);
    if (term < 1e-17) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

struct KsResult {
  double statistic = 0;
  double p_value = 1;
};

// Two-sample Kolmogorov-Smirnov test with the Stephens small-sample correction.
inline KsResult KsTwoSample(std::vector<double> a, std::vector<double> b) {
  detail::Require(!a.empty() && !b.empty(), "ks test: samples must be non-empty");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double ne = std::sqrt(na * nb / (na + nb));
  return KsResult{d, KolmogorovSurvival((ne + 0.12 + 0.11 / ne) * d)};
}

struct ChiSquareResult {
  double statistic = 0;
  double dof = 0;
  double p_value = 1;
};

// Pearson goodness of fit; cells with zero expected count must have zero
// observed count and are dropped.
inline ChiSquareResult ChiSquareGoodnessOfFit(std::span<const double> observed,
                                              std::span<const double> expected,
                                              int constraints = 1) {
  detail::Require(observed.size() == expected.size(), "chi-square: size mismatch");
  ChiSquareResult out;
  int cells = 0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    if (expected[i] <= 0) {
      detail::Require(observed[i] == 0, "chi-square: observation in an impossible cell");
      continue;
    }
    const double d = observed[i] - expected[i];
    out.statistic += d * d / expected[i];
    ++cells;
  }
  out.dof = cells - constraints;
  if (out.dof <= 0) return out;
  out.p_value = boost::math::cdf(
      boost::math::complement(boost::math::chi_squared(out.dof), out.statistic));
  return out;
}

}  // namespace csdp

#endif  // CSDP_STATS_HPP
