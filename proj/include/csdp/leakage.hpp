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

// Leakage quantities for the aging-plus-Laplace release.
//
//   aged TV distance     Delta_k   worst TV between Pr[z^K | x^K] and
//                                  Pr[z^K | x'^K], x and x' differing in one
//                                  user, K = that user plus k-1 partners
//   loose bound          d(k) Delta_k eps_C, and its log form
//                        ln(1 + Delta_k (e^{d(k) eps_C} - 1))
//   bounded correlation  Delta_bar, the ratio-weighted TV distance
//   tight bound          Delta_bar eps_C
//   ADP                  ln(1 + Delta(t) (e^{eps_C} - 1)) for one sequence
//
// Note that ln(1 + x (e^y - 1)) >= x y for x in [0, 1], y >= 0, so the log
// form never undercuts the linear form; both are reported.

#ifndef CSDP_LEAKAGE_HPP
#define CSDP_LEAKAGE_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "csdp/cmc.hpp"
#include "csdp/error.hpp"
#include "csdp/joint.hpp"
#include "csdp/query.hpp"

namespace csdp {

namespace detail {

inline void RequireUnitInterval(double v, const char* what) {
  Require(v >= 0 && v <= 1 + 1e-12, std::string(what) + " must lie in [0,1]");
}

inline void RequirePositiveBudget(double eps_c) {
  Require(eps_c > 0 && std::isfinite(eps_c), "noise level eps_c must be positive");
}

// Marginalises law(z, x) onto the users in `subset` (ascending), giving a
// m^|K| x m^|K| matrix indexed in the same mixed radix order.
inline Eigen::MatrixXd ProjectLaw(const StateSpace& space, const Eigen::MatrixXd& law,
                                  const std::vector<int>& subset) {
  const std::size_t m = static_cast<std::size_t>(space.num_states);
  std::size_t reduced = 1;
  for (std::size_t i = 0; i < subset.size(); ++i) reduced *= m;
  const std::size_t n = static_cast<std::size_t>(law.rows());
  std::vector<std::size_t> project(n, 0);
  for (std::size_t x = 0; x < n; ++x) {
    std::size_t idx = 0;
    for (int user : subset) idx = idx * m + (x / space.Weight(user)) % m;
    project[x] = idx;
  }
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(reduced),
                                              static_cast<Eigen::Index>(reduced));
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t z = 0; z < n; ++z) {
      out(static_cast<Eigen::Index>(project[z]), static_cast<Eigen::Index>(project[x])) +=
          law(static_cast<Eigen::Index>(z), static_cast<Eigen::Index>(x));
    }
  }
  return out;
}

inline double HalfL1(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return 0.5 * (a - b).cwiseAbs().sum();
}

}  // namespace detail

// Delta_k from a precomputed aged joint law.
inline double AgedTvFromLaw(const StateSpace& space, const Eigen::MatrixXd& law,
                            CorrelationDegree degree) {
  const int s = space.num_sequences;
  const int m = space.num_states;
  detail::Require(degree.k >= 1 && degree.k <= s, "correlation degree must satisfy 1 <= k <= s");
  detail::Require(s < 63, "aged TV distance: too many sequences");
  double best = 0.0;
  for (int changed = 0; changed < s; ++changed) {
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << s); ++mask) {
      if (!(mask >> changed & 1U) || std::popcount(mask) != degree.k) continue;
      std::vector<int> subset;
      int position = 0;
      for (int u = 0; u < s; ++u) {
        if (mask >> u & 1U) {
          if (u == changed) position = static_cast<int>(subset.size());
          subset.push_back(u);
        }
      }
      const Eigen::MatrixXd projected = detail::ProjectLaw(space, law, subset);
      const Eigen::Index n = projected.cols();
      Eigen::MatrixXd cond = projected;
      for (Eigen::Index x = 0; x < n; ++x) {
        const double mass = projected.col(x).sum();
        if (!(mass > 0)) {
          throw ZeroProbability("aged TV distance: conditioning event has zero "
                                "stationary probability");
        }
        cond.col(x) /= mass;
      }
      std::size_t w = 1;
      for (std::size_t p = subset.size() - 1; p > static_cast<std::size_t>(position); --p) {
        w *= static_cast<std::size_t>(m);
      }
      for (Eigen::Index x = 0; x < n; ++x) {
        const std::size_t digit = (static_cast<std::size_t>(x) / w) % static_cast<std::size_t>(m);
        for (std::size_t v = digit + 1; v < static_cast<std::size_t>(m); ++v) {
          const Eigen::Index other = static_cast<Eigen::Index>(
              static_cast<std::size_t>(x) + (v - digit) * w);
          best = std::max(best, detail::HalfL1(cond.col(x), cond.col(other)));
        }
      }
    }
  }
  return std::min(best, 1.0);
}

inline double AgedTvDistance(const JointKernel& kernel, const AoiVector& age,
                             CorrelationDegree degree) {
  return AgedTvFromLaw(kernel.space(), AgedJointLaw(kernel, age), degree);
}

struct LooseBound {
  double linear = 0;
  double log_form = 0;

  // min(linear, log_form); equals `linear` whenever delta_k lies in [0, 1].
  double certified() const { return std::min(linear, log_form); }
};

inline LooseBound ComputeLooseBound(double delta_k, double dk, double eps_c) {
  detail::RequireUnitInterval(delta_k, "delta_k");
  detail::Require(dk >= 1, "d(k) must be >= 1");
  detail::RequirePositiveBudget(eps_c);
  const double delta = std::min(delta_k, 1.0);
  return LooseBound{dk * delta * eps_c, std::log1p(delta * std::expm1(dk * eps_c))};
}

struct BoundedCorrelation {
  double value = 0;
  // z-configurations skipped because a conditioning event had zero mass.
  std::size_t skipped_events = 0;
  // Current snapshots skipped because they have zero stationary mass.
  std::size_t skipped_states = 0;
  bool flagged() const { return skipped_events + skipped_states > 0; }
};

// Delta_bar from a precomputed aged joint law(z, x).
//
// For user i, g_upper(x_{-i}, x_i) and g_lower(x_{-i}, x_i) are the max and
// min over aged (z_{-i}, z_i) of
//
//   Pr[x_i | x_{-i}, z_{-i}] Pr[x_{-i} | x_i, z_i]
//   ----------------------------------------------
//        Pr[x_i | x_{-i}] Pr[x_{-i} | x_i]
//
// and Delta_bar is the largest half-l1 distance between
// g_upper(x_{-i}, x_i) Pr[z_i | x_i] and g_lower(x_{-i}, x_i') Pr[z_i | x_i'].
inline BoundedCorrelation BoundedCorrelationFromLaw(const StateSpace& space,
                                                    const Eigen::MatrixXd& law) {
  const int s = space.num_sequences;
  const std::size_t m = static_cast<std::size_t>(space.num_states);
  const std::size_t n = static_cast<std::size_t>(law.rows());
  const std::size_t n_rest = n / m;

  Eigen::VectorXd px = law.colwise().sum().transpose();

  BoundedCorrelation out;
  bool any = false;
  for (int i = 0; i < s; ++i) {
    const std::size_t w = space.Weight(i);
    auto digit = [&](std::size_t x) { return (x / w) % m; };
    auto rest = [&](std::size_t x) { return (x / (w * m)) * w + x % w; };

    // a(x, z_rest) = Pr[x, z_{-i}], b(x_rest, z_rest) = Pr[x_{-i}, z_{-i}]
    // c(x, z_i) = Pr[x, z_i],       e(x_i, z_i) = Pr[x_i, z_i]
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n_rest));
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_rest), static_cast<Eigen::Index>(n_rest));
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
    Eigen::MatrixXd e = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    Eigen::VectorXd p_rest = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_rest));
    Eigen::VectorXd p_own = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
    for (std::size_t x = 0; x < n; ++x) {
      const auto xi = static_cast<Eigen::Index>(x);
      const auto xr = static_cast<Eigen::Index>(rest(x));
      const auto xo = static_cast<Eigen::Index>(digit(x));
      p_rest(xr) += px(xi);
      p_own(xo) += px(xi);
      for (std::size_t z = 0; z < n; ++z) {
        const double v = law(static_cast<Eigen::Index>(z), xi);
        if (v == 0) continue;
        const auto zr = static_cast<Eigen::Index>(rest(z));
        const auto zo = static_cast<Eigen::Index>(digit(z));
        a(xi, zr) += v;
        b(xr, zr) += v;
        c(xi, zo) += v;
        e(xo, zo) += v;
      }
    }

    std::vector<double> g_upper(n, std::numeric_limits<double>::quiet_NaN());
    std::vector<double> g_lower(n, std::numeric_limits<double>::quiet_NaN());
    for (std::size_t x = 0; x < n; ++x) {
      const auto xi = static_cast<Eigen::Index>(x);
      const auto xr = static_cast<Eigen::Index>(rest(x));
      const auto xo = static_cast<Eigen::Index>(digit(x));
      if (!(px(xi) > 0)) {
        ++out.skipped_states;
        continue;
      }
      const double baseline = (px(xi) / p_rest(xr)) * (px(xi) / p_own(xo));
      double hi = -std::numeric_limits<double>::infinity();
      double lo = std::numeric_limits<double>::infinity();
      for (std::size_t zr = 0; zr < n_rest; ++zr) {
        const double denom_rest = b(xr, static_cast<Eigen::Index>(zr));
        for (std::size_t zo = 0; zo < m; ++zo) {
          const double denom_own = e(xo, static_cast<Eigen::Index>(zo));
          if (!(denom_rest > 0) || !(denom_own > 0)) {
            ++out.skipped_events;
            continue;
          }
          const double ratio = (a(xi, static_cast<Eigen::Index>(zr)) / denom_rest) *
                               (c(xi, static_cast<Eigen::Index>(zo)) / denom_own) / baseline;
          hi = std::max(hi, ratio);
          lo = std::min(lo, ratio);
        }
      }
      if (std::isfinite(hi)) {
        g_upper[x] = hi;
        g_lower[x] = lo;
      }
    }

    for (std::size_t x = 0; x < n; ++x) {
      if (std::isnan(g_upper[x])) continue;
      const std::size_t own = digit(x);
      for (std::size_t v = 0; v < m; ++v) {
        if (v == own) continue;
        const std::size_t other = x - own * w + v * w;
        if (std::isnan(g_lower[other])) continue;
        double tv = 0;
        for (std::size_t zo = 0; zo < m; ++zo) {
          const double p = e(static_cast<Eigen::Index>(own), static_cast<Eigen::Index>(zo)) /
                           p_own(static_cast<Eigen::Index>(own));
          const double q = e(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(zo)) /
                           p_own(static_cast<Eigen::Index>(v));
          tv += std::fabs(g_upper[x] * p - g_lower[other] * q);
        }
        out.value = std::max(out.value, 0.5 * tv);
        any = true;
      }
    }
  }
  if (!any) {
    throw ZeroProbability("bounded aged correlation: every conditioning event is degenerate");
  }
  return out;
}

inline BoundedCorrelation BoundedAgedCorrelation(const JointKernel& kernel,
                                                 const AoiVector& age) {
  return BoundedCorrelationFromLaw(kernel.space(), AgedJointLaw(kernel, age));
}

inline double TightBound(double delta_bar, double eps_c) {
  detail::Require(delta_bar >= 0, "delta_bar must be non-negative");
  detail::RequirePositiveBudget(eps_c);
  return delta_bar * eps_c;
}

// ln(1 + Delta(t) (e^{eps_c} - 1)).
inline double AdpLeakage(double delta_t, double eps_c) {
  detail::RequireUnitInterval(delta_t, "delta_t");
  detail::RequirePositiveBudget(eps_c);
  return std::log1p(std::min(delta_t, 1.0) * std::expm1(eps_c));
}

struct BaselineBounds {
  double dp = 0;
  double ddp = 0;
};

// dp = eps_c (correlation blind); ddp = d(k) eps_c (spatial correlation only).
inline BaselineBounds ComputeBaselineBounds(double eps_c, CorrelationDegree degree,
                                            const QuerySpec& query) {
  detail::RequirePositiveBudget(eps_c);
  return BaselineBounds{eps_c, KSensitivity(query, degree) * eps_c};
}

// Temporal-only aged TV distance: for each sequence j the chain P^(jj) alone,
// aged by A^(j); the largest over j. This is the ADP baseline's Delta(t).
inline double SingleSequenceTv(const CmcModel& model, const AoiVector& age) {
  age.Validate(model.s());
  const StateSpace single = StateSpace::Make(1, model.m());
  double best = 0;
  for (int j = 0; j < model.s(); ++j) {
    const JointKernel chain(single, model.transition(j, j).entries);
    best = std::max(best, AgedTvDistance(chain, AoiVector{{age[j]}}, CorrelationDegree{1}));
  }
  return best;
}

// d(k) Phi(lambda, A_t) eps_C where Phi is the aged TV distance of the model's
// joint kernel.
inline double CmcLeakage(const CmcModel& model, const AoiVector& age, double eps_c,
                         const QuerySpec& query, CorrelationDegree degree,
                         std::size_t cap = kDefaultEnumerationCap) {
  detail::RequireValid(model);
  detail::RequirePositiveBudget(eps_c);
  const JointKernel kernel = BuildJointKernel(model, cap);
  return KSensitivity(query, degree) * AgedTvDistance(kernel, age, degree) * eps_c;
}

struct LeakageParams {
  AoiVector age;
  double eps_c = 1.0;
  CorrelationDegree degree;
  std::string query;
};

struct OracleValue {
  double estimate = 0;
  double half_width = 0;
};

struct LeakageReport {
  LeakageParams params;
  double d_k = 1;
  double delta_k = 0;
  std::optional<double> delta_bar;
  double loose_linear = 0;
  double loose_log = 0;
  std::optional<double> tight;
  std::optional<double> adp;
  std::optional<double> dp;
  std::optional<double> ddp;
  std::optional<OracleValue> oracle;
};

}  // namespace csdp

#endif  // CSDP_LEAKAGE_HPP
