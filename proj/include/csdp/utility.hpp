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

// Mean squared release error and the leakage-minimising grid search.
//
//   MSE = E||f(z) - f(x)||^2 + 2 d (s_1(f) / eps_c)^2
//
// with (z, x) the stationary (aged, current) pair. The optimiser minimises a
// leakage measure over (age, eps_c) grids subject to MSE <= cap.

#ifndef CSDP_UTILITY_HPP
#define CSDP_UTILITY_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "csdp/cmc.hpp"
#include "csdp/error.hpp"
#include "csdp/joint.hpp"
#include "csdp/leakage.hpp"
#include "csdp/parallel.hpp"
#include "csdp/query.hpp"
#include "csdp/random.hpp"

namespace csdp {

inline double AgingError(const JointKernel& kernel, const AoiVector& age, const QuerySpec& query,
                         std::size_t cap = kDefaultEnumerationCap) {
  const Eigen::MatrixXd law = AgedJointLaw(kernel, age);
  const auto table = QueryTable(query, cap);
  const std::size_t n = kernel.size();
  double total = 0;
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t z = 0; z < n; ++z) {
      const double p = law(static_cast<Eigen::Index>(z), static_cast<Eigen::Index>(x));
      if (p == 0) continue;
      double sq = 0;
      for (std::size_t c = 0; c < table[x].size(); ++c) {
        const double d = table[z][c] - table[x][c];
        sq += d * d;
      }
      total += p * sq;
    }
  }
  return total;
}

inline double NoiseVariance(const QuerySpec& query, double eps_c) {
  detail::RequirePositiveBudget(eps_c);
  const double b = query.DeltaF() / eps_c;
  return 2.0 * query.output_dim * b * b;
}

inline double MseExact(const JointKernel& kernel, const AoiVector& age, const QuerySpec& query,
                       double eps_c, std::size_t cap = kDefaultEnumerationCap) {
  return AgingError(kernel, age, query, cap) + NoiseVariance(query, eps_c);
}

struct MseEstimate {
  double mean = 0;
  double standard_error = 0;
};

inline MseEstimate MseSimulated(const JointKernel& kernel, const AoiVector& age,
                                const QuerySpec& query, double eps_c, std::size_t samples,
                                std::uint64_t seed) {
  detail::Require(samples >= 100, "mse_simulated: samples must be >= 100");
  detail::RequirePositiveBudget(eps_c);
  age.Validate(kernel.space().num_sequences);
  const StateSpace& space = kernel.space();
  const double scale = query.DeltaF() / eps_c;
  CounterRng rng(seed);
  double mean = 0, m2 = 0;
  for (std::size_t i = 0; i < samples; ++i) {
    const AgedDraw pair = SampleAgedPair(kernel, age, rng);
    const std::vector<double> aged = query.evaluate(space.Decode(pair.aged));
    const std::vector<double> fresh = query.evaluate(space.Decode(pair.current));
    double sq = 0;
    for (std::size_t c = 0; c < aged.size(); ++c) {
      const double d = aged[c] + DrawLaplace(rng, scale) - fresh[c];
      sq += d * d;
    }
    const double delta = sq - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (sq - mean);
  }
  const double var = m2 / static_cast<double>(samples - 1);
  return MseEstimate{mean, std::sqrt(var / static_cast<double>(samples))};
}

enum class LeakageKind { kLooseLinear, kLooseLog, kTight };

inline std::string LeakageKindName(LeakageKind kind) {
  switch (kind) {
    case LeakageKind::kLooseLinear: return "loose_linear";
    case LeakageKind::kLooseLog: return "loose_log";
    case LeakageKind::kTight: return "tight";
  }
  return "";
}

inline LeakageKind ParseLeakageKind(const std::string& name) {
  if (name == "loose_linear") return LeakageKind::kLooseLinear;
  if (name == "loose_log") return LeakageKind::kLooseLog;
  if (name == "tight") return LeakageKind::kTight;
  throw ParseError("leakage_kind", "expected loose_linear, loose_log or tight, got '" + name + "'");
}

enum class Mechanism { kCsdp, kAdp, kDdp, kDp };

inline std::string MechanismName(Mechanism m) {
  switch (m) {
    case Mechanism::kCsdp: return "CSDP";
    case Mechanism::kAdp: return "ADP";
    case Mechanism::kDdp: return "DDP";
    case Mechanism::kDp: return "DP";
  }
  return "";
}

struct UtilitySpec {
  QuerySpec query;
  CorrelationDegree degree;
  double mse_cap = 1.0;
  std::vector<AoiVector> age_grid;
  std::vector<double> eps_grid;
  LeakageKind leakage_kind = LeakageKind::kLooseLinear;
  std::size_t cap = kDefaultEnumerationCap;
  unsigned threads = 1;

  // Ages 0..20 uniform and 25 log-spaced noise levels in [0.05, 10].
  static std::vector<AoiVector> DefaultAgeGrid(int s) {
    std::vector<AoiVector> grid;
    for (int t = 0; t <= 20; ++t) grid.push_back(AoiVector::Uniform(s, t));
    return grid;
  }
  static std::vector<double> DefaultEpsGrid() {
    std::vector<double> grid(25);
    for (int i = 0; i < 25; ++i) {
      grid[static_cast<std::size_t>(i)] =
          std::exp(std::log(0.05) + (std::log(10.0) - std::log(0.05)) * i / 24.0);
    }
    return grid;
  }
};

struct GridPoint {
  AoiVector age;
  double eps_c = 0;
  double leakage = 0;
  double mse = 0;
};

struct TradeoffSolution {
  Mechanism mechanism = Mechanism::kCsdp;
  AoiVector age;
  double eps_c = 0;
  double leakage = 0;
  double mse = 0;
  bool feasible = false;
  std::vector<std::pair<double, double>> frontier;  // (mse_cap, leakage)
};

namespace detail {

inline void RequireGrids(const CmcModel& model, const UtilitySpec& spec) {
  Require(!spec.age_grid.empty(), "utility spec: age grid is empty");
  Require(!spec.eps_grid.empty(), "utility spec: eps grid is empty");
  Require(spec.mse_cap > 0, "utility spec: mse_cap must be positive");
  for (const AoiVector& a : spec.age_grid) a.Validate(model.s());
  for (double e : spec.eps_grid) RequirePositiveBudget(e);
}

// Age-dependent part of a mechanism's leakage: the factor multiplying or
// entering the eps_c dependence.
inline double AgeFactor(Mechanism mechanism, const CmcModel& model, const JointKernel& kernel,
                        const AoiVector& age, const UtilitySpec& spec) {
  switch (mechanism) {
    case Mechanism::kCsdp:
      if (spec.leakage_kind == LeakageKind::kTight) {
        return BoundedAgedCorrelation(kernel, age).value;
      }
      return AgedTvDistance(kernel, age, spec.degree);
    case Mechanism::kAdp:
      return SingleSequenceTv(model, age);
    case Mechanism::kDdp:
    case Mechanism::kDp:
      return 1.0;
  }
  return 0;
}

inline double LeakageAt(Mechanism mechanism, double factor, double dk, double eps_c,
                        LeakageKind kind) {
  switch (mechanism) {
    case Mechanism::kCsdp: {
      if (kind == LeakageKind::kTight) return TightBound(factor, eps_c);
      const LooseBound loose = ComputeLooseBound(factor, dk, eps_c);
      return kind == LeakageKind::kLooseLog ? loose.log_form : loose.linear;
    }
    case Mechanism::kAdp:
      return AdpLeakage(factor, eps_c);
    case Mechanism::kDdp:
      return dk * eps_c;
    case Mechanism::kDp:
      return eps_c;
  }
  return 0;
}

// True when a is preferred to b among points of equal standing.
inline bool TieBreak(const GridPoint& a, const GridPoint& b) {
  if (a.eps_c != b.eps_c) return a.eps_c > b.eps_c;
  return a.age < b.age;
}

}  // namespace detail

// Leakage and MSE of every grid point for one mechanism. DP and DDP are
// evaluated at age 0 only.
inline std::vector<GridPoint> EvaluateGrid(Mechanism mechanism, const CmcModel& model,
                                           const UtilitySpec& spec) {
  detail::RequireGrids(model, spec);
  const JointKernel kernel = BuildJointKernel(model, spec.cap);
  const double dk = KSensitivity(spec.query, spec.degree);
  std::vector<AoiVector> ages = spec.age_grid;
  if (mechanism == Mechanism::kDp || mechanism == Mechanism::kDdp) {
    ages = {AoiVector::Uniform(model.s(), 0)};
  }
  struct AgeRow {
    double factor = 0;
    double aging = 0;
  };
  const std::vector<AgeRow> rows = ParallelMap(ages.size(), spec.threads, [&](std::size_t i) {
    return AgeRow{detail::AgeFactor(mechanism, model, kernel, ages[i], spec),
                  AgingError(kernel, ages[i], spec.query, spec.cap)};
  });
  std::vector<GridPoint> points;
  points.reserve(ages.size() * spec.eps_grid.size());
  for (std::size_t i = 0; i < ages.size(); ++i) {
    for (double eps : spec.eps_grid) {
      points.push_back(GridPoint{
          ages[i], eps, detail::LeakageAt(mechanism, rows[i].factor, dk, eps, spec.leakage_kind),
          rows[i].aging + NoiseVariance(spec.query, eps)});
    }
  }
  return points;
}

inline TradeoffSolution SelectOptimum(Mechanism mechanism, const std::vector<GridPoint>& points,
                                      double mse_cap) {
  detail::Require(!points.empty(), "solve_p1: no grid points");
  const GridPoint* best = nullptr;
  for (const GridPoint& p : points) {
    if (p.mse > mse_cap) continue;
    if (!best || p.leakage < best->leakage ||
        (p.leakage == best->leakage && detail::TieBreak(p, *best))) {
      best = &p;
    }
  }
  bool feasible = best != nullptr;
  if (!feasible) {
    for (const GridPoint& p : points) {
      if (!best || p.mse < best->mse ||
          (p.mse == best->mse && (p.leakage < best->leakage ||
                                  (p.leakage == best->leakage && detail::TieBreak(p, *best))))) {
        best = &p;
      }
    }
  }
  TradeoffSolution out;
  out.mechanism = mechanism;
  out.age = best->age;
  out.eps_c = best->eps_c;
  out.leakage = best->leakage;
  out.mse = best->mse;
  out.feasible = feasible;
  return out;
}

inline TradeoffSolution SolveP1(const CmcModel& model, const UtilitySpec& spec,
                                Mechanism mechanism = Mechanism::kCsdp) {
  detail::RequireValid(model);
  return SelectOptimum(mechanism, EvaluateGrid(mechanism, model, spec), spec.mse_cap);
}

struct FrontierRow {
  double l_cap = 0;
  TradeoffSolution solution;
};

// One solution per (mechanism, cap), mechanisms in the order CSDP, ADP, DDP,
// DP and caps in the given order. Each solution carries its mechanism's
// (cap, leakage) curve.
inline std::vector<FrontierRow> TradeoffFrontier(const CmcModel& model, const UtilitySpec& spec,
                                                 const std::vector<double>& caps) {
  detail::RequireValid(model);
  detail::Require(!caps.empty(), "tradeoff_frontier: no caps given");
  for (double c : caps) detail::Require(c > 0, "tradeoff_frontier: caps must be positive");
  std::vector<FrontierRow> rows;
  for (Mechanism mech : {Mechanism::kCsdp, Mechanism::kAdp, Mechanism::kDdp, Mechanism::kDp}) {
    const std::vector<GridPoint> points = EvaluateGrid(mech, model, spec);
    std::vector<std::pair<double, double>> curve;
    const std::size_t first = rows.size();
    for (double c : caps) {
      rows.push_back(FrontierRow{c, SelectOptimum(mech, points, c)});
      curve.emplace_back(c, rows.back().solution.leakage);
    }
    for (std::size_t i = first; i < rows.size(); ++i) rows[i].solution.frontier = curve;
  }
  return rows;
}

}  // namespace csdp

#endif  // CSDP_UTILITY_HPP
