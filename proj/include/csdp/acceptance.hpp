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

// Acceptance suite on the two-user binary setup (s = 2, m = 2, every
// P^(jk) = [[0.7, 0.3], [0.3, 0.7]], mean query, k = 2).
//
//   1  coupling sweep: minimum at lambda = 0.5, symmetric in lambda <-> 1 - lambda
//   2  temporal decay below 0.05 by t = 6, >= 55% drop from t = 0 to t = 4
//   3  oracle <= tight <= min(loose_linear, loose_log) on a 5 x 7 x 3 grid
//   4  iid and spatially independent reductions
//   5  frontier separation at l_cap = 0.8 and curve ordering
//   6  Laplace variance and age-0 release vs plain Laplace (KS)
//   7  simulated vs exact MSE on a 5 x 5 x 3 grid, additive decomposition
//   8  exact vs sampled oracle on every configuration with m^s <= 64
//   9  byte-identical sweep tables across reruns and thread counts
//
// The report body holds no timings; runtime limits only affect pass/fail.

#ifndef CSDP_ACCEPTANCE_HPP
#define CSDP_ACCEPTANCE_HPP

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "csdp/cmc.hpp"
#include "csdp/experiment.hpp"
#include "csdp/fran.hpp"
#include "csdp/io.hpp"
#include "csdp/joint.hpp"
#include "csdp/leakage.hpp"
#include "csdp/oracle.hpp"
#include "csdp/query.hpp"
#include "csdp/random.hpp"
#include "csdp/reductions.hpp"
#include "csdp/stats.hpp"
#include "csdp/utility.hpp"

namespace csdp {

struct AcceptanceTolerances {
  double symmetry = 1e-9;                // 1
  double decay_ceiling = 0.05;           // 2
  double decay_min_drop = 0.55;          // 2
  double ordering_slack = 1e-12;         // 3, relative; equality at age 0
  double reduction = 1e-9;               // 4
  double adp_ratio = 0.6;                // 5a
  double baseline_factor = 100;          // 5b
  double variance_rel = 0.05;            // 6
  double ks_p_min = 0.01;                // 6
  double mse_se_factor = 3;              // 7
  double decomposition = 1e-12;          // 7
  double oracle_hw_factor = 3;           // 8
  double runtime_short_s = 10;           // 1, 2
  double runtime_long_s = 120;           // 3, 5
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string measured;
  std::string expected;
};

namespace acceptance {

inline constexpr double kFlip = 0.3;

inline CmcModel Setup(double lambda) { return SymmetricBinaryCmc(2, kFlip, lambda); }

inline QuerySpec MeanQuery() { return FindBuiltinQuery("mean", StateSpace::Make(2, 2)); }

// Short decimal rendering for report text.
inline std::string Short(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double Seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

inline void ApplyRuntime(CriterionResult& r, const Stopwatch& w, double limit) {
  if (w.Seconds() > limit) {
    r.pass = false;
    r.measured += "; runtime limit exceeded";
  }
  r.expected += "; runtime < " + Short(limit) + " s";
}

inline double Leakage(double lambda, int t, double eps) {
  return CmcLeakage(Setup(lambda), AoiVector::Uniform(2, t), eps, MeanQuery(),
                    CorrelationDegree{2});
}

inline CriterionResult UShape(const AcceptanceTolerances& tol) {
  Stopwatch w;
  CriterionResult r{1, "coupling sweep U-shape and symmetry", true, "", ""};
  double worst_asym = 0;
  std::string argmins;
  for (int t = 1; t <= 4; ++t) {
    std::vector<double> leak(11);
    for (int i = 0; i <= 10; ++i) leak[static_cast<std::size_t>(i)] = Leakage(i / 10.0, t, 1.0);
    const auto it = std::min_element(leak.begin(), leak.end());
    const int argmin = static_cast<int>(it - leak.begin());
    if (argmin != 5) r.pass = false;
    argmins += (t > 1 ? "," : "") + Short(argmin / 10.0);
    for (int i = 0; i <= 10; ++i) {
      worst_asym = std::max(worst_asym, std::fabs(leak[static_cast<std::size_t>(i)] -
                                                  leak[static_cast<std::size_t>(10 - i)]));
    }
  }
  if (!(worst_asym <= tol.symmetry)) r.pass = false;
  r.measured = "argmin lambda per t=1..4: " + argmins + "; max asymmetry " + Short(worst_asym);
  r.expected = "argmin 0.5 at every t; asymmetry <= " + Short(tol.symmetry);
  ApplyRuntime(r, w, tol.runtime_short_s);
  return r;
}

inline CriterionResult Decay(const AcceptanceTolerances& tol) {
  Stopwatch w;
  CriterionResult r{2, "temporal decay", true, "", ""};
  double worst_t6 = 0, min_drop = 1;
  bool monotone = true;
  for (double lambda : {0.5, 0.75, 1.0}) {
    std::vector<double> leak;
    for (int t = 0; t <= 6; ++t) leak.push_back(Leakage(lambda, t, 1.0));
    for (std::size_t i = 1; i < leak.size(); ++i) monotone &= leak[i] <= leak[i - 1];
    worst_t6 = std::max(worst_t6, leak[6]);
    min_drop = std::min(min_drop, (leak[0] - leak[4]) / leak[0]);
  }
  r.pass = monotone && worst_t6 < tol.decay_ceiling && min_drop >= tol.decay_min_drop;
  r.measured = "max leakage at t=6 " + Short(worst_t6) + "; min drop t0->t4 " + Short(min_drop) +
               "; non-increasing " + (monotone ? "yes" : "no");
  r.expected = "t=6 leakage < " + Short(tol.decay_ceiling) + "; drop >= " +
               Short(tol.decay_min_drop) + "; non-increasing";
  ApplyRuntime(r, w, tol.runtime_short_s);
  return r;
}

inline CriterionResult BoundOrdering(const AcceptanceTolerances& tol) {
  Stopwatch w;
  CriterionResult r{3, "bound ordering oracle <= tight <= loose", true, "", ""};
  const QuerySpec query = MeanQuery();
  const CorrelationDegree k2{2};
  const double dk = KSensitivity(query, k2);
  int points = 0, tight_viol = 0, oracle_viol = 0;
  double worst_tight = 0, worst_oracle = 0;
  std::string first;
  auto exceeds = [&](double a, double b) {
    return a > b + tol.ordering_slack * std::max(1.0, std::fabs(b));
  };
  for (double lambda : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    const JointKernel kernel = BuildJointKernel(Setup(lambda));
    for (int t = 0; t <= 6; ++t) {
      const AoiVector age = AoiVector::Uniform(2, t);
      const double delta = AgedTvDistance(kernel, age, k2);
      const double delta_bar = BoundedAgedCorrelation(kernel, age).value;
      for (double eps : {1.0, 5.0, 10.0}) {
        ++points;
        const LooseBound loose = ComputeLooseBound(delta, dk, eps);
        const double tight = TightBound(delta_bar, eps);
        const double oracle = OracleLeakageExact(kernel, FranConfig{age, query, eps}).estimate;
        if (exceeds(tight, loose.certified())) {
          ++tight_viol;
          worst_tight = std::max(worst_tight, tight / loose.certified());
          if (first.empty()) {
            first = "tight " + Short(tight) + " > loose " + Short(loose.certified()) +
                    " at lambda=" + Short(lambda) + " t=" + std::to_string(t) +
                    " eps=" + Short(eps);
          }
        }
        if (exceeds(oracle, tight)) {
          ++oracle_viol;
          worst_oracle = std::max(worst_oracle, oracle / tight);
          if (first.empty()) {
            first = "oracle " + Short(oracle) + " > tight " + Short(tight) + " at lambda=" +
                    Short(lambda) + " t=" + std::to_string(t) + " eps=" + Short(eps);
          }
        }
      }
    }
  }
  r.pass = tight_viol == 0 && oracle_viol == 0;
  r.measured = std::to_string(points) + " points; tight>loose " + std::to_string(tight_viol) +
               " (worst ratio " + Short(worst_tight) + "); oracle>tight " +
               std::to_string(oracle_viol) + " (worst ratio " + Short(worst_oracle) + ")";
  if (!first.empty()) r.measured += "; first: " + first;
  r.expected = "zero violations";
  ApplyRuntime(r, w, tol.runtime_long_s);
  return r;
}

inline CmcModel IidModel() {
  Eigen::MatrixXd p(2, 2);
  p << 0.6, 0.6, 0.4, 0.4;
  Eigen::MatrixXd lambda(2, 2);
  lambda << 0.75, 0.25, 0.25, 0.75;
  return CmcModel::Create(StateSpace::Make(2, 2),
                          {{TransitionMatrix(p), TransitionMatrix(p)},
                           {TransitionMatrix(p), TransitionMatrix(p)}},
                          CouplingWeights(lambda));
}

inline CriterionResult Reductions(const AcceptanceTolerances& tol) {
  CriterionResult r{4, "iid and spatially independent reductions", true, "", ""};
  ReductionParams params;
  params.eps_c = 1.0;
  params.max_age = 8;
  params.tolerance = tol.reduction;
  const ReductionReport iid = VerifyReductions(IidModel(), params);
  const ReductionReport spatial = VerifyReductions(Setup(1.0), params);
  double worst_iid = 0, worst_spatial = 0;
  int iid_cases = 0, spatial_cases = 0;
  for (const ReductionCase& c : iid.cases) {
    if (c.name == "iid" && c.applicable) {
      ++iid_cases;
      worst_iid = std::max(worst_iid, std::fabs(c.observed - c.expected));
    }
  }
  for (const ReductionCase& c : spatial.cases) {
    if (c.name.rfind("spatial", 0) == 0 && c.applicable) {
      ++spatial_cases;
      worst_spatial = std::max(worst_spatial, std::fabs(c.observed - c.expected));
    }
  }
  r.pass = iid_cases == 1 && spatial_cases == 9 && worst_iid <= tol.reduction &&
           worst_spatial <= tol.reduction;
  r.measured = "iid max |bound - eps_c| " + Short(worst_iid) + "; spatial max |log - adp| " +
               Short(worst_spatial) + " over " + std::to_string(spatial_cases) + " ages";
  r.expected = "both <= " + Short(tol.reduction) + " (t = 0..8)";
  return r;
}

inline UtilitySpec FrontierSpec() {
  UtilitySpec spec;
  spec.query = MeanQuery();
  spec.degree = CorrelationDegree{2};
  spec.age_grid = UtilitySpec::DefaultAgeGrid(2);
  spec.eps_grid = UtilitySpec::DefaultEpsGrid();
  spec.leakage_kind = LeakageKind::kLooseLinear;
  return spec;
}

inline std::vector<double> FrontierCaps() {
  std::vector<double> caps;
  for (int i = 2; i <= 10; ++i) caps.push_back(i / 10.0);
  return caps;
}

inline CriterionResult Separation(const AcceptanceTolerances& tol) {
  Stopwatch w;
  CriterionResult r{5, "frontier baseline separation", true, "", ""};
  const std::vector<double> caps = FrontierCaps();
  const std::vector<FrontierRow> rows = TradeoffFrontier(Setup(0.5), FrontierSpec(), caps);
  const std::size_t nc = caps.size();
  auto at = [&](Mechanism m, std::size_t ci) -> const TradeoffSolution& {
    return rows[static_cast<std::size_t>(m) * nc + ci].solution;
  };
  std::size_t c08 = 0;
  for (std::size_t i = 0; i < nc; ++i) {
    if (std::fabs(caps[i] - 0.8) < 1e-12) c08 = i;
  }
  const double csdp = at(Mechanism::kCsdp, c08).leakage;
  const double adp = at(Mechanism::kAdp, c08).leakage;
  const double ddp = at(Mechanism::kDdp, c08).leakage;
  const double dp = at(Mechanism::kDp, c08).leakage;
  const bool a = csdp <= tol.adp_ratio * adp;
  const bool b = dp >= tol.baseline_factor * csdp && ddp >= tol.baseline_factor * csdp;
  int order_viol = 0;
  std::string first;
  for (std::size_t i = 0; i < nc; ++i) {
    const double v[4] = {at(Mechanism::kCsdp, i).leakage, at(Mechanism::kAdp, i).leakage,
                         at(Mechanism::kDdp, i).leakage, at(Mechanism::kDp, i).leakage};
    const char* names[4] = {"CSDP", "ADP", "DDP", "DP"};
    for (int j = 0; j < 3; ++j) {
      if (v[j] > v[j + 1]) {
        ++order_viol;
        if (first.empty()) {
          first = std::string(names[j]) + " " + Short(v[j]) + " > " + names[j + 1] + " " +
                  Short(v[j + 1]) + " at l_cap=" + Short(caps[i]);
        }
      }
    }
  }
  const bool c = order_viol == 0;
  r.pass = a && b && c;
  r.measured = "l_cap=0.8: CSDP " + Short(csdp) + ", ADP " + Short(adp) + ", DDP " + Short(ddp) +
               ", DP " + Short(dp) + "; (a) ratio " + Short(csdp / adp) + (a ? " ok" : " FAIL") +
               "; (b) min factor " + Short(std::min(dp, ddp) / csdp) + (b ? " ok" : " FAIL") +
               "; (c) ordering violations " + std::to_string(order_viol) + (c ? " ok" : " FAIL");
  if (!first.empty()) r.measured += " (first: " + first + ")";
  r.expected = "(a) ratio <= " + Short(tol.adp_ratio) + "; (b) factor >= " +
               Short(tol.baseline_factor) + "; (c) CSDP <= ADP <= DDP <= DP at l_cap 0.2..1.0";
  ApplyRuntime(r, w, tol.runtime_long_s);
  return r;
}

inline CriterionResult MechanismStatistics(const AcceptanceTolerances& tol, std::uint64_t seed) {
  CriterionResult r{6, "Laplace variance and age-0 release law", true, "", ""};
  const std::vector<double> draws = LaplaceSample(1.0, 1000000, DeriveSeed(seed, {6, 0}));
  const SampleMoments mom = Moments(draws);
  const double rel = std::fabs(mom.variance - 2.0) / 2.0;

  const StateSpace space = StateSpace::Make(2, 2);
  const QuerySpec query = MeanQuery();
  const SequenceDatabase db = SequenceDatabase::Create(space, {{0, 1}, {1, 1}, {1, 0}});
  constexpr std::size_t kSamples = 100000;
  std::vector<double> fran(kSamples), plain(kSamples);
  for (std::size_t i = 0; i < kSamples; ++i) {
    fran[i] = Release(db, 3, AoiVector::Uniform(2, 0), query, 1.0,
                      DeriveSeed(seed, {6, 1, static_cast<std::uint64_t>(i)}))
                  .value[0];
    plain[i] = LaplaceMechanism(query, db.snapshot(3), 1.0,
                                DeriveSeed(seed, {6, 2, static_cast<std::uint64_t>(i)}))[0];
  }
  const KsResult ks = KsTwoSample(fran, plain);
  r.pass = rel <= tol.variance_rel && ks.p_value > tol.ks_p_min;
  r.measured = "variance " + Short(mom.variance) + " (rel err " + Short(rel) + "); KS D " +
               Short(ks.statistic) + ", p " + Short(ks.p_value);
  r.expected = "rel err <= " + Short(tol.variance_rel) + " at 1e6 draws; KS p > " +
               Short(tol.ks_p_min) + " at 1e5 samples";
  return r;
}

inline CriterionResult MseModel(const AcceptanceTolerances& tol, std::uint64_t seed) {
  CriterionResult r{7, "simulated vs exact MSE and decomposition", true, "", ""};
  const QuerySpec query = MeanQuery();
  constexpr std::size_t kSamples = 20000;
  const std::vector<double> eps_grid = {0.5, 1.0, 5.0};
  int disagree = 0, points = 0;
  double worst_z = 0, worst_decomp = 0;
  for (double lambda : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    const JointKernel kernel = BuildJointKernel(Setup(lambda));
    std::vector<double> diffs;
    for (int t : {0, 1, 2, 4, 8}) {
      const AoiVector age = AoiVector::Uniform(2, t);
      std::vector<double> exact;
      for (double eps : eps_grid) {
        ++points;
        const double e = MseExact(kernel, age, query, eps);
        exact.push_back(e);
        const MseEstimate sim =
            MseSimulated(kernel, age, query, eps, kSamples, DeriveSeed(seed, {7, lambda, t, eps}));
        const double z = std::fabs(sim.mean - e) / sim.standard_error;
        worst_z = std::max(worst_z, z);
        if (!(z <= tol.mse_se_factor)) ++disagree;
      }
      const double d01 = exact[0] - exact[1];
      const double d02 = exact[0] - exact[2];
      if (!diffs.empty()) {
        worst_decomp = std::max({worst_decomp, std::fabs(d01 - diffs[0]), std::fabs(d02 - diffs[1])});
      } else {
        diffs = {d01, d02};
      }
    }
  }
  r.pass = disagree == 0 && worst_decomp <= tol.decomposition;
  r.measured = std::to_string(points) + " points; max |sim - exact| / se " + Short(worst_z) +
               "; disagreements " + std::to_string(disagree) + "; max decomposition error " +
               Short(worst_decomp);
  r.expected = "|sim - exact| <= " + Short(tol.mse_se_factor) + " se everywhere; decomposition <= " +
               Short(tol.decomposition);
  return r;
}

struct OracleCase {
  CmcModel model;
  AoiVector age;
  double eps;
};

inline std::vector<OracleCase> OracleCases() {
  std::vector<OracleCase> cases;
  const CmcModel chain = SymmetricBinaryCmc(1, kFlip, 1.0);
  for (int t : {0, 1, 2}) cases.push_back({chain, AoiVector::Uniform(1, t), 1.0});
  for (double lambda : {0.0, 0.5, 0.75, 1.0}) {
    for (int t : {0, 1, 2}) cases.push_back({Setup(lambda), AoiVector::Uniform(2, t), 1.0});
    cases.push_back({Setup(lambda), AoiVector{{1, 2}}, 1.0});
  }
  cases.push_back({Setup(0.75), AoiVector::Uniform(2, 1), 5.0});
  const CmcModel three = SymmetricBinaryCmc(3, kFlip, 0.5);
  for (int t : {0, 1}) cases.push_back({three, AoiVector::Uniform(3, t), 1.0});
  return cases;
}

inline CriterionResult OracleCrossValidation(const AcceptanceTolerances& tol, std::uint64_t seed) {
  CriterionResult r{8, "exact vs sampled oracle", true, "", ""};
  constexpr std::size_t kSamples = 100000;
  const std::vector<OracleCase> cases = OracleCases();
  int disagree = 0;
  double worst = 0;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const OracleCase& c = cases[i];
    const JointKernel kernel = BuildJointKernel(c.model);
    const FranConfig fran{c.age, FindBuiltinQuery("mean", c.model.space()), c.eps};
    const OracleEstimate exact = OracleLeakageExact(kernel, fran);
    const OracleEstimate sampled =
        OracleLeakageSampled(kernel, fran, kSamples, DeriveSeed(seed, {8, static_cast<std::uint64_t>(i)}));
    const double ratio = std::fabs(exact.estimate - sampled.estimate) / sampled.half_width;
    worst = std::max(worst, ratio);
    if (!(ratio <= tol.oracle_hw_factor)) ++disagree;
  }
  r.pass = disagree == 0;
  r.measured = std::to_string(cases.size()) + " configurations; max |exact - sampled| / hw " +
               Short(worst) + "; disagreements " + std::to_string(disagree);
  r.expected = "|exact - sampled| <= " + Short(tol.oracle_hw_factor) + " hw at 1e5 samples";
  return r;
}

inline ExperimentConfig DeterminismConfig(SweepKind kind, std::uint64_t seed, unsigned threads) {
  ExperimentConfig cfg;
  cfg.sweep = kind;
  cfg.model = Setup(0.75);
  cfg.k = 2;
  cfg.lambda = {0.25, 0.5, 0.75};
  cfg.ages = {AoiVector::Uniform(2, 0), AoiVector::Uniform(2, 1), AoiVector{{1, 2}}};
  cfg.age_families = {cfg.ages};
  cfg.eps_c = {0.5, 1.0};
  cfg.caps = {0.4, 0.8};
  cfg.samples = 5000;
  cfg.mse_samples = 2000;
  cfg.oracle = OracleMode::kSampled;
  cfg.seed = seed;
  cfg.threads = threads;
  return cfg;
}

inline CriterionResult Determinism(const AcceptanceTolerances&, std::uint64_t seed) {
  CriterionResult r{9, "byte-identical reruns", true, "", ""};
  int compared = 0, mismatched = 0;
  for (SweepKind kind : {SweepKind::kLeakageVsLambda, SweepKind::kUtilitySweep,
                         SweepKind::kFrontier, SweepKind::kOracleValidate}) {
    const std::string base = RunSweep(DeterminismConfig(kind, seed, 1)).table.ToCsv();
    for (unsigned threads : {1u, 4u}) {
      ++compared;
      if (RunSweep(DeterminismConfig(kind, seed, threads)).table.ToCsv() != base) ++mismatched;
    }
  }
  r.pass = mismatched == 0;
  r.measured = std::to_string(compared) + " reruns (1 and 4 threads); mismatches " +
               std::to_string(mismatched);
  r.expected = "all tables byte-identical";
  return r;
}

}  // namespace acceptance

inline constexpr int kCriterionCount = 9;

inline CriterionResult EvaluateCriterion(int id, const AcceptanceTolerances& tol,
                                         std::uint64_t seed) {
  switch (id) {
    case 1: return acceptance::UShape(tol);
    case 2: return acceptance::Decay(tol);
    case 3: return acceptance::BoundOrdering(tol);
    case 4: return acceptance::Reductions(tol);
    case 5: return acceptance::Separation(tol);
    case 6: return acceptance::MechanismStatistics(tol, seed);
    case 7: return acceptance::MseModel(tol, seed);
    case 8: return acceptance::OracleCrossValidation(tol, seed);
    case 9: return acceptance::Determinism(tol, seed);
    default: throw InvalidArgument("acceptance: criterion must be 1.." + std::to_string(kCriterionCount));
  }
}

inline std::string FormatCriterion(const CriterionResult& r) {
  return std::string(r.pass ? "PASS" : "FAIL") + " criterion " + std::to_string(r.id) + " (" +
         r.name + "): measured " + r.measured + " | expected " + r.expected;
}

}  // namespace csdp

#endif  // CSDP_ACCEPTANCE_HPP
