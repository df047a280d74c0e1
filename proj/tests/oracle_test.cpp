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


#include <cmath>
#include <limits>
#include <vector>

#include <gtest/gtest.h>

#include "csdp/leakage.hpp"
#include "csdp/oracle.hpp"

namespace csdp {
namespace {

CmcModel PairModel(double lambda) { return SymmetricBinaryCmc(2, 0.3, lambda); }

FranConfig Config(const StateSpace& space, const AoiVector& age, double eps, const char* query = "mean") {
  return FranConfig{age, FindBuiltinQuery(query, space), eps};
}

// Worst log ratio over both half-line families for a one-sequence flip chain
// with f(x) = x, computed from the closed-form backward conditional.
double FlipChainOracle(double flip, int t, double eps) {
  const double stay = (1 + std::pow(1 - 2 * flip, t)) / 2;
  const double b = 1.0 / eps;
  auto cdf = [&](double x) { return x < 0 ? 0.5 * std::exp(x / b) : 1 - 0.5 * std::exp(-x / b); };
  double best = 0;
  for (int i = 0; i < 101; ++i) {
    const double theta = -6 * b + (1 + 12 * b) * i / 100.0;
    const double below0 = stay * cdf(theta) + (1 - stay) * cdf(theta - 1);
    const double below1 = (1 - stay) * cdf(theta) + stay * cdf(theta - 1);
    best = std::max(best, std::fabs(std::log(below0) - std::log(below1)));
    best = std::max(best, std::fabs(std::log1p(-below0) - std::log1p(-below1)));
  }
  return best;
}

TEST(ThetaGridTest, SpansSixScales) {
  const std::vector<double> g = ThetaGrid(0, 1, 0.5);
  ASSERT_EQ(g.size(), 101u);
  EXPECT_DOUBLE_EQ(g.front(), -3.0);
  EXPECT_DOUBLE_EQ(g.back(), 4.0);
}

TEST(OracleExactTest, AgeZeroSingleSequenceIsLaplaceRatio) {
  const JointKernel k = BuildJointKernel(SymmetricBinaryCmc(1, 0.3, 1.0));
  for (double eps : {0.25, 1.0, 3.0}) {
    EXPECT_NEAR(OracleLeakageExact(k, Config(k.space(), AoiVector{{0}}, eps)).estimate, eps, 1e-12);
  }
}

TEST(OracleExactTest, AgeZeroTwoUsersIsEps) {
  for (double lambda : {0.0, 0.5, 0.75}) {
    const JointKernel k = BuildJointKernel(PairModel(lambda));
    EXPECT_NEAR(OracleLeakageExact(k, Config(k.space(), AoiVector::Uniform(2, 0), 1.0)).estimate, 1.0,
                1e-12);
  }
}

TEST(OracleExactTest, FlipChainMatchesClosedForm) {
  const JointKernel k = BuildJointKernel(SymmetricBinaryCmc(1, 0.3, 1.0));
  for (int t = 0; t <= 5; ++t) {
    for (double eps : {0.5, 1.0, 4.0}) {
      EXPECT_NEAR(OracleLeakageExact(k, Config(k.space(), AoiVector{{t}}, eps)).estimate,
                  FlipChainOracle(0.3, t, eps), 1e-12 * std::max(1.0, eps))
          << "t=" << t << " eps=" << eps;
    }
  }
}

TEST(OracleExactTest, FrozenPaperSetupValues) {
  const double expected[][3] = {{0.0, 1, 0.3739928217340034},
                                {0.25, 1, 0.40017978678664345},
                                {0.5, 1, 0.4087585702292982},
                                {0.75, 1, 0.40017978678664345},
                                {0.75, 2, 0.15304554555929872},
                                {1.0, 2, 0.14814785675026343}};
  for (const auto& [lambda, t, value] : expected) {
    const JointKernel k = BuildJointKernel(PairModel(lambda));
    const OracleEstimate e =
        OracleLeakageExact(k, Config(k.space(), AoiVector::Uniform(2, static_cast<int>(t)), 1.0));
    EXPECT_NEAR(e.estimate, value, 1e-12) << "lambda=" << lambda << " t=" << t;
    EXPECT_TRUE(e.exact);
    EXPECT_EQ(e.half_width, 0);
  }
}

TEST(OracleExactTest, IndependentModelStaysBelowAdp) {
  const JointKernel k = BuildJointKernel(PairModel(1.0));
  for (int t = 0; t <= 6; ++t) {
    const AoiVector age = AoiVector::Uniform(2, t);
    const double oracle = OracleLeakageExact(k, Config(k.space(), age, 1.0)).estimate;
    const double adp = AdpLeakage(std::pow(0.4, t), 1.0);
    EXPECT_LE(oracle, adp + 1e-12) << "t=" << t;
    if (t == 0) EXPECT_NEAR(oracle, adp, 1e-12);
  }
}

TEST(OracleExactTest, NeverExceedsLooseBound) {
  const QuerySpec mean = FindBuiltinQuery("mean", StateSpace::Make(2, 2));
  for (double lambda : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    const JointKernel k = BuildJointKernel(PairModel(lambda));
    for (int t = 0; t <= 6; ++t) {
      const AoiVector age = AoiVector::Uniform(2, t);
      const double delta = AgedTvDistance(k, age, CorrelationDegree{2});
      for (double eps : {1.0, 5.0, 10.0}) {
        const double oracle = OracleLeakageExact(k, FranConfig{age, mean, eps}).estimate;
        const double loose = ComputeLooseBound(delta, 2.0, eps).linear;
        EXPECT_LE(oracle, loose * (1 + 1e-12)) << "lambda=" << lambda << " t=" << t << " eps=" << eps;
      }
    }
  }
}

TEST(OracleExactTest, NonIncreasingInAge) {
  const JointKernel k = BuildJointKernel(PairModel(0.6));
  double prev = std::numeric_limits<double>::infinity();
  for (int t = 0; t <= 6; ++t) {
    const double v = OracleLeakageExact(k, Config(k.space(), AoiVector::Uniform(2, t), 1.0)).estimate;
    EXPECT_LE(v, prev + 1e-12);
    prev = v;
  }
}

TEST(OracleExactTest, RejectsBadInputs) {
  const JointKernel k = BuildJointKernel(PairModel(0.5));
  EXPECT_THROW(OracleLeakageExact(k, Config(k.space(), AoiVector::Uniform(2, 1), 0.0)), InvalidArgument);
  EXPECT_THROW(OracleLeakageExact(k, Config(k.space(), AoiVector::Uniform(3, 1), 1.0)), InvalidArgument);
  EXPECT_THROW(OracleLeakageExact(k, Config(StateSpace::Make(2, 3), AoiVector::Uniform(2, 1), 1.0)),
               InvalidArgument);
}

TEST(OracleSampledTest, DeterministicGivenSeed) {
  const JointKernel k = BuildJointKernel(PairModel(0.75));
  const FranConfig cfg = Config(k.space(), AoiVector::Uniform(2, 1), 1.0);
  const OracleEstimate a = OracleLeakageSampled(k, cfg, 20000, 42);
  const OracleEstimate b = OracleLeakageSampled(k, cfg, 20000, 42);
  const OracleEstimate c = OracleLeakageSampled(k, cfg, 20000, 43);
  EXPECT_EQ(a.estimate, b.estimate);
  EXPECT_EQ(a.half_width, b.half_width);
  EXPECT_NE(a.estimate, c.estimate);
  EXPECT_FALSE(a.exact);
}

TEST(OracleSampledTest, AgreesWithExactWithinThreeHalfWidths) {
  for (double lambda : {0.0, 0.5, 1.0}) {
    const JointKernel k = BuildJointKernel(PairModel(lambda));
    for (int t = 0; t <= 1; ++t) {
      const FranConfig cfg = Config(k.space(), AoiVector::Uniform(2, t), 1.0);
      const OracleEstimate exact = OracleLeakageExact(k, cfg);
      const OracleEstimate sampled = OracleLeakageSampled(k, cfg, 100000, DeriveSeed(5, {lambda, t}));
      EXPECT_LE(std::fabs(sampled.estimate - exact.estimate), 3 * sampled.half_width)
          << "lambda=" << lambda << " t=" << t;
      EXPECT_GT(sampled.half_width, 0);
    }
  }
}

TEST(OracleSampledTest, IntervalCoversAcrossSeeds) {
  const JointKernel k = BuildJointKernel(SymmetricBinaryCmc(1, 0.3, 1.0));
  const FranConfig cfg = Config(k.space(), AoiVector{{1}}, 1.0);
  const double exact = OracleLeakageExact(k, cfg).estimate;
  int covered = 0;
  const int trials = 40;
  for (int seed = 0; seed < trials; ++seed) {
    const OracleEstimate e = OracleLeakageSampled(k, cfg, 20000, DeriveSeed(77, {seed}));
    covered += std::fabs(e.estimate - exact) <= 3 * e.half_width;
  }
  EXPECT_GE(covered, 36) << covered << "/" << trials;
}

TEST(OracleSampledTest, TooFewSamplesWidensInterval) {
  const JointKernel k = BuildJointKernel(PairModel(0.5));
  const OracleEstimate e = OracleLeakageSampled(k, Config(k.space(), AoiVector::Uniform(2, 1), 1.0), 30, 1);
  EXPECT_TRUE(std::isinf(e.half_width));
  EXPECT_FALSE(e.diagnostic.empty());
}

TEST(OracleSampledTest, SkippedCellsAreReported) {
  const JointKernel k = BuildJointKernel(PairModel(0.5));
  const OracleEstimate e = OracleLeakageSampled(k, Config(k.space(), AoiVector::Uniform(2, 1), 1.0), 5000, 1);
  EXPECT_TRUE(std::isfinite(e.half_width));
  EXPECT_NE(e.diagnostic.find("count floor"), std::string::npos);
}

TEST(OracleDispatchTest, ZeroSamplesSelectsExact) {
  const JointKernel k = BuildJointKernel(PairModel(0.5));
  const FranConfig cfg = Config(k.space(), AoiVector::Uniform(2, 2), 1.0);
  EXPECT_TRUE(OracleLeakage(k, cfg, 0, 1).exact);
  EXPECT_EQ(OracleLeakage(k, cfg, 0, 1).estimate, OracleLeakageExact(k, cfg).estimate);
  EXPECT_FALSE(OracleLeakage(k, cfg, 1000, 1).exact);
}

}  // namespace
}  // namespace csdp
