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
#include <vector>

#include <gtest/gtest.h>

#include "csdp/joint.hpp"
#include "csdp/stats.hpp"
#include "reference.hpp"

namespace csdp {
namespace {

CmcModel PairModel(double lambda = 0.75) { return SymmetricBinaryCmc(2, 0.3, lambda); }

TEST(JointKernelTest, SingleSequenceEqualsP) {
  const CmcModel chain = SymmetricBinaryCmc(1, 0.3, 1.0);
  EXPECT_TRUE(BuildJointKernel(chain).kernel().isApprox(chain.transition(0, 0).entries, 0));
}

TEST(JointKernelTest, PaperSetupFromZeroZero) {
  const JointKernel k = BuildJointKernel(PairModel());
  const Eigen::Vector4d expected(0.49, 0.21, 0.21, 0.09);
  EXPECT_TRUE(k.kernel().col(0).isApprox(expected, 1e-14));
}

TEST(JointKernelTest, CoupledStateMixes) {
  // From (0,1) each sequence moves to 0 w.p. 0.75*0.7 + 0.25*0.3 = 0.6 (seq 1)
  // and 0.25*0.7 + 0.75*0.3 = 0.4 (seq 2).
  const JointKernel k = BuildJointKernel(PairModel());
  EXPECT_NEAR(k.kernel()(0, 1), 0.6 * 0.4, 1e-15);
  EXPECT_NEAR(k.kernel()(3, 1), 0.4 * 0.6, 1e-15);
}

TEST(JointKernelTest, CapRefusal) {
  EXPECT_THROW(BuildJointKernel(PairModel(), 3), CapExceeded);
}

TEST(JointKernelTest, ColumnsStochasticAndStationaryFixed) {
  const JointKernel k = BuildJointKernel(SymmetricBinaryCmc(3, 0.2, 0.6));
  for (Eigen::Index a = 0; a < k.kernel().cols(); ++a) EXPECT_NEAR(k.kernel().col(a).sum(), 1.0, 1e-12);
  EXPECT_LE((k.kernel() * k.stationary() - k.stationary()).lpNorm<1>(), 1e-9);
}

TEST(AgedJointLawTest, UniformAgesMatchPathEnumeration) {
  const JointKernel k = BuildJointKernel(PairModel());
  for (int t = 0; t <= 3; ++t) {
    const AoiVector age = AoiVector::Uniform(2, t);
    EXPECT_LE((AgedJointLaw(k, age) - testing_ref::PathEnumerationLaw(k, age)).cwiseAbs().maxCoeff(), 1e-14)
        << "t=" << t;
  }
}

TEST(AgedJointLawTest, HeterogeneousAgesMatchPathEnumeration) {
  for (double lambda : {0.0, 0.4, 0.75}) {
    const JointKernel k = BuildJointKernel(PairModel(lambda));
    for (const AoiVector& age : {AoiVector{{0, 1}}, AoiVector{{2, 0}}, AoiVector{{1, 3}}}) {
      const Eigen::MatrixXd law = AgedJointLaw(k, age);
      EXPECT_LE((law - testing_ref::PathEnumerationLaw(k, age)).cwiseAbs().maxCoeff(), 1e-14)
          << "lambda=" << lambda << " age=" << age.Format();
      EXPECT_NEAR(law.sum(), 1.0, 1e-12);
    }
  }
}

TEST(AgedJointLawTest, ThreeSequencesMatchPathEnumeration) {
  const JointKernel k = BuildJointKernel(SymmetricBinaryCmc(3, 0.25, 0.5));
  const AoiVector age{{2, 0, 1}};
  EXPECT_LE((AgedJointLaw(k, age) - testing_ref::PathEnumerationLaw(k, age)).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(AgedJointLawTest, MarginalsAreStationary) {
  const JointKernel k = BuildJointKernel(PairModel());
  const Eigen::MatrixXd law = AgedJointLaw(k, AoiVector{{1, 4}});
  EXPECT_TRUE(Eigen::VectorXd(law.colwise().sum().transpose()).isApprox(k.stationary(), 1e-12));
}

TEST(BackwardConditionalTest, AgeZeroIsIdentity) {
  const JointKernel k = BuildJointKernel(PairModel());
  const ConditionalTable c = BackwardConditional(k, AoiVector::Uniform(2, 0));
  EXPECT_TRUE(c.table.isApprox(Eigen::MatrixXd::Identity(4, 4), 1e-12));
}

TEST(BackwardConditionalTest, FlipChainAgeOne) {
  const JointKernel k = BuildJointKernel(SymmetricBinaryCmc(1, 0.3, 1.0));
  const ConditionalTable c = BackwardConditional(k, AoiVector{{1}});
  EXPECT_NEAR(c(0, 0), 0.7, 1e-12);
  EXPECT_NEAR(c(1, 1), 0.7, 1e-12);
}

TEST(BackwardConditionalTest, FlipChainAgeT) {
  const JointKernel k = BuildJointKernel(SymmetricBinaryCmc(1, 0.3, 1.0));
  for (int t = 0; t <= 12; ++t) {
    const ConditionalTable c = BackwardConditional(k, AoiVector{{t}});
    EXPECT_NEAR(c(0, 0), (1 + std::pow(0.4, t)) / 2, 1e-12) << "t=" << t;
    EXPECT_NEAR(c(1, 0) + c(0, 0), 1.0, 1e-12);
  }
}

TEST(BackwardConditionalTest, ZeroMassStateFails) {
  Eigen::MatrixXd law = Eigen::MatrixXd::Zero(2, 2);
  law(0, 0) = 1.0;
  try {
    ConditionalFromLaw(StateSpace::Make(1, 2), law);
    FAIL() << "expected ZeroProbability";
  } catch (const ZeroProbability& e) {
    EXPECT_NE(std::string(e.what()).find("(1)"), std::string::npos) << e.what();
  }
}

TEST(SampleTrajectoryTest, IdentityKernelIsConstant) {
  const JointKernel k(StateSpace::Make(2, 2), Eigen::MatrixXd::Identity(4, 4));
  const std::size_t start = StateSpace::Make(2, 2).Encode({1, 0});
  for (std::size_t v : SampleTrajectory(k, start, 50, 3)) EXPECT_EQ(v, start);
}

TEST(SampleTrajectoryTest, EmpiricalFrequenciesNearStationary) {
  const JointKernel k = BuildJointKernel(PairModel());
  const std::vector<std::size_t> path = SampleTrajectory(k, std::nullopt, 100000, 11);
  double ones[2] = {0, 0};
  for (std::size_t x : path) {
    const std::vector<int> d = k.space().Decode(x);
    ones[0] += d[0];
    ones[1] += d[1];
  }
  EXPECT_NEAR(ones[0] / 1e5, 0.5, 0.01);
  EXPECT_NEAR(ones[1] / 1e5, 0.5, 0.01);
}

TEST(SampleTrajectoryTest, SameSeedSameTrajectory) {
  const JointKernel k = BuildJointKernel(PairModel());
  EXPECT_EQ(SampleTrajectory(k, std::nullopt, 1000, 5), SampleTrajectory(k, std::nullopt, 1000, 5));
  EXPECT_NE(SampleTrajectory(k, std::nullopt, 1000, 5), SampleTrajectory(k, std::nullopt, 1000, 6));
}

TEST(SampleAgedPairTest, MatchesAgedLawByChiSquare) {
  const JointKernel k = BuildJointKernel(SymmetricBinaryCmc(2, 0.2, 0.6));
  for (const AoiVector& age : {AoiVector{{1, 1}}, AoiVector{{0, 2}}}) {
    const Eigen::MatrixXd law = AgedJointLaw(k, age);
    const std::size_t draws = 200000;
    std::vector<double> observed(16, 0), expected(16);
    CounterRng rng(DeriveSeed(9, {age[0], age[1]}));
    for (std::size_t d = 0; d < draws; ++d) {
      const AgedDraw p = SampleAgedPair(k, age, rng);
      observed[p.aged * 4 + p.current] += 1;
    }
    for (std::size_t z = 0; z < 4; ++z) {
      for (std::size_t x = 0; x < 4; ++x) {
        expected[z * 4 + x] = static_cast<double>(draws) *
                              law(static_cast<Eigen::Index>(z), static_cast<Eigen::Index>(x));
      }
    }
    const ChiSquareResult r = ChiSquareGoodnessOfFit(observed, expected);
    EXPECT_GT(r.p_value, 0.001) << "age " << age.Format() << " chi2 " << r.statistic;
  }
}

}  // namespace
}  // namespace csdp
