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

#include "csdp/random.hpp"
#include "csdp/stats.hpp"

namespace csdp {
namespace {

TEST(MomentsTest, SmallSample) {
  const std::vector<double> x = {1, 2, 3, 4};
  const SampleMoments m = Moments(x);
  EXPECT_DOUBLE_EQ(m.mean, 2.5);
  EXPECT_DOUBLE_EQ(m.variance, 5.0 / 3);
  EXPECT_EQ(m.count, 4u);
  EXPECT_DOUBLE_EQ(m.StandardError(), std::sqrt(5.0 / 12));
}

TEST(KolmogorovTest, KnownValues) {
  EXPECT_NEAR(KolmogorovSurvival(1.0), 0.26999967167735456, 1e-12);
  EXPECT_NEAR(KolmogorovSurvival(1.36), 0.049485876755377876, 1e-12);
  EXPECT_NEAR(KolmogorovSurvival(1.63), 0.009846364888486529, 1e-12);
  EXPECT_EQ(KolmogorovSurvival(0.0), 1.0);
}

TEST(KsTwoSampleTest, IdenticalSamples) {
  const std::vector<double> a = LaplaceSample(1.0, 500, 1);
  const KsResult r = KsTwoSample(a, a);
  EXPECT_EQ(r.statistic, 0);
  EXPECT_EQ(r.p_value, 1.0);
}

TEST(KsTwoSampleTest, DisjointSamples) {
  const KsResult r = KsTwoSample({1, 2, 3, 4, 5, 6, 7, 8}, {11, 12, 13, 14, 15, 16, 17, 18});
  EXPECT_EQ(r.statistic, 1.0);
  EXPECT_LT(r.p_value, 0.01);
}

TEST(KsTwoSampleTest, DetectsShift) {
  std::vector<double> b = LaplaceSample(1.0, 20000, 2);
  for (double& v : b) v += 0.1;
  EXPECT_LT(KsTwoSample(LaplaceSample(1.0, 20000, 3), b).p_value, 0.01);
}

TEST(KsTwoSampleTest, NullRejectionRateNearLevel) {
  int rejected = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const KsResult r = KsTwoSample(LaplaceSample(1.0, 2000, DeriveSeed(10, {trial})),
                                   LaplaceSample(1.0, 2000, DeriveSeed(11, {trial})));
    rejected += r.p_value < 0.05;
  }
  EXPECT_LE(rejected, 20);
}

TEST(ChiSquareTest, KnownQuantile) {
  // Two cells, one degree of freedom: statistic 3.8415 sits at p = 0.05.
  const double d = std::sqrt(3.841458820694124 * 50 / 2);
  const std::vector<double> observed = {50 + d, 50 - d};
  const std::vector<double> expected = {50, 50};
  const ChiSquareResult r = ChiSquareGoodnessOfFit(observed, expected);
  EXPECT_DOUBLE_EQ(r.dof, 1);
  EXPECT_NEAR(r.statistic, 3.841458820694124, 1e-9);
  EXPECT_NEAR(r.p_value, 0.05, 1e-9);
}

TEST(ChiSquareTest, ImpossibleCellRejected) {
  const std::vector<double> observed = {3, 1};
  const std::vector<double> expected = {4, 0};
  EXPECT_THROW(ChiSquareGoodnessOfFit(observed, expected), InvalidArgument);
}

}  // namespace
}  // namespace csdp
