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

#include "csdp/fran.hpp"
#include "csdp/stats.hpp"

namespace csdp {
namespace {

SequenceDatabase Alternating() {
  // x^(1) = 0,1,0,1,0; x^(2) = 1,1,0,0,1.
  return SequenceDatabase::Create(StateSpace::Make(2, 2), {{0, 1}, {1, 1}, {0, 0}, {1, 0}, {0, 1}});
}

TEST(SequenceDatabaseTest, RejectsBadRows) {
  EXPECT_THROW(SequenceDatabase::Create(StateSpace::Make(2, 2), {}), InvalidArgument);
  EXPECT_THROW(SequenceDatabase::Create(StateSpace::Make(2, 2), {{0, 1, 1}}), InvalidArgument);
  EXPECT_THROW(SequenceDatabase::Create(StateSpace::Make(2, 2), {{0, 2}}), InvalidArgument);
}

TEST(AgeDataTest, AgeZeroIsCurrentSnapshot) {
  const SequenceDatabase db = Alternating();
  for (int t = 1; t <= db.horizon(); ++t) {
    EXPECT_EQ(AgeData(db, t, AoiVector::Uniform(2, 0)), db.snapshot(t));
  }
}

TEST(AgeDataTest, PerSequenceLags) {
  const SequenceDatabase db = Alternating();
  EXPECT_EQ(AgeData(db, 4, AoiVector{{2, 0}}), (std::vector<int>{db.at(2, 0), db.at(4, 1)}));
  EXPECT_EQ(AgeData(db, 4, AoiVector{{2, 0}}), (std::vector<int>{1, 0}));
}

TEST(AgeDataTest, TooOldNamesSequence) {
  try {
    AgeData(Alternating(), 3, AoiVector{{5, 5}});
    FAIL() << "expected InvalidArgument";
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find("sequence 1"), std::string::npos) << e.what();
  }
  EXPECT_THROW(AgeData(Alternating(), 6, AoiVector{{0, 0}}), InvalidArgument);
}

TEST(LaplaceSampleTest, MeanAndVariance) {
  const std::vector<double> x = LaplaceSample(1.0, 1000000, 2024);
  const SampleMoments m = Moments(x);
  EXPECT_NEAR(m.mean, 0.0, 0.01);
  EXPECT_NEAR(m.variance, 2.0, 0.02);
}

TEST(LaplaceSampleTest, SameSeedSameVector) {
  EXPECT_EQ(LaplaceSample(0.7, 100, 9), LaplaceSample(0.7, 100, 9));
  EXPECT_NE(LaplaceSample(0.7, 100, 9), LaplaceSample(0.7, 100, 10));
  EXPECT_THROW(LaplaceSample(0.0, 10, 1), InvalidArgument);
}

TEST(LaplaceSampleTest, QuantileInvertsCdf) {
  for (double u : {1e-9, 0.1, 0.5, 0.77, 1 - 1e-9}) {
    EXPECT_NEAR(LaplaceCdf(LaplaceQuantile(u, 1.3), 1.3), u, 1e-12);
  }
}

TEST(ReleaseTest, LargeEpsIsNearlyExact) {
  const SequenceDatabase db = Alternating();
  const QuerySpec mean = FindBuiltinQuery("mean", db.space());
  int close = 0;
  for (std::uint64_t seed = 0; seed < 10000; ++seed) {
    const MechanismOutput out = Release(db, 3, AoiVector::Uniform(2, 0), mean, 1e6, seed);
    close += std::fabs(out.value[0] - 0.0) < 1e-4;
  }
  EXPECT_GT(close, 9990);
}

TEST(ReleaseTest, ReproducibleDraw) {
  const SequenceDatabase db = SequenceDatabase::Create(StateSpace::Make(2, 2), {{1, 0}});
  const QuerySpec mean = FindBuiltinQuery("mean", db.space());
  const MechanismOutput a = Release(db, 1, AoiVector::Uniform(2, 0), mean, 1.0, 31);
  const MechanismOutput b = Release(db, 1, AoiVector::Uniform(2, 0), mean, 1.0, 31);
  EXPECT_EQ(a.value, b.value);
  EXPECT_DOUBLE_EQ(a.noise_scale, 0.5);
  EXPECT_DOUBLE_EQ(a.value[0], 0.5 + LaplaceSample(0.5, 1, 31)[0]);
  EXPECT_EQ(a.aged_snapshot, (std::vector<int>{1, 0}));
}

TEST(ReleaseTest, RejectsMismatchAndBadEps) {
  const SequenceDatabase db = Alternating();
  EXPECT_THROW(Release(db, 2, AoiVector::Uniform(2, 0), FindBuiltinQuery("mean", StateSpace::Make(3, 2)),
                       1.0, 1),
               InvalidArgument);
  EXPECT_THROW(Release(db, 2, AoiVector::Uniform(2, 0), FindBuiltinQuery("mean", db.space()), -1.0, 1),
               InvalidArgument);
}

TEST(ReleaseTest, AgeZeroMatchesPlainLaplaceByKs) {
  const SequenceDatabase db = Alternating();
  const QuerySpec sum = FindBuiltinQuery("sum", db.space());
  const std::size_t n = 100000;
  std::vector<double> released(n), plain(n);
  for (std::size_t i = 0; i < n; ++i) {
    released[i] = Release(db, 2, AoiVector::Uniform(2, 0), sum, 0.8, DeriveSeed(1, {i})).value[0];
    plain[i] = 2.0 + LaplaceSample(1.0 / 0.8, 1, DeriveSeed(2, {i}))[0];
  }
  EXPECT_GT(KsTwoSample(released, plain).p_value, 0.01);
}

TEST(ReleaseTest, UnbiasedAroundAgedSnapshot) {
  const SequenceDatabase db = Alternating();
  const QuerySpec mean = FindBuiltinQuery("mean", db.space());
  const AoiVector age{{1, 3}};
  const double target = mean.evaluate(AgeData(db, 4, age))[0];
  std::vector<double> values(100000);
  for (std::size_t i = 0; i < values.size(); ++i) {
    values[i] = Release(db, 4, age, mean, 1.0, DeriveSeed(3, {i})).value[0];
  }
  const SampleMoments m = Moments(values);
  EXPECT_LE(std::fabs(m.mean - target), 3 * m.StandardError());
}

TEST(ReleaseTest, NoiseVarianceMatchesScale) {
  const SequenceDatabase db = Alternating();
  const QuerySpec mean = FindBuiltinQuery("mean", db.space());
  const double eps = 2.0;
  std::vector<double> noise(1000000);
  for (std::size_t i = 0; i < noise.size(); ++i) {
    const MechanismOutput out = Release(db, 5, AoiVector::Uniform(2, 1), mean, eps, DeriveSeed(4, {i}));
    noise[i] = out.value[0] - mean.evaluate(out.aged_snapshot)[0];
  }
  const double expected = 2 * std::pow(0.5 / eps, 2);
  EXPECT_NEAR(Moments(noise).variance / expected, 1.0, 0.05);
}

}  // namespace
}  // namespace csdp
