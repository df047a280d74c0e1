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

#include "csdp/cmc.hpp"
#include "csdp/random.hpp"

namespace csdp {
namespace {

Eigen::MatrixXd Mat2(double a, double b, double c, double d) {
  Eigen::MatrixXd m(2, 2);
  m << a, b, c, d;
  return m;
}

CmcModel PairModel() { return SymmetricBinaryCmc(2, 0.3, 0.75); }

CmcModel SingleChain(const Eigen::MatrixXd& p) {
  return CmcModel::Create(StateSpace::Make(1, p.rows()), {{TransitionMatrix(p)}},
                          CouplingWeights(Eigen::MatrixXd::Ones(1, 1)));
}

// Random column-stochastic matrices and row-stochastic weights.
CmcModel RandomModel(int s, int m, std::uint64_t seed) {
  CounterRng rng(seed);
  std::vector<std::vector<TransitionMatrix>> t(static_cast<std::size_t>(s));
  for (auto& row : t) {
    for (int k = 0; k < s; ++k) {
      Eigen::MatrixXd p(m, m);
      for (int a = 0; a < m; ++a) {
        for (int b = 0; b < m; ++b) p(b, a) = rng.NextUniform();
        p.col(a) /= p.col(a).sum();
      }
      row.emplace_back(p);
    }
  }
  Eigen::MatrixXd lambda(s, s);
  for (int j = 0; j < s; ++j) {
    for (int k = 0; k < s; ++k) lambda(j, k) = rng.NextUniform();
    lambda.row(j) /= lambda.row(j).sum();
  }
  return CmcModel::Create(StateSpace::Make(s, m), std::move(t), CouplingWeights(lambda));
}

TEST(StateSpaceTest, EncodeDecodeRoundTrip) {
  const StateSpace space = StateSpace::Make(3, 4);
  EXPECT_EQ(space.JointSize(), 64u);
  for (std::size_t x = 0; x < 64; ++x) EXPECT_EQ(space.Encode(space.Decode(x)), x);
  // Sequence 0 is the most significant digit.
  EXPECT_EQ(space.Decode(1), (std::vector<int>{0, 0, 1}));
  EXPECT_EQ(space.Weight(0), 16u);
}

TEST(StateSpaceTest, CapRefusesLargeSpaces) {
  EXPECT_THROW(StateSpace::Make(10, 4).JointSize(1000), CapExceeded);
  EXPECT_NO_THROW(StateSpace::Make(10, 2).JointSize(1024));
}

TEST(ValidateModelTest, IdentityWithUniformWeightsPasses) {
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(2, 2);
  const CmcModel model(StateSpace::Make(2, 2),
                       {{TransitionMatrix(id), TransitionMatrix(id)},
                        {TransitionMatrix(id), TransitionMatrix(id)}},
                       CouplingWeights(Eigen::MatrixXd::Constant(2, 2, 0.5)));
  EXPECT_TRUE(ValidateModel(model).ok());
}

TEST(ValidateModelTest, ReportsColumnSum) {
  const CmcModel model(StateSpace::Make(1, 2), {{TransitionMatrix(Mat2(0.6, 0.5, 0.3, 0.5))}},
                       CouplingWeights(Eigen::MatrixXd::Ones(1, 1)));
  const ValidationReport report = ValidateModel(model);
  ASSERT_EQ(report.violations.size(), 1u);
  EXPECT_EQ(report.violations[0], "column 0 of P^(11) sums to 0.9");
}

TEST(ValidateModelTest, ReportsWeightsAndShapes) {
  const Eigen::MatrixXd p = Mat2(0.7, 0.3, 0.3, 0.7);
  Eigen::MatrixXd lambda(2, 2);
  lambda << 0.5, 0.4, -0.1, 1.1;
  const CmcModel bad_weights(StateSpace::Make(2, 2),
                             {{TransitionMatrix(p), TransitionMatrix(p)},
                              {TransitionMatrix(p), TransitionMatrix(p)}},
                             CouplingWeights(lambda));
  const ValidationReport r = ValidateModel(bad_weights);
  EXPECT_FALSE(r.ok());
  EXPECT_NE(r.Summary().find("coupling row 0 sums to 0.9"), std::string::npos);
  EXPECT_NE(r.Summary().find("lambda_21 is negative"), std::string::npos);

  const CmcModel bad_shape(StateSpace::Make(1, 3), {{TransitionMatrix(p)}},
                           CouplingWeights(Eigen::MatrixXd::Ones(1, 1)));
  EXPECT_NE(ValidateModel(bad_shape).Summary().find("has shape 2x2, expected 3x3"),
            std::string::npos);
  EXPECT_THROW(CmcModel::Create(StateSpace::Make(1, 3), {{TransitionMatrix(p)}},
                                CouplingWeights(Eigen::MatrixXd::Ones(1, 1))),
               InvalidModel);
}

TEST(ValidateModelTest, PaperSetupPasses) { EXPECT_TRUE(ValidateModel(PairModel()).ok()); }

TEST(BlockMatrixTest, SingleSequenceIsP) {
  const Eigen::MatrixXd p = Mat2(0.9, 0.2, 0.1, 0.8);
  EXPECT_TRUE(BuildBlockMatrix(SingleChain(p)).isApprox(p, 0));
}

TEST(BlockMatrixTest, PaperSetupBlocks) {
  const Eigen::MatrixXd q = BuildBlockMatrix(PairModel());
  const Eigen::MatrixXd p = Mat2(0.7, 0.3, 0.3, 0.7);
  ASSERT_EQ(q.rows(), 4);
  EXPECT_TRUE(q.block(0, 0, 2, 2).isApprox(0.75 * p, 1e-15));
  EXPECT_TRUE(q.block(2, 2, 2, 2).isApprox(0.75 * p, 1e-15));
  EXPECT_TRUE(q.block(0, 2, 2, 2).isApprox(0.25 * p, 1e-15));
  EXPECT_TRUE(q.block(2, 0, 2, 2).isApprox(0.25 * p, 1e-15));
}

TEST(BlockMatrixTest, UniformWeightsActBlockwise) {
  const Eigen::MatrixXd p = Mat2(0.9, 0.2, 0.1, 0.8);
  const CmcModel model = CmcModel::Create(
      StateSpace::Make(3, 2),
      std::vector<std::vector<TransitionMatrix>>(3, std::vector<TransitionMatrix>(3, TransitionMatrix(p))),
      CouplingWeights(Eigen::MatrixXd::Constant(3, 3, 1.0 / 3)));
  Eigen::VectorXd v(2);
  v << 0.35, 0.65;
  const Eigen::VectorXd out = BuildBlockMatrix(model) * Eigen::VectorXd(v.replicate(3, 1));
  for (int k = 0; k < 3; ++k) EXPECT_TRUE(out.segment(2 * k, 2).isApprox(p * v, 1e-14));
}

TEST(EvolveTest, IdentityKeepsInput) {
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(2, 2);
  const CmcModel model = CmcModel::Create(StateSpace::Make(1, 2), {{TransitionMatrix(id)}},
                                          CouplingWeights(Eigen::MatrixXd::Ones(1, 1)));
  DistributionVector pi;
  pi.blocks.push_back(Eigen::Vector2d(0.2, 0.8));
  EXPECT_TRUE(EvolveDistribution(model, pi).Stacked().isApprox(pi.Stacked(), 0));
}

TEST(EvolveTest, PaperSetupOneStep) {
  const CmcModel model = PairModel();
  const DistributionVector next =
      EvolveDistribution(model, DistributionVector::PointMass(model.space(), 0));
  for (const auto& b : next.blocks) {
    EXPECT_NEAR(b(0), 0.7, 1e-15);
    EXPECT_NEAR(b(1), 0.3, 1e-15);
  }
}

TEST(EvolveTest, RejectsDimensionMismatch) {
  DistributionVector pi;
  pi.blocks.push_back(Eigen::Vector2d(0.5, 0.5));
  EXPECT_THROW(EvolveDistribution(PairModel(), pi), InvalidArgument);
}

TEST(EvolveTest, PreservesStochasticityOnRandomModels) {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const int s = 1 + static_cast<int>(seed % 4);
    const int m = 2 + static_cast<int>(seed % 3);
    const CmcModel model = RandomModel(s, m, seed);
    DistributionVector pi = DistributionVector::Uniform(model.space());
    CounterRng rng(seed * 7919);
    for (auto& b : pi.blocks) {
      for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = rng.NextUniform();
      b /= b.sum();
    }
    for (int step = 0; step < 5; ++step) {
      pi = EvolveDistribution(model, pi);
      for (const auto& b : pi.blocks) {
        EXPECT_NEAR(b.sum(), 1.0, 1e-9);
        EXPECT_GE(b.minCoeff(), 0.0);
      }
    }
  }
}

TEST(StationaryTest, PaperSetupIsUniform) {
  const DistributionVector pi = StationaryDistribution(PairModel());
  for (const auto& b : pi.blocks) {
    EXPECT_NEAR(b(0), 0.5, 1e-9);
    EXPECT_NEAR(b(1), 0.5, 1e-9);
  }
}

TEST(StationaryTest, TwoStateFixedPoint) {
  // pi = P pi with P = [[0.9, 0.2], [0.1, 0.8]]: 0.1 pi_0 = 0.2 pi_1.
  const DistributionVector pi = StationaryDistribution(SingleChain(Mat2(0.9, 0.2, 0.1, 0.8)));
  EXPECT_NEAR(pi.blocks[0](0), 2.0 / 3, 1e-9);
  EXPECT_NEAR(pi.blocks[0](1), 1.0 / 3, 1e-9);
}

TEST(StationaryTest, FixedPointOnRandomModels) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const CmcModel model = RandomModel(2 + static_cast<int>(seed % 2), 3, seed);
    const Eigen::VectorXd pi = StationaryDistribution(model).Stacked();
    EXPECT_LE((BuildBlockMatrix(model) * pi - pi).lpNorm<1>(), 1e-9);
  }
}

TEST(StationaryTest, PeriodicChainFails) {
  const CmcModel flip = SingleChain(Mat2(0, 1, 1, 0));
  try {
    StationaryDistribution(flip);
    FAIL() << "expected NotConverged";
  } catch (const NotConverged& e) {
    EXPECT_NE(std::string(e.what()).find("periodic"), std::string::npos);
  }
}

TEST(StationaryTest, ReducibleChainFails) {
  try {
    StationaryDistribution(SingleChain(Mat2(1, 0.3, 0, 0.7)));
    FAIL() << "expected NotConverged";
  } catch (const NotConverged& e) {
    EXPECT_NE(std::string(e.what()).find("reducible"), std::string::npos);
  }
}

TEST(SpectralTest, PaperSetupDominantIsOne) {
  const SpectralReport r = SpectralCheck(PairModel());
  EXPECT_NEAR(r.dominant_modulus, 1.0, 1e-12);
  EXPECT_TRUE(r.dominant_is_one);
  EXPECT_TRUE(r.others_bounded);
  EXPECT_TRUE(r.has_spectral_gap);
}

TEST(SpectralTest, IdentityHasNoGap) {
  const SpectralReport r = SpectralCheck(SingleChain(Eigen::MatrixXd::Identity(3, 3)));
  for (double v : r.moduli) EXPECT_NEAR(v, 1.0, 1e-12);
  EXPECT_FALSE(r.has_spectral_gap);
}

TEST(SpectralTest, FlipChainSecondEigenvalue) {
  const SpectralReport r = SpectralCheck(SingleChain(Mat2(0.7, 0.3, 0.3, 0.7)));
  EXPECT_NEAR(r.second_modulus, 0.4, 1e-12);
}

TEST(SpectralTest, RandomModelsAreStable) {
  for (std::uint64_t seed = 100; seed < 120; ++seed) {
    const SpectralReport r = SpectralCheck(RandomModel(3, 2, seed));
    EXPECT_TRUE(r.dominant_is_one);
    EXPECT_TRUE(r.others_bounded);
  }
}

TEST(AoiVectorTest, Validation) {
  EXPECT_NO_THROW(AoiVector::Uniform(2, 3).Validate(2));
  EXPECT_THROW(AoiVector::Uniform(2, 3).Validate(3), InvalidArgument);
  EXPECT_THROW((AoiVector{{1, -1}}).Validate(2), InvalidArgument);
  EXPECT_EQ((AoiVector{{2, 5}}).Format(), "2;5");
  EXPECT_EQ((AoiVector{{2, 5}}).Max(), 5);
  EXPECT_FALSE((AoiVector{{2, 5}}).IsUniform());
}

TEST(CouplingTest, WithSelfCouplingSpreadsOffDiagonal) {
  const CmcModel m = WithSelfCoupling(SymmetricBinaryCmc(3, 0.3, 1.0), 0.4);
  EXPECT_DOUBLE_EQ(m.lambda(0, 0), 0.4);
  EXPECT_DOUBLE_EQ(m.lambda(0, 2), 0.3);
  EXPECT_THROW(WithSelfCoupling(m, 1.5), InvalidArgument);
}

}  // namespace
}  // namespace csdp
