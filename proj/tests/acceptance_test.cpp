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


#include <string>

#include <gtest/gtest.h>

#include "csdp/acceptance.hpp"

namespace csdp {
namespace {

TEST(AcceptanceTest, AnalyticCriteriaPassWithDefaults) {
  const AcceptanceTolerances tol;
  for (int id : {1, 2, 4}) {
    const CriterionResult r = EvaluateCriterion(id, tol, 1);
    EXPECT_EQ(r.id, id);
    EXPECT_TRUE(r.pass) << FormatCriterion(r);
  }
}

TEST(AcceptanceTest, ZeroSymmetryBudgetFailsOnlyCriterionOne) {
  AcceptanceTolerances tol;
  tol.symmetry = -1;
  EXPECT_FALSE(EvaluateCriterion(1, tol, 1).pass);
  EXPECT_TRUE(EvaluateCriterion(2, tol, 1).pass);
  EXPECT_TRUE(EvaluateCriterion(4, tol, 1).pass);
}

TEST(AcceptanceTest, TightDecayCeilingFailsOnlyCriterionTwo) {
  AcceptanceTolerances tol;
  tol.decay_ceiling = 1e-9;
  EXPECT_TRUE(EvaluateCriterion(1, tol, 1).pass);
  EXPECT_FALSE(EvaluateCriterion(2, tol, 1).pass);
  EXPECT_TRUE(EvaluateCriterion(4, tol, 1).pass);
}

TEST(AcceptanceTest, RuntimeLimitIsEnforced) {
  AcceptanceTolerances tol;
  tol.runtime_short_s = -1;
  const CriterionResult r = EvaluateCriterion(1, tol, 1);
  EXPECT_FALSE(r.pass);
  EXPECT_NE(r.measured.find("runtime limit exceeded"), std::string::npos);
}

TEST(AcceptanceTest, ReportLinesAreDeterministic) {
  const AcceptanceTolerances tol;
  for (int id : {1, 4, 6}) {
    const std::string a = FormatCriterion(EvaluateCriterion(id, tol, 7));
    EXPECT_EQ(a, FormatCriterion(EvaluateCriterion(id, tol, 7)));
    EXPECT_EQ(a.rfind(EvaluateCriterion(id, tol, 7).pass ? "PASS criterion " : "FAIL criterion ", 0), 0u);
  }
}

TEST(AcceptanceTest, UnknownCriterionThrows) {
  EXPECT_THROW(EvaluateCriterion(0, AcceptanceTolerances{}, 1), InvalidArgument);
  EXPECT_THROW(EvaluateCriterion(kCriterionCount + 1, AcceptanceTolerances{}, 1), InvalidArgument);
}

}  // namespace
}  // namespace csdp
