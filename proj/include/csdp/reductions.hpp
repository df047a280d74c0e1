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

// Special cases in which the correlated-sequence bounds collapse to known
// budgets:
//
//   iid      every transition column identical (no temporal memory);
//            with k = 1 and age 0 both bounds equal eps_C.
//   spatial  coupling weights diagonal (sequences evolve independently);
//            with k = 1 the log-form loose bound equals the ADP leakage of
//            the single-sequence chains at every age.

#ifndef CSDP_REDUCTIONS_HPP
#define CSDP_REDUCTIONS_HPP

#include <cmath>
#include <string>
#include <vector>

#include "csdp/cmc.hpp"
#include "csdp/joint.hpp"
#include "csdp/leakage.hpp"

namespace csdp {

struct ReductionCase {
  std::string name;
  bool applicable = false;
  bool pass = false;
  double observed = 0;
  double expected = 0;
  std::string detail;
};

struct ReductionReport {
  std::vector<ReductionCase> cases;

  // True when every applicable case passed.
  bool ok() const {
    for (const ReductionCase& c : cases) {
      if (c.applicable && !c.pass) return false;
    }
    return true;
  }
};

struct ReductionParams {
  double eps_c = 1.0;
  int max_age = 8;
  double tolerance = 1e-9;
  std::size_t cap = kDefaultEnumerationCap;
};

inline bool IsIidOverTime(const CmcModel& model, double tol = kStochasticTolerance) {
  for (int j = 0; j < model.s(); ++j) {
    for (int k = 0; k < model.s(); ++k) {
      const Eigen::MatrixXd& p = model.transition(j, k).entries;
      for (Eigen::Index a = 1; a < p.cols(); ++a) {
        if ((p.col(a) - p.col(0)).cwiseAbs().maxCoeff() > tol) return false;
      }
    }
  }
  return true;
}

inline bool IsSpatiallyIndependent(const CmcModel& model) {
  for (int j = 0; j < model.s(); ++j) {
    for (int k = 0; k < model.s(); ++k) {
      if (j != k && model.lambda(j, k) != 0) return false;
    }
  }
  return true;
}

inline ReductionReport VerifyReductions(const CmcModel& model, const ReductionParams& params) {
  detail::RequireValid(model);
  detail::RequirePositiveBudget(params.eps_c);
  detail::Require(params.max_age >= 0, "verify_reductions: max_age must be >= 0");
  ReductionReport report;
  const CorrelationDegree k1{1};
  auto close = [&](double a, double b) {
    return std::fabs(a - b) <= params.tolerance * std::max(1.0, std::fabs(b));
  };

  const bool iid = IsIidOverTime(model);
  const bool spatial = IsSpatiallyIndependent(model);
  if (!iid && !spatial) {
    report.cases.push_back({"iid", false, false, 0, 0, "not applicable: model has temporal memory"});
    report.cases.push_back({"spatial", false, false, 0, 0, "not applicable: sequences are coupled"});
    return report;
  }
  const JointKernel kernel = BuildJointKernel(model, params.cap);

  if (iid) {
    const AoiVector fresh = AoiVector::Uniform(model.s(), 0);
    const LooseBound loose =
        ComputeLooseBound(AgedTvDistance(kernel, fresh, k1), 1.0, params.eps_c);
    const double tight =
        TightBound(BoundedAgedCorrelation(kernel, fresh).value, params.eps_c);
    const bool pass = close(loose.linear, params.eps_c) && close(loose.log_form, params.eps_c) &&
                      close(tight, params.eps_c);
    double worst = loose.linear;
    for (double v : {loose.log_form, tight}) {
      if (std::fabs(v - params.eps_c) > std::fabs(worst - params.eps_c)) worst = v;
    }
    report.cases.push_back({"iid", true, pass, worst, params.eps_c,
                            "loose_linear=" + detail::FormatNumber(loose.linear) +
                                " loose_log=" + detail::FormatNumber(loose.log_form) +
                                " tight=" + detail::FormatNumber(tight)});
  } else {
    report.cases.push_back({"iid", false, false, 0, 0, "not applicable: model has temporal memory"});
  }

  if (spatial) {
    for (int t = 0; t <= params.max_age; ++t) {
      const AoiVector age = AoiVector::Uniform(model.s(), t);
      const double log_form =
          ComputeLooseBound(AgedTvDistance(kernel, age, k1), 1.0, params.eps_c).log_form;
      const double adp = AdpLeakage(SingleSequenceTv(model, age), params.eps_c);
      report.cases.push_back({"spatial t=" + std::to_string(t), true, close(log_form, adp),
                              log_form, adp, ""});
    }
  } else {
    report.cases.push_back({"spatial", false, false, 0, 0, "not applicable: sequences are coupled"});
  }
  return report;
}

}  // namespace csdp

#endif  // CSDP_REDUCTIONS_HPP
