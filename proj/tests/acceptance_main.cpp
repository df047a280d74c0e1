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

// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any
// selected criterion fails.

#include <cstdint>
#include <iostream>
#include <vector>

#include "CLI11.hpp"
#include "csdp/acceptance.hpp"

int main(int argc, char** argv) {
  CLI::App app{"CSDP acceptance criteria"};
  std::uint64_t seed = 1;
  std::vector<int> criteria;
  app.add_option("--seed", seed, "Root seed");
  app.add_option("--criterion", criteria, "Criterion ids (default all)")
      ->check(CLI::Range(1, csdp::kCriterionCount));
  CLI11_PARSE(app, argc, argv);
  if (criteria.empty()) {
    for (int i = 1; i <= csdp::kCriterionCount; ++i) criteria.push_back(i);
  }
  int failed = 0;
  for (int id : criteria) {
    const csdp::CriterionResult r =
        csdp::EvaluateCriterion(id, csdp::AcceptanceTolerances{}, seed);
    std::cout << csdp::FormatCriterion(r) << std::endl;
    if (!r.pass) ++failed;
  }
  return failed ? 1 : 0;
}
