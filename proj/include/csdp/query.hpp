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

#ifndef CSDP_QUERY_HPP
#define CSDP_QUERY_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "csdp/cmc.hpp"
#include "csdp/error.hpp"

namespace csdp {

// A query f: X^s -> R^d with its declared sensitivity profile
// s_i(f) = max ||f(X) - f(X')||_1 over snapshots differing in exactly i entries.
struct QuerySpec {
  std::string name;
  StateSpace space;
  int output_dim = 1;
  std::function<std::vector<double>(const std::vector<int>&)> evaluate;
  std::function<double(int)> sensitivity;

  double Sensitivity(int i) const {
    detail::Require(i >= 1 && i <= space.num_sequences,
                    "query " + name + ": sensitivity order out of range");
    return sensitivity(i);
  }

  // One-record global sensitivity, the Laplace calibration constant.
  double DeltaF() const { return Sensitivity(1); }
};

struct CorrelationDegree {
  int k = 1;

  static CorrelationDegree Make(int k, int s) {
    detail::Require(k >= 1 && k <= s, "correlation degree must satisfy 1 <= k <= s");
    return CorrelationDegree{k};
  }
};

// mean, sum, max and min over the snapshot with states valued 0..m-1.
inline std::vector<QuerySpec> BuiltinQueries(const StateSpace& space) {
  const double range = space.num_states - 1;
  const double s = space.num_sequences;
  std::vector<QuerySpec> out;

  out.push_back(QuerySpec{
      "mean", space, 1,
      [](const std::vector<int>& x) {
        return std::vector<double>{
            std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size())};
      },
      [range, s](int i) { return i * range / s; }});

  out.push_back(QuerySpec{
      "sum", space, 1,
      [](const std::vector<int>& x) {
        return std::vector<double>{std::accumulate(x.begin(), x.end(), 0.0)};
      },
      [range](int i) { return i * range; }});

  out.push_back(QuerySpec{
      "max", space, 1,
      [](const std::vector<int>& x) {
        return std::vector<double>{static_cast<double>(*std::max_element(x.begin(), x.end()))};
      },
      [range](int) { return range; }});

  out.push_back(QuerySpec{
      "min", space, 1,
      [](const std::vector<int>& x) {
        return std::vector<double>{static_cast<double>(*std::min_element(x.begin(), x.end()))};
      },
      [range](int) { return range; }});

  return out;
}

inline QuerySpec FindBuiltinQuery(const std::string& name, const StateSpace& space) {
  for (QuerySpec& q : BuiltinQueries(space)) {
    if (q.name == name) return q;
  }
  throw InvalidArgument("unknown query '" + name + "' (expected mean, sum, max or min)");
}

// f evaluated on every joint state; row = joint index, column = output coordinate.
inline std::vector<std::vector<double>> QueryTable(const QuerySpec& query,
                                                   std::size_t cap = kDefaultEnumerationCap) {
  const std::size_t n = query.space.JointSize(cap);
  std::vector<std::vector<double>> table(n);
  for (std::size_t x = 0; x < n; ++x) {
    table[x] = query.evaluate(query.space.Decode(x));
    detail::Require(table[x].size() == static_cast<std::size_t>(query.output_dim),
                    "query " + query.name + ": output dimension mismatch");
  }
  return table;
}

// Scalar convenience for d = 1 queries.
inline std::vector<double> ScalarQueryTable(const QuerySpec& query,
                                            std::size_t cap = kDefaultEnumerationCap) {
  detail::Require(query.output_dim == 1, "query " + query.name + " is not scalar");
  const auto table = QueryTable(query, cap);
  std::vector<double> out(table.size());
  for (std::size_t i = 0; i < table.size(); ++i) out[i] = table[i][0];
  return out;
}

// Exhaustive s_i(f) for i = 1..s over all pairs at Hamming distance exactly i.
inline std::vector<double> BruteForceProfile(const QuerySpec& query,
                                             std::size_t cap = kDefaultEnumerationCap) {
  const StateSpace& space = query.space;
  const auto table = QueryTable(query, cap);
  const std::size_t n = table.size();
  std::vector<std::vector<int>> digits(n);
  for (std::size_t x = 0; x < n; ++x) digits[x] = space.Decode(x);

  std::vector<double> profile(static_cast<std::size_t>(space.num_sequences), 0.0);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      int dist = 0;
      for (int j = 0; j < space.num_sequences; ++j) {
        dist += digits[a][static_cast<std::size_t>(j)] != digits[b][static_cast<std::size_t>(j)];
      }
      double l1 = 0;
      for (std::size_t c = 0; c < table[a].size(); ++c) l1 += std::fabs(table[a][c] - table[b][c]);
      double& slot = profile[static_cast<std::size_t>(dist - 1)];
      slot = std::max(slot, l1);
    }
  }
  return profile;
}

// d(k) = s_k(f) / s_1(f).
inline double KSensitivity(const QuerySpec& query, CorrelationDegree degree) {
  const double s1 = query.Sensitivity(1);
  if (!(s1 > 0)) {
    throw InvalidArgument("k_sensitivity: query " + query.name +
                          " has zero one-record sensitivity");
  }
  return query.Sensitivity(degree.k) / s1;
}

// Checks the declared profile against s_1 > 0, monotonicity and s_i <= i s_1.
inline ValidationReport ValidateQuery(const QuerySpec& query) {
  ValidationReport report;
  const double s1 = query.Sensitivity(1);
  if (!(s1 > 0)) report.violations.push_back("s_1(f) must be positive");
  double prev = s1;
  for (int i = 2; i <= query.space.num_sequences; ++i) {
    const double si = query.Sensitivity(i);
    if (si < prev) {
      report.violations.push_back("s_" + std::to_string(i) + "(f) decreases");
    }
    if (si > i * s1 * (1 + 1e-12)) {
      report.violations.push_back("s_" + std::to_string(i) + "(f) exceeds i*s_1(f)");
    }
    prev = si;
  }
  return report;
}

}  // namespace csdp

#endif  // CSDP_QUERY_HPP
