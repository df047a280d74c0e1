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

// FRAN release: slide each sequence back by its age, evaluate the query on
// the aged snapshot, add Laplace noise of scale s_1(f) / eps_c per output
// coordinate.
//
// Time indices are 1-based (t = 1..T). Row r of a database file holds t = r + 1.

#ifndef CSDP_FRAN_HPP
#define CSDP_FRAN_HPP

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "csdp/cmc.hpp"
#include "csdp/error.hpp"
#include "csdp/query.hpp"
#include "csdp/random.hpp"

namespace csdp {

class SequenceDatabase {
 public:
  // rows[t - 1][j] is the state of sequence j at time t.
  static SequenceDatabase Create(StateSpace space, std::vector<std::vector<int>> rows) {
    detail::Require(!rows.empty(), "sequence database: horizon must be >= 1");
    for (std::size_t r = 0; r < rows.size(); ++r) {
      detail::Require(rows[r].size() == static_cast<std::size_t>(space.num_sequences),
                      "sequence database: row " + std::to_string(r) + " has " +
                          std::to_string(rows[r].size()) + " entries, expected " +
                          std::to_string(space.num_sequences));
      for (int v : rows[r]) {
        detail::Require(v >= 0 && v < space.num_states,
                        "sequence database: state " + std::to_string(v) + " in row " +
                            std::to_string(r) + " is out of range");
      }
    }
    SequenceDatabase db;
    db.space_ = space;
    db.rows_ = std::move(rows);
    return db;
  }

  const StateSpace& space() const noexcept { return space_; }
  int horizon() const noexcept { return static_cast<int>(rows_.size()); }

  // State of sequence j (0-based) at time t (1-based).
  int at(int t, int j) const {
    detail::Require(t >= 1 && t <= horizon(), "sequence database: time index out of range");
    return rows_[static_cast<std::size_t>(t - 1)][static_cast<std::size_t>(j)];
  }

  const std::vector<int>& snapshot(int t) const {
    detail::Require(t >= 1 && t <= horizon(), "sequence database: time index out of range");
    return rows_[static_cast<std::size_t>(t - 1)];
  }

 private:
  StateSpace space_;
  std::vector<std::vector<int>> rows_;
};

struct MechanismOutput {
  std::vector<double> value;
  std::vector<int> aged_snapshot;
  double noise_scale = 0;
  std::uint64_t seed = 0;
};

// (x^(1)_{t - A^(1)}, ..., x^(s)_{t - A^(s)}).
inline std::vector<int> AgeData(const SequenceDatabase& db, int t, const AoiVector& age) {
  const int s = db.space().num_sequences;
  age.Validate(s);
  detail::Require(t >= 1 && t <= db.horizon(), "age_data: time index " + std::to_string(t) +
                                                   " outside 1.." + std::to_string(db.horizon()));
  std::vector<int> aged(static_cast<std::size_t>(s));
  for (int j = 0; j < s; ++j) {
    const int source = t - age[j];
    if (source < 1) {
      throw InvalidArgument("age_data: age " + std::to_string(age[j]) + " of sequence " +
                            std::to_string(j + 1) + " exceeds the available history at t=" +
                            std::to_string(t));
    }
    aged[static_cast<std::size_t>(j)] = db.at(source, j);
  }
  return aged;
}

// f(x) + Lap(s_1(f) / eps_c) per coordinate.
inline std::vector<double> LaplaceMechanism(const QuerySpec& query, const std::vector<int>& x,
                                            double eps_c, std::uint64_t seed) {
  detail::Require(eps_c > 0 && std::isfinite(eps_c), "release: eps_c must be positive");
  std::vector<double> value = query.evaluate(x);
  const std::vector<double> noise = LaplaceSample(query.DeltaF() / eps_c, value.size(), seed);
  for (std::size_t i = 0; i < value.size(); ++i) value[i] += noise[i];
  return value;
}

inline MechanismOutput Release(const SequenceDatabase& db, int t, const AoiVector& age,
                               const QuerySpec& query, double eps_c, std::uint64_t seed) {
  detail::Require(eps_c > 0 && std::isfinite(eps_c), "release: eps_c must be positive");
  detail::Require(query.space.num_sequences == db.space().num_sequences &&
                      query.space.num_states == db.space().num_states,
                  "release: query and database state spaces differ");
  MechanismOutput out;
  out.aged_snapshot = AgeData(db, t, age);
  out.noise_scale = query.DeltaF() / eps_c;
  out.seed = seed;
  out.value = LaplaceMechanism(query, out.aged_snapshot, eps_c, seed);
  return out;
}

}  // namespace csdp

#endif  // CSDP_FRAN_HPP
