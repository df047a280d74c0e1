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

// The snapshot process x_t in X^s as an exact Markov chain.
//
// Given the current snapshot a, the next-step states of the sequences are
// conditionally independent with
//
//   Pr[x^(j)_{t+1} = b_j | x_t = a] = sum_k lambda_jk P^(jk)(b_j, a_k),
//
// which reproduces the marginal CMC evolution exactly. All conditionals
// between current and aged snapshots are evaluated at stationarity.

#ifndef CSDP_JOINT_HPP
#define CSDP_JOINT_HPP

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "csdp/cmc.hpp"
#include "csdp/error.hpp"
#include "csdp/random.hpp"

namespace csdp {

class JointKernel {
 public:
  JointKernel() = default;

  // Takes a column-stochastic kernel over the product space and computes its
  // stationary law by power iteration from the uniform vector. A kernel
  // without a convergent stationary law is still usable for sampling and
  // one-step evolution.
  JointKernel(StateSpace space, Eigen::MatrixXd kernel,
              std::size_t cap = kDefaultEnumerationCap)
      : space_(space), kernel_(std::move(kernel)) {
    const std::size_t n = space_.JointSize(cap);
    detail::Require(kernel_.rows() == static_cast<Eigen::Index>(n) &&
                        kernel_.cols() == static_cast<Eigen::Index>(n),
                    "joint kernel: shape must be m^s x m^s");
    for (Eigen::Index a = 0; a < kernel_.cols(); ++a) {
      if ((kernel_.col(a).array() < 0).any() ||
          std::fabs(kernel_.col(a).sum() - 1.0) > kStochasticTolerance) {
        throw InvalidModel("joint kernel: column " + space_.Format(static_cast<std::size_t>(a)) +
                           " is not a probability vector");
      }
    }
    ComputeStationary();
  }

  const StateSpace& space() const noexcept { return space_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(kernel_.rows()); }

  // kernel()(b, a) = Pr[x_{t+1} = b | x_t = a].
  const Eigen::MatrixXd& kernel() const noexcept { return kernel_; }

  bool has_stationary() const noexcept { return stationary_.has_value(); }

  const Eigen::VectorXd& stationary() const {
    if (!stationary_) throw NotConverged("joint kernel: " + stationary_error_);
    return *stationary_;
  }

 private:
  void ComputeStationary() {
    const Eigen::Index n = kernel_.rows();
    Eigen::VectorXd pi = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
    Eigen::VectorXd prev2 = pi;
    constexpr long kMaxIter = 1'000'000;
    constexpr double kTol = 1e-14;
    double best_step = 1.0;
    long since_improved = 0;
    for (long it = 0; it < kMaxIter; ++it) {
      Eigen::VectorXd next = kernel_ * pi;
      next /= next.sum();
      const double step = (next - pi).lpNorm<1>();
      if (step <= kTol) {
        stationary_ = std::move(next);
        return;
      }
      // Rounding floor: accept once the residual stops shrinking at a level
      // far below every tolerance used downstream.
      if (step < best_step) {
        best_step = step;
        since_improved = 0;
      } else if (++since_improved > 50 && best_step <= 1e-12) {
        stationary_ = std::move(next);
        return;
      }
      if (it >= 2 && (next - prev2).lpNorm<1>() <= kTol && step > 1e-9) {
        stationary_error_ = "power iteration oscillates (periodic chain)";
        return;
      }
      prev2 = pi;
      pi = std::move(next);
    }
    stationary_error_ = "stationary law did not converge";
  }

  StateSpace space_;
  Eigen::MatrixXd kernel_;
  std::optional<Eigen::VectorXd> stationary_;
  std::string stationary_error_;
};

// Per-sequence next-state law given the current snapshot:
// rows(j) is the m-vector sum_k lambda_jk P^(jk)(., a_k).
inline Eigen::MatrixXd NextStateMixtures(const CmcModel& model,
                                         const std::vector<int>& current) {
  const int s = model.s();
  const int m = model.m();
  Eigen::MatrixXd mix = Eigen::MatrixXd::Zero(s, m);
  for (int j = 0; j < s; ++j) {
    for (int k = 0; k < s; ++k) {
      const double w = model.lambda(j, k);
      if (w == 0) continue;
      mix.row(j) += w * model.transition(j, k).entries.col(current[static_cast<std::size_t>(k)]).transpose();
    }
  }
  return mix;
}

inline JointKernel BuildJointKernel(const CmcModel& model,
                                    std::size_t cap = kDefaultEnumerationCap) {
  detail::RequireValid(model);
  const StateSpace& space = model.space();
  const std::size_t n = space.JointSize(cap);
  const int s = model.s();
  Eigen::MatrixXd kernel(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t a = 0; a < n; ++a) {
    const Eigen::MatrixXd mix = NextStateMixtures(model, space.Decode(a));
    for (std::size_t b = 0; b < n; ++b) {
      const std::vector<int> next = space.Decode(b);
      double p = 1.0;
      for (int j = 0; j < s; ++j) p *= mix(j, next[static_cast<std::size_t>(j)]);
      kernel(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)) = p;
    }
  }
  return JointKernel(space, std::move(kernel), cap);
}

// Joint stationary law of (aged snapshot z, current snapshot x) as a matrix
// law(z, x), where z^(i) = x^(i)_{t - A^(i)}. The aged coordinates are read
// off one stationary trajectory at per-sequence lags.
inline Eigen::MatrixXd AgedJointLaw(const JointKernel& kernel, const AoiVector& age) {
  const StateSpace& space = kernel.space();
  const int s = space.num_sequences;
  const int m = space.num_states;
  age.Validate(s);
  const Eigen::VectorXd& pi = kernel.stationary();
  const Eigen::Index n = static_cast<Eigen::Index>(kernel.size());

  if (age.IsUniform()) {
    // law(z, x) = pi(z) K^A(x, z)
    Eigen::MatrixXd power = Eigen::MatrixXd::Identity(n, n);
    for (int step = 0; step < age[0]; ++step) power = kernel.kernel() * power;
    Eigen::MatrixXd law = power.transpose();
    for (Eigen::Index z = 0; z < n; ++z) law.row(z) *= pi(z);
    return law;
  }

  // Rows index the partially recorded aged snapshot (unrecorded coordinates
  // held at 0), columns the running trajectory state.
  Eigen::MatrixXd law = Eigen::MatrixXd::Zero(n, n);
  law.row(0) = pi.transpose();
  for (int lag = age.Max(); lag >= 0; --lag) {
    for (int i = 0; i < s; ++i) {
      if (age[i] != lag) continue;
      const std::size_t w = space.Weight(i);
      Eigen::MatrixXd recorded = Eigen::MatrixXd::Zero(n, n);
      for (Eigen::Index z = 0; z < n; ++z) {
        const std::size_t z_digit = (static_cast<std::size_t>(z) / w) % static_cast<std::size_t>(m);
        for (Eigen::Index y = 0; y < n; ++y) {
          const double v = law(z, y);
          if (v == 0) continue;
          const std::size_t y_digit = (static_cast<std::size_t>(y) / w) % static_cast<std::size_t>(m);
          const std::size_t target = static_cast<std::size_t>(z) - z_digit * w + y_digit * w;
          recorded(static_cast<Eigen::Index>(target), y) += v;
        }
      }
      law = std::move(recorded);
    }
    if (lag > 0) law = law * kernel.kernel().transpose();
  }
  return law;
}

// Columns x hold Pr[aged snapshot z | current snapshot x] at stationarity.
struct ConditionalTable {
  StateSpace space;
  Eigen::MatrixXd table;  // table(z, x)

  double operator()(std::size_t z, std::size_t x) const {
    return table(static_cast<Eigen::Index>(z), static_cast<Eigen::Index>(x));
  }
};

inline ConditionalTable ConditionalFromLaw(const StateSpace& space,
                                           const Eigen::MatrixXd& law) {
  ConditionalTable out{space, law};
  for (Eigen::Index x = 0; x < law.cols(); ++x) {
    const double mass = law.col(x).sum();
    if (!(mass > 0)) {
      throw ZeroProbability("backward conditional: current state " +
                            space.Format(static_cast<std::size_t>(x)) +
                            " has zero stationary probability");
    }
    out.table.col(x) /= mass;
  }
  return out;
}

inline ConditionalTable BackwardConditional(const JointKernel& kernel,
                                            const AoiVector& age) {
  return ConditionalFromLaw(kernel.space(), AgedJointLaw(kernel, age));
}

// Length-`horizon` trajectory of joint state indices. The first entry is
// `initial`, or a stationary draw when no initial state is given.
inline std::vector<std::size_t> SampleTrajectory(
    const JointKernel& kernel, std::optional<std::size_t> initial,
    std::size_t horizon, std::uint64_t seed) {
  detail::Require(horizon >= 1, "sample_trajectory: horizon must be >= 1");
  CounterRng rng(seed);
  const Eigen::MatrixXd& k = kernel.kernel();
  std::vector<std::size_t> path;
  path.reserve(horizon);
  std::size_t state;
  if (initial) {
    detail::Require(*initial < kernel.size(), "sample_trajectory: initial state out of range");
    state = *initial;
  } else {
    const Eigen::VectorXd& pi = kernel.stationary();
    state = SampleIndex(rng, std::span<const double>(pi.data(), static_cast<std::size_t>(pi.size())));
  }
  path.push_back(state);
  while (path.size() < horizon) {
    const double* column = k.col(static_cast<Eigen::Index>(state)).data();
    state = SampleIndex(rng, std::span<const double>(column, kernel.size()));
    path.push_back(state);
  }
  return path;
}

// One stationary draw of (aged snapshot, current snapshot) by running a
// trajectory of A_max + 1 steps and reading each sequence at its lag.
struct AgedDraw {
  std::size_t aged;
  std::size_t current;
};

inline AgedDraw SampleAgedPair(const JointKernel& kernel, const AoiVector& age,
                               CounterRng& rng) {
  const StateSpace& space = kernel.space();
  const Eigen::VectorXd& pi = kernel.stationary();
  const int s = space.num_sequences;
  const std::size_t m = static_cast<std::size_t>(space.num_states);
  std::size_t state = SampleIndex(
      rng, std::span<const double>(pi.data(), static_cast<std::size_t>(pi.size())));
  std::size_t aged = 0;
  for (int lag = age.Max(); lag >= 0; --lag) {
    for (int i = 0; i < s; ++i) {
      if (age[i] != lag) continue;
      const std::size_t w = space.Weight(i);
      aged += ((state / w) % m) * w;
    }
    if (lag > 0) {
      const double* column = kernel.kernel().col(static_cast<Eigen::Index>(state)).data();
      state = SampleIndex(rng, std::span<const double>(column, kernel.size()));
    }
  }
  return AgedDraw{aged, state};
}

}  // namespace csdp

#endif  // CSDP_JOINT_HPP
