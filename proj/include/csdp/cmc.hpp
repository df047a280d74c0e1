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

// Coupling Markov Chains over s categorical sequences with m states each.
//
// Orientation: every transition matrix is column-stochastic. Entry (b, a) of
// P^(jk) is the probability that sequence j moves to state b given that
// sequence k is in state a. Distributions are column vectors and evolve by
// left multiplication:
//
//   pi^(j)_{n+1} = sum_k lambda_jk P^(jk) pi^(k)_n.

#ifndef CSDP_CMC_HPP
#define CSDP_CMC_HPP

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "csdp/error.hpp"

namespace csdp {

inline constexpr double kStochasticTolerance = 1e-9;
inline constexpr std::size_t kDefaultEnumerationCap = 1'000'000;

struct StateSpace {
  int num_sequences = 1;  // s
  int num_states = 2;     // m

  static StateSpace Make(int s, int m) {
    detail::Require(s >= 1, "state space: num_sequences must be >= 1");
    detail::Require(m >= 2, "state space: num_states must be >= 2");
    return StateSpace{s, m};
  }

  // m^s, or nullopt-like max() on overflow.
  std::size_t JointSizeUnchecked() const noexcept {
    std::size_t size = 1;
    for (int i = 0; i < num_sequences; ++i) {
      if (size > std::numeric_limits<std::size_t>::max() /
                     static_cast<std::size_t>(num_states)) {
        return std::numeric_limits<std::size_t>::max();
      }
      size *= static_cast<std::size_t>(num_states);
    }
    return size;
  }

  // m^s, refusing anything above `cap`.
  std::size_t JointSize(std::size_t cap = kDefaultEnumerationCap) const {
    const std::size_t size = JointSizeUnchecked();
    if (size > cap) {
      std::ostringstream os;
      os << "product space " << num_states << "^" << num_sequences
         << " exceeds the enumeration cap " << cap
         << "; use the sampling path instead";
      throw CapExceeded(os.str());
    }
    return size;
  }

  // Joint states are indexed in mixed radix with sequence 0 most significant:
  // (x^(1), ..., x^(s)) -> sum_j x^(j) m^(s-1-j).
  std::vector<int> Decode(std::size_t index) const {
    std::vector<int> digits(static_cast<std::size_t>(num_sequences));
    for (int j = num_sequences - 1; j >= 0; --j) {
      digits[static_cast<std::size_t>(j)] =
          static_cast<int>(index % static_cast<std::size_t>(num_states));
      index /= static_cast<std::size_t>(num_states);
    }
    return digits;
  }

  std::size_t Encode(const std::vector<int>& digits) const {
    detail::Require(digits.size() == static_cast<std::size_t>(num_sequences),
                    "state space: snapshot has the wrong number of entries");
    std::size_t index = 0;
    for (int d : digits) {
      detail::Require(d >= 0 && d < num_states,
                      "state space: state out of range");
      index = index * static_cast<std::size_t>(num_states) +
              static_cast<std::size_t>(d);
    }
    return index;
  }

  // Place value of sequence j in the joint index.
  std::size_t Weight(int j) const noexcept {
    std::size_t w = 1;
    for (int i = num_sequences - 1; i > j; --i) {
      w *= static_cast<std::size_t>(num_states);
    }
    return w;
  }

  std::string Format(std::size_t index) const {
    std::ostringstream os;
    os << '(';
    const std::vector<int> digits = Decode(index);
    for (std::size_t j = 0; j < digits.size(); ++j) {
      if (j) os << ',';
      os << digits[j];
    }
    os << ')';
    return os.str();
  }

  friend bool operator==(const StateSpace&, const StateSpace&) = default;
};

// Column-stochastic m x m matrix: entries(b, a) = Pr[next = b | source = a].
struct TransitionMatrix {
  Eigen::MatrixXd entries;

  TransitionMatrix() = default;
  explicit TransitionMatrix(Eigen::MatrixXd e) : entries(std::move(e)) {}

  int size() const noexcept { return static_cast<int>(entries.rows()); }
  double operator()(int next, int source) const { return entries(next, source); }
};

// lambda(j, k) >= 0, rows sum to one.
struct CouplingWeights {
  Eigen::MatrixXd lambda;

  CouplingWeights() = default;
  explicit CouplingWeights(Eigen::MatrixXd l) : lambda(std::move(l)) {}
};

class CmcModel {
 public:
  CmcModel() = default;

  // transitions[j][k] is P^(jk). Shapes are not validated here; see
  // ValidateModel() and CmcModel::Create().
  CmcModel(StateSpace space,
           std::vector<std::vector<TransitionMatrix>> transitions,
           CouplingWeights weights)
      : space_(space),
        transitions_(std::move(transitions)),
        weights_(std::move(weights)) {}

  // Builds the model and throws InvalidModel on the first violation.
  static CmcModel Create(StateSpace space,
                         std::vector<std::vector<TransitionMatrix>> transitions,
                         CouplingWeights weights);

  const StateSpace& space() const noexcept { return space_; }
  int s() const noexcept { return space_.num_sequences; }
  int m() const noexcept { return space_.num_states; }

  const TransitionMatrix& transition(int j, int k) const {
    return transitions_.at(static_cast<std::size_t>(j))
        .at(static_cast<std::size_t>(k));
  }
  const std::vector<std::vector<TransitionMatrix>>& transitions() const noexcept {
    return transitions_;
  }
  const CouplingWeights& weights() const noexcept { return weights_; }
  double lambda(int j, int k) const { return weights_.lambda(j, k); }

 private:
  StateSpace space_;
  std::vector<std::vector<TransitionMatrix>> transitions_;
  CouplingWeights weights_;
};

// Per-sequence marginals pi^(k), k = 1..s.
struct DistributionVector {
  std::vector<Eigen::VectorXd> blocks;

  static DistributionVector Uniform(const StateSpace& space) {
    DistributionVector d;
    d.blocks.assign(static_cast<std::size_t>(space.num_sequences),
                    Eigen::VectorXd::Constant(space.num_states,
                                              1.0 / space.num_states));
    return d;
  }

  // Every sequence deterministically in `state`.
  static DistributionVector PointMass(const StateSpace& space, int state) {
    DistributionVector d;
    Eigen::VectorXd e = Eigen::VectorXd::Zero(space.num_states);
    e(state) = 1.0;
    d.blocks.assign(static_cast<std::size_t>(space.num_sequences), e);
    return d;
  }

  static DistributionVector FromStacked(const Eigen::VectorXd& stacked, int s,
                                        int m) {
    detail::Require(stacked.size() == static_cast<Eigen::Index>(s) * m,
                    "distribution: stacked length must equal s*m");
    DistributionVector d;
    for (int k = 0; k < s; ++k) d.blocks.push_back(stacked.segment(k * m, m));
    return d;
  }

  Eigen::VectorXd Stacked() const {
    Eigen::Index total = 0;
    for (const auto& b : blocks) total += b.size();
    Eigen::VectorXd out(total);
    Eigen::Index pos = 0;
    for (const auto& b : blocks) {
      out.segment(pos, b.size()) = b;
      pos += b.size();
    }
    return out;
  }
};

// Per-sequence ages A_t^(i) >= 0.
struct AoiVector {
  std::vector<int> ages;

  static AoiVector Uniform(int s, int age) {
    return AoiVector{std::vector<int>(static_cast<std::size_t>(s), age)};
  }

  int size() const noexcept { return static_cast<int>(ages.size()); }
  int operator[](int i) const { return ages.at(static_cast<std::size_t>(i)); }
  int Max() const {
    return ages.empty() ? 0 : *std::max_element(ages.begin(), ages.end());
  }
  bool IsUniform() const {
    return std::adjacent_find(ages.begin(), ages.end(),
                              std::not_equal_to<>()) == ages.end();
  }
  void Validate(int s) const {
    detail::Require(size() == s, "AoI vector: length must equal s");
    for (int a : ages) detail::Require(a >= 0, "AoI vector: ages must be >= 0");
  }

  std::string Format() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < ages.size(); ++i) {
      if (i) os << ';';
      os << ages[i];
    }
    return os.str();
  }

  friend bool operator==(const AoiVector&, const AoiVector&) = default;
  friend auto operator<=>(const AoiVector&, const AoiVector&) = default;
};

struct ValidationReport {
  std::vector<std::string> violations;

  bool ok() const noexcept { return violations.empty(); }
  std::string Summary() const {
    if (ok()) return "pass";
    std::ostringstream os;
    for (std::size_t i = 0; i < violations.size(); ++i) {
      if (i) os << "; ";
      os << violations[i];
    }
    return os.str();
  }
};

namespace detail {

inline std::string PairLabel(int j, int k) {
  std::ostringstream os;
  os << "P^(" << j + 1 << k + 1 << ")";
  return os.str();
}

inline std::string FormatNumber(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

}  // namespace detail

inline ValidationReport ValidateModel(const CmcModel& model) {
  ValidationReport report;
  const int s = model.space().num_sequences;
  const int m = model.space().num_states;
  if (s < 1) report.violations.push_back("num_sequences must be >= 1");
  if (m < 2) report.violations.push_back("num_states must be >= 2");
  if (!report.ok()) return report;

  const auto& transitions = model.transitions();
  if (transitions.size() != static_cast<std::size_t>(s)) {
    report.violations.push_back("transition array must have s rows");
    return report;
  }
  for (int j = 0; j < s; ++j) {
    if (transitions[static_cast<std::size_t>(j)].size() !=
        static_cast<std::size_t>(s)) {
      report.violations.push_back("transition array row " + std::to_string(j) +
                                  " must have s entries");
      continue;
    }
    for (int k = 0; k < s; ++k) {
      const Eigen::MatrixXd& p = model.transition(j, k).entries;
      const std::string label = detail::PairLabel(j, k);
      if (p.rows() != m || p.cols() != m) {
        report.violations.push_back(label + " has shape " +
                                    std::to_string(p.rows()) + "x" +
                                    std::to_string(p.cols()) + ", expected " +
                                    std::to_string(m) + "x" + std::to_string(m));
        continue;
      }
      for (int a = 0; a < m; ++a) {
        for (int b = 0; b < m; ++b) {
          const double v = p(b, a);
          if (!(v >= 0.0 && v <= 1.0)) {
            report.violations.push_back(
                "entry (" + std::to_string(b) + "," + std::to_string(a) +
                ") of " + label + " is " + detail::FormatNumber(v) +
                ", outside [0,1]");
          }
        }
        const double sum = p.col(a).sum();
        if (std::fabs(sum - 1.0) > kStochasticTolerance) {
          report.violations.push_back("column " + std::to_string(a) + " of " +
                                      label + " sums to " +
                                      detail::FormatNumber(sum));
        }
      }
    }
  }

  const Eigen::MatrixXd& lambda = model.weights().lambda;
  if (lambda.rows() != s || lambda.cols() != s) {
    report.violations.push_back("coupling weights have shape " +
                                std::to_string(lambda.rows()) + "x" +
                                std::to_string(lambda.cols()) + ", expected " +
                                std::to_string(s) + "x" + std::to_string(s));
    return report;
  }
  for (int j = 0; j < s; ++j) {
    for (int k = 0; k < s; ++k) {
      if (!(lambda(j, k) >= 0.0)) {
        report.violations.push_back("lambda_" + std::to_string(j + 1) +
                                    std::to_string(k + 1) + " is negative");
      }
    }
    const double sum = lambda.row(j).sum();
    if (std::fabs(sum - 1.0) > kStochasticTolerance) {
      report.violations.push_back("coupling row " + std::to_string(j) +
                                  " sums to " + detail::FormatNumber(sum));
    }
  }
  return report;
}

inline CmcModel CmcModel::Create(
    StateSpace space, std::vector<std::vector<TransitionMatrix>> transitions,
    CouplingWeights weights) {
  CmcModel model(space, std::move(transitions), std::move(weights));
  const ValidationReport report = ValidateModel(model);
  if (!report.ok()) throw InvalidModel(report.violations.front());
  return model;
}

namespace detail {

inline void RequireValid(const CmcModel& model) {
  const ValidationReport report = ValidateModel(model);
  if (!report.ok()) throw InvalidModel("invalid model: " + report.violations.front());
}

inline void RequireDistribution(const CmcModel& model,
                                const DistributionVector& pi) {
  Require(pi.blocks.size() == static_cast<std::size_t>(model.s()),
          "distribution: expected one block per sequence");
  for (const auto& b : pi.blocks) {
    Require(b.size() == model.m(), "distribution: block length must equal m");
    Require((b.array() >= -kStochasticTolerance).all(),
            "distribution: negative probability");
    Require(std::fabs(b.sum() - 1.0) <= kStochasticTolerance,
            "distribution: block does not sum to 1");
  }
}

}  // namespace detail

// Q with block (j, k) = lambda_jk P^(jk).
inline Eigen::MatrixXd BuildBlockMatrix(const CmcModel& model) {
  detail::RequireValid(model);
  const int s = model.s();
  const int m = model.m();
  Eigen::MatrixXd q(s * m, s * m);
  for (int j = 0; j < s; ++j) {
    for (int k = 0; k < s; ++k) {
      q.block(j * m, k * m, m, m) = model.lambda(j, k) * model.transition(j, k).entries;
    }
  }
  return q;
}

inline DistributionVector EvolveDistribution(const CmcModel& model,
                                             const DistributionVector& pi) {
  detail::RequireValid(model);
  detail::RequireDistribution(model, pi);
  DistributionVector next;
  next.blocks.reserve(pi.blocks.size());
  for (int j = 0; j < model.s(); ++j) {
    Eigen::VectorXd block = Eigen::VectorXd::Zero(model.m());
    for (int k = 0; k < model.s(); ++k) {
      block += model.lambda(j, k) *
               (model.transition(j, k).entries * pi.blocks[static_cast<std::size_t>(k)]);
    }
    next.blocks.push_back(std::move(block));
  }
  return next;
}

namespace detail {

// Adjacency of the support graph of a nonnegative square matrix, edges
// source -> target for every positive entry (target, source).
inline std::vector<std::vector<int>> SupportGraph(const Eigen::MatrixXd& a) {
  const int n = static_cast<int>(a.rows());
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
  for (int src = 0; src < n; ++src) {
    for (int dst = 0; dst < n; ++dst) {
      if (a(dst, src) > 0) adj[static_cast<std::size_t>(src)].push_back(dst);
    }
  }
  return adj;
}

inline std::vector<bool> Reachable(const std::vector<std::vector<int>>& adj,
                                   int from) {
  std::vector<bool> seen(adj.size(), false);
  std::vector<int> stack{from};
  seen[static_cast<std::size_t>(from)] = true;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (int w : adj[static_cast<std::size_t>(v)]) {
      if (!seen[static_cast<std::size_t>(w)]) {
        seen[static_cast<std::size_t>(w)] = true;
        stack.push_back(w);
      }
    }
  }
  return seen;
}

inline bool IsIrreducible(const Eigen::MatrixXd& p) {
  const auto adj = SupportGraph(p);
  const int n = static_cast<int>(p.rows());
  // Strongly connected iff every node reaches all and is reached by all.
  const auto forward = Reachable(adj, 0);
  std::vector<std::vector<int>> reverse(adj.size());
  for (int v = 0; v < n; ++v) {
    for (int w : adj[static_cast<std::size_t>(v)]) {
      reverse[static_cast<std::size_t>(w)].push_back(v);
    }
  }
  const auto backward = Reachable(reverse, 0);
  return std::all_of(forward.begin(), forward.end(), [](bool b) { return b; }) &&
         std::all_of(backward.begin(), backward.end(), [](bool b) { return b; });
}

// Largest period over the strongly connected components of the support graph
// that contain at least one edge. 1 means aperiodic.
inline int MaxComponentPeriod(const Eigen::MatrixXd& a) {
  const auto adj = SupportGraph(a);
  const int n = static_cast<int>(a.rows());
  std::vector<std::vector<int>> reverse(adj.size());
  for (int v = 0; v < n; ++v) {
    for (int w : adj[static_cast<std::size_t>(v)]) {
      reverse[static_cast<std::size_t>(w)].push_back(v);
    }
  }
  std::vector<int> component(static_cast<std::size_t>(n), -1);
  int next_component = 0;
  for (int v = 0; v < n; ++v) {
    if (component[static_cast<std::size_t>(v)] != -1) continue;
    const auto fwd = Reachable(adj, v);
    const auto bwd = Reachable(reverse, v);
    for (int w = 0; w < n; ++w) {
      if (fwd[static_cast<std::size_t>(w)] && bwd[static_cast<std::size_t>(w)]) {
        component[static_cast<std::size_t>(w)] = next_component;
      }
    }
    ++next_component;
  }

  int worst = 1;
  for (int c = 0; c < next_component; ++c) {
    int root = -1;
    for (int v = 0; v < n; ++v) {
      if (component[static_cast<std::size_t>(v)] == c) {
        root = v;
        break;
      }
    }
    std::vector<int> level(static_cast<std::size_t>(n), -1);
    level[static_cast<std::size_t>(root)] = 0;
    std::vector<int> queue{root};
    int period = 0;
    bool has_edge = false;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const int v = queue[head];
      for (int w : adj[static_cast<std::size_t>(v)]) {
        if (component[static_cast<std::size_t>(w)] != c) continue;
        has_edge = true;
        if (level[static_cast<std::size_t>(w)] == -1) {
          level[static_cast<std::size_t>(w)] = level[static_cast<std::size_t>(v)] + 1;
          queue.push_back(w);
        } else {
          period = std::gcd(period, level[static_cast<std::size_t>(v)] + 1 -
                                        level[static_cast<std::size_t>(w)]);
        }
      }
    }
    if (has_edge && period > 1) worst = std::max(worst, period);
  }
  return worst;
}

}  // namespace detail

struct StationaryOptions {
  double tol = 1e-10;
  long max_iter = 100000;
};

// Power iteration on Q from the uniform stacked vector.
inline DistributionVector StationaryDistribution(const CmcModel& model,
                                                 StationaryOptions options = {}) {
  detail::RequireValid(model);
  for (int j = 0; j < model.s(); ++j) {
    for (int k = 0; k < model.s(); ++k) {
      if (model.lambda(j, k) <= 0) continue;
      if (!detail::IsIrreducible(model.transition(j, k).entries)) {
        throw NotConverged("stationary distribution: " + detail::PairLabel(j, k) +
                           " is reducible; no unique stationary vector");
      }
    }
  }
  const Eigen::MatrixXd q = BuildBlockMatrix(model);
  const int period = detail::MaxComponentPeriod(q);
  if (period > 1) {
    throw NotConverged("stationary distribution: chain is periodic (period " +
                       std::to_string(period) +
                       "); power iteration does not converge");
  }

  Eigen::VectorXd pi = DistributionVector::Uniform(model.space()).Stacked();
  Eigen::VectorXd prev2 = pi;
  for (long it = 0; it < options.max_iter; ++it) {
    const Eigen::VectorXd next = q * pi;
    const double step = (next - pi).lpNorm<1>();
    if (step <= options.tol) {
      return DistributionVector::FromStacked(next, model.s(), model.m());
    }
    if (it >= 2 && (next - prev2).lpNorm<1>() <= options.tol) {
      throw NotConverged(
          "stationary distribution: power iteration oscillates (periodic chain)");
    }
    prev2 = pi;
    pi = next;
  }
  throw NotConverged("stationary distribution: no convergence within " +
                     std::to_string(options.max_iter) + " iterations");
}

struct SpectralReport {
  std::vector<double> moduli;  // descending
  double dominant_modulus = 0;
  double second_modulus = 0;
  bool dominant_is_one = false;      // |lambda_1 - 1| <= 1e-6
  bool others_bounded = false;       // all |lambda_i| <= 1 (+1e-9)
  bool has_spectral_gap = false;     // second modulus < 1
};

inline SpectralReport SpectralCheck(const CmcModel& model) {
  const Eigen::MatrixXd q = BuildBlockMatrix(model);
  Eigen::EigenSolver<Eigen::MatrixXd> solver(q, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw NotConverged("spectral check: eigenvalue solver failed");
  }
  SpectralReport report;
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
    report.moduli.push_back(std::abs(solver.eigenvalues()(i)));
  }
  std::sort(report.moduli.begin(), report.moduli.end(), std::greater<>());
  report.dominant_modulus = report.moduli.front();
  report.second_modulus = report.moduli.size() > 1 ? report.moduli[1] : 0.0;
  report.dominant_is_one = std::fabs(report.dominant_modulus - 1.0) <= 1e-6;
  report.others_bounded = std::all_of(report.moduli.begin(), report.moduli.end(),
                                      [](double v) { return v <= 1.0 + 1e-9; });
  report.has_spectral_gap = report.second_modulus < 1.0 - 1e-9;
  return report;
}

// s sequences over {0,1}, every P^(jk) = [[1-p, p], [p, 1-p]], lambda_jj =
// self_coupling and the remaining weight spread evenly over the other
// sequences. s = 2, p = 0.3 is the two-user binary experiment family.
inline CmcModel SymmetricBinaryCmc(int s, double flip, double self_coupling) {
  detail::Require(flip >= 0 && flip <= 1, "flip probability must lie in [0,1]");
  detail::Require(self_coupling >= 0 && self_coupling <= 1,
                  "self coupling must lie in [0,1]");
  Eigen::MatrixXd p(2, 2);
  p << 1 - flip, flip, flip, 1 - flip;
  std::vector<std::vector<TransitionMatrix>> transitions(
      static_cast<std::size_t>(s),
      std::vector<TransitionMatrix>(static_cast<std::size_t>(s), TransitionMatrix(p)));
  Eigen::MatrixXd lambda(s, s);
  for (int j = 0; j < s; ++j) {
    for (int k = 0; k < s; ++k) {
      lambda(j, k) = (j == k) ? (s == 1 ? 1.0 : self_coupling)
                              : (1.0 - self_coupling) / (s - 1);
    }
  }
  return CmcModel::Create(StateSpace::Make(s, 2), std::move(transitions),
                          CouplingWeights(lambda));
}

// Same transitions, lambda_jj = self_coupling, off-diagonal weight spread
// evenly. Used by the coupling-strength sweeps.
inline CmcModel WithSelfCoupling(const CmcModel& model, double self_coupling) {
  detail::Require(self_coupling >= 0 && self_coupling <= 1,
                  "self coupling must lie in [0,1]");
  const int s = model.s();
  Eigen::MatrixXd lambda(s, s);
  for (int j = 0; j < s; ++j) {
    for (int k = 0; k < s; ++k) {
      lambda(j, k) = (j == k) ? (s == 1 ? 1.0 : self_coupling)
                              : (1.0 - self_coupling) / (s - 1);
    }
  }
  return CmcModel::Create(model.space(), model.transitions(), CouplingWeights(lambda));
}

}  // namespace csdp

#endif  // CSDP_CMC_HPP
