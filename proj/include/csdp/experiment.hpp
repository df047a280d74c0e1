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

// Parameter sweeps driven by a JSON config.
//
//   {
//     "sweep": "leakage-vs-lambda",
//     "model": "../models/two_binary.json",   // relative to the config file
//     "query": "mean",
//     "k": 2,
//     "lambda": {"linspace": [0, 1, 21]},
//     "t": {"range": [0, 6, 1]},
//     "eps_c": [1],
//     "seed": 1
//   }
//
// Axes accept a number, a list, {"linspace": [a, b, n]}, {"logspace": [a, b, n]}
// (n points geometrically spaced from a to b) or {"range": [a, b, step]}
// (inclusive). Ages are given either as "t" (uniform ages) or as "ages":
// a list of explicit vectors or {"t": axis, "offsets": [[0, 0], [0, 1]]}
// meaning age t + offset per sequence, offsets outermost.
//
// When "lambda" is present each value replaces the model's coupling by
// lambda_jj = lambda with the remainder spread evenly.
//
// Rows are ordered by grid coordinates (lambda, age, eps_c) regardless of the
// thread count. The seed of a cell is DeriveSeed(root, {lambda, eps_c})
// folded with each age.

#ifndef CSDP_EXPERIMENT_HPP
#define CSDP_EXPERIMENT_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "csdp/cmc.hpp"
#include "csdp/error.hpp"
#include "csdp/io.hpp"
#include "csdp/joint.hpp"
#include "csdp/leakage.hpp"
#include "csdp/oracle.hpp"
#include "csdp/parallel.hpp"
#include "csdp/query.hpp"
#include "csdp/random.hpp"
#include "csdp/reductions.hpp"
#include "csdp/utility.hpp"

namespace csdp {

inline constexpr const char* kToolVersion = "1.0.0";

enum class SweepKind {
  kLeakageVsLambda,
  kLeakageVsAge,
  kLeakageVsNoise,
  kUtilitySweep,
  kFrontier,
  kOracleValidate,
  kReduceCheck,
};

inline const std::vector<std::pair<std::string, SweepKind>>& SweepKinds() {
  static const std::vector<std::pair<std::string, SweepKind>> kinds = {
      {"leakage-vs-lambda", SweepKind::kLeakageVsLambda},
      {"leakage-vs-age", SweepKind::kLeakageVsAge},
      {"leakage-vs-noise", SweepKind::kLeakageVsNoise},
      {"utility-sweep", SweepKind::kUtilitySweep},
      {"frontier", SweepKind::kFrontier},
      {"oracle-validate", SweepKind::kOracleValidate},
      {"reduce-check", SweepKind::kReduceCheck},
  };
  return kinds;
}

inline std::string SweepName(SweepKind kind) {
  for (const auto& [name, k] : SweepKinds()) {
    if (k == kind) return name;
  }
  return "";
}

enum class OracleMode { kNone, kExact, kSampled };

struct ExperimentConfig {
  SweepKind sweep = SweepKind::kLeakageVsLambda;
  CmcModel model;
  std::filesystem::path model_path;
  std::string model_digest;
  std::string query = "mean";
  int k = 0;  // 0: s
  std::vector<double> lambda;  // empty: model coupling as given
  std::vector<AoiVector> ages;
  std::vector<double> eps_c;
  std::vector<double> caps;
  std::vector<Mechanism> mechanisms = {Mechanism::kCsdp, Mechanism::kAdp, Mechanism::kDdp,
                                       Mechanism::kDp};
  std::vector<std::vector<AoiVector>> age_families;  // frontier: one solve per family
  OracleMode oracle = OracleMode::kNone;
  std::size_t samples = 100000;
  std::size_t mse_samples = 0;
  bool tight = true;
  LeakageKind leakage_kind = LeakageKind::kLooseLinear;
  std::uint64_t seed = 1;
  std::size_t cap = kDefaultEnumerationCap;
  unsigned threads = 1;
  std::string format = "csv";
  Json echo;  // the config document, for the manifest

  CorrelationDegree Degree() const { return CorrelationDegree::Make(k, model.s()); }
};

namespace detail {

inline std::vector<double> ParseAxis(const Json& v, const std::string& field) {
  if (v.is_number()) return {v.get<double>()};
  std::vector<double> out;
  if (v.is_array()) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      out.push_back(JsonNumber(v[i], field + "[" + std::to_string(i) + "]"));
    }
  } else if (v.is_object() && v.size() == 1) {
    const auto& [form, spec] = *v.items().begin();
    if (!spec.is_array() || spec.size() != 3) {
      throw ParseError(field + "." + form, "expected [start, stop, count-or-step]");
    }
    const double a = JsonNumber(spec[0], field + "." + form + "[0]");
    const double b = JsonNumber(spec[1], field + "." + form + "[1]");
    const double c = JsonNumber(spec[2], field + "." + form + "[2]");
    if (form == "linspace" || form == "logspace") {
      if (c < 1 || c != std::floor(c)) throw ParseError(field + "." + form, "count must be a positive integer");
      if (form == "logspace" && (a <= 0 || b <= 0)) {
        throw ParseError(field + ".logspace", "endpoints must be positive");
      }
      const int n = static_cast<int>(c);
      for (int i = 0; i < n; ++i) {
        const double f = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
        out.push_back(form == "linspace" ? a + (b - a) * f
                                         : std::exp(std::log(a) + (std::log(b) - std::log(a)) * f));
      }
    } else if (form == "range") {
      if (!(c > 0)) throw ParseError(field + ".range", "step must be positive");
      const long n = static_cast<long>(std::floor((b - a) / c + 1e-9));
      for (long i = 0; i <= n; ++i) out.push_back(a + c * static_cast<double>(i));
    } else {
      throw ParseError(field + "." + form, "unknown axis form (expected linspace, logspace or range)");
    }
  } else {
    throw ParseError(field, "expected a number, a list or an axis object");
  }
  if (out.empty()) throw ParseError(field, "axis is empty");
  return out;
}

inline std::vector<int> ParseIntAxis(const Json& v, const std::string& field) {
  std::vector<int> out;
  for (double d : ParseAxis(v, field)) {
    if (d < 0 || d != std::floor(d)) throw ParseError(field, "ages must be non-negative integers");
    out.push_back(static_cast<int>(d));
  }
  return out;
}

inline AoiVector ParseAgeVector(const Json& v, int s, const std::string& field) {
  if (!v.is_array() || v.size() != static_cast<std::size_t>(s)) {
    throw ParseError(field, "expected " + std::to_string(s) + " ages");
  }
  AoiVector age;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const int a = JsonInt(v[i], field + "[" + std::to_string(i) + "]");
    if (a < 0) throw ParseError(field + "[" + std::to_string(i) + "]", "ages must be >= 0");
    age.ages.push_back(a);
  }
  return age;
}

// Families of age vectors: one per offset vector (or a single family).
inline std::vector<std::vector<AoiVector>> ParseAgeFamilies(const Json& doc, int s) {
  std::vector<std::vector<AoiVector>> families;
  if (doc.contains("t") && doc.contains("ages")) {
    throw ParseError("ages", "give either \"t\" or \"ages\", not both");
  }
  if (doc.contains("t")) {
    std::vector<AoiVector> fam;
    for (int t : ParseIntAxis(doc.at("t"), "t")) fam.push_back(AoiVector::Uniform(s, t));
    families.push_back(std::move(fam));
  } else if (doc.contains("ages")) {
    const Json& ages = doc.at("ages");
    if (ages.is_array()) {
      std::vector<AoiVector> fam;
      for (std::size_t i = 0; i < ages.size(); ++i) {
        fam.push_back(ParseAgeVector(ages[i], s, "ages[" + std::to_string(i) + "]"));
      }
      if (fam.empty()) throw ParseError("ages", "no age vectors given");
      families.push_back(std::move(fam));
    } else if (ages.is_object()) {
      for (const auto& [key, _] : ages.items()) {
        if (key != "t" && key != "offsets") throw ParseError("ages." + key, "unknown field");
      }
      const std::vector<int> ts = ParseIntAxis(Field(ages, "t", "ages"), "ages.t");
      const Json& offsets = Field(ages, "offsets", "ages");
      if (!offsets.is_array() || offsets.empty()) {
        throw ParseError("ages.offsets", "expected a list of offset vectors");
      }
      for (std::size_t o = 0; o < offsets.size(); ++o) {
        const AoiVector off =
            ParseAgeVector(offsets[o], s, "ages.offsets[" + std::to_string(o) + "]");
        std::vector<AoiVector> fam;
        for (int t : ts) {
          AoiVector age = off;
          for (int& a : age.ages) a += t;
          fam.push_back(std::move(age));
        }
        families.push_back(std::move(fam));
      }
    } else {
      throw ParseError("ages", "expected a list of vectors or {\"t\", \"offsets\"}");
    }
  }
  return families;
}

inline const std::set<std::string>& ConfigKeys() {
  static const std::set<std::string> keys = {
      "sweep", "model", "query", "k", "lambda", "t", "ages", "eps_c", "caps", "mechanisms",
      "oracle", "samples", "mse_samples", "tight", "leakage_kind", "seed", "cap", "threads",
      "format", "description"};
  return keys;
}

inline Mechanism ParseMechanism(const std::string& name) {
  for (Mechanism m : {Mechanism::kCsdp, Mechanism::kAdp, Mechanism::kDdp, Mechanism::kDp}) {
    if (MechanismName(m) == name) return m;
  }
  throw ParseError("mechanisms", "unknown mechanism '" + name + "' (expected CSDP, ADP, DDP or DP)");
}

}  // namespace detail

// Parses a config document. Relative model paths resolve against base_dir.
inline ExperimentConfig ParseExperimentConfig(const Json& doc,
                                              const std::filesystem::path& base_dir) {
  if (!doc.is_object()) throw ParseError("", "config must be a JSON object");
  for (const auto& [key, _] : doc.items()) {
    if (!detail::ConfigKeys().count(key)) throw ParseError(key, "unknown field");
  }
  ExperimentConfig cfg;
  cfg.echo = doc;

  const Json& sweep = detail::Field(doc, "sweep", "");
  if (!sweep.is_string()) throw ParseError("sweep", "expected a string");
  bool found = false;
  for (const auto& [name, kind] : SweepKinds()) {
    if (sweep.get<std::string>() == name) {
      cfg.sweep = kind;
      found = true;
    }
  }
  if (!found) {
    throw ParseError("sweep", "unknown sweep kind '" + sweep.get<std::string>() + "'");
  }

  const Json& model = detail::Field(doc, "model", "");
  if (!model.is_string()) throw ParseError("model", "expected a file path");
  cfg.model_path = base_dir / model.get<std::string>();
  try {
    const std::string text = ReadTextFile(cfg.model_path);
    cfg.model_digest = HexDigest(Fnv1a64(text));
    cfg.model = ModelFromJson(ParseJsonText(text, cfg.model_path.string()));
  } catch (const ParseError& e) {
    throw ParseError("model", cfg.model_path.string() + ": " + e.what());
  }
  const int s = cfg.model.s();

  if (doc.contains("query")) {
    if (!doc["query"].is_string()) throw ParseError("query", "expected a string");
    cfg.query = doc["query"].get<std::string>();
  }
  try {
    FindBuiltinQuery(cfg.query, cfg.model.space());
  } catch (const InvalidArgument& e) {
    throw ParseError("query", e.what());
  }
  cfg.k = doc.contains("k") ? detail::JsonInt(doc["k"], "k") : s;
  if (cfg.k < 1 || cfg.k > s) throw ParseError("k", "must satisfy 1 <= k <= s");

  if (doc.contains("lambda")) {
    cfg.lambda = detail::ParseAxis(doc["lambda"], "lambda");
    for (double l : cfg.lambda) {
      if (l < 0 || l > 1) throw ParseError("lambda", "values must lie in [0,1]");
    }
  }
  cfg.age_families = detail::ParseAgeFamilies(doc, s);
  for (const auto& fam : cfg.age_families) cfg.ages.insert(cfg.ages.end(), fam.begin(), fam.end());
  if (doc.contains("eps_c")) {
    cfg.eps_c = detail::ParseAxis(doc["eps_c"], "eps_c");
    for (double e : cfg.eps_c) {
      if (!(e > 0)) throw ParseError("eps_c", "values must be positive");
    }
  }
  if (doc.contains("caps")) {
    cfg.caps = detail::ParseAxis(doc["caps"], "caps");
    for (double c : cfg.caps) {
      if (!(c > 0)) throw ParseError("caps", "values must be positive");
    }
  }
  if (doc.contains("mechanisms")) {
    const Json& mechs = doc["mechanisms"];
    if (!mechs.is_array() || mechs.empty()) throw ParseError("mechanisms", "expected a non-empty list");
    cfg.mechanisms.clear();
    for (const Json& m : mechs) {
      if (!m.is_string()) throw ParseError("mechanisms", "expected mechanism names");
      cfg.mechanisms.push_back(detail::ParseMechanism(m.get<std::string>()));
    }
  }
  if (doc.contains("oracle")) {
    const Json& o = doc["oracle"];
    if (!o.is_string()) throw ParseError("oracle", "expected none, exact or sampled");
    if (o == "none") cfg.oracle = OracleMode::kNone;
    else if (o == "exact") cfg.oracle = OracleMode::kExact;
    else if (o == "sampled") cfg.oracle = OracleMode::kSampled;
    else throw ParseError("oracle", "expected none, exact or sampled");
  }
  auto count = [&](const char* key, std::size_t& slot) {
    if (!doc.contains(key)) return;
    if (!doc[key].is_number_unsigned()) throw ParseError(key, "expected a non-negative integer");
    slot = doc[key].get<std::size_t>();
  };
  count("samples", cfg.samples);
  count("mse_samples", cfg.mse_samples);
  count("cap", cfg.cap);
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned()) throw ParseError("seed", "expected a non-negative integer");
    cfg.seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("threads")) {
    const int t = detail::JsonInt(doc["threads"], "threads");
    if (t < 1) throw ParseError("threads", "must be >= 1");
    cfg.threads = static_cast<unsigned>(t);
  }
  if (doc.contains("tight")) {
    if (!doc["tight"].is_boolean()) throw ParseError("tight", "expected true or false");
    cfg.tight = doc["tight"].get<bool>();
  }
  if (doc.contains("leakage_kind")) {
    if (!doc["leakage_kind"].is_string()) throw ParseError("leakage_kind", "expected a string");
    cfg.leakage_kind = ParseLeakageKind(doc["leakage_kind"].get<std::string>());
  }
  if (doc.contains("format")) {
    if (!doc["format"].is_string() || (doc["format"] != "csv" && doc["format"] != "json")) {
      throw ParseError("format", "expected csv or json");
    }
    cfg.format = doc["format"].get<std::string>();
  }

  // Required axes per sweep.
  switch (cfg.sweep) {
    case SweepKind::kLeakageVsLambda:
    case SweepKind::kLeakageVsAge:
    case SweepKind::kLeakageVsNoise:
    case SweepKind::kUtilitySweep:
    case SweepKind::kOracleValidate:
      if (cfg.ages.empty()) throw ParseError("t", "this sweep needs \"t\" or \"ages\"");
      if (cfg.eps_c.empty()) throw ParseError("eps_c", "this sweep needs an eps_c axis");
      break;
    case SweepKind::kFrontier:
      if (cfg.caps.empty()) throw ParseError("caps", "frontier needs a caps axis");
      if (cfg.ages.empty()) cfg.age_families = {UtilitySpec::DefaultAgeGrid(s)};
      if (cfg.ages.empty()) cfg.ages = cfg.age_families.front();
      if (cfg.eps_c.empty()) cfg.eps_c = UtilitySpec::DefaultEpsGrid();
      break;
    case SweepKind::kReduceCheck:
      if (cfg.eps_c.empty()) cfg.eps_c = {1.0};
      break;
  }
  if (cfg.sweep == SweepKind::kLeakageVsLambda && cfg.lambda.empty()) {
    throw ParseError("lambda", "leakage-vs-lambda needs a lambda axis");
  }
  return cfg;
}

inline ExperimentConfig LoadExperimentConfig(const std::filesystem::path& path) {
  const Json doc = ParseJsonText(ReadTextFile(path), path.string());
  return ParseExperimentConfig(doc, path.parent_path());
}

struct SweepResult {
  std::string name;
  Table table{{}};
  std::vector<std::string> violations;
};

namespace detail {

inline std::uint64_t CellSeed(std::uint64_t root, double lambda, const AoiVector& age, double eps) {
  std::uint64_t seed = DeriveSeed(root, {lambda, eps});
  for (int a : age.ages) seed = FoldSeed(seed, static_cast<std::uint64_t>(a));
  return seed;
}

inline std::vector<CmcModel> LambdaModels(const ExperimentConfig& cfg) {
  if (cfg.lambda.empty()) return {cfg.model};
  std::vector<CmcModel> out;
  for (double l : cfg.lambda) out.push_back(WithSelfCoupling(cfg.model, l));
  return out;
}

inline std::string Where(double lambda, const AoiVector& age, double eps) {
  return "lambda=" + FormatDouble(lambda) + " t=" + age.Format() + " eps_c=" + FormatDouble(eps);
}

// Relative slack for comparisons that hold with equality in exact arithmetic.
inline constexpr double kOrderingSlack = 1e-12;

inline bool Exceeds(double a, double b) { return a > b + kOrderingSlack * std::max(1.0, std::fabs(b)); }

inline Table::Cell Opt(const std::optional<double>& v) {
  if (v) return *v;
  return std::monostate{};
}

inline SweepResult RunLeakageSweep(const ExperimentConfig& cfg) {
  const std::vector<CmcModel> models = LambdaModels(cfg);
  const CorrelationDegree degree = cfg.Degree();
  const QuerySpec query = FindBuiltinQuery(cfg.query, cfg.model.space());
  const double dk = KSensitivity(query, degree);

  const std::vector<JointKernel> kernels = ParallelMap(
      models.size(), cfg.threads, [&](std::size_t i) { return BuildJointKernel(models[i], cfg.cap); });

  struct Cell {
    std::vector<LeakageReport> reports;
    std::vector<std::uint64_t> seeds;
  };
  const std::size_t na = cfg.ages.size();
  const std::vector<Cell> cells = ParallelMap(models.size() * na, cfg.threads, [&](std::size_t idx) {
    const std::size_t li = idx / na;
    const AoiVector& age = cfg.ages[idx % na];
    const JointKernel& kernel = kernels[li];
    const double lambda = models[li].lambda(0, 0);
    const double delta_k = AgedTvDistance(kernel, age, degree);
    std::optional<double> delta_bar;
    if (cfg.tight) delta_bar = BoundedAgedCorrelation(kernel, age).value;
    const double delta_t = SingleSequenceTv(models[li], age);
    Cell cell;
    for (double eps : cfg.eps_c) {
      LeakageReport r;
      r.params = LeakageParams{age, eps, degree, cfg.query};
      r.d_k = dk;
      r.delta_k = delta_k;
      r.delta_bar = delta_bar;
      const LooseBound loose = ComputeLooseBound(delta_k, dk, eps);
      r.loose_linear = loose.linear;
      r.loose_log = loose.log_form;
      if (delta_bar) r.tight = TightBound(*delta_bar, eps);
      r.adp = AdpLeakage(delta_t, eps);
      const BaselineBounds base = ComputeBaselineBounds(eps, degree, query);
      r.dp = base.dp;
      r.ddp = base.ddp;
      const std::uint64_t seed = CellSeed(cfg.seed, lambda, age, eps);
      if (cfg.oracle != OracleMode::kNone) {
        const OracleEstimate est =
            OracleLeakage(kernel, FranConfig{age, query, eps},
                          cfg.oracle == OracleMode::kExact ? 0 : cfg.samples, seed, cfg.cap);
        r.oracle = OracleValue{est.estimate, est.half_width};
      }
      cell.reports.push_back(std::move(r));
      cell.seeds.push_back(seed);
    }
    return cell;
  });

  SweepResult out;
  out.name = SweepName(cfg.sweep);
  out.table = Table({"lambda", "t", "eps_c", "k", "d_k", "delta_k", "delta_bar", "loose_linear",
                     "loose_log", "tight", "adp", "dp", "ddp", "oracle", "oracle_hw", "seed"});
  for (std::size_t idx = 0; idx < cells.size(); ++idx) {
    const double lambda = models[idx / na].lambda(0, 0);
    for (std::size_t e = 0; e < cells[idx].reports.size(); ++e) {
      const LeakageReport& r = cells[idx].reports[e];
      std::optional<double> oracle, oracle_hw;
      if (r.oracle) {
        oracle = r.oracle->estimate;
        oracle_hw = r.oracle->half_width;
      }
      out.table.AddRow({lambda, r.params.age.Format(), r.params.eps_c,
                        static_cast<std::int64_t>(degree.k), r.d_k, r.delta_k, Opt(r.delta_bar),
                        r.loose_linear, r.loose_log, Opt(r.tight), Opt(r.adp), Opt(r.dp),
                        Opt(r.ddp), Opt(oracle), Opt(oracle_hw), cells[idx].seeds[e]});
      const std::string where = Where(lambda, r.params.age, r.params.eps_c);
      if (r.tight && Exceeds(*r.tight, r.loose_linear)) {
        out.violations.push_back("tight " + FormatDouble(*r.tight) + " exceeds loose_linear " +
                                 FormatDouble(r.loose_linear) + " at " + where);
      }
      if (r.oracle) {
        const double bound = r.tight ? *r.tight : r.loose_linear;
        const char* label = r.tight ? "tight" : "loose_linear";
        if (Exceeds(r.oracle->estimate - r.oracle->half_width, bound)) {
          out.violations.push_back("oracle " + FormatDouble(r.oracle->estimate) + " (hw " +
                                   FormatDouble(r.oracle->half_width) + ") exceeds " + label +
                                   " " + FormatDouble(bound) + " at " + where);
        }
      }
    }
  }
  return out;
}

inline void AddAgeColumns(std::vector<std::string>& cols, int s) {
  for (int i = 1; i <= s; ++i) cols.push_back("age_" + std::to_string(i));
}

inline void AddAgeCells(std::vector<Table::Cell>& row, const AoiVector& age) {
  for (int a : age.ages) row.push_back(static_cast<std::int64_t>(a));
}

inline SweepResult RunUtilitySweep(const ExperimentConfig& cfg) {
  const std::vector<CmcModel> models = LambdaModels(cfg);
  const CorrelationDegree degree = cfg.Degree();
  const QuerySpec query = FindBuiltinQuery(cfg.query, cfg.model.space());
  const double dk = KSensitivity(query, degree);
  const std::vector<JointKernel> kernels = ParallelMap(
      models.size(), cfg.threads, [&](std::size_t i) { return BuildJointKernel(models[i], cfg.cap); });

  struct Row {
    double aging = 0, noise = 0, mse = 0, leakage = 0;
    std::optional<MseEstimate> sim;
    std::uint64_t seed = 0;
  };
  const std::size_t na = cfg.ages.size();
  const std::size_t ne = cfg.eps_c.size();
  const std::vector<Row> rows =
      ParallelMap(models.size() * na * ne, cfg.threads, [&](std::size_t idx) {
        const std::size_t li = idx / (na * ne);
        const AoiVector& age = cfg.ages[(idx / ne) % na];
        const double eps = cfg.eps_c[idx % ne];
        const JointKernel& kernel = kernels[li];
        Row r;
        r.seed = CellSeed(cfg.seed, models[li].lambda(0, 0), age, eps);
        r.aging = AgingError(kernel, age, query, cfg.cap);
        r.noise = NoiseVariance(query, eps);
        r.mse = r.aging + r.noise;
        const double factor = cfg.leakage_kind == LeakageKind::kTight
                                  ? BoundedAgedCorrelation(kernel, age).value
                                  : AgedTvDistance(kernel, age, degree);
        r.leakage = LeakageAt(Mechanism::kCsdp, factor, dk, eps, cfg.leakage_kind);
        if (cfg.mse_samples > 0) r.sim = MseSimulated(kernel, age, query, eps, cfg.mse_samples, r.seed);
        return r;
      });

  SweepResult out;
  out.name = SweepName(cfg.sweep);
  std::vector<std::string> cols = {"lambda"};
  AddAgeColumns(cols, cfg.model.s());
  for (const char* c : {"eps_c", "aging_error", "noise_variance", "mse", "mse_sim", "mse_se",
                        "leakage", "seed"}) {
    cols.emplace_back(c);
  }
  out.table = Table(cols);
  for (std::size_t idx = 0; idx < rows.size(); ++idx) {
    const double lambda = models[idx / (na * ne)].lambda(0, 0);
    const AoiVector& age = cfg.ages[(idx / ne) % na];
    const double eps = cfg.eps_c[idx % ne];
    const Row& r = rows[idx];
    std::vector<Table::Cell> row = {lambda};
    AddAgeCells(row, age);
    row.insert(row.end(), {eps, r.aging, r.noise, r.mse});
    if (r.sim) {
      row.insert(row.end(), {r.sim->mean, r.sim->standard_error});
      if (std::fabs(r.sim->mean - r.mse) > 3 * r.sim->standard_error) {
        out.violations.push_back("simulated MSE " + FormatDouble(r.sim->mean) + " (se " +
                                 FormatDouble(r.sim->standard_error) + ") disagrees with exact " +
                                 FormatDouble(r.mse) + " at " + Where(lambda, age, eps));
      }
    } else {
      row.insert(row.end(), {std::monostate{}, std::monostate{}});
    }
    row.insert(row.end(), {r.leakage, r.seed});
    out.table.AddRow(std::move(row));
  }
  return out;
}

inline SweepResult RunFrontierSweep(const ExperimentConfig& cfg) {
  const std::vector<CmcModel> models = LambdaModels(cfg);
  const QuerySpec query = FindBuiltinQuery(cfg.query, cfg.model.space());
  SweepResult out;
  out.name = SweepName(cfg.sweep);
  std::vector<std::string> cols = {"mechanism", "l_cap"};
  AddAgeColumns(cols, cfg.model.s());
  for (const char* c : {"eps_c", "leakage", "mse", "feasible", "lambda", "seed"}) cols.emplace_back(c);
  out.table = Table(cols);

  for (const CmcModel& model : models) {
    const double lambda = model.lambda(0, 0);
    for (const std::vector<AoiVector>& family : cfg.age_families) {
      UtilitySpec spec;
      spec.query = query;
      spec.degree = cfg.Degree();
      spec.age_grid = family;
      spec.eps_grid = cfg.eps_c;
      spec.leakage_kind = cfg.leakage_kind;
      spec.cap = cfg.cap;
      spec.threads = cfg.threads;
      for (Mechanism mech : cfg.mechanisms) {
        const std::vector<GridPoint> points = EvaluateGrid(mech, model, spec);
        for (double cap : cfg.caps) {
          const TradeoffSolution sol = SelectOptimum(mech, points, cap);
          std::vector<Table::Cell> row = {MechanismName(mech), cap};
          AddAgeCells(row, sol.age);
          row.insert(row.end(), {sol.eps_c, sol.leakage, sol.mse, sol.feasible, lambda,
                                 CellSeed(cfg.seed, lambda, sol.age, sol.eps_c)});
          out.table.AddRow(std::move(row));
          if (sol.feasible && sol.mse > cap) {
            out.violations.push_back(MechanismName(mech) + " solution at l_cap=" + FormatDouble(cap) +
                                     " violates its MSE cap");
          }
        }
      }
    }
  }
  // Each consecutive block of caps is one (mechanism, family) curve; leakage
  // must not increase as the cap grows.
  const std::size_t nc = cfg.caps.size();
  const auto& rows = out.table.rows();
  for (std::size_t start = 0; start + nc <= rows.size(); start += nc) {
    for (std::size_t i = start + 1; i < start + nc; ++i) {
      const double cap_a = std::get<double>(rows[i - 1][1]);
      const double cap_b = std::get<double>(rows[i][1]);
      const std::size_t leak_col = 2 + static_cast<std::size_t>(cfg.model.s()) + 1;
      const double la = std::get<double>(rows[i - 1][leak_col]);
      const double lb = std::get<double>(rows[i][leak_col]);
      const bool fa = std::get<bool>(rows[i - 1][leak_col + 2]);
      const bool fb = std::get<bool>(rows[i][leak_col + 2]);
      if (cap_b > cap_a && fa && fb && Exceeds(lb, la)) {
        out.violations.push_back(std::get<std::string>(rows[i][0]) + " frontier increases from l_cap=" +
                                 FormatDouble(cap_a) + " to " + FormatDouble(cap_b));
      }
    }
  }
  return out;
}

inline SweepResult RunOracleValidate(const ExperimentConfig& cfg) {
  const std::vector<CmcModel> models = LambdaModels(cfg);
  const CorrelationDegree degree = cfg.Degree();
  const QuerySpec query = FindBuiltinQuery(cfg.query, cfg.model.space());
  const double dk = KSensitivity(query, degree);
  const std::vector<JointKernel> kernels = ParallelMap(
      models.size(), cfg.threads, [&](std::size_t i) { return BuildJointKernel(models[i], cfg.cap); });
  struct Row {
    OracleEstimate exact, sampled;
    double tight = 0, loose = 0;
    std::uint64_t seed = 0;
  };
  const std::size_t na = cfg.ages.size();
  const std::size_t ne = cfg.eps_c.size();
  const std::vector<Row> rows =
      ParallelMap(models.size() * na * ne, cfg.threads, [&](std::size_t idx) {
        const std::size_t li = idx / (na * ne);
        const AoiVector& age = cfg.ages[(idx / ne) % na];
        const double eps = cfg.eps_c[idx % ne];
        const JointKernel& kernel = kernels[li];
        Row r;
        r.seed = CellSeed(cfg.seed, models[li].lambda(0, 0), age, eps);
        const FranConfig fran{age, query, eps};
        r.exact = OracleLeakageExact(kernel, fran, cfg.cap);
        r.sampled = OracleLeakageSampled(kernel, fran, cfg.samples, r.seed, cfg.cap);
        r.tight = TightBound(BoundedAgedCorrelation(kernel, age).value, eps);
        r.loose = ComputeLooseBound(AgedTvDistance(kernel, age, degree), dk, eps).linear;
        return r;
      });
  SweepResult out;
  out.name = SweepName(cfg.sweep);
  out.table = Table({"lambda", "t", "eps_c", "oracle_exact", "oracle_sampled", "oracle_hw",
                     "agree", "tight", "loose_linear", "samples", "seed"});
  for (std::size_t idx = 0; idx < rows.size(); ++idx) {
    const double lambda = models[idx / (na * ne)].lambda(0, 0);
    const AoiVector& age = cfg.ages[(idx / ne) % na];
    const double eps = cfg.eps_c[idx % ne];
    const Row& r = rows[idx];
    const bool agree =
        std::fabs(r.exact.estimate - r.sampled.estimate) <= 3 * r.sampled.half_width;
    out.table.AddRow({lambda, age.Format(), eps, r.exact.estimate, r.sampled.estimate,
                      r.sampled.half_width, agree, r.tight, r.loose,
                      static_cast<std::uint64_t>(cfg.samples), r.seed});
    if (!agree) {
      out.violations.push_back("exact oracle " + FormatDouble(r.exact.estimate) +
                               " and sampled oracle " + FormatDouble(r.sampled.estimate) +
                               " (hw " + FormatDouble(r.sampled.half_width) + ") disagree at " +
                               Where(lambda, age, eps));
    }
  }
  return out;
}

inline SweepResult RunReduceCheck(const ExperimentConfig& cfg) {
  const std::vector<CmcModel> models = LambdaModels(cfg);
  // Spatial reduction checked for uniform ages 0..max_age (default 8).
  int max_age = cfg.ages.empty() ? 8 : 0;
  for (const AoiVector& a : cfg.ages) max_age = std::max(max_age, a.Max());
  SweepResult out;
  out.name = SweepName(cfg.sweep);
  out.table = Table({"lambda", "eps_c", "case", "applicable", "pass", "observed", "expected",
                     "detail", "seed"});
  for (const CmcModel& model : models) {
    const double lambda = model.lambda(0, 0);
    for (double eps : cfg.eps_c) {
      ReductionParams params;
      params.eps_c = eps;
      params.max_age = max_age;
      params.cap = cfg.cap;
      const ReductionReport report = VerifyReductions(model, params);
      for (const ReductionCase& c : report.cases) {
        out.table.AddRow({lambda, eps, c.name, c.applicable, c.pass,
                          c.applicable ? Table::Cell(c.observed) : Table::Cell(std::monostate{}),
                          c.applicable ? Table::Cell(c.expected) : Table::Cell(std::monostate{}),
                          c.detail, DeriveSeed(cfg.seed, {lambda, eps})});
        if (c.applicable && !c.pass) {
          out.violations.push_back("reduction " + c.name + " fails: observed " +
                                   FormatDouble(c.observed) + ", expected " +
                                   FormatDouble(c.expected) + " (lambda=" + FormatDouble(lambda) +
                                   ", eps_c=" + FormatDouble(eps) + ")");
        }
      }
    }
  }
  return out;
}

}  // namespace detail

inline SweepResult RunSweep(const ExperimentConfig& cfg) {
  switch (cfg.sweep) {
    case SweepKind::kLeakageVsLambda:
    case SweepKind::kLeakageVsAge:
    case SweepKind::kLeakageVsNoise:
      return detail::RunLeakageSweep(cfg);
    case SweepKind::kUtilitySweep:
      return detail::RunUtilitySweep(cfg);
    case SweepKind::kFrontier:
      return detail::RunFrontierSweep(cfg);
    case SweepKind::kOracleValidate:
      return detail::RunOracleValidate(cfg);
    case SweepKind::kReduceCheck:
      return detail::RunReduceCheck(cfg);
  }
  throw InvalidArgument("unknown sweep kind");
}

inline Json BuildManifest(const ExperimentConfig& cfg, const SweepResult& result,
                          const std::string& table_file) {
  Json m;
  m["tool"] = "csdp";
  m["version"] = kToolVersion;
  m["sweep"] = result.name;
  m["model_file"] = cfg.model_path.filename().string();
  m["model_digest"] = cfg.model_digest;
  m["root_seed"] = cfg.seed;
  m["seed_rule"] = kSeedSplitVersion;
  m["cap"] = cfg.cap;
  m["format"] = cfg.format;
  m["config"] = cfg.echo;
  m["table"] = table_file;
  m["table_digest"] = HexDigest(Fnv1a64(result.table.Render(cfg.format)));
  m["rows"] = result.table.rows().size();
  m["violations"] = result.violations.size();
  return m;
}

inline std::string BuildSummary(const SweepResult& result) {
  std::string s = "sweep: " + result.name + "\n";
  s += "rows: " + std::to_string(result.table.rows().size()) + "\n";
  s += "violations: " + std::to_string(result.violations.size()) + "\n";
  for (const std::string& v : result.violations) s += "  " + v + "\n";
  s += result.violations.empty() ? "status: ok\n" : "status: violations\n";
  return s;
}

// Runs the sweep and writes <sweep>.<format>, manifest.json and summary.txt
// into out_dir. Files written by a failed run are removed before rethrowing.
inline SweepResult RunExperiment(const ExperimentConfig& cfg, const std::filesystem::path& out_dir) {
  namespace fs = std::filesystem;
  std::vector<fs::path> written;
  const bool created_dir = !fs::exists(out_dir);
  try {
    SweepResult result = RunSweep(cfg);
    fs::create_directories(out_dir);
    const std::string table_file = result.name + "." + cfg.format;
    const std::pair<std::string, std::string> files[] = {
        {table_file, result.table.Render(cfg.format)},
        {"manifest.json", BuildManifest(cfg, result, table_file).dump(2) + "\n"},
        {"summary.txt", BuildSummary(result)},
    };
    for (const auto& [name, text] : files) {
      written.push_back(out_dir / name);
      WriteTextFile(out_dir / name, text);
    }
    return result;
  } catch (...) {
    std::error_code ec;
    for (const fs::path& p : written) fs::remove(p, ec);
    if (created_dir && fs::exists(out_dir, ec) && fs::is_empty(out_dir, ec)) fs::remove(out_dir, ec);
    throw;
  }
}

}  // namespace csdp

#endif  // CSDP_EXPERIMENT_HPP
