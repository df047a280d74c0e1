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

// csdp: sweeps, acceptance checks, model validation and single releases.
//
// Exit codes: 0 success, 1 invariant or acceptance failure, 2 configuration
// or input error.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "csdp/csdp.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitViolation = 1;
constexpr int kExitConfig = 2;

struct RunArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<unsigned> threads;
  std::optional<std::size_t> cap;
  std::optional<std::string> format;
};

int Run(const RunArgs& args) {
  csdp::ExperimentConfig cfg = csdp::LoadExperimentConfig(args.config);
  if (args.seed) cfg.seed = *args.seed;
  if (args.threads) cfg.threads = *args.threads;
  if (args.cap) cfg.cap = *args.cap;
  if (args.format) cfg.format = *args.format;
  const std::filesystem::path out =
      args.out.empty() ? std::filesystem::path("out") / csdp::SweepName(cfg.sweep)
                       : std::filesystem::path(args.out);
  const csdp::SweepResult result = csdp::RunExperiment(cfg, out);
  std::cout << csdp::BuildSummary(result);
  std::cout << "wrote " << (out / (result.name + "." + cfg.format)).string() << "\n";
  return result.violations.empty() ? kExitOk : kExitViolation;
}

struct AcceptanceArgs {
  std::uint64_t seed = 1;
  std::vector<int> criteria;
  std::string out;
};

int Acceptance(const AcceptanceArgs& args) {
  std::vector<int> ids = args.criteria;
  if (ids.empty()) {
    for (int i = 1; i <= csdp::kCriterionCount; ++i) ids.push_back(i);
  }
  std::ostringstream report;
  int failed = 0;
  for (int id : ids) {
    const csdp::CriterionResult r = csdp::EvaluateCriterion(id, csdp::AcceptanceTolerances{}, args.seed);
    const std::string line = csdp::FormatCriterion(r);
    std::cout << line << std::endl;
    report << line << "\n";
    failed += r.pass ? 0 : 1;
  }
  const std::string tail = std::to_string(ids.size() - static_cast<std::size_t>(failed)) + "/" +
                           std::to_string(ids.size()) + " criteria passed";
  std::cout << tail << "\n";
  report << tail << "\n";
  if (!args.out.empty()) csdp::WriteTextFile(args.out, report.str());
  return failed ? kExitViolation : kExitOk;
}

int Validate(const std::string& path) {
  // Structural problems are reported as diagnostics, not parse errors.
  const csdp::Json doc = csdp::ParseJsonText(csdp::ReadTextFile(path), path);
  csdp::CmcModel model;
  try {
    model = csdp::ModelFromJson(doc);
  } catch (const csdp::ParseError& e) {
    if (e.field() != "model") throw;
    std::cout << "model " << path << ": invalid\n  " << e.what() << "\n";
    return kExitViolation;
  }
  std::cout << "model " << path << ": valid (s=" << model.s() << ", m=" << model.m() << ")\n";
  const csdp::SpectralReport spec = csdp::SpectralCheck(model);
  std::cout << "  dominant modulus " << csdp::FormatDouble(spec.dominant_modulus)
            << ", second modulus " << csdp::FormatDouble(spec.second_modulus) << "\n";
  if (!spec.has_spectral_gap) std::cout << "  warning: no spectral gap\n";
  try {
    const csdp::DistributionVector pi = csdp::StationaryDistribution(model, {});
    std::cout << "  stationary:";
    for (double v : pi.Stacked()) std::cout << " " << csdp::FormatDouble(v);
    std::cout << "\n";
  } catch (const csdp::NotConverged& e) {
    std::cout << "  stationary: " << e.what() << "\n";
  }
  return spec.dominant_is_one && spec.others_bounded ? kExitOk : kExitViolation;
}

struct ReleaseArgs {
  std::string db;
  int states = 2;
  int t = 1;
  std::vector<int> age;
  std::string query = "mean";
  double eps_c = 1.0;
  std::uint64_t seed = 1;
  std::string log;
};

int ReleaseOnce(const ReleaseArgs& args) {
  const csdp::SequenceDatabase db = csdp::LoadDatabase(args.db, args.states);
  const int s = db.space().num_sequences;
  csdp::AoiVector age{args.age};
  if (age.ages.empty()) age = csdp::AoiVector::Uniform(s, 0);
  if (age.size() == 1 && s > 1) age = csdp::AoiVector::Uniform(s, age[0]);
  const csdp::QuerySpec query = csdp::FindBuiltinQuery(args.query, db.space());
  const csdp::MechanismOutput out = csdp::Release(db, args.t, age, query, args.eps_c, args.seed);
  std::cout << "aged snapshot:";
  for (int v : out.aged_snapshot) std::cout << " " << v;
  std::cout << "\nnoise scale: " << csdp::FormatDouble(out.noise_scale) << "\nvalue:";
  for (double v : out.value) std::cout << " " << csdp::FormatDouble(v);
  std::cout << "\n";
  if (!args.log.empty()) {
    csdp::AppendReleaseLog(args.log, args.t, age, args.query, args.eps_c, args.seed, out.value);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Correlated-sequence differential privacy toolkit"};
  app.require_subcommand(1);

  RunArgs run;
  CLI::App* run_cmd = app.add_subcommand("run", "Run a sweep from a config file");
  run_cmd->add_option("--config", run.config, "Config file (JSON)")->required();
  run_cmd->add_option("--seed", run.seed, "Root seed (overrides the config)");
  run_cmd->add_option("--out", run.out, "Output directory (default out/<sweep>)");
  run_cmd->add_option("--threads", run.threads, "Worker threads")->check(CLI::PositiveNumber);
  run_cmd->add_option("--cap", run.cap, "Enumeration cap on m^s");
  run_cmd->add_option("--format", run.format, "Table format")->check(CLI::IsMember({"csv", "json"}));

  AcceptanceArgs acc;
  CLI::App* acc_cmd = app.add_subcommand("acceptance", "Run the acceptance criteria");
  acc_cmd->add_option("--seed", acc.seed, "Root seed");
  acc_cmd->add_option("--criterion", acc.criteria, "Criterion ids (default all)")
      ->check(CLI::Range(1, csdp::kCriterionCount));
  acc_cmd->add_option("--out", acc.out, "Also write the report to this file");

  std::string model_path;
  CLI::App* val_cmd = app.add_subcommand("validate", "Validate a model file");
  val_cmd->add_option("--model", model_path, "Model file (JSON)")->required();

  ReleaseArgs rel;
  CLI::App* rel_cmd = app.add_subcommand("release", "Publish one aged noisy query answer");
  rel_cmd->add_option("--db", rel.db, "Database CSV")->required();
  rel_cmd->add_option("--states", rel.states, "Number of states m")->check(CLI::Range(2, 1 << 20));
  rel_cmd->add_option("--t", rel.t, "Time index (1-based)")->required();
  rel_cmd->add_option("--age", rel.age, "Ages, one per sequence or a single uniform age");
  rel_cmd->add_option("--query", rel.query, "mean, sum, max or min");
  rel_cmd->add_option("--eps", rel.eps_c, "Noise level eps_c");
  rel_cmd->add_option("--seed", rel.seed, "Noise seed");
  rel_cmd->add_option("--log", rel.log, "Append the release to this results log");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run_cmd) return Run(run);
    if (*acc_cmd) return Acceptance(acc);
    if (*val_cmd) return Validate(model_path);
    if (*rel_cmd) return ReleaseOnce(rel);
  } catch (const csdp::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}
