// Copyright 2026 The Quench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <iostream>

#include <CLI11.hpp>

#include "quench/campaign.hpp"
#include "quench/dynamics.hpp"
#include "quench/io.hpp"
#include "quench/problems.hpp"
#include "quench/pstqa.hpp"
#include "quench/statmech.hpp"

namespace {

// exit codes: 0 success, 1 unexpected, 2 config, 3 size cap, 4 numerical
constexpr int kExitConfig = 2;
constexpr int kExitSizeCap = 3;
constexpr int kExitNumerical = 4;

int run_command(const std::string& config_path, const std::string& out_dir,
                std::optional<std::uint64_t> seed, int jobs, bool dense) {
  const quench::CampaignConfig config =
      quench::parse_config(quench::read_file(config_path));
  quench::RunOptions opts;
  opts.seed_override = seed;
  opts.jobs = jobs;
  opts.dense_mode = dense;
  const quench::RunResult result = quench::run_campaign(config, out_dir, opts);
  std::cout << "wrote " << result.files.size() << " files to "
            << result.out_dir << "\n";
  return 0;
}

int verify_command(const std::string& manifest_path) {
  const quench::VerifyReport report = quench::verify_manifest(manifest_path);
  if (report.pass) {
    std::cout << "verify: pass\n";
    return 0;
  }
  for (const auto& issue : report.issues)
    std::cout << "verify: MISMATCH " << issue.file << " [" << issue.field
              << "] expected " << issue.expected << " actual " << issue.actual
              << "\n";
  return kExitNumerical;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "quench: desk-scale exact simulator for continuous-time quantum "
      "optimisation"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out", manifest_path;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int jobs = 1;
  bool dense = false, sampled = false;

  CLI::App* run = app.add_subcommand("run", "run a campaign from a config");
  run->add_option("--config", config_path, "campaign config (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--seed", seed, "override the config seed")
      ->each([&](const std::string&) { seed_set = true; });
  run->add_option("--jobs", jobs, "worker threads over instances")
      ->check(CLI::PositiveNumber);
  run->add_flag("--dense", dense, "ensemble-exact protocol mode");
  run->add_flag("--sampled", sampled, "sampled protocol mode (default)");

  CLI::App* verify = app.add_subcommand("verify", "re-derive a run's summary");
  verify->add_option("manifest", manifest_path, "path to manifest.json")
      ->required()
      ->check(CLI::ExistingFile);

  CLI::App* list = app.add_subcommand("list-experiments", "list experiments");
  CLI::App* schema =
      app.add_subcommand("print-schema", "print the config schema");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      if (dense && sampled)
        throw quench::ConfigError("choose one of --dense / --sampled");
      return run_command(
          config_path, out_dir,
          seed_set ? std::optional<std::uint64_t>(seed) : std::nullopt, jobs,
          dense);
    }
    if (verify->parsed()) return verify_command(manifest_path);
    if (list->parsed()) {
      for (const auto& name : quench::list_experiments())
        std::cout << name << "\n";
      return 0;
    }
    if (schema->parsed()) {
      std::cout << quench::config_schema_text();
      return 0;
    }
  } catch (const quench::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const quench::SizeCapError& e) {
    std::cerr << "size cap: " << e.what() << "\n";
    return kExitSizeCap;
  } catch (const quench::BetaRangeError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const quench::PstqaBreakdown& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const quench::IntegrationError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
