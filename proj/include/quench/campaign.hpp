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

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace quench {

inline constexpr const char* kToolkitVersion = "0.1.0";

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Parsed campaign configuration. The on-disk format is strict JSON: unknown
// keys anywhere are rejected so a typo cannot silently change the physics.
struct CampaignConfig {
  std::string experiment;  // msqw|pstqa|ansatz|warmstart|rqa|bqa|gibbs_sweep|properties
  std::uint64_t seed = 0;

  struct Problem {
    std::string family = "maxcut";  // maxcut|sk
    int n = 10;
    double p = 2.0 / 3.0;  // edge probability (maxcut)
    int count = 1;
  } problem;

  // msqw
  std::vector<double> gammas;
  double stage_length = 6.0;
  double burn_in_frac = 0.2;
  int samples_per_stage = 40;

  // pstqa / ansatz
  std::string backend = "exact";  // exact|gaussian|emg
  double a0 = 1.3, a1 = 0.3, b0 = 0.3, b1 = 1.3;
  double t_f = 12.0;
  int grid_points = 48;
  bool compare_schrodinger = true;
  bool second_path = false;  // add the L-shaped path-independence report

  // warmstart
  double g = 0.5;
  std::string initial = "ensemble";  // ensemble|random_string
  double t1 = 20.0;

  // rqa / bqa
  int k_max = 100;
  int k = 10;
  double t_cyc = 10.0;
  double drive_amplitude = 1.0;
  double drive_width_frac = 0.2;
  std::optional<double> alpha0;
  bool alpha_increase = false;
  bool reset_alpha_on_accept = true;

  // gibbs_sweep
  std::vector<double> betas{0.1, 1.0, 5.0};
  double gamma_min = 0.05;
  double gamma_max = 3.0;
  int gamma_points = 50;

  // tolerances
  double integrator_rtol = 1e-8;
  double pstqa_rtol = 1e-8;

  std::string to_json() const;
};

CampaignConfig parse_config(const std::string& json_text);

struct RunOptions {
  std::optional<std::uint64_t> seed_override;
  int jobs = 1;
  bool dense_mode = false;  // protocol experiments: ensemble-exact evolution
};

struct RunResult {
  std::string out_dir;
  std::vector<std::string> files;  // relative names, manifest last
};

// Execute a campaign and write CSV artifacts, summary.json and manifest.json
// into out_dir (created if absent). Deterministic for a given config + seed,
// independent of the worker count.
RunResult run_campaign(const CampaignConfig& config, const std::string& out_dir,
                       const RunOptions& opts = {});

struct VerifyIssue {
  std::string file;
  std::string field;
  std::string expected;
  std::string actual;
};

struct VerifyReport {
  bool pass = false;
  std::vector<VerifyIssue> issues;
};

// Re-derive the summary statistics from the raw CSVs and compare against
// summary.json bit-for-bit on the formatted decimals; also re-hash every
// listed artifact.
VerifyReport verify_manifest(const std::string& manifest_path);

std::vector<std::string> list_experiments();
std::string config_schema_text();

}  // namespace quench
