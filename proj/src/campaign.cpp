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

#include "quench/campaign.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "quench/ansatz.hpp"
#include "quench/dynamics.hpp"
#include "quench/io.hpp"
#include "quench/parallel.hpp"
#include "quench/protocols.hpp"
#include "quench/pstqa.hpp"
#include "quench/statmech.hpp"

namespace quench {

using nlohmann::json;

// --- config -------------------------------------------------------------------

namespace {

void reject_unknown(const json& obj, const std::string& where,
                    const std::vector<std::string>& allowed) {
  for (const auto& [key, value] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw ConfigError("config: unknown key '" + key + "' in " + where);
  }
}

template <typename T>
void read_into(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) {
    try {
      out = obj.at(key).get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(std::string("config: bad value for '") + key +
                        "': " + e.what());
    }
  }
}

std::vector<double> linspace(double t0, double t1, int count) {
  std::vector<double> g(count);
  for (int i = 0; i < count; ++i)
    g[i] = t0 + (t1 - t0) * double(i) / double(count - 1);
  return g;
}

}  // namespace

CampaignConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config: top level must be an object");

  CampaignConfig c;
  reject_unknown(j, "top level",
                 {"experiment", "seed", "problem", "msqw", "pstqa", "ansatz",
                  "warmstart", "rqa", "bqa", "gibbs_sweep", "properties",
                  "tolerances"});
  if (!j.contains("experiment"))
    throw ConfigError("config: missing 'experiment'");
  c.experiment = j.at("experiment").get<std::string>();
  const auto known = list_experiments();
  if (std::find(known.begin(), known.end(), c.experiment) == known.end())
    throw ConfigError("config: unknown experiment '" + c.experiment + "'");
  read_into(j, "seed", c.seed);

  if (j.contains("problem")) {
    const json& p = j.at("problem");
    reject_unknown(p, "problem", {"family", "n", "p", "count"});
    read_into(p, "family", c.problem.family);
    if (c.problem.family != "maxcut" && c.problem.family != "sk")
      throw ConfigError("config: problem.family must be maxcut or sk");
    read_into(p, "n", c.problem.n);
    read_into(p, "p", c.problem.p);
    read_into(p, "count", c.problem.count);
    if (c.problem.n < 1 || c.problem.n > kMaxQubits)
      throw ConfigError("config: problem.n outside [1, 13]");
    if (c.problem.count < 1) throw ConfigError("config: problem.count < 1");
  }

  if (j.contains("msqw")) {
    const json& m = j.at("msqw");
    reject_unknown(
        m, "msqw",
        {"gammas", "stage_length", "burn_in_frac", "samples_per_stage"});
    read_into(m, "gammas", c.gammas);
    read_into(m, "stage_length", c.stage_length);
    read_into(m, "burn_in_frac", c.burn_in_frac);
    read_into(m, "samples_per_stage", c.samples_per_stage);
  }
  if (c.gammas.empty()) c.gammas = {0.1, 0.25, 0.45, 0.7, 1.0};

  auto read_schedule_block = [&](const json& b, const std::string& where) {
    reject_unknown(b, where,
                   {"backend", "a0", "a1", "b0", "b1", "t_f", "grid_points",
                    "compare_schrodinger", "second_path"});
    read_into(b, "backend", c.backend);
    if (c.backend != "exact" && c.backend != "gaussian" && c.backend != "emg")
      throw ConfigError("config: backend must be exact, gaussian or emg");
    read_into(b, "a0", c.a0);
    read_into(b, "a1", c.a1);
    read_into(b, "b0", c.b0);
    read_into(b, "b1", c.b1);
    read_into(b, "t_f", c.t_f);
    read_into(b, "grid_points", c.grid_points);
    read_into(b, "compare_schrodinger", c.compare_schrodinger);
    read_into(b, "second_path", c.second_path);
    if (c.t_f <= 0.0) throw ConfigError("config: t_f must be > 0");
    if (c.grid_points < 1) throw ConfigError("config: grid_points < 1");
  };
  if (j.contains("pstqa")) read_schedule_block(j.at("pstqa"), "pstqa");
  if (j.contains("ansatz")) read_schedule_block(j.at("ansatz"), "ansatz");

  if (j.contains("warmstart")) {
    const json& w = j.at("warmstart");
    reject_unknown(w, "warmstart", {"g", "initial", "t1", "grid_points"});
    read_into(w, "g", c.g);
    read_into(w, "initial", c.initial);
    if (c.initial != "ensemble" && c.initial != "random_string")
      throw ConfigError(
          "config: warmstart.initial must be ensemble or random_string");
    read_into(w, "t1", c.t1);
    read_into(w, "grid_points", c.grid_points);
  }

  auto read_protocol_block = [&](const json& b, const std::string& where) {
    reject_unknown(b, where,
                   {"k_max", "k", "t_cyc", "drive_amplitude",
                    "drive_width_frac", "alpha0", "alpha_increase",
                    "reset_alpha_on_accept"});
    read_into(b, "k_max", c.k_max);
    read_into(b, "k", c.k);
    read_into(b, "t_cyc", c.t_cyc);
    read_into(b, "drive_amplitude", c.drive_amplitude);
    read_into(b, "drive_width_frac", c.drive_width_frac);
    if (b.contains("alpha0") && !b.at("alpha0").is_null())
      c.alpha0 = b.at("alpha0").get<double>();
    read_into(b, "alpha_increase", c.alpha_increase);
    read_into(b, "reset_alpha_on_accept", c.reset_alpha_on_accept);
    if (c.k_max < c.k || c.k < 1)
      throw ConfigError("config: need k_max >= k >= 1");
  };
  if (j.contains("rqa")) read_protocol_block(j.at("rqa"), "rqa");
  if (j.contains("bqa")) read_protocol_block(j.at("bqa"), "bqa");

  if (j.contains("gibbs_sweep")) {
    const json& gs = j.at("gibbs_sweep");
    reject_unknown(gs, "gibbs_sweep",
                   {"betas", "gamma_min", "gamma_max", "gamma_points"});
    read_into(gs, "betas", c.betas);
    read_into(gs, "gamma_min", c.gamma_min);
    read_into(gs, "gamma_max", c.gamma_max);
    read_into(gs, "gamma_points", c.gamma_points);
    if (c.gamma_points < 3) throw ConfigError("config: gamma_points < 3");
    for (double b : c.betas)
      if (b < 0.0) throw ConfigError("config: betas must be >= 0");
  }

  if (j.contains("properties")) {
    reject_unknown(j.at("properties"), "properties", {});
  }

  if (j.contains("tolerances")) {
    const json& t = j.at("tolerances");
    reject_unknown(t, "tolerances", {"integrator_rtol", "pstqa_rtol"});
    read_into(t, "integrator_rtol", c.integrator_rtol);
    read_into(t, "pstqa_rtol", c.pstqa_rtol);
  }
  return c;
}

std::string CampaignConfig::to_json() const {
  json j;
  j["experiment"] = experiment;
  j["seed"] = seed;
  j["problem"] = {{"family", problem.family},
                  {"n", problem.n},
                  {"p", problem.p},
                  {"count", problem.count}};
  if (experiment == "msqw")
    j["msqw"] = {{"gammas", gammas},
                 {"stage_length", stage_length},
                 {"burn_in_frac", burn_in_frac},
                 {"samples_per_stage", samples_per_stage}};
  if (experiment == "pstqa" || experiment == "ansatz")
    j[experiment] = {{"backend", backend},
                     {"a0", a0},
                     {"a1", a1},
                     {"b0", b0},
                     {"b1", b1},
                     {"t_f", t_f},
                     {"grid_points", grid_points},
                     {"compare_schrodinger", compare_schrodinger},
                     {"second_path", second_path}};
  if (experiment == "warmstart")
    j["warmstart"] = {{"g", g},
                      {"initial", initial},
                      {"t1", t1},
                      {"grid_points", grid_points}};
  if (experiment == "rqa" || experiment == "bqa") {
    json b = {{"k_max", k_max},
              {"k", k},
              {"t_cyc", t_cyc},
              {"drive_amplitude", drive_amplitude},
              {"drive_width_frac", drive_width_frac},
              {"alpha_increase", alpha_increase},
              {"reset_alpha_on_accept", reset_alpha_on_accept}};
    if (alpha0) b["alpha0"] = *alpha0;
    j[experiment] = b;
  }
  if (experiment == "gibbs_sweep")
    j["gibbs_sweep"] = {{"betas", betas},
                        {"gamma_min", gamma_min},
                        {"gamma_max", gamma_max},
                        {"gamma_points", gamma_points}};
  j["tolerances"] = {{"integrator_rtol", integrator_rtol},
                     {"pstqa_rtol", pstqa_rtol}};
  return j.dump(2);
}

std::vector<std::string> list_experiments() {
  return {"msqw", "pstqa",      "ansatz",     "warmstart",
          "rqa",  "bqa",        "gibbs_sweep", "properties"};
}

// --- shared helpers --------------------------------------------------------------

namespace {

IsingProblem make_instance(const CampaignConfig& c, std::uint64_t campaign_seed,
                           std::size_t index) {
  const std::uint64_t instance_seed = RngStream::derive(campaign_seed, index);
  if (c.problem.family == "maxcut")
    return maxcut_problem(
        gen_binomial_graph(c.problem.n, c.problem.p, instance_seed));
  return sk_problem(c.problem.n, instance_seed);
}

std::string inst_name(std::size_t index, const std::string& suffix) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "inst%03zu_", index);
  return buf + suffix;
}

double parse_double(const std::string& s) {
  return std::strtod(s.c_str(), nullptr);
}

// metadata lines of the form "# key: value"
std::map<std::string, std::string> csv_metadata(const std::string& text) {
  std::map<std::string, std::string> meta;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] != '#') continue;
    const auto colon = line.find(": ");
    if (colon == std::string::npos) continue;
    meta[line.substr(2, colon - 2)] = line.substr(colon + 2);
  }
  return meta;
}

int column_index(const std::vector<std::string>& header,
                 const std::string& name) {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return int(i);
  throw std::runtime_error("csv: missing column " + name);
}

// --- summary derivation, shared bit-for-bit by run and verify ---------------------

json derive_msqw_summary(const std::string& stages_csv) {
  const auto rows = parse_csv(stages_csv);
  json out;
  json avgs = json::array();
  const int c_avg = column_index(rows[0], "hp_avg");
  const int c_std = column_index(rows[0], "hp_std");
  bool monotone = true;
  double prev_avg = 0.0, prev_std = 0.0;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const double avg = parse_double(rows[r][c_avg]);
    const double sd = parse_double(rows[r][c_std]);
    avgs.push_back(rows[r][c_avg]);
    if (r > 1) {
      const double tol = 3.0 * std::max(sd, prev_std);
      if (avg > prev_avg + tol) monotone = false;
    }
    prev_avg = avg;
    prev_std = sd;
  }
  out["stage_hp_avg"] = avgs;
  out["monotone_within_3sigma"] = monotone;
  return out;
}

json derive_trajectory_summary(const std::string& csv) {
  const auto rows = parse_csv(csv);
  const int c_hp = column_index(rows[0], "hp");
  const int c_beta = column_index(rows[0], "beta");
  const int c_sd = column_index(rows[0], "sd");
  json out;
  out["final_hp"] = rows.back()[c_hp];
  out["final_beta"] = rows.back()[c_beta];
  const double sd0 = parse_double(rows[1][c_sd]);
  double drift = 0.0;
  for (std::size_t r = 1; r < rows.size(); ++r)
    drift = std::max(drift, std::abs(parse_double(rows[r][c_sd]) - sd0));
  out["sd_drift"] = format_g12(drift);
  return out;
}

json derive_schrodinger_summary(const std::string& csv) {
  const auto rows = parse_csv(csv);
  json out;
  out["final_hp"] = rows.back()[column_index(rows[0], "hp")];
  return out;
}

json derive_shots_summary(const std::string& csv) {
  const auto rows = parse_csv(csv);
  const auto meta = csv_metadata(csv);
  const double ground = parse_double(meta.at("ground_energy"));
  const int c_in = column_index(rows[0], "hp_in");
  const int c_out = column_index(rows[0], "hp_out");
  const int c_acc = column_index(rows[0], "accepted");
  double best = parse_double(rows[1][c_in]);
  int heated = 0;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r][c_acc] == "1")
      best = std::min(best, parse_double(rows[r][c_out]));
    if (parse_double(rows[r][c_out]) > parse_double(rows[r][c_in])) ++heated;
  }
  json out;
  out["shots_used"] = rows.size() - 1;
  out["best_hp"] = format_g12(best);
  out["found_ground"] = best <= ground + 1e-9 * std::max(1.0, std::abs(ground));
  out["approx_ratio"] =
      format_g12(ground != 0.0 ? best / ground : (best == 0.0 ? 1.0 : 0.0));
  out["heated_shots"] = heated;
  return out;
}

json derive_warmstart_summary(const std::string& csv) {
  const auto rows = parse_csv(csv);
  const auto meta = csv_metadata(csv);
  const int c_hp = column_index(rows[0], "hp");
  const int c_prob = column_index(rows[0], "prob");
  double avg = 0.0;
  for (std::size_t r = 1; r < rows.size(); ++r)
    avg += parse_double(rows[r][c_hp]) * parse_double(rows[r][c_prob]);
  json out;
  out["hp_initial"] = meta.at("hp_initial");
  out["hp_time_avg"] = format_g12(avg);
  out["heated"] = avg >= parse_double(meta.at("hp_initial")) - 1e-10;
  return out;
}

json derive_gibbs_summary(const std::string& csv) {
  const auto rows = parse_csv(csv);
  const int c_beta = column_index(rows[0], "beta");
  const int c_hp = column_index(rows[0], "hp");
  json out;
  bool monotone = true;
  std::string prev_beta;
  double prev_hp = 0.0;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const double hp = parse_double(rows[r][c_hp]);
    if (rows[r][c_beta] == prev_beta && hp > prev_hp + 1e-9) monotone = false;
    prev_beta = rows[r][c_beta];
    prev_hp = hp;
  }
  out["monotone_to_1e9"] = monotone;
  return out;
}

json derive_path_summary(const std::string& csv) {
  const auto rows = parse_csv(csv);
  json out;
  out["energy_diff"] = rows[1][column_index(rows[0], "energy_diff")];
  out["hp_diff"] = rows[1][column_index(rows[0], "hp_diff")];
  return out;
}

json derive_properties_summary(const std::string& text) {
  const json table = json::parse(text);
  int passed = 0, failed = 0;
  for (const auto& suite : table.at("suites"))
    (suite.at("pass").get<bool>() ? passed : failed)++;
  json out;
  out["passed"] = passed;
  out["failed"] = failed;
  return out;
}

json derive_instance_summary(const std::string& experiment,
                             const std::map<std::string, std::string>& files,
                             std::size_t index) {
  json out;
  auto has = [&](const std::string& suffix) {
    return files.count(inst_name(index, suffix)) > 0;
  };
  auto content = [&](const std::string& suffix) -> const std::string& {
    return files.at(inst_name(index, suffix));
  };
  if (experiment == "msqw") {
    out = derive_msqw_summary(content("stages.csv"));
  } else if (experiment == "pstqa") {
    out = derive_trajectory_summary(content("pstqa.csv"));
    if (has("schrodinger.csv")) {
      const json s = derive_schrodinger_summary(content("schrodinger.csv"));
      out["schrodinger_final_hp"] = s.at("final_hp");
      const double hp_s = parse_double(s.at("final_hp").get<std::string>());
      const double hp_p = parse_double(out.at("final_hp").get<std::string>());
      out["rel_error"] = format_g12(std::abs(hp_s - hp_p) / std::abs(hp_s));
      out["pstqa_below"] = hp_p <= hp_s;
    }
    if (has("path_check.csv")) {
      const json path = derive_path_summary(content("path_check.csv"));
      out["path_energy_diff"] = path.at("energy_diff");
      out["path_hp_diff"] = path.at("hp_diff");
    }
  } else if (experiment == "ansatz") {
    out["gaussian"] = derive_trajectory_summary(content("gaussian.csv"));
    out["emg"] = derive_trajectory_summary(content("emg.csv"));
    if (has("schrodinger.csv"))
      out["schrodinger_final_hp"] =
          derive_schrodinger_summary(content("schrodinger.csv")).at("final_hp");
  } else if (experiment == "warmstart") {
    out = derive_warmstart_summary(content("warmstart_dist.csv"));
  } else if (experiment == "rqa" || experiment == "bqa") {
    if (has("shots.csv")) out = derive_shots_summary(content("shots.csv"));
    if (has("dense.csv")) {
      const auto rows = parse_csv(content("dense.csv"));
      out["iterations"] = rows.size() - 1;
      out["final_psuc"] = rows.back()[column_index(rows[0], "psuc")];
    }
  } else if (experiment == "gibbs_sweep") {
    out = derive_gibbs_summary(content("sweep.csv"));
  }
  return out;
}

// --- experiment runners -------------------------------------------------------------

struct InstanceArtifacts {
  std::map<std::string, std::string> files;  // name -> content
};

InstanceArtifacts run_msqw_instance(const CampaignConfig& c,
                                    std::uint64_t campaign_seed,
                                    std::size_t index) {
  const IsingProblem problem = make_instance(c, campaign_seed, index);
  std::vector<std::pair<double, double>> steps;
  for (std::size_t k = 0; k < c.gammas.size(); ++k)
    steps.emplace_back(double(k) * c.stage_length, c.gammas[k]);
  const Schedule stair = Schedule::piecewise_constant(
      Channel::ProblemCoeff, steps, double(c.gammas.size()) * c.stage_length,
      /*require_monotone=*/true);
  const MsqwRun run =
      msqw_run(problem, stair, c.burn_in_frac, c.samples_per_stage);

  std::ostringstream stages;
  stages << "stage,t_start,t_end,gamma,hp_avg,hp_std,ens_hp,eth_hp,eth_beta,"
            "eth_ok\n";
  for (const auto& s : run.stages)
    stages << s.stage << ',' << format_g12(s.t_start) << ','
           << format_g12(s.t_end) << ',' << format_g12(s.gamma) << ','
           << format_g12(s.hp_avg) << ',' << format_g12(s.hp_std) << ','
           << format_g12(s.ens_hp) << ',' << format_g12(s.eth_hp) << ','
           << format_g12(s.eth_beta) << ',' << (s.eth_ok ? 1 : 0) << '\n';

  InstanceArtifacts out;
  out.files[inst_name(index, "trajectory.csv")] = run.traj.to_csv();
  out.files[inst_name(index, "stages.csv")] = stages.str();
  return out;
}

InstanceArtifacts run_pstqa_instance(const CampaignConfig& c,
                                     std::uint64_t campaign_seed,
                                     std::size_t index) {
  const IsingProblem problem = make_instance(c, campaign_seed, index);
  auto shared = std::make_shared<IsingProblem>(problem);
  const int n = problem.n();
  const Schedule a = Schedule::linear(Channel::DriverCoeff, c.a0, c.a1, c.t_f);
  const Schedule b = Schedule::linear(Channel::ProblemCoeff, c.b0, c.b1, c.t_f);

  HamiltonianSpec h0;
  h0.driver = DriverSpec::transverse_field(n);
  h0.problem = shared;
  const double e0 = initial_energy(h0, a, b, plus_state(n));

  std::unique_ptr<PartitionBackend> backend;
  if (c.backend == "exact") {
    backend = std::make_unique<ExactSpectrumBackend>(h0.driver, shared);
  } else {
    const AnalyticMoments m = AnalyticMoments::for_problem(h0.driver, problem);
    if (c.backend == "gaussian")
      backend = std::make_unique<GaussianBackend>(m);
    else
      backend = std::make_unique<EmgBackend>(m);
  }

  PstqaOptions opts;
  opts.rtol = c.pstqa_rtol;
  const std::vector<double> grid = linspace(0.0, c.t_f, c.grid_points + 1);
  const PstqaTrajectory traj = pstqa_solve(*backend, a, b, e0, grid, opts);

  InstanceArtifacts out;
  out.files[inst_name(index, "pstqa.csv")] = traj.to_csv();

  if (c.compare_schrodinger) {
    EvolveOptions eopts;
    eopts.rtol = c.integrator_rtol;
    const Trajectory s = evolve(h0, {a, b}, plus_state(n), grid, eopts);
    out.files[inst_name(index, "schrodinger.csv")] = s.to_csv();
  }

  if (c.second_path) {
    // L-shaped path through the same endpoints: move A first, then B
    const Schedule a2 = Schedule::tabulated(
        Channel::DriverCoeff, {{0.0, c.a0}, {0.5 * c.t_f, c.a1}, {c.t_f, c.a1}},
        c.t_f);
    const Schedule b2 = Schedule::tabulated(
        Channel::ProblemCoeff, {{0.0, c.b0}, {0.5 * c.t_f, c.b0}, {c.t_f, c.b1}},
        c.t_f);
    const PathIndependenceReport rep =
        path_independence_check(*backend, a, b, a2, b2, e0, opts);
    std::ostringstream path;
    path << "energy_diff,hp_diff\n"
         << format_g12(rep.energy_diff) << ',' << format_g12(rep.hp_diff)
         << '\n';
    out.files[inst_name(index, "path_check.csv")] = path.str();
  }
  return out;
}

InstanceArtifacts run_ansatz_instance(const CampaignConfig& c,
                                      std::uint64_t campaign_seed,
                                      std::size_t index) {
  const IsingProblem problem = make_instance(c, campaign_seed, index);
  const int n = problem.n();
  const DriverSpec driver = DriverSpec::transverse_field(n);
  const AnalyticMoments m = AnalyticMoments::for_problem(driver, problem);
  const Schedule a = Schedule::linear(Channel::DriverCoeff, c.a0, c.a1, c.t_f);
  const Schedule b = Schedule::linear(Channel::ProblemCoeff, c.b0, c.b1, c.t_f);

  HamiltonianSpec h0;
  h0.driver = driver;
  h0.problem = std::make_shared<IsingProblem>(problem);
  const double e0 = initial_energy(h0, a, b, plus_state(n));
  const std::vector<double> grid = linspace(0.0, c.t_f, c.grid_points + 1);

  PstqaOptions opts;
  opts.rtol = c.pstqa_rtol;
  const PstqaTrajectory gauss = gaussian_closed_form(m, a, b, e0, grid);
  const PstqaTrajectory emg = pstqa_solve(EmgBackend(m), a, b, e0, grid, opts);

  InstanceArtifacts out;
  out.files[inst_name(index, "gaussian.csv")] = gauss.to_csv();
  out.files[inst_name(index, "emg.csv")] = emg.to_csv();
  if (c.compare_schrodinger) {
    EvolveOptions eopts;
    eopts.rtol = c.integrator_rtol;
    const Trajectory s = evolve(h0, {a, b}, plus_state(n), grid, eopts);
    out.files[inst_name(index, "schrodinger.csv")] = s.to_csv();
  }
  return out;
}

InstanceArtifacts run_warmstart_instance(const CampaignConfig& c,
                                         std::uint64_t campaign_seed,
                                         std::size_t index) {
  const IsingProblem problem = make_instance(c, campaign_seed, index);
  std::optional<std::uint64_t> initial;
  if (c.initial == "random_string") {
    RngStream rng =
        RngStream::substream(RngStream::derive(campaign_seed, index), 0x5753);
    const auto dist = below_mean_uniform(problem);
    initial = rng.sample(dist);
  }
  const WarmstartResult r = warmstart_ctqw(problem, c.g, initial);

  std::ostringstream csv;
  csv << "# hp_initial: " << format_g12(r.hp_initial) << '\n';
  csv << "# g: " << format_g12(c.g) << '\n';
  csv << "# precondition_met: " << (r.precondition_met ? 1 : 0) << '\n';
  csv << "hp,prob\n";
  for (const auto& [hp, prob] : r.hp_distribution)
    csv << format_g12(hp) << ',' << format_g12(prob) << '\n';

  InstanceArtifacts out;
  out.files[inst_name(index, "warmstart_dist.csv")] = csv.str();
  if (initial) {
    const WarmstartResult traced =
        warmstart_ctqw(problem, c.g, initial, c.t1, std::max(c.grid_points, 10));
    out.files[inst_name(index, "trace.csv")] = traced.traj.to_csv();
  }
  return out;
}

ProtocolConfig protocol_config(const CampaignConfig& c,
                               std::uint64_t campaign_seed, std::size_t index) {
  ProtocolConfig pc;
  pc.k_max = c.k_max;
  pc.k = c.k;
  pc.t_cyc = c.t_cyc;
  pc.drive_amplitude = c.drive_amplitude;
  pc.drive_width_frac = c.drive_width_frac;
  if (c.alpha0) pc.alpha0 = *c.alpha0;
  pc.alpha_increase = c.alpha_increase;
  pc.reset_alpha_on_accept = c.reset_alpha_on_accept;
  pc.integrator_rtol = c.integrator_rtol;
  pc.seed = RngStream::derive(campaign_seed, index);
  return pc;
}

InstanceArtifacts run_protocol_instance(const CampaignConfig& c,
                                        std::uint64_t campaign_seed,
                                        std::size_t index, bool dense) {
  const IsingProblem problem = make_instance(c, campaign_seed, index);
  const ProtocolConfig pc = protocol_config(c, campaign_seed, index);
  InstanceArtifacts out;
  if (c.experiment == "rqa" && dense) {
    const RqaDenseResult r = rqa_dense(problem, pc);
    std::ostringstream csv;
    csv << "iter,psuc,hp_sampled,hp_post,sd_sampled,sd_post\n";
    for (std::size_t i = 0; i < r.psuc.size(); ++i)
      csv << (i + 1) << ',' << format_g12(r.psuc[i]) << ','
          << format_g12(r.hp_sampled[i]) << ','
          << (i < r.hp_post.size() ? format_g12(r.hp_post[i]) : "") << ','
          << format_g12(r.sd_sampled[i]) << ','
          << (i < r.sd_post.size() ? format_g12(r.sd_post[i]) : "") << '\n';
    out.files[inst_name(index, "dense.csv")] = csv.str();
    return out;
  }
  if (dense)
    throw ConfigError("dense mode is implemented for the rqa experiment only");
  const ProtocolResult r =
      c.experiment == "rqa" ? rqa_run(problem, pc) : bqa_run(problem, pc);
  std::string csv = "# ground_energy: " +
                    format_g12(ground_state_energy(problem)) + '\n' +
                    shots_to_csv(r.shots, problem.n());
  out.files[inst_name(index, "shots.csv")] = std::move(csv);
  return out;
}

InstanceArtifacts run_gibbs_instance(const CampaignConfig& c,
                                     std::uint64_t campaign_seed,
                                     std::size_t index) {
  const IsingProblem problem = make_instance(c, campaign_seed, index);
  const DriverSpec driver = DriverSpec::transverse_field(problem.n());
  std::vector<double> gammas;
  for (int i = 0; i < c.gamma_points; ++i)
    gammas.push_back(c.gamma_min + (c.gamma_max - c.gamma_min) * double(i) /
                                       double(c.gamma_points - 1));
  std::ostringstream csv;
  csv << "beta,gamma,hp,free_energy,d2f\n";
  EigCache cache;  // gammas repeat across betas
  for (double beta : c.betas) {
    const GibbsSweep sweep =
        gibbs_hp_sweep(problem, driver, beta, gammas, &cache);
    for (std::size_t i = 0; i < gammas.size(); ++i) {
      csv << format_g12(beta) << ',' << format_g12(gammas[i]) << ','
          << format_g12(sweep.hp[i]) << ',';
      if (!sweep.free_energy.empty()) csv << format_g12(sweep.free_energy[i]);
      csv << ',';
      if (i >= 1 && i + 1 < gammas.size() && !sweep.d2f.empty())
        csv << format_g12(sweep.d2f[i - 1]);
      csv << '\n';
    }
  }
  InstanceArtifacts out;
  out.files[inst_name(index, "sweep.csv")] = csv.str();
  return out;
}

json run_properties_suite(const CampaignConfig& c);

}  // namespace

// --- campaign driver -----------------------------------------------------------------

RunResult run_campaign(const CampaignConfig& config_in,
                       const std::string& out_dir, const RunOptions& opts) {
  CampaignConfig config = config_in;
  const std::uint64_t seed =
      opts.seed_override ? *opts.seed_override : config.seed;
  config.seed = seed;

  std::filesystem::create_directories(out_dir);

  std::map<std::string, std::string> files;
  json summary;
  summary["experiment"] = config.experiment;
  summary["version"] = kToolkitVersion;

  if (config.experiment == "properties") {
    const json table = run_properties_suite(config);
    files["properties.json"] = table.dump(2) + "\n";
    summary["instances"] =
        json::array({derive_properties_summary(files.at("properties.json"))});
  } else {
    const std::size_t count = std::size_t(config.problem.count);
    std::vector<InstanceArtifacts> artifacts(count);
    parallel_for(count, opts.jobs, [&](std::size_t i) {
      if (config.experiment == "msqw")
        artifacts[i] = run_msqw_instance(config, seed, i);
      else if (config.experiment == "pstqa")
        artifacts[i] = run_pstqa_instance(config, seed, i);
      else if (config.experiment == "ansatz")
        artifacts[i] = run_ansatz_instance(config, seed, i);
      else if (config.experiment == "warmstart")
        artifacts[i] = run_warmstart_instance(config, seed, i);
      else if (config.experiment == "rqa" || config.experiment == "bqa")
        artifacts[i] = run_protocol_instance(config, seed, i, opts.dense_mode);
      else if (config.experiment == "gibbs_sweep")
        artifacts[i] = run_gibbs_instance(config, seed, i);
      else
        throw ConfigError("unknown experiment " + config.experiment);
    });
    json instances = json::array();
    for (std::size_t i = 0; i < count; ++i) {
      for (auto& [name, content] : artifacts[i].files)
        files[name] = std::move(content);
      json inst = derive_instance_summary(config.experiment, files, i);
      inst["instance"] = i;
      inst["instance_seed"] = RngStream::derive(seed, i);
      instances.push_back(std::move(inst));
    }
    summary["instances"] = std::move(instances);
  }

  files["summary.json"] = summary.dump(2) + "\n";

  json manifest;
  manifest["version"] = kToolkitVersion;
  manifest["experiment"] = config.experiment;
  manifest["seed"] = seed;
  manifest["config"] = json::parse(config.to_json());
  manifest["config_hash"] = hash_hex(config.to_json());
  json file_hashes;
  for (const auto& [name, content] : files)
    file_hashes[name] = hash_hex(content);
  manifest["files"] = file_hashes;

  RunResult result;
  result.out_dir = out_dir;
  for (const auto& [name, content] : files) {
    write_file(out_dir + "/" + name, content);
    result.files.push_back(name);
  }
  write_file(out_dir + "/manifest.json", manifest.dump(2) + "\n");
  result.files.push_back("manifest.json");
  return result;
}

VerifyReport verify_manifest(const std::string& manifest_path) {
  VerifyReport report;
  const json manifest = json::parse(read_file(manifest_path));
  const std::string dir =
      std::filesystem::path(manifest_path).parent_path().string();
  const std::string base = dir.empty() ? "." : dir;

  std::map<std::string, std::string> files;
  for (const auto& [name, hash] : manifest.at("files").items()) {
    std::string content;
    try {
      content = read_file(base + "/" + name);
    } catch (const std::exception&) {
      report.issues.push_back(
          {name, "<file>", hash.get<std::string>(), "<missing>"});
      continue;
    }
    const std::string actual = hash_hex(content);
    if (actual != hash.get<std::string>())
      report.issues.push_back({name, "<hash>", hash.get<std::string>(), actual});
    files[name] = std::move(content);
  }

  // re-derive the summary from the raw CSVs and compare formatted fields
  if (files.count("summary.json")) {
    const json stored = json::parse(files.at("summary.json"));
    const std::string experiment = manifest.at("experiment").get<std::string>();
    try {
      json rebuilt = json::array();
      if (experiment == "properties") {
        rebuilt.push_back(
            derive_properties_summary(files.at("properties.json")));
      } else {
        const std::size_t count = stored.at("instances").size();
        for (std::size_t i = 0; i < count; ++i)
          rebuilt.push_back(derive_instance_summary(experiment, files, i));
      }
      const json& stored_instances = stored.at("instances");
      for (std::size_t i = 0; i < rebuilt.size(); ++i) {
        for (const auto& [key, value] : rebuilt[i].items()) {
          if (!stored_instances[i].contains(key)) {
            report.issues.push_back(
                {"summary.json", key, value.dump(), "<missing>"});
            continue;
          }
          if (stored_instances[i].at(key) != value)
            report.issues.push_back({"summary.json", key, value.dump(),
                                     stored_instances[i].at(key).dump()});
        }
      }
    } catch (const std::exception& e) {
      report.issues.push_back({"summary.json", "<derivation>", "", e.what()});
    }
  } else {
    report.issues.push_back({"summary.json", "<file>", "", "<missing>"});
  }

  report.pass = report.issues.empty();
  return report;
}

// --- properties battery -----------------------------------------------------------------

namespace {

struct SuiteResult {
  std::string name;
  bool pass;
  std::string detail;
};

json run_properties_suite(const CampaignConfig& c) {
  std::vector<SuiteResult> suites;
  const std::uint64_t seed = c.seed;
  auto add = [&](const std::string& name, bool pass,
                 const std::string& detail) {
    suites.push_back({name, pass, detail});
  };

  {  // matrix-free action vs dense materialisation
    RngStream rng = RngStream::substream(seed, 1);
    double worst = 0.0;
    for (int n = 1; n <= 5; ++n) {
      const IsingProblem p =
          maxcut_problem(gen_binomial_graph(n, 2.0 / 3.0, seed + n));
      HamiltonianSpec h;
      h.driver = DriverSpec::transverse_field(n);
      h.problem = std::make_shared<IsingProblem>(p);
      h.a = 0.8;
      h.b = 0.6;
      const Matrix dense = h.dense();
      for (int rep = 0; rep < 20; ++rep) {
        ComplexVector psi(p.dim());
        for (std::size_t i = 0; i < p.dim(); ++i)
          psi(i) = std::complex<double>(rng.normal(), rng.normal());
        psi /= psi.norm();
        worst = std::max(worst,
                         (h.apply(psi) - dense * psi).norm() / dense.norm());
      }
    }
    add("apply_vs_dense", worst <= 1e-12, "max rel err " + format_g12(worst));
  }

  {  // analytic moments vs spectral moments
    const IsingProblem p =
        maxcut_problem(gen_binomial_graph(8, 2.0 / 3.0, seed + 8));
    HamiltonianSpec h;
    h.driver = DriverSpec::transverse_field(8);
    h.problem = std::make_shared<IsingProblem>(p);
    h.a = 1.1;
    h.b = 0.7;
    const Moments m = moments(h.driver, p, h.a, h.b);
    const auto basis = eig(h, nullptr);
    const double dim = double(p.dim());
    const double mu = basis->values.sum() / dim;
    const double var = basis->values.cwiseAbs2().sum() / dim - mu * mu;
    const double err = std::abs(m.sigma2 - var) / var;
    add("moments_vs_spectrum", err <= 1e-8,
        "sigma2 rel err " + format_g12(err));
  }

  {  // Gibbs passivity under random cyclic unitaries
    RngStream rng = RngStream::substream(seed, 2);
    const IsingProblem p =
        maxcut_problem(gen_binomial_graph(5, 2.0 / 3.0, seed + 3));
    HamiltonianSpec h;
    h.driver = DriverSpec::transverse_field(5);
    h.problem = std::make_shared<IsingProblem>(p);
    h.a = 1.0;
    h.b = 0.7;
    const auto basis = eig(h, nullptr);
    const GibbsModel model = make_gibbs(basis, 0.9);
    const Vector pops = model.populations();
    StateEnsemble initial;
    for (Eigen::Index kk = 0; kk < pops.size(); ++kk)
      initial.push_back(
          {pops(kk), basis->vectors.col(kk).cast<std::complex<double>>()});
    double worst = -1e300;
    for (int rep = 0; rep < 25; ++rep) {
      ComplexMatrix gin(p.dim(), p.dim());
      for (std::size_t i = 0; i < p.dim(); ++i)
        for (std::size_t jj = 0; jj < p.dim(); ++jj)
          gin(i, jj) = std::complex<double>(rng.normal(), rng.normal());
      Eigen::HouseholderQR<ComplexMatrix> qr(gin);
      ComplexMatrix u = qr.householderQ();
      StateEnsemble final_state;
      for (const auto& [prob, state] : initial)
        final_state.push_back({prob, u * state});
      worst = std::max(worst, extractable_work(h, initial, final_state));
    }
    add("gibbs_passivity", worst <= 1e-10, "max W " + format_g12(worst));
  }

  {  // fit_beta composed with the Gibbs energy is the identity
    const IsingProblem p = sk_problem(6, seed + 11);
    HamiltonianSpec h;
    h.driver = DriverSpec::transverse_field(6);
    h.problem = std::make_shared<IsingProblem>(p);
    h.a = 0.9;
    h.b = 1.0;
    const auto basis = eig(h, nullptr);
    const double width = basis->spectral_width();
    double worst = 0.0;
    for (double beta : {0.01 / width, 1.0 / width, 10.0 / width, 45.0 / width}) {
      const GibbsModel model = make_gibbs(basis, beta);
      worst = std::max(
          worst, std::abs(fit_beta(basis->values, model.energy()).beta - beta) /
                     std::max(beta, 1e-12));
    }
    add("beta_roundtrip", worst <= 1e-8, "max rel err " + format_g12(worst));
  }

  {  // cyclic transition kernel properties
    const IsingProblem p =
        maxcut_problem(gen_binomial_graph(6, 2.0 / 3.0, seed + 5));
    HamiltonianSpec h;
    h.driver = DriverSpec::transverse_field(6);
    h.problem = std::make_shared<IsingProblem>(p);
    h.b = 1.0;
    const Schedule drive =
        Schedule::square_gaussian(Channel::DriverCoeff, 1.0, 2.5, 1.0, 5.0);
    const Matrix tp = transition_matrix(cyclic_unitary(h, drive));
    double sum_dev = 0.0;
    for (Eigen::Index i = 0; i < tp.rows(); ++i)
      sum_dev = std::max({sum_dev, std::abs(tp.row(i).sum() - 1.0),
                          std::abs(tp.col(i).sum() - 1.0)});
    add("double_stochasticity", sum_dev <= 1e-9,
        "max sum dev " + format_g12(sum_dev));
    const double asym = (tp - tp.transpose()).cwiseAbs().maxCoeff();
    add("transition_symmetry", asym <= 1e-9, "max asym " + format_g12(asym));

    Vector energies(p.dim());
    for (std::size_t z = 0; z < p.dim(); ++z) energies(z) = p.energy(z);
    bool no_cooling = true;
    for (double beta : {0.3, 2.0}) {
      Vector dist(p.dim());
      for (std::size_t z = 0; z < p.dim(); ++z)
        dist(z) = std::exp(-beta * (p.energy(z) - ground_state_energy(p)));
      dist /= dist.sum();
      if ((tp * dist).dot(energies) < dist.dot(energies) - 1e-10)
        no_cooling = false;
    }
    add("passive_no_go", no_cooling, "Gibbs string ensembles under the kernel");
  }

  {  // warm-start ensemble no-go
    bool ok = true;
    double min_gap = 1e300;
    for (int i = 0; i < 5; ++i) {
      const IsingProblem p =
          maxcut_problem(gen_binomial_graph(6, 2.0 / 3.0, seed + 20 + i));
      const WarmstartResult r = warmstart_ctqw(p, 0.5, std::nullopt);
      min_gap = std::min(min_gap, r.hp_time_avg - r.hp_initial);
      if (r.hp_time_avg < r.hp_initial - 1e-10) ok = false;
    }
    add("warmstart_ensemble_no_go", ok, "min heating " + format_g12(min_gap));
  }

  {  // thermal-model conservation laws on a small instance; the start is
     // deliberately warmer than the driver ground state, whose isentrope
     // leaves the reachable energy range at this small dimension
    const IsingProblem p =
        maxcut_problem(gen_binomial_graph(6, 2.0 / 3.0, seed + 31));
    auto shared = std::make_shared<IsingProblem>(p);
    ExactSpectrumBackend backend(DriverSpec::transverse_field(6), shared);
    const Schedule a = Schedule::linear(Channel::DriverCoeff, 1.3, 0.3, 6.0);
    const Schedule b = Schedule::linear(Channel::ProblemCoeff, 0.3, 1.3, 6.0);
    const double e0 = -0.55 * 6.0 * 1.3;
    PstqaOptions opts;
    opts.rtol = 1e-10;
    const PstqaTrajectory traj = pstqa_solve(backend, a, b, e0, {6.0}, opts);
    const double budget = 1e-6 * std::abs(traj.sd.front());
    add("pstqa_sd_conservation", traj.sd_drift() <= budget,
        "drift " + format_g12(traj.sd_drift()));
    const double dev =
        timescale_invariance_check(backend, a, b, e0, {1.0, 3.0}, 5, opts);
    add("pstqa_tf_invariance", dev <= 1e-6, "max dev " + format_g12(dev));
    const Schedule a2 = Schedule::tabulated(
        Channel::DriverCoeff, {{0.0, 1.3}, {3.0, 0.3}, {6.0, 0.3}}, 6.0);
    const Schedule b2 = Schedule::tabulated(
        Channel::ProblemCoeff, {{0.0, 0.3}, {3.0, 0.3}, {6.0, 1.3}}, 6.0);
    const PathIndependenceReport rep =
        path_independence_check(backend, a, b, a2, b2, e0, opts);
    add("pstqa_path_independence",
        rep.hp_diff <= 1e-4 * std::abs(traj.hp.back()),
        "hp diff " + format_g12(rep.hp_diff));
  }

  {  // two-register entropy ledger
    const IsingProblem p =
        maxcut_problem(gen_binomial_graph(5, 2.0 / 3.0, seed + 41));
    HamiltonianSpec h;
    h.driver = DriverSpec::transverse_field(5);
    h.problem = std::make_shared<IsingProblem>(p);
    h.b = 1.0;
    const Schedule drive =
        Schedule::square_gaussian(Channel::DriverCoeff, 1.0, 2.0, 0.8, 4.0);
    std::vector<std::pair<std::uint64_t, double>> dist = {
        {0, 0.25}, {7, 0.25}, {13, 0.25}, {21, 0.25}};
    const EntropyLedger ledger = entropy_accounting(dist, [&](std::uint64_t z) {
      return apply_cycle(h, drive, basis_state(5, z), 1e-10);
    });
    const double s0 = std::log(4.0);
    add("entropy_ledger", std::abs(ledger.sd_c - s0) <= 1e-12,
        "sd_c - S0 = " + format_g12(ledger.sd_c - s0));
  }

  {  // fixed-beta Gibbs sweep monotonicity
    const IsingProblem p =
        maxcut_problem(gen_binomial_graph(6, 2.0 / 3.0, seed + 51));
    std::vector<double> gammas;
    for (int i = 0; i <= 40; ++i) gammas.push_back(0.05 + 0.08 * i);
    bool monotone = true;
    for (double beta : {0.1, 1.0, 5.0}) {
      const GibbsSweep sweep =
          gibbs_hp_sweep(p, DriverSpec::transverse_field(6), beta, gammas);
      for (std::size_t i = 1; i < sweep.hp.size(); ++i)
        if (sweep.hp[i] > sweep.hp[i - 1] + 1e-9) monotone = false;
    }
    add("gibbs_sweep_monotone", monotone, "3 betas, 41-point grid");
  }

  {  // spectrum shift invariance of expectations
    const IsingProblem p = sk_problem(5, seed + 61);
    HamiltonianSpec h;
    h.driver = DriverSpec::transverse_field(5);
    h.problem = std::make_shared<IsingProblem>(p);
    h.a = 1.0;
    h.b = 0.8;
    const auto basis = eig(h, nullptr);
    auto shifted = std::make_shared<EigResult>();
    shifted->values = basis->values.array() + 2.5;
    shifted->vectors = basis->vectors;
    HamiltonianSpec hp_only = h;
    hp_only.a = 0.0;
    hp_only.b = 1.0;
    const double v0 = gibbs_expectation(make_gibbs(basis, 0.6), hp_only);
    const double v1 = gibbs_expectation(make_gibbs(shifted, 0.6), hp_only);
    add("shift_invariance", std::abs(v0 - v1) <= 1e-10,
        "delta " + format_g12(v0 - v1));
  }

  json out;
  json list = json::array();
  int passed = 0;
  for (const auto& s : suites) {
    list.push_back({{"name", s.name}, {"pass", s.pass}, {"detail", s.detail}});
    if (s.pass) ++passed;
  }
  out["suites"] = list;
  out["passed"] = passed;
  out["failed"] = int(suites.size()) - passed;
  return out;
}

}  // namespace

std::string config_schema_text() {
  return R"({
  "experiment": "msqw | pstqa | ansatz | warmstart | rqa | bqa | gibbs_sweep | properties",
  "seed": 1234,
  "problem": {"family": "maxcut | sk", "n": 10, "p": 0.6667, "count": 1},

  "msqw":      {"gammas": [0.1, 0.25, 0.45, 0.7, 1.0], "stage_length": 6.0,
                "burn_in_frac": 0.2, "samples_per_stage": 40},
  "pstqa":     {"backend": "exact | gaussian | emg", "a0": 1.3, "a1": 0.3,
                "b0": 0.3, "b1": 1.3, "t_f": 12.0, "grid_points": 48,
                "compare_schrodinger": true, "second_path": false},
  "ansatz":    {"a0": 1.1, "a1": 0.1, "b0": 0.1, "b1": 1.1, "t_f": 10.0,
                "grid_points": 100, "compare_schrodinger": true},
  "warmstart": {"g": 0.5, "initial": "ensemble | random_string", "t1": 20.0,
                "grid_points": 200},
  "rqa":       {"k_max": 100, "k": 10, "t_cyc": 10.0, "drive_amplitude": 1.0,
                "drive_width_frac": 0.2},
  "bqa":       {"k_max": 100, "k": 10, "t_cyc": 10.0, "drive_amplitude": 1.0,
                "drive_width_frac": 0.2, "alpha0": null,
                "alpha_increase": false, "reset_alpha_on_accept": true},
  "gibbs_sweep": {"betas": [0.1, 1.0, 5.0], "gamma_min": 0.05,
                  "gamma_max": 3.0, "gamma_points": 50},
  "properties": {},

  "tolerances": {"integrator_rtol": 1e-8, "pstqa_rtol": 1e-8}
}
Only the block matching "experiment" is read; unknown keys anywhere are
rejected. Per-instance seeds derive from (seed, instance index).
)";
}

}  // namespace quench
