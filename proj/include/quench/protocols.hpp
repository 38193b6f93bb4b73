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

#include <functional>
#include <optional>

#include "quench/dynamics.hpp"
#include "quench/rng.hpp"
#include "quench/statmech.hpp"

namespace quench {

// dense unitaries and transition matrices are materialised up to this size
inline constexpr int kDenseProtocolCap = 12;

// --- multi-stage quantum walks -------------------------------------------------

struct StageSummary {
  int stage = 0;
  double t_start = 0.0, t_end = 0.0, gamma = 0.0;
  double hp_avg = 0.0;   // time average after burn-in
  double hp_std = 0.0;   // fluctuation band
  double ens_hp = 0.0;   // diagonal-ensemble steady value
  double eth_hp = 0.0;   // Gibbs prediction at the energy-matched temperature
  double eth_beta = 0.0;
  bool eth_ok = false;   // false when the stage energy was out of beta range
};

struct MsqwRun {
  Trajectory traj;
  std::vector<StageSummary> stages;
};

// Evolve |+...+> under H = H_d + Gamma(t) H_p for a non-decreasing staircase
// and report per-stage time averages with the diagonal-ensemble and ETH
// overlays. Burn-in is the given fraction of each stage length.
MsqwRun msqw_run(const IsingProblem& problem, const Schedule& staircase,
                 double burn_in_frac = 0.2, int samples_per_stage = 40,
                 EigCache* cache = &EigCache::global());

std::vector<MsqwRun> msqw_campaign(const std::vector<IsingProblem>& problems,
                                   const Schedule& staircase,
                                   double burn_in_frac = 0.2,
                                   int samples_per_stage = 40);

// --- warm-started CTQWs ---------------------------------------------------------

struct WarmstartResult {
  double hp_initial = 0.0;
  double hp_time_avg = 0.0;  // infinite-time (diagonal-ensemble) average
  std::vector<std::pair<double, double>> hp_distribution;  // (value, prob)
  double energy_identity_residual = 0.0;
  bool precondition_met = false;  // <z*|H_p|z*> < Tr'H_p
  Trajectory traj;                // finite-time trace, when grid_points > 0
};

// CTQW under H = g H_d + H_p from an H_p eigenstate (initial = bitstring) or
// from the uniform ensemble over all better-than-random strings
// (initial = nullopt). All averages are exact diagonal-ensemble values.
WarmstartResult warmstart_ctqw(const IsingProblem& problem, double g,
                               std::optional<std::uint64_t> initial,
                               double t1 = 0.0, int grid_points = 0,
                               EigCache* cache = &EigCache::global());

// uniform distribution over {s : H_p(s) < Tr'H_p}
std::vector<double> below_mean_uniform(const IsingProblem& problem);

// --- cyclic drives ---------------------------------------------------------------

// Propagator of one cycle of H(t) = b H_p + H_b + G(t) H_d. The drive must be
// cyclic: |G(0)|, |G(t_cyc)| <= 1e-8 * max|G|. Deterministic given inputs.
ComplexMatrix cyclic_unitary(const HamiltonianSpec& h0, const Schedule& drive,
                             double rtol = 1e-10);

// P[j][s] = |<j|U|s>|^2; doubly stochastic (rows and columns sum to 1e-9)
Matrix transition_matrix(const ComplexMatrix& u, double tol = 1e-9);

// single-cycle evolution of one state (used by the sampled shot loops)
ComplexVector apply_cycle(const HamiltonianSpec& h0, const Schedule& drive,
                          const ComplexVector& psi, double rtol = 1e-8);

// --- reverse / biased annealing shot loops -----------------------------------------

struct ShotRecord {
  int shot = 0;
  std::uint64_t input = 0, output = 0;
  double hp_in = 0.0, hp_out = 0.0;
  double alpha = 0.0;
  bool accepted = false;  // accepted <=> hp_out < hp_in (strict)
  double work = 0.0;      // extractable work of the cycle, E_init - E_final
};

struct ProtocolConfig {
  int k_max = 100;  // shot budget
  int k = 10;       // consecutive stalls before termination
  double alpha0 = -1.0;          // < 0: use sqrt(Tr' H_p^2)
  bool alpha_increase = false;   // raise alpha on stalls instead of lowering
  bool reset_alpha_on_accept = true;
  double drive_amplitude = 1.0;
  double drive_width_frac = 0.2;  // width as a fraction of t_cyc
  double t_cyc = 10.0;
  double integrator_rtol = 1e-8;
  std::uint64_t seed = 0;

  Schedule drive_schedule() const;
  void validate() const;
};

struct ProtocolSummary {
  bool found_ground = false;
  int shots_used = 0;
  double best_hp = 0.0;
  double approx_ratio = 0.0;
};

struct ProtocolResult {
  std::vector<ShotRecord> shots;
  ProtocolSummary summary;
};

// Reverse quantum annealing: sampled shot loop with strict-descent
// acceptance. The initial string is drawn from initial_dist (empty: uniform
// over the better-than-random strings).
ProtocolResult rqa_run(const IsingProblem& problem, const ProtocolConfig& config,
                       const std::vector<double>& initial_dist = {});

// Biased quantum annealing: as RQA plus the local bias whose sign pattern
// tracks the current best string. alpha starts at alpha0 and moves by
// alpha0/k on every non-improving shot (down by default), clamping at 0;
// acceptance resets it when configured.
ProtocolResult bqa_run(const IsingProblem& problem, const ProtocolConfig& config,
                       std::optional<std::uint64_t> initial = std::nullopt);

// Ensemble-exact RQA: iterate the doubly-stochastic kernel on the classical
// distribution, tracking the success probability of Eq-style post-selection.
struct RqaDenseResult {
  std::vector<double> psuc;        // P(lower output) per iteration
  std::vector<double> hp_sampled;  // <H_p> straight after the cycle
  std::vector<double> hp_post;     // <H_p> after post-selection
  std::vector<double> sd_sampled;  // diagonal entropies (natural log)
  std::vector<double> sd_post;
  int iterations = 0;
};

RqaDenseResult rqa_dense(const IsingProblem& problem,
                         const ProtocolConfig& config,
                         const std::vector<double>& initial_dist = {},
                         double inv_psuc_cutoff = 1e6);

// --- two-register entropy accounting ------------------------------------------------

struct EntropyLedger {
  double sd_joint = 0.0;
  double sd_q = 0.0;
  double sd_c = 0.0;
};

// Apply the controlled cycle U = sum_z U_z (x) |z><z| to a classical
// distribution copied into the control register, in block form (each block a
// 2^n state, never a 4^n matrix), and account the diagonal entropies of the
// joint state and both register marginals in the computational bases.
EntropyLedger entropy_accounting(
    const std::vector<std::pair<std::uint64_t, double>>& dist,
    const std::function<ComplexVector(std::uint64_t)>& cycle);

std::string shots_to_csv(const std::vector<ShotRecord>& shots, int n);

}  // namespace quench
