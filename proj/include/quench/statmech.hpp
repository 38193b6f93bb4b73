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

#include <memory>
#include <utility>
#include <vector>

#include "quench/operators.hpp"

namespace quench {

// Shannon entropy of energy-eigenbasis populations, -sum p ln p with
// 0 ln 0 := 0. Natural log; base 2 offered for display.
double diagonal_entropy(const Vector& populations, bool base2 = false);

// Populations over the instantaneous energy eigenstates of a Hamiltonian:
// the long-time dephased (time-averaged) description of a pure state.
struct DiagonalEnsemble {
  Vector populations;
  EigHandle basis;
  double energy = 0.0;

  double entropy(bool base2 = false) const {
    return diagonal_entropy(populations, base2);
  }
};

DiagonalEnsemble diagonal_ensemble(const ComplexVector& psi,
                                   const HamiltonianSpec& h,
                                   EigCache* cache = &EigCache::global());

// Ensemble from a classical mixture of pure states (probability, state).
using StateEnsemble = std::vector<std::pair<double, ComplexVector>>;
DiagonalEnsemble diagonal_ensemble(const StateEnsemble& mixture,
                                   const HamiltonianSpec& h,
                                   EigCache* cache = &EigCache::global());

// <E_k|A|E_k> for every eigenvector in the basis
Vector eigenbasis_diagonal(const EigResult& basis, const HamiltonianSpec& observable);

// sum_k p_k <E_k|A|E_k>
double steady_expectation(const DiagonalEnsemble& ens,
                          const HamiltonianSpec& observable);

// --- Gibbs / ETH ------------------------------------------------------------

enum class BetaRangeReason { NegativeTemperature, BelowGroundState, BeyondBracket };

struct BetaRangeError : std::runtime_error {
  BetaRangeError(BetaRangeReason r, const std::string& msg)
      : std::runtime_error(msg), reason(r) {}
  BetaRangeReason reason;
};

struct BetaFit {
  double beta = 0.0;
  double log_z = 0.0;  // ln Tr e^{-beta H} (full trace)
  double energy = 0.0;
  double residual = 0.0;
};

// Solve -d(ln Z)/d[beta] = energy on the positive-temperature branch.
// The bracket is [0, beta_max_scale / spectral_width]; energies that would
// need beta outside it are rejected, with the reason distinguishing a
// negative-temperature request from an energy below the ground state.
BetaFit fit_beta(const Vector& evals_ascending, double energy,
                 double beta_max_scale = 50.0, double hint = -1.0);

// full-trace ln Z at fixed beta (log-sum-exp stabilised)
double log_partition(const Vector& evals, double beta);

struct GibbsModel {
  double beta = 0.0;
  EigHandle basis;
  double log_z = 0.0;

  Vector populations() const;
  double energy() const;
};

GibbsModel make_gibbs(EigHandle basis, double beta);
GibbsModel gibbs_for_energy(EigHandle basis, double energy);

double gibbs_expectation(const GibbsModel& model,
                         const HamiltonianSpec& observable);

// --- work and passivity -----------------------------------------------------

// W = Tr[H (rho_initial - rho_final)], the extractable work of a process
// taking rho_initial to rho_final under the cycle Hamiltonian h. Mixed states
// enter as (probability, state) ensembles, never as dense density matrices.
double extractable_work(const HamiltonianSpec& h, const StateEnsemble& initial,
                        const StateEnsemble& final_state);

// true iff the populations are non-increasing with energy; ties between
// degenerate levels never violate passivity.
bool is_passive(const Vector& populations, const Vector& evals_ascending,
                double pop_tol = 1e-12);

// --- fixed-temperature Gibbs sweep -------------------------------------------

struct GibbsSweep {
  std::vector<double> gammas;
  std::vector<double> hp;           // Gibbs <H_p> at each gamma
  std::vector<double> free_energy;  // -ln Z / beta (empty when beta == 0)
  std::vector<double> d2f;          // central second difference of F(gamma)
};

// Gibbs <H_p> of H = H_d + gamma H_p at fixed beta, for each gamma, with the
// numerical concavity report on the free energy.
GibbsSweep gibbs_hp_sweep(const IsingProblem& problem, const DriverSpec& driver,
                          double beta, const std::vector<double>& gammas,
                          EigCache* cache = &EigCache::global());

}  // namespace quench
