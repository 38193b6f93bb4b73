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

#include <optional>
#include <vector>

#include "quench/operators.hpp"
#include "quench/schedule.hpp"

namespace quench {

struct IntegrationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Observable time series from a Schrodinger propagation. Samples sit on the
// requested grid; states are stored only when requested.
struct Trajectory {
  std::vector<double> times;
  std::vector<double> hp;      // <H_p(t)>
  std::vector<double> hd;      // <H_d(t)>
  std::vector<double> energy;  // <H(t)>
  std::vector<double> sd;      // diagonal entropy, when requested
  std::vector<ComplexVector> states;

  std::size_t size() const { return times.size(); }
  std::string to_csv() const;  // columns t,hp,hd,energy,sd
};

struct EvolveOptions {
  bool store_states = false;
  bool compute_sd = false;
  double rtol = 1e-8;
  double norm_guard = 1e-8;       // error out past this norm drift
  bool force_integrator = false;  // skip the exact-segment fast path
  EigCache* cache = &EigCache::global();
};

// Schrodinger propagation of psi0 under the template Hamiltonian with its
// coefficients driven by the schedules (at most one per channel; channels
// without a schedule keep the template value). Piecewise-constant schedules
// propagate exactly per segment via the spectrum; anything smooth runs
// through an adaptive embedded RK pair with a per-step norm guard.
Trajectory evolve(const HamiltonianSpec& h0,
                  const std::vector<Schedule>& schedules,
                  const ComplexVector& psi0, const std::vector<double>& grid,
                  const EvolveOptions& opts = {});

// Time average of <H_p> over (stage_start + burn_in, stage_end].
double stage_average(const Trajectory& traj, double stage_start,
                     double stage_end, double burn_in);

// Standard deviation of <H_p> over the same window (fluctuation band).
double stage_std(const Trajectory& traj, double stage_start, double stage_end,
                 double burn_in);

// Work extractable from the cyclic quench gamma1 -> gamma2 -> gamma1
// (coefficients on the problem channel, driver held at the template value):
// W = (gamma2 - gamma1) * (<H_p(t2)> - <H_p(t1)>). Planck's principle says
// this is <= 0 up to stage fluctuations.
double cyclic_quench_work(const HamiltonianSpec& h0, double gamma1,
                          double gamma2, double t1, double t2,
                          const ComplexVector& psi0,
                          const EvolveOptions& opts = {});

// uniform superposition |+...+>, the transverse-field ground state
ComplexVector plus_state(int n);

// computational basis state |z>
ComplexVector basis_state(int n, std::uint64_t z);

}  // namespace quench
