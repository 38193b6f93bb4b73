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

#include <deque>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "quench/operators.hpp"
#include "quench/schedule.hpp"

namespace quench {

// Partition-function backend for the thermal annealing equations. ln Z uses
// the normalised-trace convention ln Tr' e^{-beta H(A,B)}; additive constants
// cancel in every derivative the equations consume. The thermal expectations
// are provided in pole-free form (finite at beta = 0), with the derivative
// identities d(lnZ)/dA = -beta <H_d> and d(lnZ)/dB = -beta <H_p> exact for
// every backend.
class PartitionBackend {
 public:
  virtual ~PartitionBackend() = default;
  virtual std::string name() const = 0;

  virtual double log_z(double beta, double a, double b) const = 0;
  virtual double energy(double beta, double a, double b) const = 0;  // -dlnZ/dbeta
  virtual double hd(double beta, double a, double b) const = 0;
  virtual double hp(double beta, double a, double b) const = 0;

  // invert energy(beta) = e on the positive-temperature branch
  virtual double solve_beta(double e, double a, double b,
                            double hint = -1.0) const = 0;

  double dlogz_dbeta(double beta, double a, double b) const {
    return -energy(beta, a, b);
  }
  double dlogz_da(double beta, double a, double b) const {
    return -beta * hd(beta, a, b);
  }
  double dlogz_db(double beta, double a, double b) const {
    return -beta * hp(beta, a, b);
  }
};

// Exact backend: dense spectrum of H(A,B) = A H_d + B H_p per coefficient
// pair, with the eigenvector work reduced to the per-level diagonal elements
// <E_k|H_d|E_k> and <E_k|H_p|E_k>. A small LRU keeps recently visited
// coefficient pairs (the ODE solver's FSAL stage revisits them).
class ExactSpectrumBackend : public PartitionBackend {
 public:
  ExactSpectrumBackend(DriverSpec driver,
                       std::shared_ptr<const IsingProblem> problem,
                       std::size_t lru_capacity = 16);

  std::string name() const override { return "exact"; }
  double log_z(double beta, double a, double b) const override;
  double energy(double beta, double a, double b) const override;
  double hd(double beta, double a, double b) const override;
  double hp(double beta, double a, double b) const override;
  double solve_beta(double e, double a, double b, double hint) const override;

  std::size_t decompositions() const { return decompositions_; }

 private:
  struct Node {
    double a, b;
    Vector evals;   // ascending
    Vector dvals;   // <E_k|H_d|E_k>
    Vector pvals;   // <E_k|H_p|E_k>
  };
  std::shared_ptr<const Node> node_at(double a, double b) const;

  DriverSpec driver_;
  std::shared_ptr<const IsingProblem> problem_;
  mutable std::mutex mutex_;
  mutable std::deque<std::shared_ptr<const Node>> lru_;
  std::size_t capacity_;
  mutable std::size_t decompositions_ = 0;
};

// Thermal trajectory of the annealing equations: the energy ODE
// dE/dt = A'(t) <H_d> + B'(t) <H_p> with beta re-solved from E at every
// evaluation (index-1 DAE), plus the derived series. sd = ln Z + beta E is
// conserved by the equations; its drift measures solver error.
struct PstqaTrajectory {
  std::vector<double> times, s, a, b, energy, beta, hd, hp, sd;
  std::string backend;

  std::size_t size() const { return times.size(); }
  double sd_drift() const;
  std::string to_csv() const;  // columns t,s,A,B,energy,beta,hd,hp,sd
};

// Thermal-model breakdown: beta crossed into the negative-temperature branch
// (or left the solvable range) at the reported time.
struct PstqaBreakdown : std::runtime_error {
  PstqaBreakdown(double when, const std::string& msg)
      : std::runtime_error(msg + " (t = " + std::to_string(when) + ")"),
        t(when) {}
  double t;
};

struct PstqaOptions {
  double rtol = 1e-8;  // embedded-pair relative tolerance on E
  long max_steps = 100000;
};

// Solve the annealing equations from initial energy e0. Output samples land
// exactly on the requested grid times (the solver clips its steps there);
// natural step points in between are included as well.
PstqaTrajectory pstqa_solve(const PartitionBackend& backend,
                            const Schedule& a_sched, const Schedule& b_sched,
                            double e0, const std::vector<double>& grid,
                            const PstqaOptions& opts = {});

// initial energy of a pure state under the schedule's t = 0 coefficients
double initial_energy(const HamiltonianSpec& h0, const Schedule& a_sched,
                      const Schedule& b_sched, const ComplexVector& psi0);

struct PathIndependenceReport {
  double energy_diff = 0.0;  // |E_path1(end) - E_path2(end)|
  double hp_diff = 0.0;
  PstqaTrajectory path1, path2;
};

// Two schedule pairs sharing endpoints and e0 must land on the same final
// energy and <H_p>; the discrepancy is returned.
PathIndependenceReport path_independence_check(
    const PartitionBackend& backend, const Schedule& a1, const Schedule& b1,
    const Schedule& a2, const Schedule& b2, double e0,
    const PstqaOptions& opts = {});

struct EntropySeries {
  std::vector<double> sd;
  double max_drift = 0.0;
};

// Recompute sd(t) = ln Z(beta, A, B) + beta E along a solved trajectory and
// report the maximum drift from sd(0).
EntropySeries pstqa_entropy(const PartitionBackend& backend,
                            const PstqaTrajectory& traj);

// Re-run with the time axis stretched by each factor; the model depends only
// on normalised time, so <H_p>(s) must coincide. Returns the max deviation.
double timescale_invariance_check(const PartitionBackend& backend,
                                  const Schedule& a_sched,
                                  const Schedule& b_sched, double e0,
                                  const std::vector<double>& tf_scales,
                                  int s_samples = 9,
                                  const PstqaOptions& opts = {});

}  // namespace quench
