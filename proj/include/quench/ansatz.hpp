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

#include "quench/operators.hpp"
#include "quench/pstqa.hpp"
#include "quench/schedule.hpp"

namespace quench {

// Coefficient-dependent moments of the composite spectrum, with analytic
// partials in (a, b). Built from the structural traces (one pass over the
// energy table; closed form for the transverse field), so evaluation cost is
// independent of the Hilbert-space dimension:
//   mu(a,b)     = a Tr'H_d + b Tr'H_p
//   sigma2(a,b) = a^2 Tr'Hd~^2 + 2ab Tr'Hd~Hp~ + b^2 Tr'Hp~^2
//   delta(a,b)  = b * cbrt(m3p / 2)   (transverse-field driver)
// For MAX-CUT these reduce to mu = 0, sigma2 = a^2 n + b^2 kappa2 and
// delta^3 = 3 kappa3 b^3.
struct AnalyticMoments {
  double trd_mean = 0.0, trp_mean = 0.0;
  double trd2 = 0.0, trp2 = 0.0, trdp = 0.0;
  double m3p = 0.0;  // third central moment of the energy table
  double delta_slope = 0.0;  // cbrt(m3p / 2); delta = b * delta_slope

  static AnalyticMoments for_problem(const DriverSpec& driver,
                                     const IsingProblem& problem);

  double mu(double a, double b) const { return a * trd_mean + b * trp_mean; }
  double dmu_da() const { return trd_mean; }
  double dmu_db() const { return trp_mean; }
  double sigma2(double a, double b) const {
    return a * a * trd2 + 2.0 * a * b * trdp + b * b * trp2;
  }
  double dsigma2_da(double a, double b) const { return 2.0 * (a * trd2 + b * trdp); }
  double dsigma2_db(double a, double b) const { return 2.0 * (b * trp2 + a * trdp); }
  double sigma(double a, double b) const { return std::sqrt(sigma2(a, b)); }
  double delta(double b) const { return b * delta_slope; }
  double ddelta_db() const { return delta_slope; }
};

// Gaussian density-of-states model: ln Z = -beta mu + beta^2 sigma^2 / 2,
// so E = mu - beta sigma^2 and beta(E) = (mu - E) / sigma^2 in closed form.
class GaussianBackend : public PartitionBackend {
 public:
  explicit GaussianBackend(AnalyticMoments m) : m_(m) {}
  std::string name() const override { return "gaussian"; }
  double log_z(double beta, double a, double b) const override;
  double energy(double beta, double a, double b) const override;
  double hd(double beta, double a, double b) const override;
  double hp(double beta, double a, double b) const override;
  double solve_beta(double e, double a, double b, double hint) const override;
  const AnalyticMoments& moments() const { return m_; }

 private:
  AnalyticMoments m_;
};

// Exponentially modified Gaussian model with fitting parameters
// nu = mu - delta, s^2 = sigma^2 - delta^2, lambda = 1/delta:
// ln Z = -ln(1 + beta delta) - nu beta + beta^2 s^2 / 2.
class EmgBackend : public PartitionBackend {
 public:
  explicit EmgBackend(AnalyticMoments m) : m_(m) {}
  std::string name() const override { return "emg"; }
  double log_z(double beta, double a, double b) const override;
  double energy(double beta, double a, double b) const override;
  double hd(double beta, double a, double b) const override;
  double hp(double beta, double a, double b) const override;
  double solve_beta(double e, double a, double b, double hint) const override;
  const AnalyticMoments& moments() const { return m_; }

 private:
  AnalyticMoments m_;
};

// beta(E) from the quadratic-root inversion of the EMG energy relation. The
// printed branch is validated by a round-trip residual; if it fails, the
// other branch is tried and a diagnostic is logged.
double emg_beta(const AnalyticMoments& m, double energy, double a, double b);

// (<H_d>, <H_p>) from the EMG derivative formulas at fixed beta
std::pair<double, double> emg_expectations(const AnalyticMoments& m, double a,
                                           double b, double beta);

// Fully analytic Gaussian solution of the annealing equations:
// E(t) = mu(t) + c sigma(t) with c fixed by the initial energy, and
// beta(t) = -c / sigma(t). No ODE integration.
PstqaTrajectory gaussian_closed_form(const AnalyticMoments& m,
                                     const Schedule& a_sched,
                                     const Schedule& b_sched, double e0,
                                     const std::vector<double>& grid);

// closed-form Gaussian MAX-CUT <H_p(t)> with the |+...+> initial state
double gaussian_maxcut_hp(int n, double kappa2, double a0, double b0, double a,
                          double b);

// Annealing equations under the EMG backend; cost independent of 2^n when
// analytic moments exist.
PstqaTrajectory emg_pstqa(const IsingProblem& problem, const DriverSpec& driver,
                          const Schedule& a_sched, const Schedule& b_sched,
                          double e0, const std::vector<double>& grid,
                          const PstqaOptions& opts = {});

}  // namespace quench
