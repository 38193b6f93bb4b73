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

#include "quench/ansatz.hpp"

#include <cmath>
#include <limits>
#include <iostream>

namespace quench {

AnalyticMoments AnalyticMoments::for_problem(const DriverSpec& driver,
                                             const IsingProblem& problem) {
  const Moments m = moments(driver, problem, 1.0, 1.0);
  if (driver.kind != DriverKind::TransverseField)
    throw std::invalid_argument(
        "AnalyticMoments: only the transverse-field driver has (a,b)-separable "
        "moments");
  AnalyticMoments out;
  out.trd_mean = m.trd_mean;
  out.trp_mean = m.trp_mean;
  out.trd2 = m.trd2;
  out.trp2 = m.trp2;
  out.trdp = m.trdp;
  out.m3p = m.m3p;
  out.delta_slope = std::cbrt(m.m3p / 2.0);
  return out;
}

// --- Gaussian ----------------------------------------------------------------

double GaussianBackend::log_z(double beta, double a, double b) const {
  return -beta * m_.mu(a, b) + 0.5 * beta * beta * m_.sigma2(a, b);
}

double GaussianBackend::energy(double beta, double a, double b) const {
  return m_.mu(a, b) - beta * m_.sigma2(a, b);
}

double GaussianBackend::hd(double beta, double a, double b) const {
  return m_.dmu_da() - 0.5 * beta * m_.dsigma2_da(a, b);
}

double GaussianBackend::hp(double beta, double a, double b) const {
  return m_.dmu_db() - 0.5 * beta * m_.dsigma2_db(a, b);
}

double GaussianBackend::solve_beta(double e, double a, double b,
                                   double /*hint*/) const {
  const double s2 = m_.sigma2(a, b);
  if (s2 <= 0.0)
    throw std::invalid_argument("GaussianBackend: sigma^2 = 0");
  return (m_.mu(a, b) - e) / s2;
}

// --- EMG ----------------------------------------------------------------------

double EmgBackend::log_z(double beta, double a, double b) const {
  const double delta = m_.delta(b);
  const double one_plus = 1.0 + beta * delta;
  if (one_plus <= 0.0)
    throw std::invalid_argument("EmgBackend: pole at 1 + beta*delta <= 0");
  const double nu = m_.mu(a, b) - delta;
  const double s2 = m_.sigma2(a, b) - delta * delta;
  return -std::log(one_plus) - nu * beta + 0.5 * beta * beta * s2;
}

double EmgBackend::energy(double beta, double a, double b) const {
  const double delta = m_.delta(b);
  const double one_plus = 1.0 + beta * delta;
  if (one_plus <= 0.0)
    throw std::invalid_argument("EmgBackend: pole at 1 + beta*delta <= 0");
  return m_.mu(a, b) - beta * m_.sigma2(a, b) +
         beta * beta * delta * delta * delta / one_plus;
}

double EmgBackend::hd(double beta, double a, double b) const {
  return emg_expectations(m_, a, b, beta).first;
}

double EmgBackend::hp(double beta, double a, double b) const {
  return emg_expectations(m_, a, b, beta).second;
}

double EmgBackend::solve_beta(double e, double a, double b,
                              double /*hint*/) const {
  return emg_beta(m_, e, a, b);
}

double emg_beta(const AnalyticMoments& m, double energy, double a, double b) {
  const double mu = m.mu(a, b);
  const double sigma2 = m.sigma2(a, b);
  const double delta = m.delta(b);
  const double de = energy - mu;

  if (sigma2 <= 0.0) throw std::invalid_argument("emg_beta: sigma^2 = 0");
  const double s2 = sigma2 - delta * delta;
  if (std::abs(delta) < 1e-12 * std::sqrt(sigma2)) {
    // Gaussian limit of the quadratic root
    return -de / sigma2;
  }
  if (s2 <= 0.0)
    throw std::invalid_argument("emg_beta: delta^2 >= sigma^2 (ill-posed fit)");

  const double base = sigma2 + delta * de;
  const double disc = base * base + 4.0 * delta * de * (delta * delta - sigma2);
  if (disc < 0.0)
    throw std::invalid_argument("emg_beta: negative discriminant (invalid regime)");
  const double omega = std::sqrt(disc);

  const double denom = 2.0 * delta * s2;
  const double beta_plus = (-sigma2 - delta * de + omega) / denom;

  // validate the printed branch by the round trip E(beta(E)) = E
  const EmgBackend backend(m);
  const double width = std::sqrt(sigma2);
  auto residual = [&](double beta) {
    if (1.0 + beta * delta <= 0.0)
      return std::numeric_limits<double>::infinity();
    return std::abs(backend.energy(beta, a, b) - energy);
  };
  if (residual(beta_plus) <= 1e-9 * width) return beta_plus;
  const double beta_minus = (-sigma2 - delta * de - omega) / denom;
  if (residual(beta_minus) <= 1e-9 * width) {
    std::clog << "emg_beta: printed root branch failed the round trip; "
                 "using the conjugate branch\n";
    return beta_minus;
  }
  // neither branch closes the round trip to spec; return the better one if
  // it is merely loose, otherwise report the failure
  const double best = residual(beta_plus) <= residual(beta_minus) ? beta_plus
                                                                  : beta_minus;
  if (residual(best) <= 1e-6 * width) return best;
  throw std::runtime_error("emg_beta: round-trip residual too large");
}

std::pair<double, double> emg_expectations(const AnalyticMoments& m, double a,
                                           double b, double beta) {
  const double delta = m.delta(b);
  const double one_plus = 1.0 + delta * beta;
  if (one_plus <= 0.0)
    throw std::invalid_argument("emg_expectations: pole at 1 + beta*delta <= 0");
  const double pole_term = delta * beta / one_plus;
  // sigma d_sigma = d_sigma2 / 2; delta has no A dependence for this driver
  const double hd = m.dmu_da() - 0.5 * beta * m.dsigma2_da(a, b);
  const double hp = m.dmu_db() - pole_term * m.ddelta_db() -
                    beta * (0.5 * m.dsigma2_db(a, b) - delta * m.ddelta_db());
  return {hd, hp};
}

// --- closed forms ---------------------------------------------------------------

PstqaTrajectory gaussian_closed_form(const AnalyticMoments& m,
                                     const Schedule& a_sched,
                                     const Schedule& b_sched, double e0,
                                     const std::vector<double>& grid) {
  if (grid.empty())
    throw std::invalid_argument("gaussian_closed_form: empty grid");
  const double a0 = a_sched.value(0.0);
  const double b0 = b_sched.value(0.0);
  const double sigma0 = m.sigma(a0, b0);
  if (!(sigma0 > 0.0))
    throw std::invalid_argument("gaussian_closed_form: sigma(0) = 0");
  const double c = (e0 - m.mu(a0, b0)) / sigma0;

  const double t_final = grid.back();
  PstqaTrajectory traj;
  traj.backend = "gaussian-closed-form";
  for (double t : grid) {
    const double a = a_sched.value(t);
    const double b = b_sched.value(t);
    const double sigma = m.sigma(a, b);
    if (!(sigma > 0.0))
      throw std::invalid_argument("gaussian_closed_form: sigma = 0 on path");
    const double energy = m.mu(a, b) + c * sigma;
    const double beta = -c / sigma;
    traj.times.push_back(t);
    traj.s.push_back(t_final > 0.0 ? t / t_final : 0.0);
    traj.a.push_back(a);
    traj.b.push_back(b);
    traj.energy.push_back(energy);
    traj.beta.push_back(beta);
    traj.hd.push_back(m.dmu_da() - 0.5 * beta * m.dsigma2_da(a, b));
    traj.hp.push_back(m.dmu_db() - 0.5 * beta * m.dsigma2_db(a, b));
    traj.sd.push_back(-beta * m.mu(a, b) + 0.5 * beta * beta * sigma * sigma +
                      beta * energy);
  }
  return traj;
}

double gaussian_maxcut_hp(int n, double kappa2, double a0, double b0, double a,
                          double b) {
  const double sigma0 = std::sqrt(a0 * a0 * n + b0 * b0 * kappa2);
  const double sigma = std::sqrt(a * a * n + b * b * kappa2);
  return -double(n) * a0 * b * kappa2 / (sigma0 * sigma);
}

PstqaTrajectory emg_pstqa(const IsingProblem& problem, const DriverSpec& driver,
                          const Schedule& a_sched, const Schedule& b_sched,
                          double e0, const std::vector<double>& grid,
                          const PstqaOptions& opts) {
  const EmgBackend backend(AnalyticMoments::for_problem(driver, problem));
  return pstqa_solve(backend, a_sched, b_sched, e0, grid, opts);
}

}  // namespace quench
