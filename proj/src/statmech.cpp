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

#include "quench/statmech.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace quench {

double diagonal_entropy(const Vector& populations, bool base2) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < populations.size(); ++i) {
    const double p = populations(i);
    if (p < -1e-12)
      throw std::invalid_argument("diagonal_entropy: negative population");
    if (p > 0.0) s -= p * std::log(p);
  }
  return base2 ? s / std::log(2.0) : s;
}

DiagonalEnsemble diagonal_ensemble(const ComplexVector& psi,
                                   const HamiltonianSpec& h, EigCache* cache) {
  if (std::abs(psi.norm() - 1.0) > 1e-10)
    throw std::invalid_argument("diagonal_ensemble: psi is not normalised");
  DiagonalEnsemble ens;
  ens.basis = eig(h, cache);
  ens.populations = (ens.basis->vectors.transpose() * psi).cwiseAbs2();
  ens.energy = ens.populations.dot(ens.basis->values);
  return ens;
}

DiagonalEnsemble diagonal_ensemble(const StateEnsemble& mixture,
                                   const HamiltonianSpec& h, EigCache* cache) {
  if (mixture.empty())
    throw std::invalid_argument("diagonal_ensemble: empty mixture");
  DiagonalEnsemble ens;
  ens.basis = eig(h, cache);
  ens.populations = Vector::Zero(ens.basis->dim());
  for (const auto& [p, psi] : mixture) {
    if (p < 0.0)
      throw std::invalid_argument("diagonal_ensemble: negative probability");
    ens.populations += p * (ens.basis->vectors.transpose() * psi).cwiseAbs2();
  }
  ens.energy = ens.populations.dot(ens.basis->values);
  return ens;
}

Vector eigenbasis_diagonal(const EigResult& basis,
                           const HamiltonianSpec& observable) {
  const std::size_t dim = basis.dim();
  if (observable.dim() != dim)
    throw std::invalid_argument("eigenbasis_diagonal: dimension mismatch");
  Vector out(dim);
  if (observable.is_diagonal()) {
    const Vector diag = observable.diagonal_part();
    for (std::size_t k = 0; k < dim; ++k)
      out(k) = basis.vectors.col(k).cwiseAbs2().dot(diag);
    return out;
  }
  ComplexVector col(dim), buf(dim);
  for (std::size_t k = 0; k < dim; ++k) {
    col = basis.vectors.col(k).cast<std::complex<double>>();
    observable.apply(col, buf);
    out(k) = col.dot(buf).real();
  }
  return out;
}

double steady_expectation(const DiagonalEnsemble& ens,
                          const HamiltonianSpec& observable) {
  return ens.populations.dot(eigenbasis_diagonal(*ens.basis, observable));
}

// --- Gibbs ------------------------------------------------------------------

double log_partition(const Vector& evals, double beta) {
  const double shift = beta >= 0.0 ? evals(0) : evals(evals.size() - 1);
  double sum = 0.0;
  for (Eigen::Index k = 0; k < evals.size(); ++k)
    sum += std::exp(-beta * (evals(k) - shift));
  return std::log(sum) - beta * shift;
}

namespace {

// thermal energy and heat capacity (variance) from a spectrum
struct ThermalPoint {
  double energy;
  double variance;
  double log_z;
};

ThermalPoint thermal_point(const Vector& evals, double beta) {
  const double shift = evals(0);
  double z = 0.0, e = 0.0, e2 = 0.0;
  for (Eigen::Index k = 0; k < evals.size(); ++k) {
    const double w = std::exp(-beta * (evals(k) - shift));
    z += w;
    e += w * evals(k);
    e2 += w * evals(k) * evals(k);
  }
  e /= z;
  e2 /= z;
  return {e, std::max(e2 - e * e, 0.0), std::log(z) - beta * shift};
}

}  // namespace

BetaFit fit_beta(const Vector& evals, double energy, double beta_max_scale,
                 double hint) {
  const Eigen::Index dim = evals.size();
  if (dim < 1) throw std::invalid_argument("fit_beta: empty spectrum");
  const double e_min = evals(0);
  const double e_max = evals(dim - 1);
  const double width = e_max - e_min;
  const double mean = evals.mean();

  if (width <= 0.0) {
    // flat spectrum: every beta gives the same energy
    if (std::abs(energy - e_min) > 1e-12 * std::max(1.0, std::abs(e_min)))
      throw BetaRangeError(BetaRangeReason::BelowGroundState,
                           "fit_beta: degenerate spectrum cannot match energy");
    return {0.0, std::log(double(dim)) - 0.0 * e_min, energy, 0.0};
  }
  if (energy > mean + 1e-12 * width)
    throw BetaRangeError(
        BetaRangeReason::NegativeTemperature,
        "fit_beta: energy above Tr'H requests a negative temperature");
  if (energy < e_min)
    throw BetaRangeError(BetaRangeReason::BelowGroundState,
                         "fit_beta: energy below the ground state");
  energy = std::min(energy, mean);  // rounding guard at beta = 0

  const double beta_max = beta_max_scale / width;
  const double tol = 1e-10 * width;

  double lo = 0.0, hi = beta_max;
  ThermalPoint at_hi = thermal_point(evals, beta_max);
  if (energy < at_hi.energy - tol)
    throw BetaRangeError(BetaRangeReason::BeyondBracket,
                         "fit_beta: energy requires beta beyond the bracket");

  double beta = (hint > 0.0 && hint < beta_max) ? hint : 0.0;
  ThermalPoint tp = thermal_point(evals, beta);
  // safeguarded Newton on the monotone function E(beta)
  for (int iter = 0; iter < 200; ++iter) {
    const double f = tp.energy - energy;
    if (std::abs(f) <= tol) return {beta, tp.log_z, tp.energy, std::abs(f)};
    if (f > 0.0)
      lo = beta;  // energy still too high -> larger beta
    else
      hi = beta;
    double next = beta;
    if (tp.variance > 0.0) next = beta + f / tp.variance;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    beta = next;
    tp = thermal_point(evals, beta);
  }
  if (std::abs(tp.energy - energy) <= 10.0 * tol)
    return {beta, tp.log_z, tp.energy, std::abs(tp.energy - energy)};
  throw std::runtime_error("fit_beta: root-finding failed to converge");
}

Vector GibbsModel::populations() const {
  const Vector& e = basis->values;
  Vector p(e.size());
  for (Eigen::Index k = 0; k < e.size(); ++k)
    p(k) = std::exp(-beta * e(k) - log_z);
  return p;
}

double GibbsModel::energy() const {
  return thermal_point(basis->values, beta).energy;
}

GibbsModel make_gibbs(EigHandle basis, double beta) {
  GibbsModel m;
  m.beta = beta;
  m.log_z = log_partition(basis->values, beta);
  m.basis = std::move(basis);
  return m;
}

GibbsModel gibbs_for_energy(EigHandle basis, double energy) {
  const BetaFit fit = fit_beta(basis->values, energy);
  GibbsModel m;
  m.beta = fit.beta;
  m.log_z = fit.log_z;
  m.basis = std::move(basis);
  return m;
}

double gibbs_expectation(const GibbsModel& model,
                         const HamiltonianSpec& observable) {
  const Vector diag = eigenbasis_diagonal(*model.basis, observable);
  return model.populations().dot(diag);
}

// --- work and passivity ------------------------------------------------------

namespace {

double ensemble_energy(const HamiltonianSpec& h, const StateEnsemble& states) {
  double e = 0.0;
  double total_p = 0.0;
  for (const auto& [p, psi] : states) {
    if (std::size_t(psi.size()) != h.dim())
      throw std::invalid_argument("extractable_work: dimension mismatch");
    e += p * h.expectation(psi);
    total_p += p;
  }
  if (std::abs(total_p - 1.0) > 1e-9)
    throw std::invalid_argument("extractable_work: probabilities must sum to 1");
  return e;
}

}  // namespace

double extractable_work(const HamiltonianSpec& h, const StateEnsemble& initial,
                        const StateEnsemble& final_state) {
  return ensemble_energy(h, initial) - ensemble_energy(h, final_state);
}

bool is_passive(const Vector& populations, const Vector& evals,
                double pop_tol) {
  if (populations.size() != evals.size())
    throw std::invalid_argument("is_passive: length mismatch");
  const Eigen::Index dim = evals.size();
  for (Eigen::Index i = 1; i < dim; ++i)
    if (evals(i) < evals(i - 1) - 1e-12)
      throw std::invalid_argument("is_passive: eigenvalues must be ascending");

  const double width = evals(dim - 1) - evals(0);
  const double e_tol = 1e-12 * std::max(1.0, width);

  // group degenerate levels; within a tie any ordering is passive
  double prev_group_min = std::numeric_limits<double>::infinity();
  Eigen::Index i = 0;
  while (i < dim) {
    Eigen::Index j = i;
    double group_min = populations(i), group_max = populations(i);
    while (j + 1 < dim && evals(j + 1) - evals(i) <= e_tol) {
      ++j;
      group_min = std::min(group_min, populations(j));
      group_max = std::max(group_max, populations(j));
    }
    if (group_max > prev_group_min + pop_tol) return false;
    prev_group_min = group_min;
    i = j + 1;
  }
  return true;
}

// --- fixed-temperature Gibbs sweep --------------------------------------------

GibbsSweep gibbs_hp_sweep(const IsingProblem& problem, const DriverSpec& driver,
                          double beta, const std::vector<double>& gammas,
                          EigCache* cache) {
  if (beta < 0.0)
    throw std::invalid_argument("gibbs_hp_sweep: beta must be >= 0");
  GibbsSweep sweep;
  sweep.gammas = gammas;
  HamiltonianSpec h;
  h.driver = driver;
  h.problem = std::make_shared<IsingProblem>(problem);
  h.a = 1.0;
  HamiltonianSpec hp_only = h;
  hp_only.a = 0.0;
  hp_only.b = 1.0;
  for (double gamma : gammas) {
    const auto basis = eig(h.with_coefficients(1.0, gamma), cache);
    if (beta == 0.0) {
      sweep.hp.push_back(problem.mean_energy());
      continue;
    }
    const GibbsModel model = make_gibbs(basis, beta);
    sweep.hp.push_back(gibbs_expectation(model, hp_only));
    sweep.free_energy.push_back(-model.log_z / beta);
  }
  if (sweep.free_energy.size() >= 3) {
    for (std::size_t i = 1; i + 1 < sweep.free_energy.size(); ++i) {
      const double h1 = gammas[i] - gammas[i - 1];
      const double h2 = gammas[i + 1] - gammas[i];
      const double d2 =
          2.0 *
          (h1 * sweep.free_energy[i + 1] - (h1 + h2) * sweep.free_energy[i] +
           h2 * sweep.free_energy[i - 1]) /
          (h1 * h2 * (h1 + h2));
      sweep.d2f.push_back(d2);
    }
  }
  return sweep;
}

}  // namespace quench
