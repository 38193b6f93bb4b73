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

#include "quench/pstqa.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "quench/io.hpp"
#include "quench/statmech.hpp"

namespace quench {

// --- exact backend -----------------------------------------------------------

ExactSpectrumBackend::ExactSpectrumBackend(
    DriverSpec driver, std::shared_ptr<const IsingProblem> problem,
    std::size_t lru_capacity)
    : driver_(std::move(driver)),
      problem_(std::move(problem)),
      capacity_(std::max<std::size_t>(lru_capacity, 2)) {
  if (!problem_) throw std::invalid_argument("ExactSpectrumBackend: no problem");
}

std::shared_ptr<const ExactSpectrumBackend::Node> ExactSpectrumBackend::node_at(
    double a, double b) const {
  {
    std::lock_guard lock(mutex_);
    for (std::size_t i = 0; i < lru_.size(); ++i)
      if (lru_[i]->a == a && lru_[i]->b == b) {
        auto hit = lru_[i];
        lru_.erase(lru_.begin() + i);
        lru_.push_front(hit);
        return hit;
      }
  }

  HamiltonianSpec h;
  h.driver = driver_;
  h.problem = problem_;
  h.a = a;
  h.b = b;
  // bypass the global eig cache: the solver visits a stream of distinct
  // coefficient pairs and only the per-level diagonals are worth keeping
  const EigHandle basis = eig(h, nullptr);

  auto node = std::make_shared<Node>();
  node->a = a;
  node->b = b;
  node->evals = basis->values;
  const std::size_t dim = basis->dim();
  node->dvals.resize(dim);
  node->pvals.resize(dim);
  HamiltonianSpec hd_only = h;
  hd_only.a = 1.0;
  hd_only.b = 0.0;
  const Vector problem_diag = [&] {
    Vector diag(dim);
    for (std::size_t z = 0; z < dim; ++z) diag(z) = problem_->energy(z);
    return diag;
  }();
  ComplexVector col(dim), buf(dim);
  for (std::size_t k = 0; k < dim; ++k) {
    node->pvals(k) = basis->vectors.col(k).cwiseAbs2().dot(problem_diag);
    col = basis->vectors.col(k).cast<std::complex<double>>();
    hd_only.apply(col, buf);
    node->dvals(k) = col.dot(buf).real();
  }

  std::lock_guard lock(mutex_);
  ++decompositions_;
  lru_.push_front(node);
  while (lru_.size() > capacity_) lru_.pop_back();
  return node;
}

namespace {

struct ThermalSums {
  double log_z_full;  // ln sum e^{-beta E}
  double energy, hd, hp;
};

ThermalSums thermal_sums(const Vector& evals, const Vector& dvals,
                         const Vector& pvals, double beta) {
  const double shift = beta >= 0.0 ? evals(0) : evals(evals.size() - 1);
  double z = 0.0, e = 0.0, d = 0.0, p = 0.0;
  for (Eigen::Index k = 0; k < evals.size(); ++k) {
    const double w = std::exp(-beta * (evals(k) - shift));
    z += w;
    e += w * evals(k);
    d += w * dvals(k);
    p += w * pvals(k);
  }
  return {std::log(z) - beta * shift, e / z, d / z, p / z};
}

}  // namespace

double ExactSpectrumBackend::log_z(double beta, double a, double b) const {
  const auto node = node_at(a, b);
  return log_partition(node->evals, beta) - std::log(double(node->evals.size()));
}

double ExactSpectrumBackend::energy(double beta, double a, double b) const {
  const auto node = node_at(a, b);
  return thermal_sums(node->evals, node->dvals, node->pvals, beta).energy;
}

double ExactSpectrumBackend::hd(double beta, double a, double b) const {
  const auto node = node_at(a, b);
  return thermal_sums(node->evals, node->dvals, node->pvals, beta).hd;
}

double ExactSpectrumBackend::hp(double beta, double a, double b) const {
  const auto node = node_at(a, b);
  return thermal_sums(node->evals, node->dvals, node->pvals, beta).hp;
}

double ExactSpectrumBackend::solve_beta(double e, double a, double b,
                                        double hint) const {
  const auto node = node_at(a, b);
  // cold starts (the driver ground state) can sit below the energy reachable
  // at the statmech default bracket of 50/width; widen geometrically before
  // giving up
  for (double scale = 50.0; scale <= 1e4; scale *= 4.0) {
    try {
      return fit_beta(node->evals, e, scale, hint).beta;
    } catch (const BetaRangeError& err) {
      if (err.reason != BetaRangeReason::BeyondBracket) throw;
    }
  }
  return fit_beta(node->evals, e, 4e4, hint).beta;
}

// --- trajectory ---------------------------------------------------------------

double PstqaTrajectory::sd_drift() const {
  double drift = 0.0;
  for (double v : sd) drift = std::max(drift, std::abs(v - sd.front()));
  return drift;
}

std::string PstqaTrajectory::to_csv() const {
  std::ostringstream out;
  out << "# backend: " << backend << '\n';
  out << "t,s,A,B,energy,beta,hd,hp,sd\n";
  for (std::size_t i = 0; i < size(); ++i)
    out << format_g12(times[i]) << ',' << format_g12(s[i]) << ','
        << format_g12(a[i]) << ',' << format_g12(b[i]) << ','
        << format_g12(energy[i]) << ',' << format_g12(beta[i]) << ','
        << format_g12(hd[i]) << ',' << format_g12(hp[i]) << ','
        << format_g12(sd[i]) << '\n';
  return out.str();
}

// --- solver -------------------------------------------------------------------

namespace {

// scalar embedded Dormand-Prince 5(4) specialised to the energy ODE, with
// beta warm-started across evaluations
class EnergyOde {
 public:
  EnergyOde(const PartitionBackend& backend, const Schedule& a_sched,
            const Schedule& b_sched)
      : backend_(backend), a_sched_(a_sched), b_sched_(b_sched) {}

  struct Eval {
    double de_dt, beta, hd, hp, a, b;
  };

  Eval eval(double t, double e) const {
    const double a = a_sched_.value(t);
    const double b = b_sched_.value(t);
    double beta;
    try {
      beta = backend_.solve_beta(e, a, b, beta_hint_);
    } catch (const BetaRangeError& err) {
      throw PstqaBreakdown(t, std::string("thermal model breakdown: ") +
                                  err.what());
    }
    beta_hint_ = beta;
    const double hd = backend_.hd(beta, a, b);
    const double hp = backend_.hp(beta, a, b);
    const double da = a_sched_.derivative(t);
    const double db = b_sched_.derivative(t);
    return {da * hd + db * hp, beta, hd, hp, a, b};
  }

 private:
  const PartitionBackend& backend_;
  const Schedule& a_sched_;
  const Schedule& b_sched_;
  mutable double beta_hint_ = -1.0;
};

}  // namespace

PstqaTrajectory pstqa_solve(const PartitionBackend& backend,
                            const Schedule& a_sched, const Schedule& b_sched,
                            double e0, const std::vector<double>& grid,
                            const PstqaOptions& opts) {
  if (grid.empty()) throw std::invalid_argument("pstqa_solve: empty grid");
  if (!std::is_sorted(grid.begin(), grid.end()))
    throw std::invalid_argument("pstqa_solve: grid must be sorted");
  const double t_final = grid.back();
  if (a_sched.t_final() < t_final - 1e-12 ||
      b_sched.t_final() < t_final - 1e-12)
    throw std::invalid_argument("pstqa_solve: schedules do not cover the grid");

  // hard step boundaries: grid times plus schedule breakpoints
  std::set<double> cuts(grid.begin(), grid.end());
  for (double t : a_sched.breakpoints()) cuts.insert(t);
  for (double t : b_sched.breakpoints()) cuts.insert(t);
  cuts.erase(0.0);

  EnergyOde ode(backend, a_sched, b_sched);
  PstqaTrajectory traj;
  traj.backend = backend.name();

  auto record = [&](double t, double e, const EnergyOde::Eval& ev) {
    traj.times.push_back(t);
    traj.s.push_back(t_final > 0.0 ? t / t_final : 0.0);
    traj.a.push_back(ev.a);
    traj.b.push_back(ev.b);
    traj.energy.push_back(e);
    traj.beta.push_back(ev.beta);
    traj.hd.push_back(ev.hd);
    traj.hp.push_back(ev.hp);
    traj.sd.push_back(backend.log_z(ev.beta, ev.a, ev.b) + ev.beta * e);
  };

  double t = 0.0;
  double e = e0;
  record(0.0, e0, ode.eval(0.0, e0));

  // Dormand-Prince 5(4) on the scalar energy
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5,
                          c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                          a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                          a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695,
                          e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                          e6 = 22.0 / 525, e7 = -1.0 / 40;

  long steps = 0;
  for (double t_stop : cuts) {
    if (t_stop <= t) continue;
    if (t_stop > t_final + 1e-12) break;
    double h = std::min(t_stop - t, std::max(t_final / 64.0, 1e-8 * t_final));
    EnergyOde::Eval k1 = ode.eval(t, e);
    bool k1_fresh = true;
    while (t < t_stop - 1e-14 * t_final) {
      if (++steps > opts.max_steps)
        throw std::runtime_error("pstqa_solve: step limit exceeded");
      h = std::min(h, t_stop - t);
      if (!k1_fresh) k1 = ode.eval(t, e);  // breakdown here is genuine
      double e_new, err_abs;
      EnergyOde::Eval k7;
      try {
        const auto k2 = ode.eval(t + c2 * h, e + h * a21 * k1.de_dt);
        const auto k3 =
            ode.eval(t + c3 * h, e + h * (a31 * k1.de_dt + a32 * k2.de_dt));
        const auto k4 = ode.eval(
            t + c4 * h,
            e + h * (a41 * k1.de_dt + a42 * k2.de_dt + a43 * k3.de_dt));
        const auto k5 =
            ode.eval(t + c5 * h, e + h * (a51 * k1.de_dt + a52 * k2.de_dt +
                                          a53 * k3.de_dt + a54 * k4.de_dt));
        const auto k6 = ode.eval(
            t + h, e + h * (a61 * k1.de_dt + a62 * k2.de_dt + a63 * k3.de_dt +
                            a64 * k4.de_dt + a65 * k5.de_dt));
        e_new = e + h * (b1 * k1.de_dt + b3 * k3.de_dt + b4 * k4.de_dt +
                         b5 * k5.de_dt + b6 * k6.de_dt);
        k7 = ode.eval(t + h, e_new);
        err_abs =
            h * std::abs(e1 * k1.de_dt + e3 * k3.de_dt + e4 * k4.de_dt +
                         e5 * k5.de_dt + e6 * k6.de_dt + e7 * k7.de_dt);
      } catch (const PstqaBreakdown&) {
        // a trial stage overshot the thermal range; shrink the step unless
        // it is already negligible, in which case the breakdown is real
        if (h <= 1e-10 * t_final) throw;
        h *= 0.25;
        k1_fresh = true;
        continue;
      }
      const double scale =
          opts.rtol * std::max({std::abs(e), std::abs(e_new), 1e-8});
      const double err = err_abs / scale;
      if (err <= 1.0) {
        t += h;
        e = e_new;
        k1 = k7;
        k1_fresh = true;
        record(t, e, k7);
      } else {
        k1_fresh = true;
      }
      const double factor =
          err <= 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
      h = std::max(h * factor, 1e-12 * t_final);
    }
  }
  return traj;
}

double initial_energy(const HamiltonianSpec& h0, const Schedule& a_sched,
                      const Schedule& b_sched, const ComplexVector& psi0) {
  HamiltonianSpec h = h0;
  h.a = a_sched.value(0.0);
  h.b = b_sched.value(0.0);
  return h.expectation(psi0);
}

PathIndependenceReport path_independence_check(
    const PartitionBackend& backend, const Schedule& a1, const Schedule& b1,
    const Schedule& a2, const Schedule& b2, double e0,
    const PstqaOptions& opts) {
  const double tol = 1e-12;
  if (std::abs(a1.value(0.0) - a2.value(0.0)) > tol ||
      std::abs(b1.value(0.0) - b2.value(0.0)) > tol ||
      std::abs(a1.value(a1.t_final()) - a2.value(a2.t_final())) > tol ||
      std::abs(b1.value(b1.t_final()) - b2.value(b2.t_final())) > tol)
    throw std::invalid_argument(
        "path_independence_check: paths must share endpoints");

  PathIndependenceReport report;
  report.path1 = pstqa_solve(backend, a1, b1, e0, {a1.t_final()}, opts);
  report.path2 = pstqa_solve(backend, a2, b2, e0, {a2.t_final()}, opts);
  report.energy_diff =
      std::abs(report.path1.energy.back() - report.path2.energy.back());
  report.hp_diff = std::abs(report.path1.hp.back() - report.path2.hp.back());
  return report;
}

EntropySeries pstqa_entropy(const PartitionBackend& backend,
                            const PstqaTrajectory& traj) {
  EntropySeries series;
  series.sd.reserve(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i)
    series.sd.push_back(
        backend.log_z(traj.beta[i], traj.a[i], traj.b[i]) +
        traj.beta[i] * traj.energy[i]);
  for (double v : series.sd)
    series.max_drift = std::max(series.max_drift, std::abs(v - series.sd.front()));
  return series;
}

double timescale_invariance_check(const PartitionBackend& backend,
                                  const Schedule& a_sched,
                                  const Schedule& b_sched, double e0,
                                  const std::vector<double>& tf_scales,
                                  int s_samples, const PstqaOptions& opts) {
  std::vector<double> s_grid(s_samples);
  for (int i = 0; i < s_samples; ++i)
    s_grid[i] = double(i + 1) / double(s_samples);

  std::vector<std::vector<double>> hp_curves;
  for (double scale : tf_scales) {
    const Schedule a = a_sched.stretched(scale);
    const Schedule b = b_sched.stretched(scale);
    std::vector<double> grid;
    for (double s : s_grid) grid.push_back(s * a.t_final());
    const PstqaTrajectory traj = pstqa_solve(backend, a, b, e0, grid, opts);
    // pick out the values exactly on the requested normalised grid
    std::vector<double> hp_at_s;
    for (double tg : grid) {
      std::size_t best = 0;
      for (std::size_t i = 0; i < traj.size(); ++i)
        if (std::abs(traj.times[i] - tg) < std::abs(traj.times[best] - tg))
          best = i;
      hp_at_s.push_back(traj.hp[best]);
    }
    hp_curves.push_back(std::move(hp_at_s));
  }

  double max_dev = 0.0;
  for (std::size_t c = 1; c < hp_curves.size(); ++c)
    for (int i = 0; i < s_samples; ++i)
      max_dev = std::max(max_dev, std::abs(hp_curves[c][i] - hp_curves[0][i]));
  return max_dev;
}

}  // namespace quench
