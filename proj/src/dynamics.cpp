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

#include "quench/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <set>
#include <sstream>

#include "quench/detail/rk45.hpp"
#include "quench/io.hpp"
#include "quench/statmech.hpp"

namespace quench {

namespace {

using Complex = std::complex<double>;

struct ChannelValues {
  const Schedule* driver = nullptr;
  const Schedule* problem = nullptr;
};

ChannelValues bind_channels(const HamiltonianSpec& h0,
                            const std::vector<Schedule>& schedules) {
  ChannelValues cv;
  for (const auto& s : schedules) {
    const Schedule** slot =
        s.channel() == Channel::DriverCoeff ? &cv.driver : &cv.problem;
    if (*slot)
      throw std::invalid_argument("evolve: two schedules on one channel");
    *slot = &s;
  }
  (void)h0;
  return cv;
}

double coeff_a(const ChannelValues& cv, const HamiltonianSpec& h0, double t) {
  return cv.driver ? cv.driver->value(t) : h0.a;
}

double coeff_b(const ChannelValues& cv, const HamiltonianSpec& h0, double t) {
  return cv.problem ? cv.problem->value(t) : h0.b;
}

struct Observables {
  double hp, hd, energy;
};

Observables measure(const HamiltonianSpec& h0, double a, double b,
                    const ComplexVector& psi) {
  Observables o{0.0, 0.0, 0.0};
  const std::size_t dim = psi.size();
  if (h0.problem) {
    double hp = 0.0;
    for (std::size_t z = 0; z < dim; ++z)
      hp += h0.problem->energy(z) * std::norm(psi(z));
    o.hp = hp;
  }
  ComplexVector buf = ComplexVector::Zero(dim);
  h0.driver.accumulate_apply(psi, buf, 1.0);
  o.hd = psi.dot(buf).real();
  o.energy = a * o.hd + b * o.hp;
  if (h0.bias) {
    double hb = 0.0;
    for (std::size_t z = 0; z < dim; ++z)
      hb += h0.bias->diagonal_energy(z) * std::norm(psi(z));
    o.energy += hb;
  }
  return o;
}

double entropy_in_basis(const EigResult& basis, const ComplexVector& psi) {
  const Vector pops = (basis.vectors.transpose() * psi).cwiseAbs2();
  return diagonal_entropy(pops);
}

// segment end times covering (0, t_final], from the union of breakpoints
std::vector<double> segment_ends(const std::vector<Schedule>& schedules,
                                 double t_final) {
  std::set<double> cuts;
  for (const auto& s : schedules)
    for (double t : s.breakpoints()) cuts.insert(t);
  cuts.insert(t_final);
  return {cuts.begin(), cuts.end()};
}

}  // namespace

ComplexVector plus_state(int n) {
  const std::size_t dim = std::size_t(1) << n;
  return ComplexVector::Constant(dim, Complex(1.0 / std::sqrt(double(dim)), 0.0));
}

ComplexVector basis_state(int n, std::uint64_t z) {
  const std::size_t dim = std::size_t(1) << n;
  if (z >= dim) throw std::invalid_argument("basis_state: z out of range");
  ComplexVector psi = ComplexVector::Zero(dim);
  psi(z) = 1.0;
  return psi;
}

Trajectory evolve(const HamiltonianSpec& h0,
                  const std::vector<Schedule>& schedules,
                  const ComplexVector& psi0, const std::vector<double>& grid,
                  const EvolveOptions& opts) {
  if (std::abs(psi0.norm() - 1.0) > 1e-10)
    throw std::invalid_argument("evolve: psi0 is not normalised");
  if (grid.empty()) throw std::invalid_argument("evolve: empty sample grid");
  if (!std::is_sorted(grid.begin(), grid.end()))
    throw std::invalid_argument("evolve: grid must be sorted");

  const ChannelValues cv = bind_channels(h0, schedules);
  double t_final = grid.back();
  for (const auto& s : schedules) {
    if (s.t_final() < t_final - 1e-12)
      throw std::invalid_argument("evolve: schedule does not cover the grid");
    t_final = std::max(t_final, 0.0);
  }

  Trajectory traj;
  traj.times = grid;
  const std::size_t m = grid.size();
  traj.hp.resize(m);
  traj.hd.resize(m);
  traj.energy.resize(m);
  if (opts.compute_sd) traj.sd.resize(m);
  if (opts.store_states) traj.states.resize(m);

  const bool all_pc =
      !opts.force_integrator &&
      std::all_of(schedules.begin(), schedules.end(),
                  [](const Schedule& s) { return s.piecewise_constant_kind(); });

  auto record = [&](std::size_t i, double a, double b, const ComplexVector& psi,
                    const EigResult* basis) {
    const Observables o = measure(h0, a, b, psi);
    traj.hp[i] = o.hp;
    traj.hd[i] = o.hd;
    traj.energy[i] = o.energy;
    if (opts.compute_sd) {
      if (basis) {
        traj.sd[i] = entropy_in_basis(*basis, psi);
      } else {
        const auto eh = eig(h0.with_coefficients(a, b), opts.cache);
        traj.sd[i] = entropy_in_basis(*eh, psi);
      }
    }
    if (opts.store_states) traj.states[i] = psi;
  };

  if (all_pc) {
    // exact propagation segment by segment: psi(t) = V exp(-i L dt) V^T psi_k
    const std::vector<double> ends = segment_ends(schedules, grid.back());
    ComplexVector psi = psi0;
    double seg_start = 0.0;
    std::size_t gi = 0;
    for (double seg_end : ends) {
      // the schedule value on (seg_start, seg_end] is constant; probe inside
      const double t_probe = 0.5 * (seg_start + seg_end);
      const double a = coeff_a(cv, h0, t_probe);
      const double b = coeff_b(cv, h0, t_probe);
      const auto basis = eig(h0.with_coefficients(a, b), opts.cache);
      const ComplexVector coeffs = basis->vectors.transpose() * psi;

      auto state_at = [&](double t) -> ComplexVector {
        const double dt = t - seg_start;
        ComplexVector rotated(coeffs.size());
        for (Eigen::Index k = 0; k < coeffs.size(); ++k)
          rotated(k) = coeffs(k) * std::polar(1.0, -basis->values(k) * dt);
        return basis->vectors * rotated;
      };

      // grid samples at t = 0 belong with the first segment's Hamiltonian
      while (gi < m && (grid[gi] <= seg_end + 1e-12 * std::max(1.0, seg_end))) {
        const double t = grid[gi];
        if (t > seg_end) break;
        if (t < seg_start - 1e-12) break;
        const ComplexVector sample = t <= seg_start ? psi : state_at(t);
        record(gi, a, b, sample, basis.get());
        ++gi;
      }
      psi = state_at(seg_end);
      seg_start = seg_end;
      if (gi >= m) break;
    }
    return traj;
  }

  // adaptive integrator path, clipped at schedule breakpoints
  std::set<double> cuts(grid.begin(), grid.end());
  for (const auto& s : schedules)
    for (double t : s.breakpoints())
      if (t < grid.back()) cuts.insert(t);
  cuts.insert(0.0);

  HamiltonianSpec h = h0;
  ComplexVector psi = psi0;
  // piecewise values live on half-open segments (t_k, t_{k+1}]; while
  // integrating one segment, clamp evaluation times into its interior so the
  // stage at the left boundary picks up the segment's own coefficient
  double seg_lo = 0.0;
  const double nudge = 1e-12 * std::max(1.0, grid.back());
  auto rhs = [&](double t, const ComplexVector& y, ComplexVector& out) {
    const double tc = std::max(t, seg_lo + nudge);
    h.a = coeff_a(cv, h0, tc);
    h.b = coeff_b(cv, h0, tc);
    h.apply(y, out);
    out *= Complex(0.0, -1.0);
  };
  auto guard = [&](double, ComplexVector& y) {
    const double norm = y.norm();
    if (std::abs(norm - 1.0) > opts.norm_guard)
      throw IntegrationError("evolve: norm drift exceeded the guard");
    y /= norm;
  };

  double t_prev = 0.0;
  std::size_t gi = 0;
  while (gi < m && grid[gi] <= 0.0) {
    record(gi, coeff_a(cv, h0, 0.0), coeff_b(cv, h0, 0.0), psi, nullptr);
    ++gi;
  }
  for (double t_next : cuts) {
    if (t_next <= t_prev) continue;
    seg_lo = t_prev;
    detail::rk45_integrate(rhs, psi, t_prev, t_next, opts.rtol, 1e-12, guard);
    t_prev = t_next;
    while (gi < m && std::abs(grid[gi] - t_next) <= 1e-12 * std::max(1.0, t_next)) {
      record(gi, coeff_a(cv, h0, t_next), coeff_b(cv, h0, t_next), psi, nullptr);
      ++gi;
    }
    if (gi >= m) break;
  }
  return traj;
}

double stage_average(const Trajectory& traj, double stage_start,
                     double stage_end, double burn_in) {
  if (burn_in >= stage_end - stage_start)
    throw std::invalid_argument("stage_average: burn-in swallows the stage");
  double sum = 0.0;
  int count = 0;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const double t = traj.times[i];
    if (t > stage_start + burn_in && t <= stage_end + 1e-12) {
      sum += traj.hp[i];
      ++count;
    }
  }
  if (count == 0)
    throw std::invalid_argument("stage_average: empty averaging window");
  return sum / double(count);
}

double stage_std(const Trajectory& traj, double stage_start, double stage_end,
                 double burn_in) {
  const double mean = stage_average(traj, stage_start, stage_end, burn_in);
  double ss = 0.0;
  int count = 0;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const double t = traj.times[i];
    if (t > stage_start + burn_in && t <= stage_end + 1e-12) {
      ss += (traj.hp[i] - mean) * (traj.hp[i] - mean);
      ++count;
    }
  }
  return std::sqrt(ss / double(count));
}

double cyclic_quench_work(const HamiltonianSpec& h0, double gamma1,
                          double gamma2, double t1, double t2,
                          const ComplexVector& psi0,
                          const EvolveOptions& opts) {
  if (!(gamma2 > gamma1))
    throw std::invalid_argument("cyclic_quench_work: need gamma2 > gamma1");
  if (!(t2 > t1) || !(t1 > 0.0))
    throw std::invalid_argument("cyclic_quench_work: need 0 < t1 < t2");
  const Schedule gamma = Schedule::piecewise_constant(
      Channel::ProblemCoeff, {{0.0, gamma1}, {t1, gamma2}}, t2);
  const Trajectory traj = evolve(h0, {gamma}, psi0, {t1, t2}, opts);
  return (gamma2 - gamma1) * (traj.hp[1] - traj.hp[0]);
}

std::string Trajectory::to_csv() const {
  std::ostringstream out;
  out << "t,hp,hd,energy,sd\n";
  for (std::size_t i = 0; i < size(); ++i) {
    out << format_g12(times[i]) << ',' << format_g12(hp[i]) << ','
        << format_g12(hd[i]) << ',' << format_g12(energy[i]) << ','
        << (sd.empty() ? "" : format_g12(sd[i])) << '\n';
  }
  return out.str();
}

}  // namespace quench
