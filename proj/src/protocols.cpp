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

#include "quench/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <map>
#include <sstream>
#include <unordered_map>

#include "quench/detail/rk45.hpp"
#include "quench/io.hpp"

namespace quench {

namespace {

HamiltonianSpec problem_only_spec(const std::shared_ptr<const IsingProblem>& p) {
  HamiltonianSpec h;
  h.driver = DriverSpec::transverse_field(p->n());
  h.problem = p;
  h.a = 0.0;
  h.b = 1.0;
  return h;
}

double ground_tolerance(const IsingProblem& p) {
  return 1e-9 * std::max(1.0, std::abs(ground_state_energy(p)));
}

}  // namespace

// --- MSQW ------------------------------------------------------------------------

MsqwRun msqw_run(const IsingProblem& problem, const Schedule& staircase,
                 double burn_in_frac, int samples_per_stage, EigCache* cache) {
  if (staircase.channel() != Channel::ProblemCoeff)
    throw std::invalid_argument("msqw_run: staircase must drive the problem");
  if (!staircase.piecewise_constant_kind())
    throw std::invalid_argument("msqw_run: staircase must be piecewise constant");
  require_monotone_nondecreasing(staircase);
  if (burn_in_frac < 0.0 || burn_in_frac >= 1.0)
    throw std::invalid_argument("msqw_run: burn-in fraction out of range");

  const int n = problem.n();
  auto shared = std::make_shared<IsingProblem>(problem);
  HamiltonianSpec h0;
  h0.driver = DriverSpec::transverse_field(n);
  h0.problem = shared;
  h0.a = 1.0;

  // stage boundaries from the staircase steps
  std::vector<double> bounds;
  for (const auto& [t, v] : staircase.steps()) bounds.push_back(t);
  bounds.push_back(staircase.t_final());

  std::vector<double> grid;
  for (std::size_t k = 0; k + 1 < bounds.size(); ++k) {
    const double len = bounds[k + 1] - bounds[k];
    for (int i = 1; i <= samples_per_stage; ++i)
      grid.push_back(bounds[k] + len * double(i) / double(samples_per_stage));
  }

  EvolveOptions opts;
  opts.store_states = true;
  opts.cache = cache;
  MsqwRun run;
  run.traj = evolve(h0, {staircase}, plus_state(n), grid, opts);

  const HamiltonianSpec hp_only = problem_only_spec(shared);
  for (std::size_t k = 0; k + 1 < bounds.size(); ++k) {
    StageSummary s;
    s.stage = int(k);
    s.t_start = bounds[k];
    s.t_end = bounds[k + 1];
    s.gamma = staircase.steps()[k].second;
    const double burn = burn_in_frac * (s.t_end - s.t_start);
    s.hp_avg = stage_average(run.traj, s.t_start, s.t_end, burn);
    s.hp_std = stage_std(run.traj, s.t_start, s.t_end, burn);

    // first stored sample inside the stage defines the stage ensemble
    const std::size_t si = k * std::size_t(samples_per_stage);
    const DiagonalEnsemble ens = diagonal_ensemble(
        run.traj.states[si], h0.with_coefficients(1.0, s.gamma), cache);
    s.ens_hp = steady_expectation(ens, hp_only);
    try {
      const GibbsModel gibbs = gibbs_for_energy(ens.basis, ens.energy);
      s.eth_hp = gibbs_expectation(gibbs, hp_only);
      s.eth_beta = gibbs.beta;
      s.eth_ok = true;
    } catch (const BetaRangeError&) {
      s.eth_ok = false;
    }
    run.stages.push_back(s);
  }
  return run;
}

std::vector<MsqwRun> msqw_campaign(const std::vector<IsingProblem>& problems,
                                   const Schedule& staircase,
                                   double burn_in_frac, int samples_per_stage) {
  std::vector<MsqwRun> out;
  out.reserve(problems.size());
  for (const auto& p : problems)
    out.push_back(msqw_run(p, staircase, burn_in_frac, samples_per_stage));
  return out;
}

// --- warm start -------------------------------------------------------------------

std::vector<double> below_mean_uniform(const IsingProblem& problem) {
  const double mean = problem.mean_energy();
  std::vector<double> dist(problem.dim(), 0.0);
  double count = 0.0;
  for (std::size_t z = 0; z < problem.dim(); ++z)
    if (problem.energy(z) < mean) {
      dist[z] = 1.0;
      count += 1.0;
    }
  if (count == 0.0)
    throw std::invalid_argument(
        "below_mean_uniform: no strings below the spectral mean");
  for (double& d : dist) d /= count;
  return dist;
}

WarmstartResult warmstart_ctqw(const IsingProblem& problem, double g,
                               std::optional<std::uint64_t> initial, double t1,
                               int grid_points, EigCache* cache) {
  const int n = problem.n();
  auto shared = std::make_shared<IsingProblem>(problem);
  HamiltonianSpec h;
  h.driver = DriverSpec::transverse_field(n);
  h.problem = shared;
  h.a = g;
  h.b = 1.0;

  const auto basis = eig(h, cache);
  const std::size_t dim = problem.dim();

  WarmstartResult result;
  Vector populations = Vector::Zero(dim);
  Vector weights = Vector::Zero(dim);  // over input strings
  if (initial) {
    if (*initial >= dim)
      throw std::invalid_argument("warmstart_ctqw: initial string out of range");
    weights(*initial) = 1.0;
    result.hp_initial = problem.energy(*initial);
    result.precondition_met = result.hp_initial < problem.mean_energy();
    if (!result.precondition_met)
      std::clog << "warmstart_ctqw: initial string is not better than random "
                   "guessing; the no-go statement does not apply\n";
  } else {
    const std::vector<double> dist = below_mean_uniform(problem);
    double hp0 = 0.0;
    for (std::size_t z = 0; z < dim; ++z) {
      weights(z) = dist[z];
      hp0 += dist[z] * problem.energy(z);
    }
    result.hp_initial = hp0;
    result.precondition_met = true;
  }

  // populations of the dephased state: p_k = sum_s w_s |<E_k|s>|^2
  for (std::size_t s = 0; s < dim; ++s)
    if (weights(s) > 0.0)
      populations += weights(s) * basis->vectors.row(s).transpose().cwiseAbs2();

  const HamiltonianSpec hp_only = problem_only_spec(shared);
  HamiltonianSpec hd_only = h;
  hd_only.a = 1.0;
  hd_only.b = 0.0;
  const Vector pvals = eigenbasis_diagonal(*basis, hp_only);
  const Vector dvals = eigenbasis_diagonal(*basis, hd_only);
  result.hp_time_avg = populations.dot(pvals);
  const double hd_avg = populations.dot(dvals);

  // conservation of energy across the cycle: g(<Hd> - <Hd>_0) = <Hp>_0 - <Hp>
  // where <Hd>_0 = 0 for basis-state (or classical-mixture) inputs
  result.energy_identity_residual =
      std::abs(g * (hd_avg - 0.0) - (result.hp_initial - result.hp_time_avg));

  // outcome distribution of H_p values in the dephased state
  std::map<double, double> by_value;
  for (std::size_t z = 0; z < dim; ++z) {
    const double prob = basis->vectors.row(z).cwiseAbs2().dot(populations);
    by_value[problem.energy(z)] += prob;
  }
  result.hp_distribution.assign(by_value.begin(), by_value.end());

  if (grid_points > 0 && initial) {
    if (!(t1 > 0.0))
      throw std::invalid_argument("warmstart_ctqw: t1 must be > 0 for a trace");
    std::vector<double> grid;
    for (int i = 0; i <= grid_points; ++i)
      grid.push_back(t1 * double(i) / double(grid_points));
    EvolveOptions opts;
    opts.cache = cache;
    result.traj = evolve(h, {}, basis_state(n, *initial), grid, opts);
  }
  return result;
}

// --- cyclic drives ------------------------------------------------------------------

Schedule ProtocolConfig::drive_schedule() const {
  return Schedule::square_gaussian(Channel::DriverCoeff, drive_amplitude,
                                   0.5 * t_cyc, drive_width_frac * t_cyc,
                                   t_cyc);
}

void ProtocolConfig::validate() const {
  if (k_max < k || k < 1)
    throw std::invalid_argument("ProtocolConfig: need k_max >= k >= 1");
  if (t_cyc <= 0.0 || drive_width_frac <= 0.0)
    throw std::invalid_argument("ProtocolConfig: bad drive geometry");
}

ComplexMatrix cyclic_unitary(const HamiltonianSpec& h0, const Schedule& drive,
                             double rtol) {
  const int n = h0.n();
  if (n > kDenseProtocolCap)
    throw SizeCapError("cyclic_unitary: n exceeds the dense protocol cap");
  if (drive.channel() != Channel::DriverCoeff)
    throw std::invalid_argument("cyclic_unitary: drive must sit on the driver");
  double peak = 0.0;
  for (int i = 0; i <= 256; ++i)
    peak = std::max(peak,
                    std::abs(drive.value(drive.t_final() * i / 256.0)));
  const double edge = std::max(std::abs(drive.value(0.0)),
                               std::abs(drive.value(drive.t_final())));
  if (peak > 0.0 && edge > 1e-8 * peak)
    throw std::invalid_argument("cyclic_unitary: drive is not cyclic");

  const std::size_t dim = h0.dim();
  ComplexMatrix u = ComplexMatrix::Identity(dim, dim);
  HamiltonianSpec h = h0;
  auto rhs = [&](double t, const ComplexMatrix& y, ComplexMatrix& out) {
    h.a = drive.value(t);
    h.apply(y, out);
    out *= std::complex<double>(0.0, -1.0);
  };
  auto guard = [](double, ComplexMatrix&) {};
  detail::rk45_integrate(rhs, u, 0.0, drive.t_final(), rtol, 1e-13, guard);

  // polar projection onto the unitary group absorbs the accumulated
  // integrator drift; the correction magnitude is itself a health check
  Eigen::JacobiSVD<ComplexMatrix> svd(u, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const ComplexMatrix unitary = svd.matrixU() * svd.matrixV().adjoint();
  if ((unitary - u).norm() > 1e-6 * std::sqrt(double(dim)))
    throw std::runtime_error(
        "cyclic_unitary: propagator drifted too far from the unitary group");
  return unitary;
}

Matrix transition_matrix(const ComplexMatrix& u, double tol) {
  const Matrix p = u.cwiseAbs2();
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    if (std::abs(p.row(i).sum() - 1.0) > tol ||
        std::abs(p.col(i).sum() - 1.0) > tol)
      throw std::runtime_error(
          "transition_matrix: row/column sums deviate from 1 (propagator "
          "tolerance too loose)");
  }
  return p;
}

ComplexVector apply_cycle(const HamiltonianSpec& h0, const Schedule& drive,
                          const ComplexVector& psi, double rtol) {
  HamiltonianSpec h = h0;
  ComplexVector state = psi;
  auto rhs = [&](double t, const ComplexVector& y, ComplexVector& out) {
    h.a = drive.value(t);
    h.apply(y, out);
    out *= std::complex<double>(0.0, -1.0);
  };
  auto guard = [](double, ComplexVector& y) { y /= y.norm(); };
  detail::rk45_integrate(rhs, state, 0.0, drive.t_final(), rtol, 1e-12, guard);
  return state;
}

// --- shot loops ----------------------------------------------------------------------

namespace {

std::uint64_t sample_bitstring(const ComplexVector& psi, RngStream& rng) {
  double u = rng.uniform01();
  for (Eigen::Index z = 0; z < psi.size(); ++z) {
    u -= std::norm(psi(z));
    if (u <= 0.0) return std::uint64_t(z);
  }
  return std::uint64_t(psi.size() - 1);
}

std::uint64_t draw_initial(const IsingProblem& problem,
                           const std::vector<double>& dist, RngStream& rng) {
  if (dist.empty()) {
    const std::vector<double> fallback = below_mean_uniform(problem);
    return rng.sample(fallback);
  }
  if (dist.size() != problem.dim())
    throw std::invalid_argument("protocol: initial distribution has wrong size");
  return rng.sample(dist);
}

ProtocolSummary summarise(const IsingProblem& problem,
                          const std::vector<ShotRecord>& shots,
                          double best_hp) {
  ProtocolSummary s;
  const double gs = ground_state_energy(problem);
  s.best_hp = best_hp;
  s.shots_used = int(shots.size());
  s.found_ground = best_hp <= gs + ground_tolerance(problem);
  s.approx_ratio = gs != 0.0 ? best_hp / gs : (best_hp == 0.0 ? 1.0 : 0.0);
  return s;
}

}  // namespace

ProtocolResult rqa_run(const IsingProblem& problem,
                       const ProtocolConfig& config,
                       const std::vector<double>& initial_dist) {
  config.validate();
  const int n = problem.n();
  auto shared = std::make_shared<IsingProblem>(problem);
  HamiltonianSpec h0;
  h0.driver = DriverSpec::transverse_field(n);
  h0.problem = shared;
  h0.b = 1.0;
  const Schedule drive = config.drive_schedule();

  RngStream rng = RngStream::substream(config.seed, 0x52514100);  // "RQA"
  std::uint64_t current = draw_initial(problem, initial_dist, rng);

  // the cycle Hamiltonian is shot-independent: evolved states are reusable
  std::unordered_map<std::uint64_t, ComplexVector> evolved;

  ProtocolResult result;
  double best_hp = problem.energy(current);
  int stall = 0;
  for (int shot = 1; shot <= config.k_max; ++shot) {
    auto it = evolved.find(current);
    if (it == evolved.end())
      it = evolved
               .emplace(current, apply_cycle(h0, drive, basis_state(n, current),
                                             config.integrator_rtol))
               .first;
    const ComplexVector& psi = it->second;
    const std::uint64_t output = sample_bitstring(psi, rng);

    ShotRecord rec;
    rec.shot = shot;
    rec.input = current;
    rec.output = output;
    rec.hp_in = problem.energy(current);
    rec.hp_out = problem.energy(output);
    rec.alpha = 0.0;
    rec.accepted = rec.hp_out < rec.hp_in;
    double hp_final = 0.0;
    for (Eigen::Index z = 0; z < psi.size(); ++z)
      hp_final += problem.energy(z) * std::norm(psi(z));
    rec.work = rec.hp_in - hp_final;
    result.shots.push_back(rec);

    if (rec.accepted) {
      current = output;
      best_hp = std::min(best_hp, rec.hp_out);
      stall = 0;
    } else {
      ++stall;
    }
    if (stall >= config.k) break;
  }
  result.summary = summarise(problem, result.shots, best_hp);
  return result;
}

ProtocolResult bqa_run(const IsingProblem& problem,
                       const ProtocolConfig& config,
                       std::optional<std::uint64_t> initial) {
  config.validate();
  const int n = problem.n();
  auto shared = std::make_shared<IsingProblem>(problem);
  const Schedule drive = config.drive_schedule();
  const double alpha0 =
      config.alpha0 >= 0.0 ? config.alpha0 : std::sqrt(problem.mean_square());

  RngStream rng = RngStream::substream(config.seed, 0x42514100);  // "BQA"
  std::uint64_t current;
  if (initial) {
    current = *initial;
    if (problem.energy(current) >= problem.mean_energy())
      std::clog << "bqa_run: initial string is not better than random\n";
  } else {
    // redraw until the better-than-random condition is met
    do {
      current = rng.below(problem.dim());
    } while (problem.energy(current) >= problem.mean_energy());
  }

  ProtocolResult result;
  double best_hp = problem.energy(current);
  double alpha = alpha0;
  int stall = 0;
  for (int shot = 1; shot <= config.k_max; ++shot) {
    HamiltonianSpec h0;
    h0.driver = DriverSpec::transverse_field(n);
    h0.problem = shared;
    h0.b = 1.0;
    h0.bias = DriverSpec::biased_local(n, current, alpha);

    const ComplexVector psi = apply_cycle(h0, drive, basis_state(n, current),
                                          config.integrator_rtol);
    const std::uint64_t output = sample_bitstring(psi, rng);

    ShotRecord rec;
    rec.shot = shot;
    rec.input = current;
    rec.output = output;
    rec.hp_in = problem.energy(current);
    rec.hp_out = problem.energy(output);
    rec.alpha = alpha;
    rec.accepted = rec.hp_out < rec.hp_in;
    double e_final = 0.0;
    for (Eigen::Index z = 0; z < psi.size(); ++z)
      e_final += (problem.energy(z) + h0.bias->diagonal_energy(z)) *
                 std::norm(psi(z));
    const double e_init =
        rec.hp_in + h0.bias->diagonal_energy(current);  // = hp_in - alpha n
    rec.work = e_init - e_final;
    result.shots.push_back(rec);

    if (rec.accepted) {
      current = output;
      best_hp = std::min(best_hp, rec.hp_out);
      stall = 0;
      if (config.reset_alpha_on_accept) alpha = alpha0;
    } else {
      ++stall;
      alpha += (config.alpha_increase ? 1.0 : -1.0) * alpha0 / double(config.k);
      if (alpha < 0.0) {
        std::clog << "bqa_run: alpha clamped at 0\n";
        alpha = 0.0;
      }
    }
    if (stall >= config.k) break;
  }
  result.summary = summarise(problem, result.shots, best_hp);
  return result;
}

RqaDenseResult rqa_dense(const IsingProblem& problem,
                         const ProtocolConfig& config,
                         const std::vector<double>& initial_dist,
                         double inv_psuc_cutoff) {
  config.validate();
  const int n = problem.n();
  auto shared = std::make_shared<IsingProblem>(problem);
  HamiltonianSpec h0;
  h0.driver = DriverSpec::transverse_field(n);
  h0.problem = shared;
  h0.b = 1.0;
  const Matrix p_kernel =
      transition_matrix(cyclic_unitary(h0, config.drive_schedule()));

  const std::size_t dim = problem.dim();
  Vector energies(dim);
  for (std::size_t z = 0; z < dim; ++z) energies(z) = problem.energy(z);

  Vector p(dim);
  if (initial_dist.empty()) {
    const auto d = below_mean_uniform(problem);
    for (std::size_t z = 0; z < dim; ++z) p(z) = d[z];
  } else {
    if (initial_dist.size() != dim)
      throw std::invalid_argument("rqa_dense: initial distribution size");
    for (std::size_t z = 0; z < dim; ++z) p(z) = initial_dist[z];
    p /= p.sum();
  }

  RqaDenseResult result;
  for (int iter = 1; iter <= config.k_max; ++iter) {
    const Vector q = p_kernel * p;  // distribution straight after the cycle
    result.hp_sampled.push_back(q.dot(energies));
    result.sd_sampled.push_back(diagonal_entropy(q));

    // post-select on strictly lower energy than the input string
    Vector post = Vector::Zero(dim);
    double psuc = 0.0;
    for (std::size_t s = 0; s < dim; ++s) {
      if (p(s) <= 0.0) continue;
      for (std::size_t j = 0; j < dim; ++j)
        if (energies(j) < energies(s)) {
          post(j) += p_kernel(j, s) * p(s);
          psuc += p_kernel(j, s) * p(s);
        }
    }
    result.psuc.push_back(psuc);
    result.iterations = iter;
    if (psuc <= 0.0 || 1.0 / psuc > inv_psuc_cutoff) break;
    post /= psuc;
    result.hp_post.push_back(post.dot(energies));
    result.sd_post.push_back(diagonal_entropy(post));
    p = post;
  }
  return result;
}

// --- entropy accounting ----------------------------------------------------------------

EntropyLedger entropy_accounting(
    const std::vector<std::pair<std::uint64_t, double>>& dist,
    const std::function<ComplexVector(std::uint64_t)>& cycle) {
  if (dist.empty())
    throw std::invalid_argument("entropy_accounting: empty distribution");
  double total = 0.0;
  for (const auto& [z, p] : dist) total += p;
  if (std::abs(total - 1.0) > 1e-9)
    throw std::invalid_argument("entropy_accounting: probabilities must sum to 1");

  EntropyLedger ledger;
  std::unordered_map<std::uint64_t, double> q_marginal;
  double sd_joint = 0.0, sd_c = 0.0;
  for (const auto& [z, p] : dist) {
    if (p <= 0.0) continue;
    ComplexVector psi = cycle(z);
    psi /= psi.norm();  // keep the C marginal exact
    for (Eigen::Index j = 0; j < psi.size(); ++j) {
      const double w = p * std::norm(psi(j));
      if (w > 0.0) {
        sd_joint -= w * std::log(w);
        q_marginal[std::uint64_t(j)] += w;
      }
    }
    sd_c -= p * std::log(p);
  }
  double sd_q = 0.0;
  for (const auto& [j, w] : q_marginal)
    if (w > 0.0) sd_q -= w * std::log(w);
  ledger.sd_joint = sd_joint;
  ledger.sd_q = sd_q;
  ledger.sd_c = sd_c;
  return ledger;
}

std::string shots_to_csv(const std::vector<ShotRecord>& shots, int n) {
  std::ostringstream out;
  out << "shot,input,output,hp_in,hp_out,alpha,accepted,work\n";
  for (const auto& s : shots)
    out << s.shot << ',' << bitstring(s.input, n) << ','
        << bitstring(s.output, n) << ',' << format_g12(s.hp_in) << ','
        << format_g12(s.hp_out) << ',' << format_g12(s.alpha) << ','
        << (s.accepted ? 1 : 0) << ',' << format_g12(s.work) << '\n';
  return out.str();
}

}  // namespace quench
