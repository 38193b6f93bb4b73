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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "quench/dynamics.hpp"
#include "quench/statmech.hpp"

using namespace quench;

namespace {

HamiltonianSpec make_spec(const IsingProblem& p, double a, double b) {
  HamiltonianSpec h;
  h.driver = DriverSpec::transverse_field(p.n());
  h.problem = std::make_shared<IsingProblem>(p);
  h.a = a;
  h.b = b;
  return h;
}

std::vector<double> linspace(double t0, double t1, int count) {
  std::vector<double> g(count);
  for (int i = 0; i < count; ++i)
    g[i] = t0 + (t1 - t0) * double(i) / double(count - 1);
  return g;
}

}  // namespace

TEST_CASE("schedule evaluation conventions") {
  const Schedule pc = Schedule::piecewise_constant(
      Channel::ProblemCoeff, {{0.0, 0.3}, {2.0, 0.7}, {5.0, 1.5}}, 8.0);
  CHECK(pc.value(0.0) == 0.3);
  CHECK(pc.value(2.0) == 0.3);  // value applies on (t_k, t_{k+1}]
  CHECK(pc.value(2.0 + 1e-9) == 0.7);
  CHECK(pc.value(5.0) == 0.7);
  CHECK(pc.value(8.0) == 1.5);
  CHECK(pc.derivative(3.0) == 0.0);
  CHECK(pc.breakpoints() == std::vector<double>{2.0, 5.0});

  const Schedule lin = Schedule::linear(Channel::DriverCoeff, 1.3, 0.3, 10.0);
  CHECK(lin.value(0.0) == 1.3);
  CHECK(lin.value(10.0) == doctest::Approx(0.3));
  CHECK(lin.derivative(4.0) == doctest::Approx(-0.1));

  const Schedule sg =
      Schedule::square_gaussian(Channel::DriverCoeff, 2.0, 5.0, 2.0, 10.0);
  CHECK(sg.value(5.0) == 2.0);
  CHECK(sg.value(3.0) == doctest::Approx(2.0 * std::exp(-1.0)));
  // centred drive is symmetric
  CHECK(sg.value(4.0) == doctest::Approx(sg.value(6.0)));

  CHECK_THROWS_AS(Schedule::piecewise_constant(
                      Channel::ProblemCoeff, {{0.0, 1.0}, {1.0, 0.5}}, 2.0,
                      /*require_monotone=*/true),
                  std::invalid_argument);
  CHECK_THROWS_AS(lin.value(11.0), std::invalid_argument);

  const Schedule tab = Schedule::tabulated(
      Channel::ProblemCoeff, {{0.0, 0.0}, {1.0, 1.0}, {3.0, 0.0}}, 3.0);
  CHECK(tab.value(0.5) == doctest::Approx(0.5));
  CHECK(tab.value(2.0) == doctest::Approx(0.5));

  const Schedule stretched = pc.stretched(2.0);
  CHECK(stretched.t_final() == 16.0);
  CHECK(stretched.value(4.0) == 0.3);
  CHECK(stretched.value(4.0 + 1e-9) == 0.7);
}

TEST_CASE("stationary state under the pure transverse field") {
  const IsingProblem p = maxcut_problem(gen_binomial_graph(5, 0.6, 3));
  HamiltonianSpec h = make_spec(p, 1.0, 0.0);
  const Trajectory traj =
      evolve(h, {}, plus_state(5), linspace(0.0, 4.0, 9));
  for (double hp : traj.hp)
    CHECK(hp == doctest::Approx(p.mean_energy()).epsilon(1e-9));
  for (double hd : traj.hd) CHECK(hd == doctest::Approx(-5.0).epsilon(1e-9));
}

TEST_CASE("single-qubit Rabi oracle: <Z(t)> = cos(2t)") {
  // H = -X, psi0 = |0>; the standard analytic solution
  const IsingProblem z_observable =
      IsingProblem::from_couplings(1, {}, {{0, 1.0}});
  HamiltonianSpec h = make_spec(z_observable, 1.0, 0.0);

  SUBCASE("exact segment path") {
    const Trajectory traj =
        evolve(h, {}, basis_state(1, 0), linspace(0.0, 3.0, 31));
    for (std::size_t i = 0; i < traj.size(); ++i)
      CHECK(traj.hp[i] ==
            doctest::Approx(std::cos(2.0 * traj.times[i])).epsilon(1e-9));
  }
  SUBCASE("adaptive integrator path") {
    EvolveOptions opts;
    opts.force_integrator = true;
    const Trajectory traj =
        evolve(h, {}, basis_state(1, 0), linspace(0.0, 3.0, 31), opts);
    for (std::size_t i = 0; i < traj.size(); ++i)
      CHECK(traj.hp[i] ==
            doctest::Approx(std::cos(2.0 * traj.times[i])).epsilon(1e-7));
  }
}

TEST_CASE("norm and segment-energy conservation on an MSQW staircase") {
  const IsingProblem p = maxcut_problem(gen_binomial_graph(6, 2.0 / 3.0, 11));
  HamiltonianSpec h = make_spec(p, 1.0, 0.0);
  const Schedule gamma = Schedule::piecewise_constant(
      Channel::ProblemCoeff, {{0.0, 0.2}, {3.0, 0.6}, {6.0, 1.1}}, 9.0);
  EvolveOptions opts;
  opts.store_states = true;
  const Trajectory traj =
      evolve(h, {gamma}, plus_state(6), linspace(0.0, 9.0, 91), opts);

  for (const auto& psi : traj.states)
    CHECK(std::abs(psi.norm() - 1.0) <= 1e-10);

  // energy constant within each stage to 1e-9 relative
  auto check_constant = [&](double t0, double t1) {
    double ref = 0.0;
    bool first = true;
    for (std::size_t i = 0; i < traj.size(); ++i) {
      if (traj.times[i] > t0 + 1e-12 && traj.times[i] <= t1 + 1e-12) {
        if (first) {
          ref = traj.energy[i];
          first = false;
        }
        CHECK(traj.energy[i] ==
              doctest::Approx(ref).epsilon(1e-9));
      }
    }
  };
  check_constant(0.0, 3.0);
  check_constant(3.0, 6.0);
  check_constant(6.0, 9.0);
}

TEST_CASE("quench energy bookkeeping is an expectation identity") {
  const IsingProblem p = maxcut_problem(gen_binomial_graph(6, 2.0 / 3.0, 13));
  HamiltonianSpec h = make_spec(p, 1.0, 0.0);
  const double t_quench = 2.5;
  const Schedule gamma = Schedule::piecewise_constant(
      Channel::ProblemCoeff, {{0.0, 0.4}, {t_quench, 0.9}}, 5.0);
  EvolveOptions opts;
  opts.store_states = true;
  const Trajectory traj =
      evolve(h, {gamma}, plus_state(6), {t_quench, 5.0}, opts);

  const ComplexVector& psi_at_quench = traj.states[0];
  const double hp_at_quench = traj.hp[0];
  const double e_before = h.with_coefficients(1.0, 0.4).expectation(psi_at_quench);
  const double e_after = h.with_coefficients(1.0, 0.9).expectation(psi_at_quench);
  CHECK(e_after - e_before ==
        doctest::Approx((0.9 - 0.4) * hp_at_quench).epsilon(1e-12));
}

TEST_CASE("exact segments agree with the adaptive integrator") {
  const IsingProblem p = maxcut_problem(gen_binomial_graph(5, 2.0 / 3.0, 17));
  HamiltonianSpec h = make_spec(p, 1.0, 0.0);
  const Schedule gamma = Schedule::piecewise_constant(
      Channel::ProblemCoeff, {{0.0, 0.3}, {2.0, 0.8}}, 4.0);
  const auto grid = linspace(0.0, 4.0, 21);
  const Trajectory exact = evolve(h, {gamma}, plus_state(5), grid);
  EvolveOptions opts;
  opts.force_integrator = true;
  opts.rtol = 1e-9;
  const Trajectory rk = evolve(h, {gamma}, plus_state(5), grid, opts);
  for (std::size_t i = 0; i < grid.size(); ++i)
    CHECK(exact.hp[i] == doctest::Approx(rk.hp[i]).epsilon(1e-7));
}

TEST_CASE("stage averages") {
  Trajectory traj;
  traj.times = {0.5, 1.0, 1.5, 2.0, 2.5, 3.0};
  traj.hp = {10.0, 2.0, 4.0, 6.0, 2.0, 4.0};
  SUBCASE("constant series returns the constant") {
    Trajectory c;
    c.times = {0.5, 1.0, 1.5, 2.0};
    c.hp = {3.0, 3.0, 3.0, 3.0};
    CHECK(stage_average(c, 0.0, 2.0, 0.0) == doctest::Approx(3.0));
  }
  SUBCASE("burn-in discards the leading samples") {
    CHECK(stage_average(traj, 0.0, 3.0, 0.75) == doctest::Approx(3.6));
  }
  SUBCASE("empty window throws") {
    CHECK_THROWS_AS(stage_average(traj, 0.0, 0.4, 0.2), std::invalid_argument);
    CHECK_THROWS_AS(stage_average(traj, 0.0, 3.0, 3.5), std::invalid_argument);
  }
}

TEST_CASE("pure eigenstate stage average is the point value") {
  const IsingProblem p = maxcut_problem(gen_binomial_graph(4, 0.7, 2));
  HamiltonianSpec h = make_spec(p, 0.0, 1.0);  // diagonal: basis states are stationary
  const Trajectory traj =
      evolve(h, {}, basis_state(4, 6), linspace(0.0, 2.0, 11));
  CHECK(stage_average(traj, 0.0, 2.0, 0.2) ==
        doctest::Approx(p.energy(6)).epsilon(1e-12));
}

TEST_CASE("cyclic quench work") {
  const IsingProblem p = maxcut_problem(gen_binomial_graph(6, 2.0 / 3.0, 29));
  HamiltonianSpec h = make_spec(p, 1.0, 0.0);

  SUBCASE("eigenstate of the gamma1 Hamiltonian gives W = 0") {
    // with no driver the basis states are stationary across the whole cycle
    HamiltonianSpec diag = h.with_coefficients(0.0, 0.0);
    const double w =
        cyclic_quench_work(diag, 0.5, 0.9, 2.0, 4.0, basis_state(6, 9));
    CHECK(w == doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("Planck's principle on the driver ground state") {
    // |+...+> is passive for the stage-1 Hamiltonian at small gamma, so the
    // cyclic quench cannot extract work beyond fluctuation scale
    const double w = cyclic_quench_work(h, 0.2, 0.8, 6.0, 12.0, plus_state(6));
    CHECK(w <= 1e-6);
  }
  SUBCASE("precondition validation") {
    CHECK_THROWS_AS(cyclic_quench_work(h, 0.9, 0.5, 2.0, 4.0, plus_state(6)),
                    std::invalid_argument);
  }
}

TEST_CASE("trajectory CSV schema") {
  Trajectory traj;
  traj.times = {0.0, 1.0};
  traj.hp = {1.5, -2.0};
  traj.hd = {-3.0, -2.5};
  traj.energy = {-1.5, -4.5};
  const std::string csv = traj.to_csv();
  CHECK(csv.substr(0, 19) == "t,hp,hd,energy,sd\n0");
  CHECK(csv.find("1,-2,-2.5,-4.5,") != std::string::npos);
}

TEST_CASE("norm guard rejects non-normalised input") {
  const IsingProblem p = maxcut_problem(gen_binomial_graph(3, 0.5, 1));
  HamiltonianSpec h = make_spec(p, 1.0, 0.2);
  ComplexVector bad = plus_state(3) * 1.5;
  CHECK_THROWS_AS(evolve(h, {}, bad, {1.0}), std::invalid_argument);
}
