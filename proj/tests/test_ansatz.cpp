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

#include "quench/ansatz.hpp"
#include "quench/rng.hpp"

using namespace quench;

namespace {

// moments with no backing problem: mu = 0, sigma2 = a^2 n + b^2 kappa2,
// delta^3 = 3 kappa3 b^3, the MAX-CUT transverse-field structure
AnalyticMoments synthetic_maxcut(int n, double kappa2, double kappa3) {
  AnalyticMoments m;
  m.trd2 = double(n);
  m.trp2 = kappa2;
  m.m3p = 6.0 * kappa3;
  m.delta_slope = std::cbrt(3.0 * kappa3);
  return m;
}

}  // namespace

TEST_CASE("analytic moments from a real MAX-CUT instance") {
  const IsingProblem p = maxcut_problem(gen_binomial_graph(7, 2.0 / 3.0, 91));
  const AnalyticMoments m =
      AnalyticMoments::for_problem(DriverSpec::transverse_field(7), p);
  CHECK(m.mu(1.1, 0.7) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(m.sigma2(1.1, 0.7) ==
        doctest::Approx(1.1 * 1.1 * 7 + 0.7 * 0.7 * p.kappa2()).epsilon(1e-12));
  const double d = m.delta(0.7);
  CHECK(d * d * d ==
        doctest::Approx(3.0 * *p.kappa3() * 0.7 * 0.7 * 0.7).epsilon(1e-9));
  CHECK(d > 0.0);  // frustrated low-energy tail: positive skew parameter
}

TEST_CASE("gaussian beta inversion is the algebraic identity") {
  const AnalyticMoments m = synthetic_maxcut(10, 30.0, 0.0);
  const GaussianBackend backend(m);
  RngStream rng(5);
  for (int rep = 0; rep < 30; ++rep) {
    const double a = 0.2 + rng.uniform01();
    const double b = 0.2 + rng.uniform01();
    const double beta = 2.0 * rng.uniform01() - 0.5;
    const double e = backend.energy(beta, a, b);
    CHECK(backend.solve_beta(e, a, b, -1.0) ==
          doctest::Approx((m.mu(a, b) - e) / m.sigma2(a, b)).epsilon(1e-12));
    CHECK(backend.solve_beta(e, a, b, -1.0) ==
          doctest::Approx(beta).epsilon(1e-12));
  }
}

TEST_CASE("gaussian closed form") {
  const AnalyticMoments m = synthetic_maxcut(10, 30.0, 0.0);
  const double tf = 12.0;
  const Schedule a = Schedule::linear(Channel::DriverCoeff, 1.3, 0.3, tf);
  const Schedule b = Schedule::linear(Channel::ProblemCoeff, 0.3, 1.3, tf);

  SUBCASE("c = 0 pins the infinite-temperature fixed point") {
    std::vector<double> grid{0.0, 4.0, 8.0, 12.0};
    const PstqaTrajectory traj = gaussian_closed_form(m, a, b, 0.0, grid);
    for (std::size_t i = 0; i < traj.size(); ++i) {
      CHECK(traj.beta[i] == doctest::Approx(0.0));
      CHECK(traj.hp[i] == doctest::Approx(m.trp_mean));
      CHECK(traj.energy[i] == doctest::Approx(0.0));
    }
  }
  SUBCASE("matches the printed MAX-CUT formula with the |+...+> start") {
    const double e0 = -10.0 * 1.3;  // A(0) <Hd> with <Hd> = -n
    std::vector<double> grid;
    for (int i = 0; i <= 12; ++i) grid.push_back(tf * i / 12.0);
    const PstqaTrajectory traj = gaussian_closed_form(m, a, b, e0, grid);
    for (std::size_t i = 0; i < traj.size(); ++i) {
      const double expect = gaussian_maxcut_hp(10, 30.0, 1.3, 0.3,
                                               traj.a[i], traj.b[i]);
      CHECK(traj.hp[i] == doctest::Approx(expect).epsilon(1e-12));
    }
  }
  SUBCASE("ODE route through the Gaussian backend agrees to 1e-6") {
    // the synthetic spectrum is exactly Gaussian by construction, so the
    // numerically integrated equations must land on the closed form
    const double e0 = -10.0 * 1.3;
    const GaussianBackend backend(m);
    const PstqaTrajectory ode = pstqa_solve(backend, a, b, e0, {tf});
    const PstqaTrajectory closed = gaussian_closed_form(m, a, b, e0, {tf});
    CHECK(std::abs(ode.hp.back() - closed.hp.back()) <= 1e-6);
    CHECK(std::abs(ode.energy.back() - closed.energy.back()) <= 1e-6);
    CHECK(ode.sd_drift() <= 1e-6 * std::abs(ode.sd.front()) + 1e-9);
  }
}

TEST_CASE("emg beta inversion") {
  SUBCASE("E = mu gives beta = 0 through omega = sigma^2") {
    const AnalyticMoments m = synthetic_maxcut(8, 20.0, 4.0);
    CHECK(emg_beta(m, m.mu(1.0, 0.8), 1.0, 0.8) ==
          doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("round trip at positive beta to 1e-9") {
    RngStream rng(31);
    for (int rep = 0; rep < 40; ++rep) {
      AnalyticMoments m;
      m.trd2 = 5.0 + 10.0 * rng.uniform01();
      m.trp2 = 10.0 + 30.0 * rng.uniform01();
      m.trp_mean = 2.0 * rng.uniform01() - 1.0;
      m.delta_slope = 0.2 + 1.5 * rng.uniform01();
      const double a = 0.3 + rng.uniform01();
      const double b = 0.3 + rng.uniform01();
      if (m.delta(b) * m.delta(b) >= 0.9 * m.sigma2(a, b)) continue;
      const double beta_star = 2.0 * rng.uniform01() + 0.01;
      const EmgBackend backend(m);
      const double e = backend.energy(beta_star, a, b);
      const double width = std::sqrt(m.sigma2(a, b));
      CHECK(std::abs(emg_beta(m, e, a, b) - beta_star) <= 1e-9 * width);
    }
  }
  SUBCASE("delta -> 0 limit recovers the Gaussian inversion within 1e-5") {
    for (double slope : {1e-7, 1e-6, 1e-5}) {
      AnalyticMoments m = synthetic_maxcut(10, 30.0, 0.0);
      m.delta_slope = slope;
      const double a = 1.0, b = 0.9;
      const double e = -8.0;
      const double gauss = (m.mu(a, b) - e) / m.sigma2(a, b);
      CHECK(emg_beta(m, e, a, b) == doctest::Approx(gauss).epsilon(1e-5));
    }
  }
  SUBCASE("ill-posed fit is rejected") {
    AnalyticMoments m = synthetic_maxcut(2, 1.0, 50.0);
    CHECK_THROWS_AS(emg_beta(m, -1.0, 0.1, 1.0), std::invalid_argument);
  }
}

TEST_CASE("emg expectations") {
  SUBCASE("beta = 0 gives the trace means") {
    const AnalyticMoments m = synthetic_maxcut(9, 25.0, 5.0);
    const auto [hd, hp] = emg_expectations(m, 1.2, 0.8, 0.0);
    CHECK(hd == doctest::Approx(0.0));
    CHECK(hp == doctest::Approx(0.0));
  }
  SUBCASE("kappa3 = 0 reduces to the Gaussian -beta B kappa2") {
    const AnalyticMoments m = synthetic_maxcut(9, 25.0, 0.0);
    for (double beta : {0.1, 0.5, 1.5}) {
      const auto [hd, hp] = emg_expectations(m, 1.2, 0.8, beta);
      CHECK(hp == doctest::Approx(-beta * 0.8 * 25.0).epsilon(1e-12));
      CHECK(hd == doctest::Approx(-beta * 1.2 * 9.0).epsilon(1e-12));
    }
  }
  SUBCASE("energy balance: A hd + B hp equals the model energy") {
    const AnalyticMoments m = synthetic_maxcut(9, 25.0, 5.0);
    const EmgBackend backend(m);
    RngStream rng(3);
    for (int rep = 0; rep < 20; ++rep) {
      const double a = 0.3 + rng.uniform01();
      const double b = 0.3 + rng.uniform01();
      const double beta = rng.uniform01();
      const auto [hd, hp] = emg_expectations(m, a, b, beta);
      CHECK(a * hd + b * hp ==
            doctest::Approx(backend.energy(beta, a, b)).epsilon(1e-12));
    }
  }
  SUBCASE("pole is rejected") {
    AnalyticMoments m = synthetic_maxcut(9, 25.0, 5.0);
    m.delta_slope = -2.0;  // negative skew: pole at positive beta
    CHECK_THROWS_AS(emg_expectations(m, 1.0, 1.0, 10.0), std::invalid_argument);
  }
}

TEST_CASE("emg pstqa reduces to gaussian at kappa3 = 0") {
  const AnalyticMoments m = synthetic_maxcut(10, 30.0, 0.0);
  const Schedule a = Schedule::linear(Channel::DriverCoeff, 1.3, 0.3, 10.0);
  const Schedule b = Schedule::linear(Channel::ProblemCoeff, 0.3, 1.3, 10.0);
  const double e0 = -13.0;
  const GaussianBackend gauss(m);
  const EmgBackend emg(m);
  const PstqaTrajectory tg = pstqa_solve(gauss, a, b, e0, {10.0});
  const PstqaTrajectory te = pstqa_solve(emg, a, b, e0, {10.0});
  CHECK(std::abs(tg.hp.back() - te.hp.back()) <= 1e-6);
  CHECK(std::abs(tg.energy.back() - te.energy.back()) <= 1e-6);
}

TEST_CASE("emg pstqa on a real instance runs off the analytic moments") {
  const IsingProblem p = maxcut_problem(gen_binomial_graph(8, 2.0 / 3.0, 14));
  const Schedule a = Schedule::linear(Channel::DriverCoeff, 1.1, 0.1, 8.0);
  const Schedule b = Schedule::linear(Channel::ProblemCoeff, 0.1, 1.1, 8.0);
  const double e0 = -8.0 * 1.1;
  const PstqaTrajectory traj =
      emg_pstqa(p, DriverSpec::transverse_field(8), a, b, e0, {0.0, 4.0, 8.0});
  CHECK(traj.backend == "emg");
  CHECK(traj.hp.back() < 0.0);  // cooled below the table mean
  CHECK(traj.sd_drift() <= 1e-6 * std::abs(traj.sd.front()) + 1e-8);
}

TEST_CASE("constant schedule keeps the emg outputs constant") {
  const AnalyticMoments m = synthetic_maxcut(8, 20.0, 4.0);
  const EmgBackend backend(m);
  const Schedule a = Schedule::constant(Channel::DriverCoeff, 0.9, 3.0);
  const Schedule b = Schedule::constant(Channel::ProblemCoeff, 0.7, 3.0);
  const double e0 = backend.energy(0.8, 0.9, 0.7);
  const PstqaTrajectory traj = pstqa_solve(backend, a, b, e0, {0.0, 1.5, 3.0});
  for (std::size_t i = 0; i < traj.size(); ++i) {
    CHECK(traj.hp[i] == doctest::Approx(traj.hp[0]).epsilon(1e-12));
    CHECK(traj.beta[i] == doctest::Approx(0.8).epsilon(1e-9));
  }
}

TEST_CASE("trajectory CSV carries the backend name header") {
  const AnalyticMoments m = synthetic_maxcut(4, 5.0, 1.0);
  const Schedule a = Schedule::constant(Channel::DriverCoeff, 1.0, 1.0);
  const Schedule b = Schedule::constant(Channel::ProblemCoeff, 0.5, 1.0);
  const EmgBackend backend(m);
  const PstqaTrajectory traj =
      pstqa_solve(backend, a, b, backend.energy(0.3, 1.0, 0.5), {1.0});
  const std::string csv = traj.to_csv();
  CHECK(csv.substr(0, 15) == "# backend: emg\n");
  CHECK(csv.find("t,s,A,B,energy,beta,hd,hp,sd\n") != std::string::npos);
}
