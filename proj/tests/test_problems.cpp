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

#include <Eigen/Dense>
#include <algorithm>

#include "quench/problems.hpp"
#include "quench/rng.hpp"

using namespace quench;

namespace {

Graph triangle_graph() {
  Graph g;
  g.n = 3;
  g.edges = {{0, 1}, {0, 2}, {1, 2}};
  return g;
}

// independent spin-evaluation oracle: walks bits explicitly
double brute_force_energy(int n, const std::vector<ZZTerm>& zz,
                          const std::vector<FieldTerm>& fields,
                          std::uint64_t z) {
  (void)n;
  auto spin = [&](int i) { return ((z >> i) & 1u) ? -1.0 : 1.0; };
  double e = 0.0;
  for (const auto& t : zz) e += t.weight * spin(t.i) * spin(t.j);
  for (const auto& t : fields) e += t.weight * spin(t.i);
  return e;
}

}  // namespace

TEST_CASE("binomial graph generation") {
  SUBCASE("p = 1 forces the complete graph") {
    const Graph g = gen_binomial_graph(2, 1.0, 123);
    REQUIRE(g.edges.size() == 1);
    CHECK(g.edges[0] == std::pair<int, int>{0, 1});
  }
  SUBCASE("p = 0 forces the empty graph") {
    CHECK(gen_binomial_graph(5, 0.0, 7).edges.empty());
  }
  SUBCASE("rejects n = 0") {
    CHECK_THROWS_AS(gen_binomial_graph(0, 0.5, 1), std::invalid_argument);
  }
  SUBCASE("identical seeds reproduce byte-for-byte") {
    const Graph a = gen_binomial_graph(12, 2.0 / 3.0, 42);
    const Graph b = gen_binomial_graph(12, 2.0 / 3.0, 42);
    CHECK(a.edges == b.edges);
    const Graph c = gen_binomial_graph(12, 2.0 / 3.0, 43);
    CHECK(a.edges != c.edges);
  }
  SUBCASE("edge density approaches p") {
    const Graph g = gen_binomial_graph(13, 2.0 / 3.0, 999);
    const double density = double(g.edge_count()) / (13.0 * 12.0 / 2.0);
    CHECK(density == doctest::Approx(2.0 / 3.0).epsilon(0.25));
  }
}

TEST_CASE("triangle count matches the trace oracle") {
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL, 4ULL}) {
    const Graph g = gen_binomial_graph(9, 2.0 / 3.0, seed);
    Eigen::MatrixXd adj = Eigen::MatrixXd::Zero(g.n, g.n);
    for (auto [i, j] : g.edges) adj(i, j) = adj(j, i) = 1.0;
    const double trace_count = (adj * adj * adj).trace() / 6.0;
    CHECK(double(g.triangle_count()) == doctest::Approx(trace_count));
  }
}

TEST_CASE("MAX-CUT energies") {
  SUBCASE("K2 table") {
    Graph g;
    g.n = 2;
    g.edges = {{0, 1}};
    const IsingProblem p = maxcut_problem(g);
    CHECK(p.energy(0b00) == 1.0);
    CHECK(p.energy(0b01) == -1.0);
    CHECK(p.energy(0b10) == -1.0);
    CHECK(p.energy(0b11) == 1.0);
    CHECK(ground_state_energy(p) == -1.0);
  }
  SUBCASE("K3 spectrum by enumeration") {
    const IsingProblem p = maxcut_problem(triangle_graph());
    CHECK(ground_state_energy(p) == -1.0);
    CHECK(*std::max_element(p.energies().begin(), p.energies().end()) == 3.0);
    CHECK(p.kappa2() == 3.0);
    CHECK(p.kappa3() == 1.0);
  }
  SUBCASE("empty graph is identically zero") {
    Graph g;
    g.n = 4;
    const IsingProblem p = maxcut_problem(g);
    for (double e : p.energies()) CHECK(e == 0.0);
    CHECK(ground_state_energy(p) == 0.0);
  }
  SUBCASE("mean 0 and mean square kappa2 for random graphs") {
    for (std::uint64_t seed : {10ULL, 20ULL, 30ULL}) {
      const Graph g = gen_binomial_graph(10, 2.0 / 3.0, seed);
      const IsingProblem p = maxcut_problem(g);
      CHECK(p.mean_energy() == doctest::Approx(0.0).epsilon(1e-12));
      CHECK(p.mean_square() == doctest::Approx(p.kappa2()).epsilon(1e-12));
      CHECK(p.energy_variance() == doctest::Approx(p.kappa2()).epsilon(1e-12));
    }
  }
  SUBCASE("rejects n above the cap") {
    Graph g;
    g.n = kMaxQubits + 1;
    CHECK_THROWS_AS(maxcut_problem(g), SizeCapError);
  }
}

TEST_CASE("SK instances") {
  SUBCASE("energies match the brute-force oracle") {
    const IsingProblem p = sk_problem(3, 77);
    for (std::uint64_t z = 0; z < 8; ++z)
      CHECK(p.energy(z) == doctest::Approx(brute_force_energy(
                                               3, p.zz_terms(),
                                               p.field_terms(), z))
                               .epsilon(1e-14));
  }
  SUBCASE("global flip negates the field part only") {
    const IsingProblem p = sk_problem(5, 5);
    const std::uint64_t mask = (1u << 5) - 1;
    for (std::uint64_t z = 0; z < 32; ++z) {
      double coupling = 0.0, field = 0.0;
      for (const auto& t : p.zz_terms())
        coupling +=
            t.weight * IsingProblem::spin(z, t.i) * IsingProblem::spin(z, t.j);
      for (const auto& t : p.field_terms())
        field += t.weight * IsingProblem::spin(z, t.i);
      CHECK(p.energy(z ^ mask) ==
            doctest::Approx(coupling - field).epsilon(1e-12));
    }
  }
  SUBCASE("deterministic given seed") {
    const IsingProblem a = sk_problem(6, 11);
    const IsingProblem b = sk_problem(6, 11);
    CHECK(a.energies() == b.energies());
  }
  SUBCASE("no triangle count") { CHECK(!sk_problem(4, 1).kappa3().has_value()); }
}

TEST_CASE("coupling table invariant at full enumeration") {
  // energies[z] must equal the symbolic evaluation for every bitstring
  const Graph g = gen_binomial_graph(7, 2.0 / 3.0, 3);
  const IsingProblem mc = maxcut_problem(g);
  for (std::uint64_t z = 0; z < mc.dim(); ++z)
    CHECK(mc.energy(z) == doctest::Approx(mc.evaluate_couplings(z)));
}

TEST_CASE("JSON round trips recompute energies") {
  SUBCASE("MAX-CUT") {
    const IsingProblem p = maxcut_problem(gen_binomial_graph(6, 0.5, 17));
    const IsingProblem q = problem_from_json(problem_to_json(p));
    CHECK(p.energies() == q.energies());
    CHECK(p.kappa2() == q.kappa2());
    CHECK(p.kappa3() == q.kappa3());
    CHECK(q.seed() == 17);
  }
  SUBCASE("SK") {
    const IsingProblem p = sk_problem(5, 33);
    const IsingProblem q = problem_from_json(problem_to_json(p));
    for (std::size_t z = 0; z < p.dim(); ++z)
      CHECK(p.energy(z) == doctest::Approx(q.energy(z)).epsilon(1e-15));
  }
  SUBCASE("graph") {
    const Graph g = gen_binomial_graph(8, 0.4, 21);
    const Graph h = graph_from_json(graph_to_json(g));
    CHECK(g.edges == h.edges);
    CHECK(g.n == h.n);
  }
}

TEST_CASE("substreams are independent and reproducible") {
  RngStream a = RngStream::substream(99, 0);
  RngStream b = RngStream::substream(99, 1);
  RngStream a2 = RngStream::substream(99, 0);
  const double x = a.uniform01();
  CHECK(x == a2.uniform01());
  CHECK(x != b.uniform01());
}

TEST_CASE("normal draws have sane moments") {
  RngStream rng(4242);
  double sum = 0.0, sum2 = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    sum += x;
    sum2 += x * x;
  }
  CHECK(sum / n == doctest::Approx(0.0).epsilon(0.05));
  CHECK(std::abs(sum2 / n - 1.0) < 0.05);
}
