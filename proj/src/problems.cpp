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

#include "quench/problems.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "quench/rng.hpp"

namespace quench {

namespace {

std::uint64_t fnv_step(std::uint64_t h, const void* data, std::size_t len) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= bytes[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

void check_cap(int n, const char* what) {
  if (n < 1) throw std::invalid_argument(std::string(what) + ": n must be >= 1");
  if (n > kMaxQubits)
    throw SizeCapError(std::string(what) + ": n = " + std::to_string(n) +
                       " exceeds the dense cap of " +
                       std::to_string(kMaxQubits) + " qubits");
}

}  // namespace

double IsingProblem::evaluate_couplings(std::uint64_t z) const {
  double e = 0.0;
  for (const auto& t : zz_) e += t.weight * spin(z, t.i) * spin(z, t.j);
  for (const auto& t : fields_) e += t.weight * spin(z, t.i);
  return e;
}

IsingProblem IsingProblem::from_couplings(int n, std::vector<ZZTerm> zz,
                                          std::vector<FieldTerm> fields,
                                          std::string family,
                                          std::uint64_t seed) {
  check_cap(n, "IsingProblem");
  for (const auto& t : zz)
    if (t.i < 0 || t.j < 0 || t.i >= n || t.j >= n || t.i == t.j)
      throw std::invalid_argument("IsingProblem: bad ZZ term indices");
  for (const auto& t : fields)
    if (t.i < 0 || t.i >= n)
      throw std::invalid_argument("IsingProblem: bad field index");

  IsingProblem p;
  p.n_ = n;
  p.zz_ = std::move(zz);
  p.fields_ = std::move(fields);
  p.family_ = std::move(family);
  p.seed_ = seed;

  const std::size_t dim = std::size_t(1) << n;
  p.energies_.resize(dim);
  for (std::uint64_t z = 0; z < dim; ++z)
    p.energies_[z] = p.evaluate_couplings(z);

  // spectral moments of the diagonal table in one pass each
  double mean = 0.0, mean_sq = 0.0;
  for (double e : p.energies_) {
    mean += e;
    mean_sq += e * e;
  }
  mean /= double(dim);
  mean_sq /= double(dim);
  double var = 0.0, m3 = 0.0;
  for (double e : p.energies_) {
    const double d = e - mean;
    var += d * d;
    m3 += d * d * d;
  }
  p.mean_ = mean;
  p.mean_sq_ = mean_sq;
  p.var_ = var / double(dim);
  p.m3_ = m3 / double(dim);
  p.kappa2_ = p.var_;

  // hash members individually: struct padding bytes are indeterminate
  std::uint64_t fp = fnv_step(0xcbf29ce484222325ULL, &n, sizeof n);
  for (const auto& t : p.zz_) {
    fp = fnv_step(fp, &t.i, sizeof t.i);
    fp = fnv_step(fp, &t.j, sizeof t.j);
    fp = fnv_step(fp, &t.weight, sizeof t.weight);
  }
  for (const auto& t : p.fields_) {
    fp = fnv_step(fp, &t.i, sizeof t.i);
    fp = fnv_step(fp, &t.weight, sizeof t.weight);
  }
  p.fingerprint_ = fp;
  return p;
}

IsingProblem maxcut_problem(const Graph& graph) {
  graph.validate();
  check_cap(graph.n, "maxcut_problem");
  std::vector<ZZTerm> zz;
  zz.reserve(graph.edges.size());
  for (auto [i, j] : graph.edges) zz.push_back({i, j, 1.0});
  IsingProblem p = IsingProblem::from_couplings(graph.n, std::move(zz), {},
                                                "maxcut", graph.seed);
  p.kappa2_ = double(graph.edge_count());
  p.kappa3_ = double(graph.triangle_count());
  p.graph_ = graph;
  return p;
}

IsingProblem sk_problem(int n, std::uint64_t seed) {
  check_cap(n, "sk_problem");
  RngStream rng(seed);
  std::vector<ZZTerm> zz;
  zz.reserve(std::size_t(n) * (n - 1) / 2);
  for (int i = 1; i < n; ++i)
    for (int j = 0; j < i; ++j) zz.push_back({i, j, rng.normal()});
  std::vector<FieldTerm> fields;
  fields.reserve(n);
  for (int i = 0; i < n; ++i) fields.push_back({i, rng.normal()});
  return IsingProblem::from_couplings(n, std::move(zz), std::move(fields),
                                      "sk", seed);
}

double ground_state_energy(const IsingProblem& problem) {
  return *std::min_element(problem.energies().begin(),
                           problem.energies().end());
}

std::string graph_to_json(const Graph& graph) {
  nlohmann::json j;
  j["n"] = graph.n;
  j["seed"] = graph.seed;
  j["edges"] = graph.edges;
  return j.dump(2);
}

Graph graph_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  Graph g;
  g.n = j.at("n").get<int>();
  g.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& e : j.at("edges"))
    g.edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
  g.validate();
  return g;
}

std::string problem_to_json(const IsingProblem& problem) {
  nlohmann::json j;
  j["n"] = problem.n();
  j["family"] = problem.family();
  j["seed"] = problem.seed();
  j["kappa2"] = problem.kappa2();
  if (problem.kappa3()) j["kappa3"] = *problem.kappa3();
  if (problem.graph()) {
    j["edges"] = problem.graph()->edges;
  } else {
    nlohmann::json zz = nlohmann::json::array();
    for (const auto& t : problem.zz_terms())
      zz.push_back({t.i, t.j, t.weight});
    nlohmann::json fields = nlohmann::json::array();
    for (const auto& t : problem.field_terms()) fields.push_back({t.i, t.weight});
    j["couplings"] = {{"zz", zz}, {"z", fields}};
  }
  return j.dump(2);
}

IsingProblem problem_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  const int n = j.at("n").get<int>();
  const auto seed = j.at("seed").get<std::uint64_t>();
  const auto family = j.at("family").get<std::string>();
  if (j.contains("edges")) {
    Graph g;
    g.n = n;
    g.seed = seed;
    for (const auto& e : j.at("edges"))
      g.edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
    return maxcut_problem(g);
  }
  std::vector<ZZTerm> zz;
  std::vector<FieldTerm> fields;
  const auto& c = j.at("couplings");
  for (const auto& t : c.at("zz"))
    zz.push_back({t.at(0).get<int>(), t.at(1).get<int>(), t.at(2).get<double>()});
  for (const auto& t : c.at("z"))
    fields.push_back({t.at(0).get<int>(), t.at(1).get<double>()});
  return IsingProblem::from_couplings(n, std::move(zz), std::move(fields),
                                      family, seed);
}

}  // namespace quench
