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

#include "quench/graph.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "quench/rng.hpp"

namespace quench {

bool Graph::has_edge(int i, int j) const {
  if (i > j) std::swap(i, j);
  return std::binary_search(edges.begin(), edges.end(), std::make_pair(i, j));
}

int Graph::triangle_count() const {
  // adjacency bitsets; n is small enough for the naive triple loop
  std::vector<std::uint64_t> adj(n, 0);
  for (auto [i, j] : edges) {
    adj[i] |= (1ULL << j);
    adj[j] |= (1ULL << i);
  }
  int count = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      if (!((adj[i] >> j) & 1ULL)) continue;
      for (int k = j + 1; k < n; ++k)
        if (((adj[i] >> k) & 1ULL) && ((adj[j] >> k) & 1ULL)) ++count;
    }
  return count;
}

void Graph::validate() const {
  if (n < 1) throw std::invalid_argument("Graph: n must be >= 1");
  std::set<std::pair<int, int>> seen;
  for (auto [i, j] : edges) {
    if (i < 0 || j < 0 || i >= n || j >= n)
      throw std::invalid_argument("Graph: vertex index out of range");
    if (i == j) throw std::invalid_argument("Graph: self-loop");
    if (i > j) std::swap(i, j);
    if (!seen.insert({i, j}).second)
      throw std::invalid_argument("Graph: duplicate edge");
  }
}

Graph gen_binomial_graph(int n, double p, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("gen_binomial_graph: n must be >= 1");
  if (p < 0.0 || p > 1.0)
    throw std::invalid_argument("gen_binomial_graph: p must be in [0, 1]");
  Graph g;
  g.n = n;
  g.seed = seed;
  RngStream rng(seed);
  // one draw per candidate edge; uniform01 is in (0, 1] so p = 0 and p = 1
  // are exact regardless of seed
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (rng.bernoulli(p)) g.edges.emplace_back(i, j);
  return g;
}

}  // namespace quench
