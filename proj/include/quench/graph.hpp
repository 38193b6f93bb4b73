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

#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace quench {

// Simple undirected graph on vertices [0, n). Edges are stored as (i, j)
// with i < j, sorted lexicographically; no self-loops, no duplicates.
struct Graph {
  int n = 0;
  std::vector<std::pair<int, int>> edges;
  std::uint64_t seed = 0;

  int edge_count() const { return static_cast<int>(edges.size()); }
  int triangle_count() const;
  bool has_edge(int i, int j) const;
  void validate() const;  // throws std::invalid_argument on bad structure
};

// Binomial (Erdos-Renyi) graph: each of the n(n-1)/2 candidate edges is
// included independently with probability p, drawn from the seeded stream
// in lexicographic (i, j) order.
Graph gen_binomial_graph(int n, double p, std::uint64_t seed);

}  // namespace quench
