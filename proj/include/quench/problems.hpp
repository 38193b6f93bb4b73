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
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "quench/graph.hpp"

namespace quench {

// Hard cap on the dense 2^n representation. Every energy table, state vector
// and eigendecomposition in the toolkit assumes n <= kMaxQubits.
inline constexpr int kMaxQubits = 13;

struct SizeCapError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ZZTerm {
  int i, j;
  double weight;
};

struct FieldTerm {
  int i;
  double weight;
};

// Diagonal Ising cost Hamiltonian, stored as a dense table of 2^n energies
// plus the symbolic coupling list it was built from.
//
// Bit convention, used everywhere in the toolkit: bit i of the integer z is
// the computational state of qubit i, and bit value 0 maps to spin +1, i.e.
// s_i(z) = 1 - 2*((z >> i) & 1).
class IsingProblem {
 public:
  static IsingProblem from_couplings(int n, std::vector<ZZTerm> zz,
                                     std::vector<FieldTerm> fields,
                                     std::string family = "custom",
                                     std::uint64_t seed = 0);

  int n() const { return n_; }
  std::size_t dim() const { return energies_.size(); }
  const std::vector<double>& energies() const { return energies_; }
  double energy(std::uint64_t z) const { return energies_[z]; }

  // kappa2 is the edge count for MAX-CUT and Tr' Hp~^2 in general;
  // kappa3 is the triangle count, present for MAX-CUT only.
  double kappa2() const { return kappa2_; }
  std::optional<double> kappa3() const { return kappa3_; }

  double mean_energy() const { return mean_; }       // Tr' H_p
  double energy_variance() const { return var_; }    // Tr' Hp~^2
  double central_moment3() const { return m3_; }     // Tr' Hp~^3
  double mean_square() const { return mean_sq_; }    // Tr' H_p^2

  const std::vector<ZZTerm>& zz_terms() const { return zz_; }
  const std::vector<FieldTerm>& field_terms() const { return fields_; }
  const std::string& family() const { return family_; }
  std::uint64_t seed() const { return seed_; }
  const std::optional<Graph>& graph() const { return graph_; }

  // content hash over the coupling list; equal fingerprints mean equal
  // Hamiltonians, so caches may key on it safely (unlike object addresses)
  std::uint64_t fingerprint() const { return fingerprint_; }

  static double spin(std::uint64_t z, int i) {
    return 1.0 - 2.0 * static_cast<double>((z >> i) & 1u);
  }

  // symbolic evaluation of the coupling list at one bitstring
  double evaluate_couplings(std::uint64_t z) const;

 private:
  int n_ = 0;
  std::vector<double> energies_;
  std::vector<ZZTerm> zz_;
  std::vector<FieldTerm> fields_;
  double kappa2_ = 0.0;
  std::optional<double> kappa3_;
  double mean_ = 0.0, var_ = 0.0, m3_ = 0.0, mean_sq_ = 0.0;
  std::uint64_t fingerprint_ = 0;
  std::string family_;
  std::uint64_t seed_ = 0;
  std::optional<Graph> graph_;

  friend IsingProblem maxcut_problem(const Graph&);
};

// MAX-CUT instance: energies[z] = sum over edges of s_i(z) s_j(z).
IsingProblem maxcut_problem(const Graph& graph);

// Sherrington-Kirkpatrick instance: all-to-all couplings J_ij (i > j) and
// local fields h_i, all iid standard normal from the seeded stream. Draw
// order: J_ij for i = 1..n-1, j = 0..i-1, then h_0..h_{n-1}.
IsingProblem sk_problem(int n, std::uint64_t seed);

double ground_state_energy(const IsingProblem& problem);

// JSON schema {n, family, seed, edges|couplings, kappa2, kappa3};
// energy tables are recomputed on load, never serialised.
std::string problem_to_json(const IsingProblem& problem);
IsingProblem problem_from_json(const std::string& text);
std::string graph_to_json(const Graph& graph);
Graph graph_from_json(const std::string& text);

}  // namespace quench
