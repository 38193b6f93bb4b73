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

#include <complex>
#include <cstdint>
#include <list>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <unordered_map>

#include <Eigen/Dense>

#include "quench/problems.hpp"

namespace quench {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;

enum class DriverKind { TransverseField, BiasedLocal, ProjectorBias };

// Driver / bias Hamiltonians. Three kinds:
//   TransverseField: H = -sum_i X_i (off-diagonal bit flips)
//   BiasedLocal:     H = -alpha sum_i (-1)^{z*[i]} Z_i (diagonal, ground
//                    state |z*> at energy -alpha*n)
//   ProjectorBias:   H = -alpha |z*><z*| (diagonal)
struct DriverSpec {
  DriverKind kind = DriverKind::TransverseField;
  int n = 0;
  std::uint64_t sign_pattern = 0;  // z* for the bias kinds
  double alpha = 0.0;              // bias strength, >= 0

  static DriverSpec transverse_field(int n);
  static DriverSpec biased_local(int n, std::uint64_t z_star, double alpha);
  static DriverSpec projector_bias(int n, std::uint64_t z_star, double alpha);

  bool is_diagonal() const { return kind != DriverKind::TransverseField; }

  // diagonal entry for the diagonal kinds
  double diagonal_energy(std::uint64_t z) const;

  // out += coeff * H_driver * in
  void accumulate_apply(const ComplexVector& in, ComplexVector& out,
                        double coeff) const;
  void accumulate_apply(const ComplexMatrix& in, ComplexMatrix& out,
                        double coeff) const;
};

// Composite operator a*H_d + b*H_p (+ optional bias, coefficient 1).
// All operators in this basis are real symmetric; state vectors are complex
// because propagation needs them.
struct HamiltonianSpec {
  double a = 0.0;
  double b = 0.0;
  DriverSpec driver;
  std::shared_ptr<const IsingProblem> problem;  // may be null (driver only)
  std::optional<DriverSpec> bias;

  int n() const;
  std::size_t dim() const { return std::size_t(1) << n(); }

  HamiltonianSpec with_coefficients(double new_a, double new_b) const {
    HamiltonianSpec h = *this;
    h.a = new_a;
    h.b = new_b;
    return h;
  }

  bool is_diagonal() const;

  // matrix-free action, O(n 2^n): out = H * in
  void apply(const ComplexVector& in, ComplexVector& out) const;
  ComplexVector apply(const ComplexVector& in) const;
  void apply(const ComplexMatrix& in, ComplexMatrix& out) const;

  double expectation(const ComplexVector& psi) const;

  // diagonal part b*H_p + diagonal bias terms (excludes any transverse field)
  Vector diagonal_part() const;

  Matrix dense() const;  // n <= kMaxQubits
};

// Eigendecomposition of a HamiltonianSpec: eigenvalues ascending, columns of
// `vectors` the matching orthonormal eigenvectors.
struct EigResult {
  Vector values;
  Matrix vectors;
  std::size_t dim() const { return std::size_t(values.size()); }
  double spectral_width() const {
    return values(values.size() - 1) - values(0);
  }
  double mean() const { return values.mean(); }
};

using EigHandle = std::shared_ptr<const EigResult>;

// LRU cache of eigendecompositions keyed on the Hamiltonian structure and
// coefficients. Safe for concurrent readers with single-writer insertion.
class EigCache {
 public:
  explicit EigCache(std::size_t max_bytes = std::size_t(1) << 30)
      : max_bytes_(max_bytes) {}

  EigHandle lookup(const HamiltonianSpec& h);
  void insert(const HamiltonianSpec& h, EigHandle result);
  std::size_t size() const;

  static EigCache& global();

 private:
  static std::string key_of(const HamiltonianSpec& h);
  mutable std::shared_mutex mutex_;
  std::unordered_map<std::string, std::pair<EigHandle, std::list<std::string>::iterator>> map_;
  std::list<std::string> lru_;  // most recent at front
  std::size_t bytes_ = 0;
  std::size_t max_bytes_;
};

// Dense symmetric eigendecomposition (LAPACK dsyevd), cached. Purely diagonal
// Hamiltonians take a sort-permutation fast path instead of the dense solver.
EigHandle eig(const HamiltonianSpec& h, EigCache* cache = &EigCache::global());

// Normalised trace moments of the composite Hamiltonian a*H_d + b*H_p, used
// by the variance condition and the partition-function ansatze:
//   mu     = Tr' H
//   sigma2 = Tr' (H - mu)^2
//   delta  = cbrt(Tr' (H - mu)^3 / 2), the skew parameter
// For a transverse-field driver with any diagonal problem all cross traces
// vanish and everything reduces to one pass over the energy table.
struct Moments {
  double mu = 0.0;
  double sigma2 = 0.0;
  double delta = 0.0;
  double trp2 = 0.0;      // Tr' Hp~^2
  double trd2 = 0.0;      // Tr' Hd~^2
  double trdp = 0.0;      // Tr' Hd~ Hp~
  double trp_mean = 0.0;  // Tr' H_p
  double trd_mean = 0.0;  // Tr' H_d
  double m3p = 0.0;       // Tr' Hp~^3 (third central moment of the table)
  bool closed_form = true;
};

Moments moments(const DriverSpec& driver, const IsingProblem& problem,
                double a, double b);

// Threshold on Gamma above which shrinking Gamma shrinks the spectral
// variance: -Tr'(Hd~ Hp~) / Tr'(Hp~^2). Zero for transverse field + diagonal.
double gcond_threshold(const Moments& m);

}  // namespace quench
