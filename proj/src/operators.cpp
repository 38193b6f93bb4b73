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

#include "quench/operators.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <mutex>
#include <iostream>
#include <numeric>

#include <lapacke.h>

namespace quench {

DriverSpec DriverSpec::transverse_field(int n) {
  DriverSpec d;
  d.kind = DriverKind::TransverseField;
  d.n = n;
  return d;
}

DriverSpec DriverSpec::biased_local(int n, std::uint64_t z_star, double alpha) {
  if (alpha < 0.0)
    throw std::invalid_argument("DriverSpec: alpha must be >= 0");
  DriverSpec d;
  d.kind = DriverKind::BiasedLocal;
  d.n = n;
  d.sign_pattern = z_star;
  d.alpha = alpha;
  return d;
}

DriverSpec DriverSpec::projector_bias(int n, std::uint64_t z_star,
                                      double alpha) {
  if (alpha < 0.0)
    throw std::invalid_argument("DriverSpec: alpha must be >= 0");
  DriverSpec d;
  d.kind = DriverKind::ProjectorBias;
  d.n = n;
  d.sign_pattern = z_star;
  d.alpha = alpha;
  return d;
}

double DriverSpec::diagonal_energy(std::uint64_t z) const {
  switch (kind) {
    case DriverKind::BiasedLocal: {
      // -alpha sum_i (-1)^{z*[i]} s_i(z); the summand is +1 where the bits
      // of z and z* agree and -1 where they differ
      const int n_agree = n - __builtin_popcountll((z ^ sign_pattern) &
                                                   ((n == 64) ? ~0ULL : ((1ULL << n) - 1)));
      return -alpha * double(2 * n_agree - n);
    }
    case DriverKind::ProjectorBias:
      return z == sign_pattern ? -alpha : 0.0;
    case DriverKind::TransverseField:
      return 0.0;  // diagonal part of the transverse field is zero
  }
  return 0.0;
}

namespace {

template <typename In, typename Out>
void tf_accumulate(const In& in, Out& out, double coeff, int n) {
  // H_TF = -sum_i X_i: out[z] += -coeff * sum_i in[z ^ (1 << i)]
  const std::size_t dim = std::size_t(1) << n;
  for (int i = 0; i < n; ++i) {
    const std::size_t bit = std::size_t(1) << i;
    for (std::size_t z = 0; z < dim; ++z) out.row(z) -= coeff * in.row(z ^ bit);
  }
}

}  // namespace

void DriverSpec::accumulate_apply(const ComplexVector& in, ComplexVector& out,
                                  double coeff) const {
  if (kind == DriverKind::TransverseField) {
    tf_accumulate(in, out, coeff, n);
    return;
  }
  const std::size_t dim = std::size_t(1) << n;
  for (std::size_t z = 0; z < dim; ++z)
    out(z) += coeff * diagonal_energy(z) * in(z);
}

void DriverSpec::accumulate_apply(const ComplexMatrix& in, ComplexMatrix& out,
                                  double coeff) const {
  if (kind == DriverKind::TransverseField) {
    tf_accumulate(in, out, coeff, n);
    return;
  }
  const std::size_t dim = std::size_t(1) << n;
  for (std::size_t z = 0; z < dim; ++z)
    out.row(z) += coeff * diagonal_energy(z) * in.row(z);
}

int HamiltonianSpec::n() const {
  if (problem) return problem->n();
  return driver.n;
}

bool HamiltonianSpec::is_diagonal() const {
  const bool driver_diag = a == 0.0 || driver.is_diagonal();
  const bool bias_diag = !bias || bias->is_diagonal();
  return driver_diag && bias_diag;
}

void HamiltonianSpec::apply(const ComplexVector& in, ComplexVector& out) const {
  const std::size_t d = dim();
  if (std::size_t(in.size()) != d)
    throw std::invalid_argument("HamiltonianSpec::apply: dimension mismatch");
  out.setZero(d);
  if (a != 0.0) driver.accumulate_apply(in, out, a);
  if (problem && b != 0.0)
    for (std::size_t z = 0; z < d; ++z)
      out(z) += b * problem->energy(z) * in(z);
  if (bias) bias->accumulate_apply(in, out, 1.0);
}

ComplexVector HamiltonianSpec::apply(const ComplexVector& in) const {
  ComplexVector out;
  apply(in, out);
  return out;
}

void HamiltonianSpec::apply(const ComplexMatrix& in, ComplexMatrix& out) const {
  const std::size_t d = dim();
  if (std::size_t(in.rows()) != d)
    throw std::invalid_argument("HamiltonianSpec::apply: dimension mismatch");
  out.setZero(d, in.cols());
  if (a != 0.0) driver.accumulate_apply(in, out, a);
  if (problem && b != 0.0)
    for (std::size_t z = 0; z < d; ++z)
      out.row(z) += b * problem->energy(z) * in.row(z);
  if (bias) bias->accumulate_apply(in, out, 1.0);
}

double HamiltonianSpec::expectation(const ComplexVector& psi) const {
  return psi.dot(apply(psi)).real();
}

Vector HamiltonianSpec::diagonal_part() const {
  const std::size_t d = dim();
  Vector diag = Vector::Zero(d);
  if (problem && b != 0.0)
    for (std::size_t z = 0; z < d; ++z) diag(z) += b * problem->energy(z);
  if (a != 0.0 && driver.is_diagonal())
    for (std::size_t z = 0; z < d; ++z)
      diag(z) += a * driver.diagonal_energy(z);
  if (bias)
    for (std::size_t z = 0; z < d; ++z) diag(z) += bias->diagonal_energy(z);
  return diag;
}

Matrix HamiltonianSpec::dense() const {
  if (n() > kMaxQubits)
    throw SizeCapError("HamiltonianSpec::dense: n exceeds the dense cap");
  const std::size_t d = dim();
  Matrix h = Matrix::Zero(d, d);
  h.diagonal() = diagonal_part();
  if (a != 0.0 && !driver.is_diagonal()) {
    // transverse field: -a on every single-bit-flip pair
    for (int i = 0; i < n(); ++i) {
      const std::size_t bit = std::size_t(1) << i;
      for (std::size_t z = 0; z < d; ++z) h(z ^ bit, z) -= a;
    }
  }
  return h;
}

// --- eigendecomposition -----------------------------------------------------

namespace {

EigHandle eig_diagonal(const HamiltonianSpec& h) {
  const std::size_t d = h.dim();
  Vector diag = h.diagonal_part();
  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return diag(x) < diag(y); });
  auto out = std::make_shared<EigResult>();
  out->values.resize(d);
  out->vectors = Matrix::Zero(d, d);
  for (std::size_t k = 0; k < d; ++k) {
    out->values(k) = diag(order[k]);
    out->vectors(order[k], k) = 1.0;
  }
  return out;
}

EigHandle eig_dense(const HamiltonianSpec& h) {
  Matrix m = h.dense();
  const lapack_int dim = lapack_int(m.rows());
  auto out = std::make_shared<EigResult>();
  out->values.resize(dim);
  const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', dim,
                                         m.data(), dim, out->values.data());
  if (info != 0)
    throw std::runtime_error("eig: dsyevd failed with info = " +
                             std::to_string(info));
  out->vectors = std::move(m);
  return out;
}

}  // namespace

std::string EigCache::key_of(const HamiltonianSpec& h) {
  // structure identity via the problem content fingerprint and the exact bit
  // patterns of all coefficients
  std::string key;
  key.reserve(64);
  auto put = [&key](const void* p, std::size_t len) {
    key.append(reinterpret_cast<const char*>(p), len);
  };
  const std::uint64_t prob = h.problem ? h.problem->fingerprint() : 0;
  put(&prob, sizeof prob);
  put(&h.a, sizeof h.a);
  put(&h.b, sizeof h.b);
  int kind = int(h.driver.kind);
  put(&kind, sizeof kind);
  put(&h.driver.n, sizeof h.driver.n);
  put(&h.driver.sign_pattern, sizeof h.driver.sign_pattern);
  put(&h.driver.alpha, sizeof h.driver.alpha);
  const bool has_bias = h.bias.has_value();
  put(&has_bias, sizeof has_bias);
  if (h.bias) {
    kind = int(h.bias->kind);
    put(&kind, sizeof kind);
    put(&h.bias->sign_pattern, sizeof h.bias->sign_pattern);
    put(&h.bias->alpha, sizeof h.bias->alpha);
  }
  return key;
}

EigHandle EigCache::lookup(const HamiltonianSpec& h) {
  const std::string key = key_of(h);
  std::shared_lock lock(mutex_);
  auto it = map_.find(key);
  return it == map_.end() ? nullptr : it->second.first;
}

void EigCache::insert(const HamiltonianSpec& h, EigHandle result) {
  const std::string key = key_of(h);
  const std::size_t bytes =
      sizeof(EigResult) +
      sizeof(double) * (result->dim() + result->dim() * result->dim());
  std::unique_lock lock(mutex_);
  if (map_.count(key)) return;
  map_.emplace(key, std::make_pair(result, lru_.insert(lru_.begin(), key)));
  bytes_ += bytes;
  while (bytes_ > max_bytes_ && lru_.size() > 1) {
    const std::string& victim = lru_.back();
    auto it = map_.find(victim);
    bytes_ -= sizeof(EigResult) +
              sizeof(double) * (it->second.first->dim() +
                                it->second.first->dim() * it->second.first->dim());
    map_.erase(it);
    lru_.pop_back();
  }
}

std::size_t EigCache::size() const {
  std::shared_lock lock(mutex_);
  return map_.size();
}

EigCache& EigCache::global() {
  static EigCache cache;
  return cache;
}

EigHandle eig(const HamiltonianSpec& h, EigCache* cache) {
  if (h.n() > kMaxQubits)
    throw SizeCapError("eig: n exceeds the dense cap");
  if (cache)
    if (EigHandle hit = cache->lookup(h)) return hit;
  EigHandle result = h.is_diagonal() ? eig_diagonal(h) : eig_dense(h);
  if (cache) cache->insert(h, result);
  return result;
}

// --- trace moments ----------------------------------------------------------

Moments moments(const DriverSpec& driver, const IsingProblem& problem,
                double a, double b) {
  Moments m;
  m.trp_mean = problem.mean_energy();
  m.trp2 = problem.energy_variance();
  m.m3p = problem.central_moment3();

  if (driver.kind == DriverKind::TransverseField) {
    // X strings are traceless against any diagonal operator, so all cross
    // traces vanish and only the problem table contributes odd moments
    m.trd_mean = 0.0;
    m.trd2 = double(driver.n);
    m.trdp = 0.0;
    m.closed_form = true;
  } else {
    // diagonal driver kinds: every trace is a single pass over the tables
    m.closed_form = false;
    std::clog << "moments: driver kind has no transverse-field closed form; "
                 "computing traces from the diagonal tables\n";
    const std::size_t dim = problem.dim();
    double dm = 0.0;
    for (std::size_t z = 0; z < dim; ++z) dm += driver.diagonal_energy(z);
    dm /= double(dim);
    double d2 = 0.0, dp = 0.0;
    for (std::size_t z = 0; z < dim; ++z) {
      const double dd = driver.diagonal_energy(z) - dm;
      d2 += dd * dd;
      dp += dd * (problem.energy(z) - m.trp_mean);
    }
    m.trd_mean = dm;
    m.trd2 = d2 / double(dim);
    m.trdp = dp / double(dim);
  }

  m.mu = a * m.trd_mean + b * m.trp_mean;
  m.sigma2 = a * a * m.trd2 + b * b * m.trp2 + 2.0 * a * b * m.trdp;

  // third central moment of the composite spectrum; for the transverse field
  // every mixed term is traceless and only b^3 Tr' Hp~^3 survives
  double m3;
  if (driver.kind == DriverKind::TransverseField) {
    m3 = b * b * b * m.m3p;
  } else {
    const std::size_t dim = problem.dim();
    m3 = 0.0;
    for (std::size_t z = 0; z < dim; ++z) {
      const double e =
          a * driver.diagonal_energy(z) + b * problem.energy(z) - m.mu;
      m3 += e * e * e;
    }
    m3 /= double(dim);
  }
  m.delta = std::cbrt(m3 / 2.0);
  return m;
}

double gcond_threshold(const Moments& m) {
  if (m.trp2 <= 0.0)
    throw std::invalid_argument(
        "gcond_threshold: Tr' Hp~^2 = 0 (problem Hamiltonian proportional to "
        "the identity)");
  return -m.trdp / m.trp2;
}

}  // namespace quench
