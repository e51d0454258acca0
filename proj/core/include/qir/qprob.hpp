// Copyright 2026 The qir Authors
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

/**
 * @file    qprob.hpp
 * @brief   Quantum-probability kernel over a finite complex Hilbert space.
 *
 * A user's information need is a density operator held in factorized form,
 * rho = sum_i p_i |v_i><v_i|, and events are yes/no observables given by
 * subspaces. The dense d x d operator is never built on the main path;
 * to_dense() exists for tests and small-dimension diagnostics.
 *
 * All types are immutable values and every operation is a pure function.
 */

#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace qir::qprob {

using Complex = std::complex<double>;
using Amplitudes = std::vector<Complex>;

/// Absolute tolerance for unit norms, orthonormality and weight sums.
inline constexpr double kUnitTolerance = 1e-10;

/// Default bound on the dimension accepted by to_dense().
inline constexpr std::size_t kDefaultDenseBound = 64;

struct Tolerances {
  /// Components whose weight falls to or below this are dropped.
  double rank_eps = 1e-6;
  /// Residual norm at or below which a vector is absorbed by a partial basis.
  double ortho_eps = 1e-8;
  /// Measurement probabilities at or below this are treated as zero.
  double zero_prob_eps = 1e-10;
  /// Merge components whose states satisfy |<v_i|v_j>| > 1 - parallel_eps.
  bool merge_parallel = false;
  double parallel_eps = 1e-8;
  /// Re-factorize the measured part of condition()/alpha_update() through an
  /// eigendecomposition inside the event subspace whenever that yields fewer
  /// components. The dense operator is unchanged; the component list is not
  /// the per-component projection any more.
  bool compress_measured = false;

  /// Throws Error(parameter) unless every threshold lies in (0, 1e-2).
  void validate() const;
};

Complex inner(std::span<const Complex> bra, std::span<const Complex> ket) noexcept;
double squared_norm(std::span<const Complex> v) noexcept;

/// Unit-norm vector |w>. Construction checks the norm; use normalized() to
/// rescale arbitrary amplitudes.
class StateVector {
 public:
  explicit StateVector(Amplitudes amplitudes);

  static StateVector normalized(Amplitudes amplitudes);
  static StateVector basis(std::size_t dim, std::size_t index);

  std::size_t dim() const noexcept { return amplitudes_.size(); }
  std::span<const Complex> amplitudes() const noexcept { return amplitudes_; }
  const Complex& operator[](std::size_t i) const { return amplitudes_[i]; }

 private:
  Amplitudes amplitudes_;
};

/// Subspace of C^dim, equivalently the projector P onto it.
///
/// Stored as an orthonormal basis either of the subspace itself or, for
/// subspaces produced by complement(), of its orthogonal complement. The
/// second form keeps P = I - sum |b><b| cheap when the complement is large.
/// basis() always returns an explicit orthonormal basis of the subspace.
class Subspace {
 public:
  static Subspace zero(std::size_t dim);
  static Subspace full(std::size_t dim);

  /// Checks that `basis` is orthonormal within kUnitTolerance.
  static Subspace from_orthonormal(std::size_t dim, std::vector<StateVector> basis);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t rank() const noexcept {
    return complemented_ ? dim_ - stored_.size() : stored_.size();
  }
  bool is_zero() const noexcept { return rank() == 0; }
  bool is_full() const noexcept { return rank() == dim_; }

  std::vector<StateVector> basis() const;

  /// P v
  Amplitudes project(std::span<const Complex> v) const;
  /// ||P v||^2
  double captured_weight(std::span<const Complex> v) const;

  Subspace complement() const;

 private:
  Subspace(std::size_t dim, std::vector<StateVector> stored, bool complemented)
      : dim_(dim), stored_(std::move(stored)), complemented_(complemented) {}

  friend Subspace span_of(std::span<const StateVector>, const Tolerances&);

  std::size_t dim_;
  std::vector<StateVector> stored_;
  bool complemented_;
};

struct Component {
  double weight;
  StateVector state;
};

/// Factorized density operator: weighted pure states with weights summing
/// to one, all strictly positive.
class Ensemble {
 public:
  /// Validates dims, positivity and the unit weight sum (within kUnitTolerance).
  static Ensemble from_components(std::size_t dim, std::vector<Component> components);

  std::size_t dim() const noexcept { return dim_; }
  std::span<const Component> components() const noexcept { return components_; }
  std::size_t size() const noexcept { return components_.size(); }

 private:
  Ensemble(std::size_t dim, std::vector<Component> components)
      : dim_(dim), components_(std::move(components)) {}

  friend Ensemble make_pure(const StateVector&);
  friend Ensemble make_mixture(std::span<const std::pair<double, Ensemble>>);
  friend Ensemble condition(const Ensemble&, const Subspace&, const Tolerances&);
  friend Ensemble alpha_update(const Ensemble&, const Subspace&, double, const Tolerances&);

  std::size_t dim_;
  std::vector<Component> components_;
};

/// Row-major square complex matrix.
struct DenseMatrix {
  std::size_t n = 0;
  std::vector<Complex> data;

  Complex& operator()(std::size_t r, std::size_t c) { return data[r * n + c]; }
  const Complex& operator()(std::size_t r, std::size_t c) const { return data[r * n + c]; }
  Complex trace() const;
};

/// Frobenius norm of a - b. Throws Error(dimension) on size mismatch.
double distance(const DenseMatrix& a, const DenseMatrix& b);

Ensemble make_pure(const StateVector& v);

/// Convex combination of ensembles. Weights must be non-negative and sum to
/// one; zero-weight entries contribute nothing.
Ensemble make_mixture(std::span<const std::pair<double, Ensemble>> parts);

/// Normalized sum_j c_j |v_j>.
StateVector superpose(std::span<const Complex> coeffs, std::span<const StateVector> vectors);

/// Trace rule: tr(rho P) = sum_i p_i ||P v_i||^2.
double probability(const Ensemble& rho, const Subspace& event);

/// rho |> P = P rho P / tr(rho P), computed component-wise. Throws
/// ImpossibleMeasurement when tr(rho P) <= tol.zero_prob_eps.
Ensemble condition(const Ensemble& rho, const Subspace& event, const Tolerances& tol = {});

/// alpha (rho |> P) + (1 - alpha) rho
Ensemble alpha_update(const Ensemble& rho, const Subspace& event, double alpha,
                      const Tolerances& tol = {});

/// Orthonormal basis of the span, by modified Gram-Schmidt in input order.
Subspace span_of(std::span<const StateVector> vectors, const Tolerances& tol = {});

Subspace join(const Subspace& a, const Subspace& b, const Tolerances& tol = {});

Subspace complement(const Subspace& a);

DenseMatrix to_dense(const Ensemble& rho, std::size_t max_dim = kDefaultDenseBound);
DenseMatrix to_dense(const Subspace& a, std::size_t max_dim = kDefaultDenseBound);

}  // namespace qir::qprob
