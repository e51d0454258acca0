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

#include "qir/qprob.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include <Eigen/Eigenvalues>

#include "qir/error.hpp"

namespace qir::qprob {

namespace {

void require_same_dim(std::size_t a, std::size_t b, const char* where) {
  if (a != b) {
    throw Error(ErrorKind::dimension, std::string(where) + ": dimension mismatch (" +
                                          std::to_string(a) + " vs " + std::to_string(b) + ")");
  }
}

// v -= <b|v> b for every b, twice. The second sweep restores orthogonality
// lost to cancellation when v is nearly inside span(basis).
void remove_components(Amplitudes& v, std::span<const StateVector> basis) {
  for (int sweep = 0; sweep < 2; ++sweep) {
    for (const auto& b : basis) {
      const Complex c = inner(b.amplitudes(), v);
      if (c == Complex{}) continue;
      for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c * b[i];
    }
  }
}

// Grows `basis` with the residuals of `candidates`; residuals of norm at or
// below `eps` are absorbed. Stops early once `limit` vectors are held.
template <typename Candidates>
void extend_basis(std::vector<StateVector>& basis, const Candidates& candidates, double eps,
                  std::size_t limit) {
  for (const auto& candidate : candidates) {
    if (basis.size() >= limit) return;
    Amplitudes r(candidate.begin(), candidate.end());
    remove_components(r, basis);
    if (std::sqrt(squared_norm(r)) <= eps) continue;
    basis.push_back(StateVector::normalized(std::move(r)));
  }
}

// Drops light components, renormalizes and optionally merges parallel states.
std::vector<Component> tidy(std::vector<Component> components, const Tolerances& tol) {
  std::erase_if(components, [&](const Component& c) { return c.weight <= tol.rank_eps; });
  if (components.empty()) {
    throw Error(ErrorKind::normalization, "every ensemble component fell below rank_eps");
  }

  if (tol.merge_parallel) {
    std::vector<Component> merged;
    merged.reserve(components.size());
    for (auto& c : components) {
      auto it = std::find_if(merged.begin(), merged.end(), [&](const Component& m) {
        return std::abs(inner(m.state.amplitudes(), c.state.amplitudes())) > 1.0 - tol.parallel_eps;
      });
      if (it != merged.end()) {
        it->weight += c.weight;
      } else {
        merged.push_back(std::move(c));
      }
    }
    components = std::move(merged);
  }

  double total = 0.0;
  for (const auto& c : components) total += c.weight;
  for (auto& c : components) c.weight /= total;
  return components;
}

// P rho P / p re-expressed as at most rank(P) eigen-components. Returns
// nothing when that would not shrink the list.
std::optional<std::vector<Component>> compressed_measurement(const Ensemble& rho,
                                                             const Subspace& event, double p,
                                                             const Tolerances& tol) {
  const std::size_t r = event.rank();
  if (r == 0 || r >= rho.size()) return std::nullopt;
  const std::vector<StateVector> basis = event.basis();

  // M = B^H rho B / p, an r x r Hermitian matrix.
  Eigen::MatrixXcd coords(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(rho.size()));
  Eigen::VectorXd weights(static_cast<Eigen::Index>(rho.size()));
  for (std::size_t i = 0; i < rho.size(); ++i) {
    const auto& c = rho.components()[i];
    weights(static_cast<Eigen::Index>(i)) = c.weight / p;
    for (std::size_t j = 0; j < r; ++j) {
      coords(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) =
          inner(basis[j].amplitudes(), c.state.amplitudes());
    }
  }
  const Eigen::MatrixXcd m = coords * weights.asDiagonal() * coords.adjoint();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m);
  if (solver.info() != Eigen::Success) return std::nullopt;

  std::vector<Component> out;
  const std::size_t dim = rho.dim();
  for (Eigen::Index k = static_cast<Eigen::Index>(r) - 1; k >= 0; --k) {
    const double lambda = solver.eigenvalues()(k);
    if (lambda <= tol.rank_eps) continue;
    Amplitudes v(dim);
    for (std::size_t j = 0; j < r; ++j) {
      const Complex u = solver.eigenvectors()(static_cast<Eigen::Index>(j), k);
      for (std::size_t i = 0; i < dim; ++i) v[i] += u * basis[j][i];
    }
    out.push_back({lambda, StateVector::normalized(std::move(v))});
  }
  if (out.empty()) return std::nullopt;
  return out;
}

}  // namespace

void Tolerances::validate() const {
  for (double v : {rank_eps, ortho_eps, zero_prob_eps, parallel_eps}) {
    if (!(v > 0.0 && v < 1e-2)) {
      throw Error(ErrorKind::parameter, "tolerances must lie in (0, 1e-2), got " + std::to_string(v));
    }
  }
}

Complex inner(std::span<const Complex> bra, std::span<const Complex> ket) noexcept {
  Complex acc{};
  const std::size_t n = std::min(bra.size(), ket.size());
  for (std::size_t i = 0; i < n; ++i) acc += std::conj(bra[i]) * ket[i];
  return acc;
}

double squared_norm(std::span<const Complex> v) noexcept {
  double acc = 0.0;
  for (const auto& x : v) acc += std::norm(x);
  return acc;
}

StateVector::StateVector(Amplitudes amplitudes) : amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.empty()) throw Error(ErrorKind::dimension, "state vector must have dim >= 1");
  const double norm = std::sqrt(squared_norm(amplitudes_));
  if (!(std::abs(norm - 1.0) <= kUnitTolerance)) {
    throw Error(ErrorKind::normalization,
                "state vector is not unit-norm (norm " + std::to_string(norm) + ")");
  }
}

StateVector StateVector::normalized(Amplitudes amplitudes) {
  const double norm = std::sqrt(squared_norm(amplitudes));
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw Error(ErrorKind::normalization, "cannot normalize a zero or non-finite vector");
  }
  for (auto& a : amplitudes) a /= norm;
  return StateVector(std::move(amplitudes));
}

StateVector StateVector::basis(std::size_t dim, std::size_t index) {
  if (index >= dim) throw Error(ErrorKind::dimension, "basis index out of range");
  Amplitudes a(dim);
  a[index] = 1.0;
  return StateVector(std::move(a));
}

Subspace Subspace::zero(std::size_t dim) {
  if (dim == 0) throw Error(ErrorKind::dimension, "subspace must have dim >= 1");
  return Subspace(dim, {}, false);
}

Subspace Subspace::full(std::size_t dim) {
  if (dim == 0) throw Error(ErrorKind::dimension, "subspace must have dim >= 1");
  return Subspace(dim, {}, true);
}

Subspace Subspace::from_orthonormal(std::size_t dim, std::vector<StateVector> basis) {
  if (dim == 0) throw Error(ErrorKind::dimension, "subspace must have dim >= 1");
  if (basis.size() > dim) throw Error(ErrorKind::dimension, "more basis vectors than dimensions");
  for (std::size_t i = 0; i < basis.size(); ++i) {
    require_same_dim(basis[i].dim(), dim, "Subspace::from_orthonormal");
    for (std::size_t j = 0; j < i; ++j) {
      if (std::abs(inner(basis[j].amplitudes(), basis[i].amplitudes())) > kUnitTolerance) {
        throw Error(ErrorKind::normalization, "basis vectors are not orthogonal");
      }
    }
  }
  return Subspace(dim, std::move(basis), false);
}

std::vector<StateVector> Subspace::basis() const {
  if (!complemented_) return stored_;

  std::vector<StateVector> work = stored_;
  std::vector<Amplitudes> unit;
  unit.reserve(dim_);
  for (std::size_t i = 0; i < dim_; ++i) {
    Amplitudes e(dim_);
    e[i] = 1.0;
    unit.push_back(std::move(e));
  }
  // Some e_i always has residual^2 >= rank/dim, so a fixed small threshold
  // never starves the search.
  extend_basis(work, unit, 1e-6, dim_);
  return {work.begin() + static_cast<std::ptrdiff_t>(stored_.size()), work.end()};
}

Amplitudes Subspace::project(std::span<const Complex> v) const {
  require_same_dim(v.size(), dim_, "Subspace::project");
  Amplitudes inside(dim_);
  for (const auto& b : stored_) {
    const Complex c = inner(b.amplitudes(), v);
    for (std::size_t i = 0; i < dim_; ++i) inside[i] += c * b[i];
  }
  if (!complemented_) return inside;
  for (std::size_t i = 0; i < dim_; ++i) inside[i] = v[i] - inside[i];
  return inside;
}

double Subspace::captured_weight(std::span<const Complex> v) const {
  require_same_dim(v.size(), dim_, "Subspace::captured_weight");
  double inside = 0.0;
  for (const auto& b : stored_) inside += std::norm(inner(b.amplitudes(), v));
  if (!complemented_) return inside;
  return std::max(0.0, squared_norm(v) - inside);
}

Subspace Subspace::complement() const { return Subspace(dim_, stored_, !complemented_); }

Ensemble Ensemble::from_components(std::size_t dim, std::vector<Component> components) {
  if (dim == 0) throw Error(ErrorKind::dimension, "ensemble must have dim >= 1");
  if (components.empty()) throw Error(ErrorKind::normalization, "ensemble has no components");
  double total = 0.0;
  for (const auto& c : components) {
    require_same_dim(c.state.dim(), dim, "Ensemble::from_components");
    if (!(c.weight > 0.0)) throw Error(ErrorKind::normalization, "component weights must be > 0");
    total += c.weight;
  }
  if (!(std::abs(total - 1.0) <= kUnitTolerance)) {
    throw Error(ErrorKind::normalization,
                "component weights sum to " + std::to_string(total) + ", not 1");
  }
  return Ensemble(dim, std::move(components));
}

Complex DenseMatrix::trace() const {
  Complex t{};
  for (std::size_t i = 0; i < n; ++i) t += (*this)(i, i);
  return t;
}

double distance(const DenseMatrix& a, const DenseMatrix& b) {
  require_same_dim(a.n, b.n, "distance");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) acc += std::norm(a.data[i] - b.data[i]);
  return std::sqrt(acc);
}

Ensemble make_pure(const StateVector& v) { return Ensemble(v.dim(), {{1.0, v}}); }

Ensemble make_mixture(std::span<const std::pair<double, Ensemble>> parts) {
  if (parts.empty()) throw Error(ErrorKind::normalization, "mixture of nothing");
  const std::size_t dim = parts.front().second.dim();
  double total = 0.0;
  for (const auto& [p, rho] : parts) {
    if (!(p >= 0.0)) throw Error(ErrorKind::normalization, "mixture weights must be >= 0");
    require_same_dim(rho.dim(), dim, "make_mixture");
    total += p;
  }
  if (!(std::abs(total - 1.0) <= kUnitTolerance)) {
    throw Error(ErrorKind::normalization, "mixture weights sum to " + std::to_string(total));
  }

  std::vector<Component> out;
  for (const auto& [p, rho] : parts) {
    if (p == 0.0) continue;
    for (const auto& c : rho.components()) out.push_back({p * c.weight, c.state});
  }
  for (auto& c : out) c.weight /= total;
  return Ensemble(dim, std::move(out));
}

StateVector superpose(std::span<const Complex> coeffs, std::span<const StateVector> vectors) {
  if (coeffs.size() != vectors.size() || vectors.empty()) {
    throw Error(ErrorKind::dimension, "superpose needs one coefficient per vector");
  }
  const std::size_t dim = vectors.front().dim();
  Amplitudes sum(dim);
  double scale = 0.0;
  for (std::size_t j = 0; j < vectors.size(); ++j) {
    require_same_dim(vectors[j].dim(), dim, "superpose");
    scale += std::abs(coeffs[j]);
    for (std::size_t i = 0; i < dim; ++i) sum[i] += coeffs[j] * vectors[j][i];
  }
  const double norm = std::sqrt(squared_norm(sum));
  if (!(norm > 1e-12 * std::max(scale, 1.0))) {
    throw Error(ErrorKind::degenerate_superposition, "linear combination vanishes");
  }
  return StateVector::normalized(std::move(sum));
}

double probability(const Ensemble& rho, const Subspace& event) {
  require_same_dim(rho.dim(), event.dim(), "probability");
  double p = 0.0;
  for (const auto& c : rho.components()) p += c.weight * event.captured_weight(c.state.amplitudes());
  return std::clamp(p, 0.0, 1.0);
}

Ensemble condition(const Ensemble& rho, const Subspace& event, const Tolerances& tol) {
  const double p = probability(rho, event);
  if (p <= tol.zero_prob_eps) {
    throw ImpossibleMeasurement(p, "measurement has probability " + std::to_string(p) +
                                       " under the current state");
  }

  if (event.is_full()) return rho;

  if (tol.compress_measured) {
    if (auto out = compressed_measurement(rho, event, p, tol)) {
      return Ensemble(rho.dim(), tidy(std::move(*out), tol));
    }
  }

  std::vector<Component> out;
  out.reserve(rho.size());
  for (const auto& c : rho.components()) {
    Amplitudes projected = event.project(c.state.amplitudes());
    const double w = squared_norm(projected);
    if (w == 0.0) continue;
    const double weight = c.weight * w / p;
    if (weight <= tol.rank_eps) continue;
    out.push_back({weight, StateVector::normalized(std::move(projected))});
  }
  return Ensemble(rho.dim(), tidy(std::move(out), tol));
}

Ensemble alpha_update(const Ensemble& rho, const Subspace& event, double alpha,
                      const Tolerances& tol) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw Error(ErrorKind::parameter, "alpha must lie in [0, 1], got " + std::to_string(alpha));
  }
  require_same_dim(rho.dim(), event.dim(), "alpha_update");
  if (alpha == 0.0) return rho;
  if (alpha == 1.0) return condition(rho, event, tol);

  const Ensemble measured = condition(rho, event, tol);
  std::vector<Component> out;
  out.reserve(measured.size() + rho.size());
  for (const auto& c : measured.components()) out.push_back({alpha * c.weight, c.state});
  for (const auto& c : rho.components()) out.push_back({(1.0 - alpha) * c.weight, c.state});
  return Ensemble(rho.dim(), tidy(std::move(out), tol));
}

Subspace span_of(std::span<const StateVector> vectors, const Tolerances& tol) {
  if (vectors.empty()) throw Error(ErrorKind::dimension, "span of an empty list has no dimension");
  const std::size_t dim = vectors.front().dim();
  std::vector<std::span<const Complex>> candidates;
  candidates.reserve(vectors.size());
  for (const auto& v : vectors) {
    require_same_dim(v.dim(), dim, "span_of");
    candidates.push_back(v.amplitudes());
  }
  std::vector<StateVector> basis;
  extend_basis(basis, candidates, tol.ortho_eps, dim);
  return Subspace(dim, std::move(basis), false);
}

Subspace join(const Subspace& a, const Subspace& b, const Tolerances& tol) {
  require_same_dim(a.dim(), b.dim(), "join");
  if (a.is_full() || b.is_full()) return Subspace::full(a.dim());
  if (b.is_zero()) return a;
  if (a.is_zero()) return b;

  std::vector<StateVector> all = a.basis();
  for (auto& v : b.basis()) all.push_back(std::move(v));
  return span_of(all, tol);
}

Subspace complement(const Subspace& a) { return a.complement(); }

DenseMatrix to_dense(const Ensemble& rho, std::size_t max_dim) {
  const std::size_t n = rho.dim();
  if (n > max_dim) {
    throw Error(ErrorKind::size, "dense form of dim " + std::to_string(n) + " exceeds bound " +
                                     std::to_string(max_dim));
  }
  DenseMatrix m{n, Amplitudes(n * n)};
  for (const auto& c : rho.components()) {
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t k = 0; k < n; ++k) m(r, k) += c.weight * c.state[r] * std::conj(c.state[k]);
    }
  }
  return m;
}

DenseMatrix to_dense(const Subspace& a, std::size_t max_dim) {
  const std::size_t n = a.dim();
  if (n > max_dim) {
    throw Error(ErrorKind::size, "dense form of dim " + std::to_string(n) + " exceeds bound " +
                                     std::to_string(max_dim));
  }
  DenseMatrix m{n, Amplitudes(n * n)};
  for (const auto& b : a.basis()) {
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t k = 0; k < n; ++k) m(r, k) += b[r] * std::conj(b[k]);
    }
  }
  return m;
}

}  // namespace qir::qprob
