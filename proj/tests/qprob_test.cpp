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

#include <cmath>
#include <utility>
#include <vector>

#include <gtest/gtest.h>

#include "qir/error.hpp"
#include "qir/qprob.hpp"
#include "support/oracle.hpp"

namespace qir::qprob {
namespace {

using testing::Mat;

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

StateVector sv(std::initializer_list<Complex> a) { return StateVector(Amplitudes(a)); }

Mat mat2(Complex a, Complex b, Complex c, Complex d) {
  Mat m(2, 2);
  m << a, b, c, d;
  return m;
}

ErrorKind kind_of(const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no qir::Error thrown";
  return ErrorKind::malformed_input;
}

// Tiger/lion states from the tigron example.
struct TigerLion {
  StateVector t = sv({1.0, 0.0});
  StateVector l = sv({0.0, 1.0});
  StateVector tl = sv({kInvSqrt2, kInvSqrt2});
  Ensemble rho_tl = make_pure(tl);
  Ensemble rho_t_or_l = [this] {
    const std::vector<std::pair<double, Ensemble>> parts{{0.5, make_pure(t)}, {0.5, make_pure(l)}};
    return make_mixture(parts);
  }();
  Subspace o_t = Subspace::from_orthonormal(2, {t});
  Subspace o_l = Subspace::from_orthonormal(2, {l});
  Subspace o_tl = Subspace::from_orthonormal(2, {tl});
};

TEST(StateVectorTest, RejectsNonUnitInput) {
  EXPECT_EQ(kind_of([] { StateVector(Amplitudes{1.0, 1.0}); }), ErrorKind::normalization);
  EXPECT_EQ(kind_of([] { StateVector(Amplitudes{}); }), ErrorKind::dimension);
  EXPECT_NO_THROW(sv({0.6, 0.8}));
}

TEST(MakePureTest, Examples) {
  EXPECT_LT(testing::dist(testing::dense(make_pure(sv({1.0, 0.0}))), mat2(1, 0, 0, 0)), 1e-12);
  EXPECT_LT(testing::dist(testing::dense(make_pure(sv({kInvSqrt2, kInvSqrt2}))),
                          mat2(0.5, 0.5, 0.5, 0.5)),
            1e-12);
  EXPECT_LT(testing::dist(testing::dense(make_pure(sv({0.6, 0.8}))),
                          mat2(0.36, 0.48, 0.48, 0.64)),
            1e-12);
}

TEST(MakeMixtureTest, Examples) {
  TigerLion x;
  EXPECT_LT(testing::dist(testing::dense(x.rho_t_or_l), mat2(0.5, 0, 0, 0.5)), 1e-12);

  const std::vector<std::pair<double, Ensemble>> identity{{1.0, x.rho_tl}};
  EXPECT_LT(testing::dist(testing::dense(make_mixture(identity)), testing::dense(x.rho_tl)), 1e-15);

  const std::vector<std::pair<double, Ensemble>> parts{
      {0.25, make_pure(StateVector::basis(3, 0))}, {0.75, make_pure(StateVector::basis(3, 1))}};
  Mat expected = Mat::Zero(3, 3);
  expected(0, 0) = 0.25;
  expected(1, 1) = 0.75;
  EXPECT_LT(testing::dist(testing::dense(make_mixture(parts)), expected), 1e-12);
}

TEST(MakeMixtureTest, Errors) {
  TigerLion x;
  const std::vector<std::pair<double, Ensemble>> bad_sum{{0.5, x.rho_tl}, {0.6, x.rho_tl}};
  EXPECT_EQ(kind_of([&] { make_mixture(bad_sum); }), ErrorKind::normalization);
  const std::vector<std::pair<double, Ensemble>> bad_dim{
      {0.5, x.rho_tl}, {0.5, make_pure(StateVector::basis(3, 0))}};
  EXPECT_EQ(kind_of([&] { make_mixture(bad_dim); }), ErrorKind::dimension);
}

TEST(SuperposeTest, Examples) {
  const std::vector<StateVector> tl{sv({1.0, 0.0}), sv({0.0, 1.0})};
  const std::vector<Complex> plus{1.0, 1.0};
  const auto tigron = superpose(plus, tl);
  EXPECT_NEAR(std::abs(tigron[0] - kInvSqrt2), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(tigron[1] - kInvSqrt2), 0.0, 1e-15);

  const std::vector<StateVector> one{sv({0.0, 1.0})};
  const std::vector<Complex> unit{1.0};
  const auto same = superpose(unit, one);
  EXPECT_EQ(same[0], Complex(0.0));
  EXPECT_EQ(same[1], Complex(1.0));

  const std::vector<Complex> minus{1.0, -1.0};
  const auto m = superpose(minus, tl);
  EXPECT_NEAR(std::abs(m[0] - kInvSqrt2), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(m[1] + kInvSqrt2), 0.0, 1e-15);
}

TEST(SuperposeTest, ZeroCombinationIsDegenerate) {
  const std::vector<StateVector> same{sv({1.0, 0.0}), sv({1.0, 0.0})};
  const std::vector<Complex> cancel{1.0, -1.0};
  EXPECT_EQ(kind_of([&] { superpose(cancel, same); }), ErrorKind::degenerate_superposition);
}

TEST(ProbabilityTest, TigronExample) {
  TigerLion x;
  EXPECT_NEAR(probability(x.rho_tl, x.o_tl), 1.0, 1e-12);
  EXPECT_NEAR(probability(x.rho_t_or_l, x.o_tl), 0.5, 1e-12);
  EXPECT_NEAR(probability(x.rho_tl, x.o_l), 0.5, 1e-12);
  EXPECT_NEAR(probability(x.rho_t_or_l, x.o_l), 0.5, 1e-12);
}

TEST(ProbabilityTest, FullAndZeroSubspaces) {
  TigerLion x;
  EXPECT_NEAR(probability(x.rho_tl, Subspace::full(2)), 1.0, 1e-15);
  EXPECT_EQ(probability(x.rho_tl, Subspace::zero(2)), 0.0);
  EXPECT_EQ(kind_of([&] { probability(x.rho_tl, Subspace::full(3)); }), ErrorKind::dimension);
}

TEST(ProbabilityTest, ClassicalSum) {
  std::vector<Component> diag;
  const double w[] = {0.1, 0.2, 0.3, 0.4};
  for (std::size_t i = 0; i < 4; ++i) diag.push_back({w[i], StateVector::basis(4, i)});
  const auto rho = Ensemble::from_components(4, diag);
  const auto a = Subspace::from_orthonormal(4, {StateVector::basis(4, 1), StateVector::basis(4, 3)});
  EXPECT_NEAR(probability(rho, a), 0.6, 1e-12);
}

TEST(ConditionTest, Examples) {
  TigerLion x;
  EXPECT_NEAR(probability(x.rho_tl, x.o_t), 0.5, 1e-12);
  const auto c = condition(x.rho_tl, x.o_t);
  EXPECT_LT(testing::dist(testing::dense(c), mat2(1, 0, 0, 0)), 1e-12);

  const auto same = condition(x.rho_tl, Subspace::full(2));
  EXPECT_LT(testing::dist(testing::dense(same), testing::dense(x.rho_tl)), 1e-15);

  try {
    condition(make_pure(x.t), x.o_l);
    FAIL() << "expected impossible measurement";
  } catch (const ImpossibleMeasurement& e) {
    EXPECT_EQ(e.kind(), ErrorKind::impossible_measurement);
    EXPECT_EQ(e.probability(), 0.0);
  }
}

TEST(ConditionTest, DropsNegligibleComponents) {
  // Second component lies almost entirely outside the event.
  const double eps = 1e-4;
  std::vector<Component> parts{{0.5, sv({1.0, 0.0, 0.0})},
                               {0.5, StateVector::normalized({eps, 0.0, 1.0})}};
  const auto rho = Ensemble::from_components(3, parts);
  const auto a = Subspace::from_orthonormal(3, {StateVector::basis(3, 0)});
  const auto c = condition(rho, a);
  EXPECT_EQ(c.size(), 1u);
  EXPECT_NEAR(c.components()[0].weight, 1.0, 1e-15);
}

TEST(AlphaUpdateTest, Examples) {
  TigerLion x;
  const auto zero = alpha_update(x.rho_tl, x.o_t, 0.0);
  EXPECT_LT(testing::dist(testing::dense(zero), testing::dense(x.rho_tl)), 1e-15);

  const auto one = alpha_update(x.rho_tl, x.o_t, 1.0);
  EXPECT_LT(testing::dist(testing::dense(one), testing::dense(condition(x.rho_tl, x.o_t))), 1e-15);

  const auto half = alpha_update(x.rho_t_or_l, x.o_t, 0.5);
  EXPECT_LT(testing::dist(testing::dense(half), mat2(0.75, 0, 0, 0.25)), 1e-12);
  EXPECT_NEAR(probability(half, x.o_t), 0.75, 1e-12);
}

TEST(AlphaUpdateTest, Errors) {
  TigerLion x;
  EXPECT_EQ(kind_of([&] { alpha_update(x.rho_tl, x.o_t, -0.1); }), ErrorKind::parameter);
  EXPECT_EQ(kind_of([&] { alpha_update(x.rho_tl, x.o_t, 1.5); }), ErrorKind::parameter);
  EXPECT_EQ(kind_of([&] { alpha_update(make_pure(x.t), x.o_l, 0.3); }),
            ErrorKind::impossible_measurement);
  // alpha = 0 never measures, so an orthogonal event is fine.
  EXPECT_NO_THROW(alpha_update(make_pure(x.t), x.o_l, 0.0));
}

TEST(SpanTest, Examples) {
  const std::vector<StateVector> axes{sv({1.0, 0.0, 0.0}), sv({0.0, 1.0, 0.0})};
  const auto s = span_of(axes);
  EXPECT_EQ(s.rank(), 2u);
  Mat expected = Mat::Zero(3, 3);
  expected(0, 0) = expected(1, 1) = 1.0;
  EXPECT_LT(testing::dist(testing::dense(s), expected), 1e-15);

  const std::vector<StateVector> skew{sv({1.0, 0.0}), sv({kInvSqrt2, kInvSqrt2})};
  const auto full = span_of(skew);
  EXPECT_EQ(full.rank(), 2u);
  EXPECT_TRUE(full.is_full());
  EXPECT_LT(testing::dist(testing::dense(full), Mat::Identity(2, 2)), 1e-12);

  const std::vector<StateVector> dup{sv({1.0, 0.0, 0.0}), StateVector::normalized({2.0, 0.0, 0.0})};
  EXPECT_EQ(span_of(dup).rank(), 1u);
}

TEST(JoinTest, Examples) {
  const auto e1 = Subspace::from_orthonormal(3, {StateVector::basis(3, 0)});
  const auto e2 = Subspace::from_orthonormal(3, {StateVector::basis(3, 1)});
  const auto both = join(e1, e2);
  EXPECT_EQ(both.rank(), 2u);
  EXPECT_LT(testing::dist(testing::dense(both),
                          testing::projector(3, {{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}})),
            1e-12);

  const auto twice = join(both, both);
  EXPECT_LT(testing::dist(testing::dense(twice), testing::dense(both)), 1e-12);

  const auto diag = Subspace::from_orthonormal(3, {sv({kInvSqrt2, kInvSqrt2, 0.0})});
  const auto j = join(e1, diag);
  EXPECT_EQ(j.rank(), 2u);
  EXPECT_LT(testing::dist(testing::dense(j), testing::dense(both)), 1e-12);

  EXPECT_EQ(kind_of([&] { join(e1, Subspace::full(2)); }), ErrorKind::dimension);
}

TEST(ComplementTest, Examples) {
  const auto e1 = Subspace::from_orthonormal(2, {StateVector::basis(2, 0)});
  const auto c = complement(e1);
  EXPECT_EQ(c.rank(), 1u);
  EXPECT_LT(testing::dist(testing::dense(c), mat2(0, 0, 0, 1)), 1e-15);

  EXPECT_TRUE(complement(Subspace::full(4)).is_zero());
  EXPECT_TRUE(complement(Subspace::zero(4)).is_full());

  const auto diag = Subspace::from_orthonormal(2, {sv({kInvSqrt2, kInvSqrt2})});
  EXPECT_LT(testing::dist(testing::dense(complement(diag)), mat2(0.5, -0.5, -0.5, 0.5)), 1e-12);

  // basis() of an implicitly stored complement is an explicit orthonormal set.
  const auto basis = complement(diag).basis();
  ASSERT_EQ(basis.size(), 1u);
  EXPECT_NEAR(std::abs(inner(basis[0].amplitudes(), diag.basis()[0].amplitudes())), 0.0, 1e-12);
}

TEST(ToDenseTest, ExamplesAndBound) {
  TigerLion x;
  EXPECT_LT(testing::dist(testing::dense(make_pure(x.t)), mat2(1, 0, 0, 0)), 1e-15);
  EXPECT_LT(testing::dist(testing::dense(x.rho_t_or_l), 0.5 * Mat::Identity(2, 2)), 1e-15);
  EXPECT_LT(testing::dist(testing::dense(x.o_tl), mat2(0.5, 0.5, 0.5, 0.5)), 1e-15);

  EXPECT_EQ(kind_of([] { to_dense(make_pure(StateVector::basis(65, 0))); }), ErrorKind::size);
  EXPECT_NO_THROW(to_dense(make_pure(StateVector::basis(65, 0)), 65));
  EXPECT_EQ(kind_of([] { to_dense(Subspace::full(10), 4); }), ErrorKind::size);
}

TEST(TolerancesTest, Validate) {
  Tolerances t;
  EXPECT_NO_THROW(t.validate());
  t.rank_eps = 0.0;
  EXPECT_EQ(kind_of([&] { t.validate(); }), ErrorKind::parameter);
  t = {};
  t.zero_prob_eps = 0.02;
  EXPECT_EQ(kind_of([&] { t.validate(); }), ErrorKind::parameter);
}

TEST(OrderDependenceTest, Witness) {
  const auto rho = make_pure(sv({0.5, std::sqrt(3.0) / 2.0}));
  const auto a = Subspace::from_orthonormal(2, {sv({1.0, 0.0})});
  const auto b = Subspace::from_orthonormal(2, {sv({kInvSqrt2, kInvSqrt2})});
  const Mat ab = testing::dense(condition(condition(rho, a), b));
  const Mat ba = testing::dense(condition(condition(rho, b), a));
  EXPECT_LT(testing::dist(ab, mat2(0.5, 0.5, 0.5, 0.5)), 1e-12);
  EXPECT_LT(testing::dist(ba, mat2(1, 0, 0, 0)), 1e-12);
  EXPECT_GT(testing::dist(ab, ba), 0.1);
}

// Properties over random inputs, checked against the dense oracle.

struct Case {
  std::size_t dim;
  std::vector<testing::WeightedVector> parts;
  std::vector<Amplitudes> span;
  std::vector<Amplitudes> other;
};

std::vector<Case> random_cases(std::uint64_t seed, std::size_t n) {
  testing::Generator gen(seed);
  std::vector<Case> out;
  for (std::size_t i = 0; i < n; ++i) {
    Case c;
    c.dim = gen.uniform(1, 8);
    c.parts = gen.mixture(c.dim, 4);
    c.span = gen.spanning_set(c.dim, 4);
    c.other = gen.spanning_set(c.dim, 4);
    out.push_back(std::move(c));
  }
  return out;
}

class RandomSuite : public ::testing::TestWithParam<bool> {
 protected:
  Tolerances tol() const {
    Tolerances t;
    t.compress_measured = GetParam();
    return t;
  }
};

TEST_P(RandomSuite, ProbabilityMatchesTrace) {
  for (const auto& c : random_cases(1, 400)) {
    const auto rho = testing::to_ensemble(c.dim, c.parts);
    const auto a = testing::to_subspace(c.dim, c.span, tol());
    const Mat p = testing::projector(c.dim, c.span);
    EXPECT_NEAR(probability(rho, a), testing::prob(testing::density(c.dim, c.parts), p), 1e-10);
    EXPECT_LT(testing::dist(testing::dense(a), p), 1e-9);
  }
}

TEST_P(RandomSuite, ConditionMatchesDenseAndIsCertain) {
  std::size_t checked = 0;
  for (const auto& c : random_cases(2, 400)) {
    const auto rho = testing::to_ensemble(c.dim, c.parts);
    const auto a = testing::to_subspace(c.dim, c.span, tol());
    const double pa = probability(rho, a);
    if (pa <= 0.01) continue;
    ++checked;
    const auto post = condition(rho, a, tol());
    const Mat oracle = testing::condition(testing::density(c.dim, c.parts), testing::dense(a));
    EXPECT_LT(testing::dist(testing::dense(post), oracle), 1e-9);
    EXPECT_NEAR(probability(post, a), 1.0, 1e-10);

    // Idempotence.
    EXPECT_LT(testing::dist(testing::dense(condition(post, a, tol())), testing::dense(post)), 1e-9);

    // Pr(B | A) · Pr(A) = tr(P_B P_A ρ P_A).
    const auto b = testing::to_subspace(c.dim, c.other, tol());
    const Mat pa_m = testing::dense(a);
    const Mat pb_m = testing::dense(b);
    const double joint = (pb_m * pa_m * testing::density(c.dim, c.parts) * pa_m).trace().real();
    EXPECT_NEAR(probability(post, b) * pa, joint, 1e-9);
  }
  EXPECT_GT(checked, 200u);
}

TEST_P(RandomSuite, AlphaUpdateIsLinear) {
  const double alphas[] = {0.0, 0.25, 0.5, 0.75, 1.0};
  for (const auto& c : random_cases(3, 200)) {
    const auto rho = testing::to_ensemble(c.dim, c.parts);
    const auto a = testing::to_subspace(c.dim, c.span, tol());
    if (probability(rho, a) <= 0.01) continue;
    const auto x = testing::to_subspace(c.dim, c.other, tol());
    const auto cond = condition(rho, a, tol());
    for (double alpha : alphas) {
      const auto mixed = alpha_update(rho, a, alpha, tol());
      const double expected = alpha * probability(cond, x) + (1.0 - alpha) * probability(rho, x);
      EXPECT_NEAR(probability(mixed, x), expected, 1e-9);
      const Mat oracle =
          testing::alpha_update(testing::density(c.dim, c.parts), testing::dense(a), alpha);
      EXPECT_LT(testing::dist(testing::dense(mixed), oracle), 1e-9);
    }
  }
}

TEST_P(RandomSuite, ResultsStayNormalized) {
  for (const auto& c : random_cases(4, 300)) {
    const auto rho = testing::to_ensemble(c.dim, c.parts);
    const auto a = testing::to_subspace(c.dim, c.span, tol());
    const auto b = testing::to_subspace(c.dim, c.other, tol());
    for (const auto& s : {a, b, join(a, b, tol()), complement(a)}) {
      const auto basis = s.basis();
      ASSERT_EQ(basis.size(), s.rank());
      for (std::size_t i = 0; i < basis.size(); ++i) {
        for (std::size_t j = 0; j < basis.size(); ++j) {
          const double expected = i == j ? 1.0 : 0.0;
          EXPECT_NEAR(std::abs(inner(basis[i].amplitudes(), basis[j].amplitudes()) - expected), 0.0,
                      1e-10);
        }
      }
      const Mat p = testing::dense(s);
      EXPECT_LT(testing::dist(p * p, p), 1e-10);
      EXPECT_LT(testing::dist(p.adjoint(), p), 1e-12);
    }
    if (probability(rho, a) > 1e-6) {
      const auto post = alpha_update(rho, a, 0.4, tol());
      double total = 0.0;
      for (const auto& comp : post.components()) {
        EXPECT_GT(comp.weight, 0.0);
        total += comp.weight;
      }
      EXPECT_NEAR(total, 1.0, 1e-10);
      const Mat d = testing::dense(post);
      EXPECT_NEAR(d.trace().real(), 1.0, 1e-10);
      Eigen::SelfAdjointEigenSolver<Mat> eig(d);
      EXPECT_GT(eig.eigenvalues().minCoeff(), -1e-12);
    }
  }
}

TEST_P(RandomSuite, ComplementRuleAndJoinMonotone) {
  for (const auto& c : random_cases(5, 300)) {
    const auto rho = testing::to_ensemble(c.dim, c.parts);
    const auto a = testing::to_subspace(c.dim, c.span, tol());
    const auto b = testing::to_subspace(c.dim, c.other, tol());
    EXPECT_NEAR(probability(rho, a) + probability(rho, complement(a)), 1.0, 1e-10);
    EXPECT_TRUE(join(a, complement(a), tol()).is_full());
    const double pj = probability(rho, join(a, b, tol()));
    EXPECT_GE(pj + 1e-10, probability(rho, a));
    EXPECT_GE(pj + 1e-10, probability(rho, b));
  }
}

INSTANTIATE_TEST_SUITE_P(Kernel, RandomSuite, ::testing::Values(false, true),
                         [](const auto& info) { return info.param ? "Compressed" : "PerComponent"; });

TEST(ClassicalEmbeddingTest, AdditiveAndComplementRule) {
  testing::Generator gen(6);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t dim = gen.uniform(1, 8);
    std::vector<double> w(dim);
    double total = 0.0;
    for (auto& x : w) total += (x = gen.unit() + 0.01);
    std::vector<Component> comps;
    for (std::size_t i = 0; i < dim; ++i) comps.push_back({w[i] / total, StateVector::basis(dim, i)});
    const auto rho = Ensemble::from_components(dim, comps);

    std::vector<StateVector> in_a;
    std::vector<StateVector> in_b;
    double sum_a = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
      const auto bucket = gen.uniform(0, 2);
      if (bucket == 0) {
        in_a.push_back(StateVector::basis(dim, i));
        sum_a += w[i] / total;
      } else if (bucket == 1) {
        in_b.push_back(StateVector::basis(dim, i));
      }
    }
    const auto a = Subspace::from_orthonormal(dim, in_a);
    const auto b = Subspace::from_orthonormal(dim, in_b);
    EXPECT_NEAR(probability(rho, a), sum_a, 1e-12);
    EXPECT_NEAR(probability(rho, join(a, b)), probability(rho, a) + probability(rho, b), 1e-12);
    EXPECT_NEAR(probability(rho, a) + probability(rho, complement(a)), 1.0, 1e-12);
  }
}

TEST(MergeParallelTest, MergesDuplicateDirections) {
  Tolerances tol;
  tol.merge_parallel = true;
  std::vector<Component> parts{{0.3, sv({1.0, 0.0, 0.0})},
                               {0.3, sv({1.0, 0.0, 0.0})},
                               {0.4, sv({0.0, 0.0, 1.0})}};
  const auto rho = Ensemble::from_components(3, parts);
  const auto a = Subspace::from_orthonormal(3, {StateVector::basis(3, 0), StateVector::basis(3, 1)});
  const auto mixed = alpha_update(rho, a, 0.5, tol);
  EXPECT_EQ(mixed.size(), 2u);
  Mat expected = Mat::Zero(3, 3);
  expected(0, 0) = 0.8;
  expected(2, 2) = 0.2;
  EXPECT_LT(testing::dist(testing::dense(mixed), expected), 1e-12);
}

}  // namespace
}  // namespace qir::qprob
