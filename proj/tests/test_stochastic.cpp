#include <gtest/gtest.h>

#include <cmath>

#include "tomoforge/stochastic.hpp"
#include "tomoforge/su_basis.hpp"

using namespace tomoforge;

namespace {

DiagonalState make_diag(std::initializer_list<double> w) {
  RealVector v(static_cast<int>(w.size()));
  int i = 0;
  for (double x : w) v[i++] = x;
  return DiagonalState(v);
}

RealVector random_simplex(int n, SeedStream& rng) {
  RealVector v(n);
  for (int i = 0; i < n; ++i) v[i] = -std::log(1.0 - rng.uniform());
  v /= v.sum();
  return v;
}

}  // namespace

TEST(FromUnitary, PermutationFixedPoint) {
  ComplexMatrix u = shift_unitary(2, 3);
  StochasticMatrix t = from_unitary(u);
  EXPECT_LT((t.t - u.cwiseAbs().real()).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(FromUnitary, HadamardGivesFlatMatrix) {
  const double s = 1.0 / std::sqrt(2.0);
  ComplexMatrix u(2, 2);
  u << s, s, s, -s;
  StochasticMatrix t = from_unitary(u);
  EXPECT_LT((t.t - RealMatrix::Constant(2, 2, 0.5)).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(FromUnitary, HaarSamplesAreDoublyStochastic) {
  SeedStream rng(3);
  for (int n = 2; n <= 5; ++n) {
    for (int it = 0; it < 100; ++it) {
      StochasticMatrix t = from_unitary(haar_sample(n, rng));
      for (int i = 0; i < n; ++i) {
        EXPECT_NEAR(t.t.row(i).sum(), 1.0, 1e-10);
        EXPECT_NEAR(t.t.col(i).sum(), 1.0, 1e-10);
      }
      EXPECT_GE(t.t.minCoeff(), 0.0);
    }
  }
}

TEST(FromUnitary, RejectsNonUnitary) {
  EXPECT_THROW(from_unitary(2.0 * ComplexMatrix::Identity(2, 2)), InvalidInputError);
}

TEST(PushforwardCheck, IdentityFrameIsExact) {
  DiagonalState lambda = make_diag({0.2, 0.3, 0.5});
  RealVector a(3);
  a << 1.0, -2.0, 0.5;
  EXPECT_EQ(pushforward_check(lambda, ComplexMatrix::Identity(3, 3), a), 0.0);
}

TEST(PushforwardCheck, RandomInstances) {
  SeedStream rng(7);
  for (int it = 0; it < 100; ++it) {
    DiagonalState lambda{random_simplex(3, rng)};
    ComplexMatrix u = haar_sample(3, rng);
    RealVector a(3);
    for (int i = 0; i < 3; ++i) a[i] = 2.0 * rng.uniform() - 1.0;
    EXPECT_LE(pushforward_check(lambda, u, a), 1e-10);
  }
}

TEST(PushforwardCheck, ConstantObservableIsTraceNormalization) {
  SeedStream rng(11);
  DiagonalState lambda{random_simplex(4, rng)};
  ComplexMatrix u = haar_sample(4, rng);
  EXPECT_LE(pushforward_check(lambda, u, RealVector::Ones(4)), 1e-12);
}

TEST(PushforwardCheck, SweepAcrossDimensions) {
  SeedStream rng(13);
  for (int n = 2; n <= 5; ++n) {
    for (int it = 0; it < 125; ++it) {
      DiagonalState lambda{random_simplex(n, rng)};
      ComplexMatrix u = haar_sample(n, rng);
      RealVector a(n);
      for (int i = 0; i < n; ++i) a[i] = 2.0 * rng.uniform() - 1.0;
      EXPECT_LE(pushforward_check(lambda, u, a), 1e-10);
    }
  }
}

TEST(EntropyMonotone, PermutationPreservesEntropy) {
  DiagonalState lambda = make_diag({0.1, 0.6, 0.3});
  StochasticMatrix t = from_unitary(shift_unitary(3, 3));
  auto [before, after] = entropy_monotone(lambda, t);
  EXPECT_NEAR(before, after, 1e-14);
}

TEST(EntropyMonotone, FlatMapReachesLogTwo) {
  DiagonalState lambda = make_diag({1.0, 0.0});
  StochasticMatrix t{RealMatrix::Constant(2, 2, 0.5)};
  auto [before, after] = entropy_monotone(lambda, t);
  EXPECT_NEAR(before, 0.0, 1e-14);
  EXPECT_NEAR(after, std::log(2.0), 1e-14);
}

TEST(EntropyMonotone, HaarSweepNeverViolates) {
  SeedStream rng(17);
  for (int n = 2; n <= 5; ++n) {
    for (int it = 0; it < 250; ++it) {
      DiagonalState lambda{random_simplex(n, rng)};
      StochasticMatrix t = from_unitary(haar_sample(n, rng));
      auto [before, after] = entropy_monotone(lambda, t);
      EXPECT_GE(after, before - 1e-10);
    }
  }
}

TEST(BirkhoffDecompose, PermutationIsASingleTerm) {
  StochasticMatrix t = from_unitary(shift_unitary(2, 4));
  auto terms = birkhoff_decompose(t);
  ASSERT_EQ(terms.size(), 1u);
  EXPECT_NEAR(terms[0].weight, 1.0, 1e-12);
  EXPECT_LT((birkhoff_reassemble(terms, 4) - t.t).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(BirkhoffDecompose, FlatQubitMapSplitsEvenly) {
  StochasticMatrix t{RealMatrix::Constant(2, 2, 0.5)};
  auto terms = birkhoff_decompose(t);
  ASSERT_EQ(terms.size(), 2u);
  EXPECT_NEAR(terms[0].weight, 0.5, 1e-12);
  EXPECT_NEAR(terms[1].weight, 0.5, 1e-12);
}

TEST(BirkhoffDecompose, HaarInducedMapsReassembleWithinBound) {
  SeedStream rng(23);
  for (int it = 0; it < 50; ++it) {
    StochasticMatrix t = from_unitary(haar_sample(4, rng));
    auto terms = birkhoff_decompose(t, 1e-12);
    EXPECT_LE(static_cast<int>(terms.size()), 4 * 4 - 2 * 4 + 2);
    double total = 0.0;
    for (const auto& term : terms) {
      EXPECT_GE(term.weight, 0.0);
      total += term.weight;
    }
    EXPECT_NEAR(total, 1.0, 1e-10);
    EXPECT_LT((birkhoff_reassemble(terms, 4) - t.t).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(BirkhoffDecompose, TermBoundAcrossDimensions) {
  SeedStream rng(29);
  for (int n = 2; n <= 5; ++n) {
    for (int it = 0; it < 20; ++it) {
      StochasticMatrix t = from_unitary(haar_sample(n, rng));
      auto terms = birkhoff_decompose(t, 1e-12);
      EXPECT_LE(static_cast<int>(terms.size()), n * n - 2 * n + 2) << "N=" << n;
      EXPECT_LT((birkhoff_reassemble(terms, n) - t.t).cwiseAbs().maxCoeff(), 1e-8);
    }
  }
}

TEST(StochasticMatrix, RejectsLargeNegativity) {
  RealMatrix m(2, 2);
  m << 1.1, -0.1, -0.1, 1.1;
  EXPECT_THROW(StochasticMatrix{m}, InvalidInputError);
}
