#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "tomoforge/density.hpp"
#include "tomoforge/matrix.hpp"
#include "tomoforge/rng.hpp"

using namespace tomoforge;

TEST(TraceNorm, DiagonalSignedMatrix) {
  ComplexMatrix a = ComplexMatrix::Zero(2, 2);
  a(0, 0) = 1.0;
  a(1, 1) = -1.0;
  EXPECT_NEAR(trace_norm(a), 2.0, 1e-12);
}

TEST(TraceNorm, OrthogonalPureStatesAreMaximallyDistant) {
  ComplexMatrix diff = basis_projector(0, 2) - basis_projector(1, 2);
  EXPECT_NEAR(trace_norm(diff), 2.0, 1e-12);
}

TEST(TraceNorm, MatchesEigenvalueOracleOnHermitian) {
  for (unsigned seed : {1u, 2u, 3u, 4u, 5u}) {
    ComplexMatrix h = oracles::random_hermitian(3, seed);
    EXPECT_NEAR(trace_norm(h), oracles::hermitian_trace_norm(h), 1e-10);
  }
}

TEST(TraceNorm, RejectsNonFiniteInput) {
  ComplexMatrix a = ComplexMatrix::Zero(2, 2);
  a(0, 1) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(trace_norm(a), InvalidInputError);
}

TEST(TraceNorm, IsANorm) {
  SeedStream rng(77);
  for (int it = 0; it < 50; ++it) {
    ComplexMatrix a = oracles::random_hermitian(3, 100 + it);
    ComplexMatrix b = oracles::random_hermitian(3, 200 + it);
    EXPECT_GE(trace_norm(a), 0.0);
    double s = 0.3 + rng.uniform();
    EXPECT_NEAR(trace_norm(s * a), s * trace_norm(a), 1e-9 * (1.0 + trace_norm(a)));
    EXPECT_LE(trace_norm(a + b), trace_norm(a) + trace_norm(b) + 1e-9);
  }
}

TEST(TraceNorm, StatePairsStayWithinDiameter) {
  SeedStream rng(5);
  for (int it = 0; it < 30; ++it) {
    DensityMatrix r1 = random_density(4, rng);
    DensityMatrix r2 = random_density(4, rng);
    double d = trace_norm(r1.matrix() - r2.matrix());
    EXPECT_GE(d, 0.0);
    EXPECT_LE(d, 2.0 + 1e-12);
  }
}

TEST(ValidateDensity, AcceptsMaximallyMixed) {
  ComplexMatrix m = 0.5 * ComplexMatrix::Identity(2, 2);
  EXPECT_TRUE(validate_density(m).ok);
}

TEST(ValidateDensity, RejectsNegativeEigenvalue) {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(0, 0) = 1.2;
  m(1, 1) = -0.2;
  DensityValidation v = validate_density(m);
  EXPECT_FALSE(v.ok);
  EXPECT_EQ(v.violation, "negative eigenvalue");
  EXPECT_NEAR(v.magnitude, -0.2, 1e-12);
}

TEST(ValidateDensity, QubitDeterminantCondition) {
  // lambda = (0.3, 0.7), alpha = 0.4: the PSD condition is
  // lambda1 lambda2 - |alpha|^2 = 0.21 - 0.16 = 0.05 >= 0, so accepted.
  const double l1 = 0.3, l2 = 0.7, alpha = 0.4;
  ASSERT_GE(l1 * l2 - alpha * alpha, 0.0);
  ComplexMatrix m(2, 2);
  m << l1, alpha, alpha, l2;
  EXPECT_TRUE(validate_density(m).ok);

  // and pushing |alpha| past sqrt(lambda1 lambda2) must flip the verdict
  ComplexMatrix bad(2, 2);
  bad << l1, 0.5, 0.5, l2;
  ASSERT_LT(l1 * l2 - 0.25, 0.0);
  EXPECT_FALSE(validate_density(bad).ok);
}

TEST(ValidateDensity, RejectsNonSquare) {
  ComplexMatrix m = ComplexMatrix::Zero(2, 3);
  EXPECT_THROW(validate_density(m), ShapeError);
}

TEST(ValidateDensity, ConstructorThrowsWithReport) {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(0, 0) = 1.2;
  m(1, 1) = -0.2;
  EXPECT_THROW(DensityMatrix{m}, InvalidInputError);
}

TEST(MatrixExpSkew, ZeroGivesIdentity) {
  ComplexMatrix h = ComplexMatrix::Zero(3, 3);
  ComplexMatrix u = matrix_exp_skew(h, 1.7);
  EXPECT_NEAR((u - ComplexMatrix::Identity(3, 3)).cwiseAbs().maxCoeff(), 0.0, 1e-14);
}

TEST(MatrixExpSkew, PauliZAtPi) {
  ComplexMatrix h = ComplexMatrix::Zero(2, 2);
  h(0, 0) = 1.0;
  h(1, 1) = -1.0;
  ComplexMatrix u = matrix_exp_skew(h, M_PI);
  EXPECT_NEAR((u + ComplexMatrix::Identity(2, 2)).cwiseAbs().maxCoeff(), 0.0, 1e-12);
}

TEST(MatrixExpSkew, ResultIsUnitary) {
  ComplexMatrix h = oracles::random_hermitian(4, 9);
  ComplexMatrix u = matrix_exp_skew(h, 0.83);
  EXPECT_LT(unitarity_defect(u), 1e-10);
}

TEST(MatrixExpSkew, ForwardBackwardIsIdentity) {
  ComplexMatrix h = oracles::random_hermitian(4, 31);
  ComplexMatrix u = matrix_exp_skew(h, 0.9) * matrix_exp_skew(h, -0.9);
  EXPECT_NEAR((u - ComplexMatrix::Identity(4, 4)).cwiseAbs().maxCoeff(), 0.0, 1e-10);
}

TEST(MatrixExpSkew, RejectsNonHermitian) {
  ComplexMatrix h = ComplexMatrix::Zero(2, 2);
  h(0, 1) = 1.0;
  EXPECT_THROW(matrix_exp_skew(h, 1.0), InvalidInputError);
}

TEST(PartialTrace, MatchesIndexSummationOracle) {
  ComplexMatrix rho = oracles::random_density(6, 17);
  ComplexMatrix first = partial_trace_first(rho, 2, 3);
  ComplexMatrix second = partial_trace_second(rho, 2, 3);
  EXPECT_LT((first - oracles::trace_out_first(rho, 2, 3)).cwiseAbs().maxCoeff(), 1e-13);
  EXPECT_LT((second - oracles::trace_out_second(rho, 2, 3)).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(ClipToDensity, ProjectsIndefiniteMatrix) {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(0, 0) = 1.2;
  m(1, 1) = -0.2;
  ComplexMatrix c = clip_to_density(m);
  EXPECT_TRUE(validate_density(c).ok);
  EXPECT_NEAR(c(0, 0).real(), 1.0, 1e-12);
}
