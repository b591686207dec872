// Independent oracles used to freeze expected values. These deliberately
// avoid the library code paths they are checking.
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <random>

namespace oracles {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

/// Trace norm of a Hermitian matrix as the sum of |eigenvalues| from a
/// self-adjoint eigensolve (independent of the SVD route).
inline double hermitian_trace_norm(const Matrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  return es.eigenvalues().cwiseAbs().sum();
}

/// Direct conjugation u a u*.
inline Matrix conjugate(const Matrix& u, const Matrix& a) { return u * a * u.adjoint(); }

/// Rank-1 projector defect: ||p^2 - p||_max + |tr p - 1|.
inline double projector_defect(const Matrix& p) {
  return (p * p - p).cwiseAbs().maxCoeff() + std::abs(p.trace() - Complex(1.0, 0.0));
}

/// Partial trace over the second factor by explicit index summation.
inline Matrix trace_out_second(const Matrix& rho, int n, int m) {
  Matrix out = Matrix::Zero(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int k = 0; k < m; ++k) out(a, b) += rho(a * m + k, b * m + k);
  return out;
}

/// Partial trace over the first factor by explicit index summation.
inline Matrix trace_out_first(const Matrix& rho, int n, int m) {
  Matrix out = Matrix::Zero(m, m);
  for (int k = 0; k < m; ++k)
    for (int l = 0; l < m; ++l)
      for (int a = 0; a < n; ++a) out(k, l) += rho(a * m + k, a * m + l);
  return out;
}

/// Deterministic random Hermitian matrix from a plain std engine.
inline Matrix random_hermitian(int n, unsigned seed) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> dist;
  Matrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = Complex(dist(gen), dist(gen));
  return 0.5 * (a + a.adjoint());
}

/// Deterministic random density matrix (Ginibre * adjoint, normalized).
inline Matrix random_density(int n, unsigned seed) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> dist;
  Matrix g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = Complex(dist(gen), dist(gen));
  Matrix rho = g * g.adjoint();
  rho /= rho.trace();
  return rho;
}

}  // namespace oracles
