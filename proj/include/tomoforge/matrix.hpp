#pragma once

#include <cmath>
#include <complex>
#include <string>

#include <Eigen/Dense>

#include "tomoforge/errors.hpp"

namespace tomoforge {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

inline bool is_finite(const ComplexMatrix& a) {
  return a.allFinite();
}

/// Max-abs deviation from Hermiticity, ||a - a*||_max.
inline double hermiticity_defect(const ComplexMatrix& a) {
  if (a.rows() != a.cols()) throw ShapeError("hermiticity check needs a square matrix");
  return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

/// Max-abs deviation from unitarity, ||u* u - 1||_max.
inline double unitarity_defect(const ComplexMatrix& u) {
  if (u.rows() != u.cols()) throw ShapeError("unitarity check needs a square matrix");
  ComplexMatrix g = u.adjoint() * u;
  g.diagonal().array() -= 1.0;
  return g.cwiseAbs().maxCoeff();
}

inline void require_unitary(const ComplexMatrix& u, double tol, const char* who) {
  double d = unitarity_defect(u);
  if (d > tol) {
    throw InvalidInputError(std::string(who) + ": input is not unitary (defect " +
                            std::to_string(d) + ")");
  }
}

/// Trace norm ||a||_1: the sum of singular values. For Hermitian input this
/// equals the sum of |eigenvalues|.
inline double trace_norm(const ComplexMatrix& a) {
  if (!is_finite(a)) throw InvalidInputError("trace_norm: non-finite entries");
  Eigen::JacobiSVD<ComplexMatrix> svd(a);
  return svd.singularValues().sum();
}

/// exp(-i t h) for Hermitian h, through the eigendecomposition of h. The
/// result is unitary to roundoff.
inline ComplexMatrix matrix_exp_skew(const ComplexMatrix& h, double t, double herm_tol = 1e-9) {
  if (!is_finite(h)) throw InvalidInputError("matrix_exp_skew: non-finite entries");
  if (hermiticity_defect(h) > herm_tol) {
    throw InvalidInputError("matrix_exp_skew: input is not Hermitian within tolerance");
  }
  ComplexMatrix hs = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hs);
  const RealVector& w = es.eigenvalues();
  Eigen::VectorXcd phases(w.size());
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    phases[i] = std::polar(1.0, -t * w[i]);
  }
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/// Partial trace over the first tensor factor of an (n*m) x (n*m) operator;
/// returns the m x m reduction.
inline ComplexMatrix partial_trace_first(const ComplexMatrix& rho, int n, int m) {
  if (rho.rows() != rho.cols() || rho.rows() != static_cast<Eigen::Index>(n) * m) {
    throw ShapeError("partial_trace_first: dimension mismatch");
  }
  ComplexMatrix out = ComplexMatrix::Zero(m, m);
  for (int a = 0; a < n; ++a) {
    out += rho.block(a * m, a * m, m, m);
  }
  return out;
}

/// Partial trace over the second tensor factor; returns the n x n reduction.
inline ComplexMatrix partial_trace_second(const ComplexMatrix& rho, int n, int m) {
  if (rho.rows() != rho.cols() || rho.rows() != static_cast<Eigen::Index>(n) * m) {
    throw ShapeError("partial_trace_second: dimension mismatch");
  }
  ComplexMatrix out = ComplexMatrix::Zero(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      Complex acc(0.0, 0.0);
      for (int k = 0; k < m; ++k) acc += rho(a * m + k, b * m + k);
      out(a, b) = acc;
    }
  return out;
}

/// Rank-1 projector |k><k| in dimension n (0-based k).
inline ComplexMatrix basis_projector(int k, int n) {
  if (k < 0 || k >= n) throw IndexError("basis_projector: index out of range");
  ComplexMatrix p = ComplexMatrix::Zero(n, n);
  p(k, k) = 1.0;
  return p;
}

}  // namespace tomoforge
