#pragma once

#include <limits>
#include <string>
#include <utility>

#include "tomoforge/matrix.hpp"
#include "tomoforge/rng.hpp"

namespace tomoforge {

/// Acceptance tolerances for density matrices. The defaults apply everywhere
/// unless a caller overrides them.
struct Tolerances {
  double hermiticity = 1e-9;
  double psd = 1e-9;
  double trace = 1e-9;
};

/// Outcome of validating a candidate density matrix. When not ok, `violation`
/// names the failed invariant and `magnitude` its size.
struct DensityValidation {
  bool ok = true;
  std::string violation;
  double magnitude = 0.0;
};

inline DensityValidation validate_density(const ComplexMatrix& m, const Tolerances& tol = {}) {
  if (m.rows() != m.cols()) throw ShapeError("validate_density: matrix is not square");
  if (!is_finite(m)) return {false, "finite entries", std::numeric_limits<double>::infinity()};
  double herm = hermiticity_defect(m);
  if (herm > tol.hermiticity) return {false, "hermiticity", herm};
  double tr = std::abs(m.trace() - Complex(1.0, 0.0));
  if (tr > tol.trace) return {false, "unit trace", tr};
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (m + m.adjoint()));
  double min_eig = es.eigenvalues().minCoeff();
  if (min_eig < -tol.psd) return {false, "negative eigenvalue", min_eig};
  return {};
}

/// A validated state: Hermitian, PSD and unit trace within tolerance.
class DensityMatrix {
public:
  DensityMatrix(ComplexMatrix m, const Tolerances& tol = {}) : matrix_(std::move(m)) {
    DensityValidation v = validate_density(matrix_, tol);
    if (!v.ok) {
      throw InvalidInputError("density matrix rejected: " + v.violation + " (magnitude " +
                              std::to_string(v.magnitude) + ")");
    }
  }

  int dim() const { return static_cast<int>(matrix_.rows()); }
  const ComplexMatrix& matrix() const { return matrix_; }

private:
  ComplexMatrix matrix_;
};

/// Projects a Hermitian matrix onto the density-matrix set: clips negative
/// eigenvalues to zero and renormalizes the trace.
inline ComplexMatrix clip_to_density(const ComplexMatrix& m) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (m + m.adjoint()));
  RealVector w = es.eigenvalues().cwiseMax(0.0);
  double tr = w.sum();
  if (tr <= 0.0) throw DegeneracyError("clip_to_density: no positive spectral weight");
  w /= tr;
  return es.eigenvectors() * w.asDiagonal().toDenseMatrix().cast<Complex>() *
         es.eigenvectors().adjoint();
}

/// Random state rho = G G* / Tr(G G*) with G complex Ginibre
/// (Hilbert-Schmidt ensemble).
inline DensityMatrix random_density(int n, SeedStream& rng) {
  ComplexMatrix g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = rng.complex_normal();
  ComplexMatrix m = g * g.adjoint();
  m /= m.trace();
  return DensityMatrix(std::move(m));
}

/// Random pure state |psi><psi| with Haar-distributed |psi>.
inline DensityMatrix random_pure_density(int n, SeedStream& rng) {
  Eigen::VectorXcd psi(n);
  for (int i = 0; i < n; ++i) psi[i] = rng.complex_normal();
  psi.normalize();
  return DensityMatrix(psi * psi.adjoint());
}

}  // namespace tomoforge
