#pragma once

#include <cmath>
#include <vector>

#include "tomoforge/density.hpp"
#include "tomoforge/matrix.hpp"
#include "tomoforge/rng.hpp"

namespace tomoforge {

/// Orthogonal su(N) generator basis, Tr(E_k E_l) = 2 delta_kl, split into the
/// commuting (Cartan) part and the off-diagonal (root) part.
///
/// Ordering: Cartan generators first, starting with
/// E_0 = sqrt(2N/(N-1)) (P_1 - 1/N), then the remaining diagonal ones; then
/// the symmetric roots E_ij + E_ji and the antisymmetric roots
/// -i(E_ij - E_ji), each block in (i,j) lexicographic order. Indices are
/// 0-based in code.
struct HermitianBasis {
  int dim = 0;
  std::vector<ComplexMatrix> generators;
  std::vector<int> cartan_indices;
  std::vector<int> root_indices;

  /// Off-diagonal plane and symmetry type of a root generator.
  struct RootInfo {
    int i = -1;
    int j = -1;
    bool symmetric = true;
  };
  /// Aligned with `generators`; entries for Cartan indices stay at (-1,-1).
  std::vector<RootInfo> root_info;

  int size() const { return static_cast<int>(generators.size()); }
  bool is_root(int k) const { return k >= 0 && k < size() && root_info[k].i >= 0; }
};

/// Builds the basis for su(N). The first Cartan generator is fixed to the
/// normalized traceless part of P_1; the rest of the diagonal block comes
/// from Gram-Schmidt over P_k - 1/N.
inline HermitianBasis build_basis(int n) {
  if (n < 2) throw InvalidInputError("build_basis: dimension must be >= 2");
  HermitianBasis basis;
  basis.dim = n;
  basis.generators.reserve(n * n - 1);

  // Diagonal (Cartan) block: orthogonalize P_k - 1/N for k = 1..N-1 in the
  // trace inner product, then scale each to Tr(E^2) = 2.
  std::vector<Eigen::VectorXd> diag_vecs;
  for (int k = 0; k < n - 1; ++k) {
    Eigen::VectorXd v = Eigen::VectorXd::Constant(n, -1.0 / n);
    v[k] += 1.0;
    for (const auto& u : diag_vecs) {
      v -= u.dot(v) / u.squaredNorm() * u;
    }
    diag_vecs.push_back(v);
    v *= std::sqrt(2.0 / v.squaredNorm());
    ComplexMatrix e = ComplexMatrix::Zero(n, n);
    e.diagonal() = v.cast<Complex>();
    basis.cartan_indices.push_back(static_cast<int>(basis.generators.size()));
    basis.generators.push_back(std::move(e));
  }

  // Symmetric roots, then antisymmetric roots.
  for (int pass = 0; pass < 2; ++pass) {
    const bool symmetric = (pass == 0);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        ComplexMatrix e = ComplexMatrix::Zero(n, n);
        if (symmetric) {
          e(i, j) = 1.0;
          e(j, i) = 1.0;
        } else {
          e(i, j) = Complex(0.0, -1.0);
          e(j, i) = Complex(0.0, 1.0);
        }
        basis.root_indices.push_back(static_cast<int>(basis.generators.size()));
        basis.generators.push_back(std::move(e));
      }
  }

  basis.root_info.assign(basis.generators.size(), {});
  int r = n - 1;
  for (int pass = 0; pass < 2; ++pass)
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) basis.root_info[r++] = {i, j, pass == 0};
  return basis;
}

/// Components Tr(rho E_k) of a Hermitian operator in the basis.
inline RealVector bloch_vector(const ComplexMatrix& rho, const HermitianBasis& basis) {
  if (rho.rows() != basis.dim || rho.cols() != basis.dim) {
    throw ShapeError("bloch_vector: dimension mismatch");
  }
  RealVector out(basis.size());
  for (int k = 0; k < basis.size(); ++k) {
    out[k] = (rho * basis.generators[k]).trace().real();
  }
  return out;
}

/// Inverse of bloch_vector under Tr(E_k E_l) = 2 delta_kl:
/// rho = 1/N + (1/2) sum_k c_k E_k.
inline ComplexMatrix from_bloch(const RealVector& components, const HermitianBasis& basis) {
  if (components.size() != basis.size()) throw ShapeError("from_bloch: component count mismatch");
  ComplexMatrix rho = ComplexMatrix::Identity(basis.dim, basis.dim) / double(basis.dim);
  for (int k = 0; k < basis.size(); ++k) {
    rho += 0.5 * components[k] * basis.generators[k];
  }
  return rho;
}

/// Adjoint representation of a unitary, D_kl(u) = (1/2) Tr(E_k u E_l u*).
/// Real orthogonal with unit determinant.
inline RealMatrix adjoint_rep(const ComplexMatrix& u, const HermitianBasis& basis,
                              double unitary_tol = 1e-9) {
  if (u.rows() != basis.dim || u.cols() != basis.dim) {
    throw ShapeError("adjoint_rep: dimension mismatch with basis");
  }
  require_unitary(u, unitary_tol, "adjoint_rep");
  const int d = basis.size();
  RealMatrix out(d, d);
  for (int l = 0; l < d; ++l) {
    ComplexMatrix conj = u * basis.generators[l] * u.adjoint();
    for (int k = 0; k < d; ++k) {
      Complex t = 0.5 * (basis.generators[k] * conj).trace();
      if (std::abs(t.imag()) > 1e-10) {
        throw ConsistencyError("adjoint_rep: entry has a nonreal part");
      }
      out(k, l) = t.real();
    }
  }
  return out;
}

/// First column of the adjoint representation, D_k0(u), extracted from the
/// conjugated projector u P_1 u*. Cheaper than the full matrix when only the
/// orbit of P_1 matters.
inline RealVector adjoint_first_column(const ComplexMatrix& u, const HermitianBasis& basis) {
  const int n = basis.dim;
  ComplexMatrix p = u.col(0) * u.col(0).adjoint();
  const double scale = 0.5 * std::sqrt(2.0 * n / (n - 1.0));
  RealVector out(basis.size());
  for (int k = 0; k < basis.size(); ++k) {
    out[k] = scale * (p * basis.generators[k]).trace().real();
  }
  return out;
}

/// Orbit point u P_1 u*. Also asserts the expansion
/// u P_1 u* = sqrt((N-1)/2N) sum_k E_k D_k0(u) + 1/N against the adjoint
/// representation; a mismatch means the basis and adjoint disagree.
inline ComplexMatrix orbit_point(const ComplexMatrix& u, const HermitianBasis& basis,
                                 double check_tol = 1e-9) {
  require_unitary(u, 1e-9, "orbit_point");
  const int n = basis.dim;
  ComplexMatrix direct = u.col(0) * u.col(0).adjoint();
  RealVector d_col = adjoint_first_column(u, basis);
  ComplexMatrix expanded = ComplexMatrix::Identity(n, n) / double(n);
  const double scale = std::sqrt((n - 1.0) / (2.0 * n));
  for (int k = 0; k < basis.size(); ++k) {
    expanded += scale * d_col[k] * basis.generators[k];
  }
  double defect = (direct - expanded).cwiseAbs().maxCoeff();
  if (defect > check_tol) {
    throw ConsistencyError("orbit_point: orbit expansion disagrees with direct conjugation (" +
                           std::to_string(defect) + ")");
  }
  return direct;
}

/// Haar-distributed unitary: QR of a complex Ginibre matrix with the phases
/// of the R diagonal folded into Q.
inline ComplexMatrix haar_sample(int n, SeedStream& rng) {
  if (n < 1) throw InvalidInputError("haar_sample: dimension must be >= 1");
  ComplexMatrix g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = rng.complex_normal();
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ();
  ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j) {
    Complex d = r(j, j);
    double a = std::abs(d);
    q.col(j) *= (a > 0.0) ? d / a : Complex(1.0, 0.0);
  }
  return q;
}

/// Unitary whose conjugation u* E u takes the root generator with index k
/// into the Cartan span: a Givens-type rotation built from the two
/// eigenvectors of the root in its (i,j) plane. Columns i and j hold the
/// +1 and -1 eigenvectors, so u* E u = P_i - P_j.
inline ComplexMatrix root_rotation(int k, const HermitianBasis& basis) {
  if (!basis.is_root(k)) throw IndexError("root_rotation: not a root index");
  const auto& info = basis.root_info[k];
  const double s = 1.0 / std::sqrt(2.0);
  ComplexMatrix u = ComplexMatrix::Identity(basis.dim, basis.dim);
  u(info.i, info.i) = s;
  u(info.j, info.i) = info.symmetric ? Complex(s, 0.0) : Complex(0.0, s);
  u(info.i, info.j) = s;
  u(info.j, info.j) = info.symmetric ? Complex(-s, 0.0) : Complex(0.0, -s);
  return u;
}

/// Cyclic shift unitary u_k = sum_s P_{s,s+k-1} (indices mod N, k in 1..N);
/// maps P_1 to P_k exactly. k = 1 is the identity.
inline ComplexMatrix shift_unitary(int k, int n) {
  if (k < 1 || k > n) throw IndexError("shift_unitary: k out of 1..N");
  ComplexMatrix u = ComplexMatrix::Zero(n, n);
  for (int s = 0; s < n; ++s) {
    u((s + k - 1) % n, s) = 1.0;
  }
  return u;
}

}  // namespace tomoforge
