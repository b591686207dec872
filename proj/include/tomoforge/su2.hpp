#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <vector>

#include "tomoforge/density.hpp"
#include "tomoforge/matrix.hpp"
#include "tomoforge/numeric.hpp"
#include "tomoforge/su_basis.hpp"

namespace tomoforge {

/// ZYZ Euler angles (alpha, beta, gamma); gamma runs over [0, 4pi) so that
/// half-integer representations are single-valued.
using Euler = std::array<double, 3>;

namespace su2 {

inline int round_two_j(double j) {
  const double two_j = 2.0 * j;
  const int out = static_cast<int>(std::llround(two_j));
  if (out < 0 || std::abs(two_j - out) > 1e-12) {
    throw InvalidInputError("spin must be a nonnegative half-integer");
  }
  return out;
}

/// J3 = diag(j, j-1, ..., -j); basis ordering m = j first.
inline ComplexMatrix spin_j3(double j) {
  const int two_j = round_two_j(j);
  ComplexMatrix out = ComplexMatrix::Zero(two_j + 1, two_j + 1);
  for (int r = 0; r <= two_j; ++r) out(r, r) = j - r;
  return out;
}

/// Raising operator, (J+)_{m+1,m} = sqrt((j-m)(j+m+1)).
inline ComplexMatrix spin_plus(double j) {
  const int two_j = round_two_j(j);
  ComplexMatrix out = ComplexMatrix::Zero(two_j + 1, two_j + 1);
  for (int r = 1; r <= two_j; ++r) {
    const double m = j - r;  // column r holds |j, m>
    out(r - 1, r) = std::sqrt((j - m) * (j + m + 1.0));
  }
  return out;
}

inline ComplexMatrix spin_minus(double j) { return spin_plus(j).adjoint(); }

inline ComplexMatrix spin_jy(double j) {
  return (spin_plus(j) - spin_minus(j)) / Complex(0.0, 2.0);
}

/// Evaluates D^j(g) = e^{-i alpha J3} e^{-i beta Jy} e^{-i gamma J3} with the
/// Jy eigendecomposition cached, so batches of group points stay cheap.
class WignerEvaluator {
public:
  explicit WignerEvaluator(double j) : j_(j), two_j_(round_two_j(j)) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(spin_jy(j));
    jy_vectors_ = es.eigenvectors();
    jy_values_ = es.eigenvalues();
  }

  double j() const { return j_; }
  int dim() const { return two_j_ + 1; }

  ComplexMatrix operator()(const Euler& g) const {
    const auto [alpha, beta, gamma] = g;
    Eigen::VectorXcd mid(dim());
    for (int r = 0; r < dim(); ++r) mid[r] = std::polar(1.0, -beta * jy_values_[r]);
    ComplexMatrix d = jy_vectors_ * mid.asDiagonal() * jy_vectors_.adjoint();
    for (int r = 0; r < dim(); ++r) {
      const double m_row = j_ - r;
      d.row(r) *= std::polar(1.0, -alpha * m_row);
      const double m_col = j_ - r;
      d.col(r) *= std::polar(1.0, -gamma * m_col);
    }
    return d;
  }

private:
  double j_;
  int two_j_;
  ComplexMatrix jy_vectors_;
  RealVector jy_values_;
};

}  // namespace su2

/// Rotation matrix of the spin-j irreducible representation. Unitary, with
/// D^j(e) = 1. Row r corresponds to m' = j - r, column c to m = j - c.
inline ComplexMatrix wigner_d(double j, const Euler& g) {
  return su2::WignerEvaluator(j)(g);
}

/// Matrix element D^j_{m' m}.
inline Complex wigner_entry(const ComplexMatrix& d, double j, double m_row, double m_col) {
  const int r = static_cast<int>(std::llround(j - m_row));
  const int c = static_cast<int>(std::llround(j - m_col));
  return d(r, c);
}

/// Euler angles of a 2x2 special unitary (the j = 1/2 representation is
/// faithful, so this realizes the group product and Haar sampling on angle
/// coordinates).
inline Euler euler_from_su2(const ComplexMatrix& u) {
  if (u.rows() != 2 || u.cols() != 2) throw ShapeError("euler_from_su2: need a 2x2 matrix");
  require_unitary(u, 1e-9, "euler_from_su2");
  Complex a = u(0, 0), c = u(1, 0);
  // remove any residual overall phase (det should be 1)
  Complex det = u(0, 0) * u(1, 1) - u(0, 1) * u(1, 0);
  Complex corr = std::sqrt(det);
  a /= corr;
  c /= corr;
  const double beta = 2.0 * std::atan2(std::abs(c), std::abs(a));
  double phi_sum = 0.0, phi_diff = 0.0;
  if (std::abs(a) > 1e-12) phi_sum = -2.0 * std::arg(a);
  if (std::abs(c) > 1e-12) phi_diff = 2.0 * std::arg(c);
  return {0.5 * (phi_sum + phi_diff), beta, 0.5 * (phi_sum - phi_diff)};
}

/// Group product in Euler coordinates through the faithful j = 1/2 block.
inline Euler euler_compose(const Euler& g1, const Euler& g2) {
  su2::WignerEvaluator half(0.5);
  return euler_from_su2(half(g1) * half(g2));
}

inline Euler euler_haar_sample(SeedStream& rng) {
  ComplexMatrix u = haar_sample(2, rng);
  Complex det = u(0, 0) * u(1, 1) - u(0, 1) * u(1, 0);
  u /= std::sqrt(det);
  return euler_from_su2(u);
}

/// Product quadrature node on SU(2).
struct Su2Node {
  Euler g;
  double weight;
};

/// Quadrature exact for products of two irreps of spin <= j_max:
/// Gauss-Legendre of order j_max + 1 in cos(beta), uniform grids of
/// 2(2 j_max + 1) points in alpha (period 2 pi) and gamma (period 4 pi),
/// against the normalized Haar measure sin(beta)/(16 pi^2).
inline std::vector<Su2Node> su2_quadrature_rule(double j_max) {
  const int two_jmax = su2::round_two_j(j_max);
  const int n_beta = two_jmax / 2 + 1;
  const int n_angle = 2 * (two_jmax + 1);
  GaussLegendre gl(n_beta);

  std::vector<Su2Node> nodes;
  nodes.reserve(static_cast<std::size_t>(n_beta) * n_angle * n_angle);
  for (int b = 0; b < n_beta; ++b) {
    const double beta = std::acos(gl.nodes[b]);
    const double w_beta = gl.weights[b];
    for (int ia = 0; ia < n_angle; ++ia) {
      const double alpha = 2.0 * M_PI * ia / n_angle;
      for (int ig = 0; ig < n_angle; ++ig) {
        const double gamma = 4.0 * M_PI * ig / n_angle;
        nodes.push_back({{alpha, beta, gamma},
                         w_beta / (2.0 * n_angle * n_angle)});
      }
    }
  }
  return nodes;
}

/// Fourier data of a function on SU(2): one coefficient block per irrep
/// j = 0, 1/2, ..., j_max, in the orthonormal basis sqrt(2j+1) D^j.
struct GroupFourierData {
  double j_max = 0.0;
  std::vector<ComplexMatrix> blocks;  // index two_j = 0 .. 2 j_max
  double plancherel_residual = 0.0;
  double function_l2_sq = 0.0;

  double coefficient_l2_sq() const {
    double acc = 0.0;
    for (const auto& b : blocks) acc += b.squaredNorm();
    return acc;
  }
};

/// Group Fourier coefficients f^j_rc = sqrt(2j+1) int D^j_rc(g)* f(g) dmu(g)
/// by the exactness-matched product rule. The caller asserts band-limitation
/// at j_max; a large Plancherel residual flags an insufficient rule.
inline GroupFourierData su2_quadrature(const std::function<Complex(const Euler&)>& f,
                                       double j_max) {
  const int two_jmax = su2::round_two_j(j_max);
  auto nodes = su2_quadrature_rule(j_max);

  std::vector<su2::WignerEvaluator> reps;
  for (int two_j = 0; two_j <= two_jmax; ++two_j) reps.emplace_back(0.5 * two_j);

  GroupFourierData out;
  out.j_max = j_max;
  out.blocks.resize(two_jmax + 1);
  for (int two_j = 0; two_j <= two_jmax; ++two_j) {
    out.blocks[two_j] = ComplexMatrix::Zero(two_j + 1, two_j + 1);
  }

  KahanSum l2_re;
  for (const auto& node : nodes) {
    const Complex value = f(node.g);
    l2_re.add(node.weight * std::norm(value));
    for (int two_j = 0; two_j <= two_jmax; ++two_j) {
      const double scale = std::sqrt(two_j + 1.0) * node.weight;
      out.blocks[two_j].noalias() += (scale * value) * reps[two_j](node.g).conjugate();
    }
  }
  out.function_l2_sq = l2_re.value();
  out.plancherel_residual = std::abs(out.coefficient_l2_sq() - out.function_l2_sq);
  if (out.plancherel_residual > 1e-6 * std::max(1.0, out.function_l2_sq)) {
    throw ResolutionError("su2_quadrature: Plancherel residual " +
                          std::to_string(out.plancherel_residual) +
                          "; function is not band-limited at the stated j_max");
  }
  return out;
}

/// Entropic inequality on SU(2) for a normalized band-limited function:
/// -int |f|^2 ln |f|^2 - sum |f^|^2 ln |f^|^2 >= 0. The function-side
/// integral uses an oversampled rule (the integrand is not band-limited).
inline double group_entropy_check(const std::function<Complex(const Euler&)>& f, double j_max) {
  GroupFourierData data = su2_quadrature(f, j_max);

  const int two_fine = std::max(4 * su2::round_two_j(j_max), 40);
  auto fine = su2_quadrature_rule(0.5 * two_fine);
  KahanSum norm_acc, entropy_acc;
  for (const auto& node : fine) {
    const double a2 = std::norm(f(node.g));
    norm_acc.add(node.weight * a2);
    if (a2 > 0.0) entropy_acc.add(-node.weight * a2 * std::log(a2));
  }
  if (std::abs(norm_acc.value() - 1.0) > 1e-8) {
    throw DomainError("group_entropy_check: function is not L2-normalized");
  }
  double coeff_entropy = 0.0;
  for (const auto& block : data.blocks) {
    for (Eigen::Index r = 0; r < block.rows(); ++r)
      for (Eigen::Index c = 0; c < block.cols(); ++c) {
        const double a2 = std::norm(block(r, c));
        if (a2 > 0.0) coeff_entropy -= a2 * std::log(a2);
      }
  }
  return entropy_acc.value() + coeff_entropy;
}

/// Irreducible tensor operators of a spin-J system: for each integer rank
/// j = 0..2J a multiplet Lambda^j_m built from (J+)^j by lowering
/// commutators, normalized to Tr(Lambda^j_m Lambda^j_m^dagger) = 2. The
/// adjoint pairing satisfies (Lambda^j_m)^dagger = (-1)^m Lambda^j_{-m}.
struct TensorOperatorSet {
  double J = 0.0;
  int dim = 0;
  std::vector<std::vector<ComplexMatrix>> multiplets;  // [j][m + j]

  const ComplexMatrix& op(int j, int m) const {
    if (j < 0 || j >= static_cast<int>(multiplets.size()) || m < -j || m > j) {
      throw IndexError("TensorOperatorSet: (j, m) out of range");
    }
    return multiplets[j][m + j];
  }
  int rank_count() const { return static_cast<int>(multiplets.size()); }
};

inline TensorOperatorSet tensor_ops(double j_spin) {
  const int two_j = su2::round_two_j(j_spin);
  const int dim = two_j + 1;
  if (dim > 32) throw InvalidInputError("tensor_ops: dimension capped at 32");

  TensorOperatorSet set;
  set.J = j_spin;
  set.dim = dim;
  ComplexMatrix jplus = su2::spin_plus(j_spin);
  ComplexMatrix jminus = su2::spin_minus(j_spin);

  for (int rank = 0; rank <= two_j; ++rank) {
    std::vector<ComplexMatrix> multiplet(2 * rank + 1);
    ComplexMatrix top = ComplexMatrix::Identity(dim, dim);
    for (int k = 0; k < rank; ++k) top = top * jplus;
    top *= std::sqrt(2.0) / std::sqrt(top.squaredNorm());
    multiplet[2 * rank] = top;
    for (int m = rank; m > -rank; --m) {
      const double norm = std::sqrt((rank + m) * (rank - m + 1.0));
      multiplet[m - 1 + rank] =
          (jminus * multiplet[m + rank] - multiplet[m + rank] * jminus) / norm;
    }
    set.multiplets.push_back(std::move(multiplet));
  }
  return set;
}

/// Measured proportionality constant in [J3, Lambda^j_m] = c Lambda^j_m
/// (complex; the expected value is m with this construction).
inline Complex j3_commutator_scale(const TensorOperatorSet& set, int j, int m) {
  ComplexMatrix j3 = su2::spin_j3(set.J);
  const ComplexMatrix& lam = set.op(j, m);
  ComplexMatrix comm = j3 * lam - lam * j3;
  return (lam.adjoint() * comm).trace() / (lam.adjoint() * lam).trace();
}

/// Expansion coefficients c^j_{im} of the basis projector P_i in the tensor
/// operators, P_i = sum c^j_{im} Lambda^j_m.
inline Complex tensor_coefficient(const TensorOperatorSet& set, int i, int j, int m) {
  ComplexMatrix p = basis_projector(i, set.dim);
  return (set.op(j, m).adjoint() * p).trace() / 2.0;
}

/// Moments rho^j_m = Tr(rho Lambda^j_m).
inline Complex tensor_moment(const ComplexMatrix& rho, const TensorOperatorSet& set, int j,
                             int m) {
  return (rho * set.op(j, m)).trace();
}

/// Resynthesis from moments: rho = (1/2) sum conj(rho^j_m) Lambda^j_m.
inline ComplexMatrix from_tensor_moments(
    const std::vector<std::vector<Complex>>& moments, const TensorOperatorSet& set) {
  ComplexMatrix rho = ComplexMatrix::Zero(set.dim, set.dim);
  for (int j = 0; j < set.rank_count(); ++j)
    for (int m = -j; m <= j; ++m) {
      rho += 0.5 * std::conj(moments[j][m + j]) * set.op(j, m);
    }
  return rho;
}

/// Spin tomogram Tr rho (U(g) P_i U(g)^{-1}). Verifies the rotation-matrix
/// expansion sum c^j_{im} rho^j_{m'} D^j_{m'm}(g) against the direct
/// conjugation before returning.
inline double spin_tomogram(const ComplexMatrix& rho, int i, const Euler& g,
                            const TensorOperatorSet& set, double check_tol = 1e-9) {
  if (rho.rows() != set.dim || rho.cols() != set.dim) {
    throw ShapeError("spin_tomogram: state dimension does not match the operator set");
  }
  su2::WignerEvaluator rep(set.J);
  ComplexMatrix u = rep(g);
  ComplexMatrix p = basis_projector(i, set.dim);
  const Complex direct = (rho * u * p * u.adjoint()).trace();

  Complex expansion(0.0, 0.0);
  for (int j = 0; j < set.rank_count(); ++j) {
    su2::WignerEvaluator rank_rep(static_cast<double>(j));
    ComplexMatrix d = rank_rep(g);
    for (int m = -j; m <= j; ++m) {
      const Complex c = tensor_coefficient(set, i, j, m);
      if (std::abs(c) < 1e-15) continue;
      for (int mp = -j; mp <= j; ++mp) {
        expansion += c * tensor_moment(rho, set, j, mp) *
                     wigner_entry(d, j, mp, m);
      }
    }
  }
  if (std::abs(direct - expansion) > check_tol) {
    throw ConsistencyError("spin_tomogram: expansion mismatch " +
                           std::to_string(std::abs(direct - expansion)));
  }
  return direct.real();
}

inline double spin_tomogram(const ComplexMatrix& rho, int i, const Euler& g) {
  const double j_spin = 0.5 * (rho.rows() - 1);
  return spin_tomogram(rho, i, g, tensor_ops(j_spin));
}

/// Tomographic reconstruction of a spin-J state from tomogram samples of the
/// projector P_i: group orthogonality isolates each tensor moment,
/// rho^l_n = (2l+1) int D^l_{n 0}(g)* W_i(g) dmu / c^l_{i0}. Quadrature must
/// be exact at degree 4J (pass quad_j_max = 2J).
inline ComplexMatrix spin_reconstruct(const std::function<double(int, const Euler&)>& oracle,
                                      double j_spin, double quad_j_max, int i = 0) {
  const int two_j = su2::round_two_j(j_spin);
  TensorOperatorSet set = tensor_ops(j_spin);
  auto nodes = su2_quadrature_rule(quad_j_max);

  for (int j = 0; j <= two_j; ++j) {
    if (std::abs(tensor_coefficient(set, i, j, 0)) < 1e-12) {
      throw PivotError("spin_reconstruct: projector " + std::to_string(i) +
                       " has a vanishing rank-" + std::to_string(j) +
                       " coefficient; choose another index");
    }
  }

  std::vector<double> samples;
  samples.reserve(nodes.size());
  for (const auto& node : nodes) samples.push_back(oracle(i, node.g));

  std::vector<std::vector<Complex>> moments(two_j + 1);
  for (int j = 0; j <= two_j; ++j) {
    su2::WignerEvaluator rep(static_cast<double>(j));
    std::vector<KahanSum> acc_re(2 * j + 1), acc_im(2 * j + 1);
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      ComplexMatrix d = rep(nodes[k].g);
      for (int n = -j; n <= j; ++n) {
        const Complex term =
            nodes[k].weight * std::conj(wigner_entry(d, j, n, 0)) * samples[k];
        acc_re[n + j].add(term.real());
        acc_im[n + j].add(term.imag());
      }
    }
    const Complex pivot = tensor_coefficient(set, i, j, 0);
    moments[j].resize(2 * j + 1);
    for (int n = -j; n <= j; ++n) {
      moments[j][n + j] =
          (2.0 * j + 1.0) * Complex(acc_re[n + j].value(), acc_im[n + j].value()) / pivot;
    }
  }
  return from_tensor_moments(moments, set);
}

}  // namespace tomoforge
