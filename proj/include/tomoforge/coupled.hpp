#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "tomoforge/density.hpp"
#include "tomoforge/matrix.hpp"
#include "tomoforge/su_basis.hpp"

namespace tomoforge {

/// One system-apparatus experiment: free Hamiltonians, a coupling tensor
/// C_ak over the product basis e_a (x) E_k (index 0 = identity on each
/// factor), and the switching times. The interaction is held constant on
/// [t0, t0 + window] and off afterwards, so the propagator is a product of
/// two matrix exponentials.
struct CoupledConfig {
  int n = 0;  // system dimension
  int N = 0;  // apparatus dimension
  ComplexMatrix h_system;
  ComplexMatrix h_apparatus;
  RealMatrix couplings;  // (n^2) x (N^2)
  double t0 = 0.0;
  double window = 1.0;
  double t_read = 2.0;

  void validate() const {
    if (n < 2 || N < 2) throw ConfigError("CoupledConfig: dimensions must be >= 2");
    if (h_system.rows() != n || h_system.cols() != n) {
      throw ConfigError("CoupledConfig: system Hamiltonian has wrong shape");
    }
    if (h_apparatus.rows() != N || h_apparatus.cols() != N) {
      throw ConfigError("CoupledConfig: apparatus Hamiltonian has wrong shape");
    }
    if (couplings.rows() != n * n || couplings.cols() != N * N) {
      throw ConfigError("CoupledConfig: coupling tensor has wrong shape");
    }
    if (hermiticity_defect(h_system) > 1e-9 || hermiticity_defect(h_apparatus) > 1e-9) {
      throw ConfigError("CoupledConfig: Hamiltonians must be Hermitian");
    }
    if (!(t_read > t0 + window)) throw ConfigError("CoupledConfig: need t_read > t0 + window");
    if (window <= 0.0) throw ConfigError("CoupledConfig: need a positive coupling window");
  }
};

namespace detail {

/// Product basis {identity, su(d) generators} used to assemble H_I.
inline std::vector<ComplexMatrix> basis_with_identity(int d) {
  std::vector<ComplexMatrix> out;
  out.push_back(ComplexMatrix::Identity(d, d));
  HermitianBasis b = build_basis(d);
  for (auto& e : b.generators) out.push_back(std::move(e));
  return out;
}

}  // namespace detail

/// Interaction Hamiltonian H_I = sum_{a,k} C_ak e_a (x) E_k.
inline ComplexMatrix coupling_hamiltonian(const CoupledConfig& cfg) {
  auto sys = detail::basis_with_identity(cfg.n);
  auto app = detail::basis_with_identity(cfg.N);
  ComplexMatrix h = ComplexMatrix::Zero(cfg.n * cfg.N, cfg.n * cfg.N);
  for (int a = 0; a < cfg.n * cfg.n; ++a)
    for (int k = 0; k < cfg.N * cfg.N; ++k) {
      const double c = cfg.couplings(a, k);
      if (c != 0.0) h += c * kron(sys[a], app[k]);
    }
  return h;
}

/// Propagator V(t_read, t0): free evolution after switch-off times the
/// coupled evolution over the window.
inline ComplexMatrix propagator(const CoupledConfig& cfg) {
  cfg.validate();
  ComplexMatrix h0 = kron(cfg.h_system, ComplexMatrix::Identity(cfg.N, cfg.N)) +
                     kron(ComplexMatrix::Identity(cfg.n, cfg.n), cfg.h_apparatus);
  ComplexMatrix h_coupled = h0 + coupling_hamiltonian(cfg);
  ComplexMatrix v_window = matrix_exp_skew(h_coupled, cfg.window);
  ComplexMatrix v_after = matrix_exp_skew(h0, cfg.t_read - cfg.t0 - cfg.window);
  return v_after * v_window;
}

/// Evolves the product state rho_S (x) rho_M to the readout time.
inline ComplexMatrix evolve(const CoupledConfig& cfg, const DensityMatrix& rho_s,
                            const DensityMatrix& rho_m) {
  if (rho_s.dim() != cfg.n || rho_m.dim() != cfg.N) {
    throw ShapeError("evolve: state dimensions do not match the config");
  }
  ComplexMatrix v = propagator(cfg);
  ComplexMatrix rho0 = kron(rho_s.matrix(), rho_m.matrix());
  return v * rho0 * v.adjoint();
}

/// Apparatus-side expectations b_l = Tr rho(t) (1 (x) E_l), checked against
/// the Bloch vector of the reduced apparatus state.
inline RealVector apparatus_read(const ComplexMatrix& rho_t, const HermitianBasis& basis_m,
                                 int n) {
  const int N = basis_m.dim;
  if (rho_t.rows() != static_cast<Eigen::Index>(n) * N) {
    throw ShapeError("apparatus_read: state dimension mismatch");
  }
  RealVector b(basis_m.size());
  ComplexMatrix id_n = ComplexMatrix::Identity(n, n);
  for (int l = 0; l < basis_m.size(); ++l) {
    b[l] = (rho_t * kron(id_n, basis_m.generators[l])).trace().real();
  }
  RealVector reduced = bloch_vector(partial_trace_first(rho_t, n, N), basis_m);
  if ((b - reduced).cwiseAbs().maxCoeff() > 1e-10) {
    throw ConsistencyError("apparatus_read: expectations disagree with the reduced state");
  }
  return b;
}

/// Affine model b = M x + offset relating the apparatus readings of a batch
/// of experiments to the unknown traceless system components x_a.
struct DesignMatrix {
  RealMatrix m;        // rows: (config, generator l); cols: n^2 - 1 unknowns
  RealVector offset;   // contribution of the fixed trace part 1/n
  int n = 0;
  int N = 0;
};

/// Builds the design column-by-column by evolving the system basis elements
/// against the known apparatus state.
inline DesignMatrix build_design(const std::vector<CoupledConfig>& configs,
                                 const DensityMatrix& rho_m) {
  if (configs.empty()) throw ConfigError("build_design: no configs");
  const int n = configs.front().n;
  const int N = configs.front().N;
  if (rho_m.dim() != N) throw ConfigError("build_design: apparatus state has wrong dimension");
  for (const auto& cfg : configs) {
    cfg.validate();
    if (cfg.n != n || cfg.N != N) {
      throw ConfigError("build_design: configs disagree on dimensions");
    }
  }
  HermitianBasis basis_s = build_basis(n);
  HermitianBasis basis_m_basis = build_basis(N);
  const int rows = static_cast<int>(configs.size()) * basis_m_basis.size();
  const int cols = basis_s.size();

  DesignMatrix design;
  design.n = n;
  design.N = N;
  design.m.resize(rows, cols);
  design.offset.resize(rows);

  ComplexMatrix id_n = ComplexMatrix::Identity(n, n);
  int row0 = 0;
  for (const auto& cfg : configs) {
    ComplexMatrix v = propagator(cfg);
    auto read_of = [&](const ComplexMatrix& sys_part) {
      ComplexMatrix evolved = v * kron(sys_part, rho_m.matrix()) * v.adjoint();
      RealVector b(basis_m_basis.size());
      for (int l = 0; l < basis_m_basis.size(); ++l) {
        b[l] = (evolved * kron(id_n, basis_m_basis.generators[l])).trace().real();
      }
      return b;
    };
    design.offset.segment(row0, basis_m_basis.size()) = read_of(id_n / double(n));
    for (int a = 0; a < cols; ++a) {
      design.m.block(row0, a, basis_m_basis.size(), 1) =
          read_of(0.5 * basis_s.generators[a]);
    }
    row0 += basis_m_basis.size();
  }
  return design;
}

enum class RecoveryMode { full, partial };

struct SystemRecovery {
  ComplexMatrix rho_s;
  RealVector components;  // recovered traceless components
  double residual = 0.0;
  int rank = 0;
  double condition = 0.0;
  std::vector<RealVector> determined_directions;
};

/// Least-squares inversion of the design for the system state at t0. In full
/// mode a rank deficit throws, carrying whatever directions the data did
/// determine; partial mode returns them instead.
inline SystemRecovery recover_system(const DesignMatrix& design, const RealVector& observations,
                                     RecoveryMode mode = RecoveryMode::full) {
  if (observations.size() != design.m.rows()) {
    throw ShapeError("recover_system: observation count does not match the design");
  }
  const int unknowns = static_cast<int>(design.m.cols());
  Eigen::JacobiSVD<RealMatrix> svd(design.m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RealVector& sv = svd.singularValues();
  // relative rank tolerance, floored so an all-zero design reads as rank 0
  const double cutoff = std::max(1e-10 * (sv.size() > 0 ? sv[0] : 0.0), 1e-13);

  SystemRecovery out;
  out.rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv[i] > cutoff && sv[i] > 0.0) ++out.rank;
  }
  for (int i = 0; i < out.rank; ++i) out.determined_directions.push_back(svd.matrixV().col(i));
  out.condition = (out.rank > 0) ? sv[0] / sv[out.rank - 1] : 0.0;

  if (out.rank < unknowns && mode == RecoveryMode::full) {
    throw UnderdeterminedError(
        "recover_system: design rank " + std::to_string(out.rank) + " < " +
            std::to_string(unknowns) + " unknowns; only a subspace is determined",
        out.determined_directions);
  }

  RealVector rhs = observations - design.offset;
  RealVector solution = RealVector::Zero(unknowns);
  for (int i = 0; i < out.rank; ++i) {
    solution += svd.matrixV().col(i) * (svd.matrixU().col(i).dot(rhs) / sv[i]);
  }
  out.components = solution;
  out.residual = (design.m * solution - rhs).norm();
  out.rho_s = from_bloch(solution, build_basis(design.n));
  return out;
}

}  // namespace tomoforge
