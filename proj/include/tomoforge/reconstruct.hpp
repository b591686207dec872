#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "tomoforge/density.hpp"
#include "tomoforge/numeric.hpp"
#include "tomoforge/su_basis.hpp"

namespace tomoforge {

/// One abelian-frame measurement: the frame u and the probabilities
/// w_m = Tr rho (u P_m u*), i.e. the diagonal of u* rho u.
struct MeasurementRecord {
  ComplexMatrix frame;
  RealVector expectations;
};

/// Simulated measurement of the rotated diagonal algebra. Fixed convention
/// throughout the library: expectations = diag(u* rho u).
inline MeasurementRecord measure(const DensityMatrix& rho, const ComplexMatrix& u,
                                 double unitary_tol = 1e-9) {
  if (u.rows() != rho.dim() || u.cols() != rho.dim()) {
    throw ShapeError("measure: frame dimension does not match the state");
  }
  require_unitary(u, unitary_tol, "measure");
  ComplexMatrix rotated = u.adjoint() * rho.matrix() * u;
  MeasurementRecord rec;
  rec.frame = u;
  rec.expectations = rotated.diagonal().real();
  return rec;
}

/// Answers frame-measurement queries against a fixed (hidden) state.
using MeasureOracle = std::function<MeasurementRecord(const ComplexMatrix&)>;
/// Answers single-projector queries Tr rho (u P_1 u*).
using ScalarOracle = std::function<double(const ComplexMatrix&)>;

inline MeasureOracle exact_oracle(DensityMatrix rho) {
  return [rho = std::move(rho)](const ComplexMatrix& u) { return measure(rho, u); };
}

inline ScalarOracle exact_scalar_oracle(DensityMatrix rho) {
  return [rho = std::move(rho)](const ComplexMatrix& u) {
    return measure(rho, u).expectations[0];
  };
}

namespace detail {

inline void check_record(const MeasurementRecord& rec, int n, double tol = 1e-9) {
  if (rec.expectations.size() != n) throw DataError("measurement record: wrong length");
  if (std::abs(rec.expectations.sum() - 1.0) > tol) {
    throw DataError("measurement record: expectations do not sum to 1");
  }
  if (rec.expectations.minCoeff() < -tol || rec.expectations.maxCoeff() > 1.0 + tol) {
    throw DataError("measurement record: expectation outside [0, 1]");
  }
}

}  // namespace detail

/// Result of the Haar Monte-Carlo inversion. The estimator is unbiased and
/// may land outside the PSD cone at small sample counts; `matrix` is returned
/// unprojected with `valid_density` flagging it (clip_to_density offers the
/// physical projection separately).
struct McReconstruction {
  RealVector bloch;
  RealVector std_error;
  ComplexMatrix matrix;
  bool valid_density = false;
  long samples = 0;
};

/// Monte-Carlo tomography: estimates the Haar average of D_k0(u) w_1(u) and
/// rescales by (N+1) sqrt(2N(N-1)), the inverse of the group-orthogonality
/// factor, to obtain the components Tr(rho E_k).
inline McReconstruction mc_reconstruct(const MeasureOracle& oracle, int n, long samples,
                                       const SeedStream& rng, int threads = 1) {
  if (samples < 1) throw InvalidInputError("mc_reconstruct: need at least one sample");
  HermitianBasis basis = build_basis(n);
  const int d = basis.size();
  const double scale = (n + 1.0) * std::sqrt(2.0 * n * (n - 1.0));

  const int chunks = static_cast<int>(std::min<long>(64, samples));
  std::vector<std::vector<double>> sums(chunks, std::vector<double>(d, 0.0));
  std::vector<std::vector<double>> sq_sums(chunks, std::vector<double>(d, 0.0));
  std::vector<long> counts(chunks, 0);

  parallel_chunks(chunks, worker_count(threads), [&](int c) {
    SeedStream local = rng.fork(static_cast<std::uint64_t>(c));
    const long lo = samples * c / chunks, hi = samples * (c + 1) / chunks;
    std::vector<KahanSum> acc(d), acc2(d);
    for (long s = lo; s < hi; ++s) {
      ComplexMatrix u = haar_sample(n, local);
      MeasurementRecord rec = oracle(u);
      detail::check_record(rec, n);
      const double w1 = rec.expectations[0];
      RealVector d_col = adjoint_first_column(u, basis);
      for (int k = 0; k < d; ++k) {
        const double x = d_col[k] * w1;
        acc[k].add(x);
        acc2[k].add(x * x);
      }
    }
    for (int k = 0; k < d; ++k) {
      sums[c][k] = acc[k].value();
      sq_sums[c][k] = acc2[k].value();
    }
    counts[c] = hi - lo;
  });

  McReconstruction out;
  out.samples = samples;
  out.bloch.resize(d);
  out.std_error.resize(d);
  for (int k = 0; k < d; ++k) {
    KahanSum sum, sq;
    for (int c = 0; c < chunks; ++c) {
      sum.add(sums[c][k]);
      sq.add(sq_sums[c][k]);
    }
    const double m = static_cast<double>(samples);
    const double mean = sum.value() / m;
    out.bloch[k] = scale * mean;
    double var = 0.0;
    if (samples > 1) var = std::max(0.0, (sq.value() - m * mean * mean) / (m - 1.0));
    out.std_error[k] = scale * std::sqrt(var / m);
  }
  out.matrix = from_bloch(out.bloch, basis);
  out.valid_density = validate_density(out.matrix).ok;
  return out;
}

/// Exact reconstruction from 1 + N(N-1) frame measurements: the identity
/// frame fixes the Cartan components, and one root-rotation frame per root
/// generator fixes Tr(rho E_root) = w_i - w_j.
struct FiniteReconstruction {
  ComplexMatrix matrix;
  RealVector bloch;
  int frame_queries = 0;
};

inline FiniteReconstruction finite_reconstruct(const MeasureOracle& oracle,
                                               const HermitianBasis& basis) {
  const int n = basis.dim;
  FiniteReconstruction out;
  out.bloch = RealVector::Zero(basis.size());

  MeasurementRecord cartan = oracle(ComplexMatrix::Identity(n, n));
  detail::check_record(cartan, n);
  ++out.frame_queries;

  int point_mass = -1;
  for (int m = 0; m < n; ++m) {
    if (cartan.expectations[m] >= 1.0 - 1e-12) point_mass = m;
  }

  for (int c : basis.cartan_indices) {
    double acc = 0.0;
    for (int m = 0; m < n; ++m) {
      acc += basis.generators[c](m, m).real() * cartan.expectations[m];
    }
    out.bloch[c] = acc;
  }
  for (int k : basis.root_indices) {
    ComplexMatrix u = root_rotation(k, basis);
    MeasurementRecord rec = oracle(u);
    detail::check_record(rec, n);
    ++out.frame_queries;
    const auto& info = basis.root_info[k];
    out.bloch[k] = rec.expectations[info.i] - rec.expectations[info.j];
  }

  if (point_mass >= 0) {
    // A pure diagonal restriction has a unique lift: the projector itself.
    // The root records above were still collected (the protocol's query
    // budget) but cannot move the answer.
    out.matrix = basis_projector(point_mass, n);
    out.bloch = bloch_vector(out.matrix, basis);
    return out;
  }
  out.matrix = from_bloch(out.bloch, basis);
  return out;
}

/// Scalar-query protocol: N projector queries through the cyclic shifts give
/// the diagonal, and one query per root against a frame whose first column is
/// the +1 eigenvector of that root gives 2q = rho_ii + rho_jj + Tr(rho E).
/// Exactly N^2 scalar queries in total.
struct ProjectorReconstruction {
  ComplexMatrix matrix;
  RealVector bloch;
  int scalar_queries = 0;
};

inline ProjectorReconstruction projector_protocol(const ScalarOracle& oracle, int n) {
  HermitianBasis basis = build_basis(n);
  ProjectorReconstruction out;

  RealVector diag(n);
  for (int k = 1; k <= n; ++k) {
    diag[k - 1] = oracle(shift_unitary(k, n));
    ++out.scalar_queries;
  }

  out.bloch = RealVector::Zero(basis.size());
  for (int c : basis.cartan_indices) {
    double acc = 0.0;
    for (int m = 0; m < n; ++m) acc += basis.generators[c](m, m).real() * diag[m];
    out.bloch[c] = acc;
  }
  for (int k : basis.root_indices) {
    const auto& info = basis.root_info[k];
    ComplexMatrix frame = root_rotation(k, basis);
    if (info.i != 0) frame.col(0).swap(frame.col(info.i));
    const double q = oracle(frame);
    ++out.scalar_queries;
    out.bloch[k] = 2.0 * q - diag[info.i] - diag[info.j];
  }
  out.matrix = from_bloch(out.bloch, basis);
  return out;
}

/// Monte-Carlo check of the group orthogonality relation for the adjoint
/// representation: the sample mean of D_ab D_cd must approach
/// delta_ac delta_bd / (N^2 - 1). Returns the max absolute deviation.
inline double orthogonality_check(int n, long samples, const SeedStream& rng, int threads = 1) {
  if (samples < 1) throw InvalidInputError("orthogonality_check: need at least one sample");
  HermitianBasis basis = build_basis(n);
  const int d = basis.size();
  const int dd = d * d;

  const int chunks = static_cast<int>(std::min<long>(32, samples));
  std::vector<Eigen::MatrixXd> partial(chunks);

  parallel_chunks(chunks, worker_count(threads), [&](int c) {
    SeedStream local = rng.fork(static_cast<std::uint64_t>(c));
    const long lo = samples * c / chunks, hi = samples * (c + 1) / chunks;
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(dd, dd);
    for (long s = lo; s < hi; ++s) {
      ComplexMatrix u = haar_sample(n, local);
      RealMatrix adj = adjoint_rep(u, basis);
      Eigen::Map<Eigen::VectorXd> v(adj.data(), dd);
      acc.noalias() += v * v.transpose();
    }
    partial[c] = acc;
  });

  Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(dd, dd);
  for (int c = 0; c < chunks; ++c) mean += partial[c];
  mean /= static_cast<double>(samples);

  // Target delta_ac delta_bd / (N^2-1): the identity on the vec'd index
  // pairs, scaled by 1/d.
  double max_dev = 0.0;
  for (int p = 0; p < dd; ++p) {
    for (int q = 0; q < dd; ++q) {
      const double target = (p == q) ? 1.0 / d : 0.0;
      max_dev = std::max(max_dev, std::abs(mean(p, q) - target));
    }
  }
  return max_dev;
}

}  // namespace tomoforge
