#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "tomoforge/density.hpp"
#include "tomoforge/matrix.hpp"
#include "tomoforge/rng.hpp"

namespace tomoforge {

/// Diagonal restriction of a state: a classical weight vector.
struct DiagonalState {
  RealVector weights;

  explicit DiagonalState(RealVector w) : weights(std::move(w)) {
    if (weights.size() < 1) throw ShapeError("DiagonalState: empty weight vector");
    if (weights.minCoeff() < 0.0) throw InvalidInputError("DiagonalState: negative weight");
    if (std::abs(weights.sum() - 1.0) > 1e-12) {
      throw InvalidInputError("DiagonalState: weights do not sum to 1");
    }
  }

  int dim() const { return static_cast<int>(weights.size()); }
  /// Index of a weight within 1e-12 of 1, or -1 when the state is mixed.
  int pure_index() const {
    for (int i = 0; i < dim(); ++i)
      if (weights[i] >= 1.0 - 1e-12) return i;
    return -1;
  }
};

inline DiagonalState restrict_diagonal(const DensityMatrix& rho) {
  return DiagonalState(rho.matrix().diagonal().real());
}

namespace detail {

inline double min_eigenvalue(const ComplexMatrix& h) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

/// Hermitian zero-diagonal matrix from packed off-diagonal parameters
/// (re, im) per pair (i, j), i < j, in lexicographic order.
inline ComplexMatrix offdiag_from_params(const RealVector& params, int n) {
  ComplexMatrix o = ComplexMatrix::Zero(n, n);
  int p = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      Complex v(params[p], params[p + 1]);
      o(i, j) = v;
      o(j, i) = std::conj(v);
      p += 2;
    }
  return o;
}

}  // namespace detail

/// Draws a lift of d: a density matrix whose diagonal is exactly d. A random
/// Hermitian off-diagonal direction is accepted as-is when PSD and otherwise
/// shrunk radially toward the diagonal state (itself always a lift) until the
/// PSD boundary, so both interior and near-extreme lifts get sampled.
inline ComplexMatrix sample_lift(const DiagonalState& d, SeedStream& rng) {
  const int n = d.dim();
  ComplexMatrix base = ComplexMatrix::Zero(n, n);
  base.diagonal() = d.weights.cast<Complex>();
  int pure = d.pure_index();
  if (pure >= 0) return basis_projector(pure, n);

  ComplexMatrix dir = ComplexMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      // PSD forces a zero row/column wherever the diagonal weight vanishes.
      if (d.weights[i] < 1e-15 || d.weights[j] < 1e-15) continue;
      Complex v = rng.complex_normal();
      dir(i, j) = v;
      dir(j, i) = std::conj(v);
    }
  if (dir.cwiseAbs().maxCoeff() == 0.0) return base;

  if (detail::min_eigenvalue(base + dir) >= 0.0) return base + dir;

  // Bisect the largest feasible radius; keep the certified-PSD endpoint.
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 60; ++it) {
    double mid = 0.5 * (lo + hi);
    if (detail::min_eigenvalue(base + mid * dir) >= 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return base + lo * dir;
}

/// Optimizer knobs for delta_rho.
struct AmbiguityConfig {
  int restarts = 32;
  double initial_step = 0.25;
  double min_step = 1e-7;
  double min_rel_improvement = 1e-6;
};

struct DeltaRhoResult {
  double delta = 0.0;
  ComplexMatrix lift_a;
  ComplexMatrix lift_b;
  long evaluations = 0;
};

/// Lower-bounding maximization of the measurement distance between lifts of
/// d: the objective is the largest expectation gap a single effect can see,
/// sup_{0 <= a <= 1} |Tr(rho' a) - Tr(rho'' a)| = (1/2) ||rho' - rho''||_1.
/// Multi-start random pairs refined by coordinate ascent with step halving on
/// the off-diagonal parameters; monotone nondecreasing in budget for a fixed
/// seed. Pure diagonal states short-circuit to exactly zero (the lift is
/// unique).
inline DeltaRhoResult delta_rho(const DiagonalState& d, long budget, const SeedStream& rng,
                                const AmbiguityConfig& cfg = {}) {
  const int n = d.dim();
  DeltaRhoResult best;
  int pure = d.pure_index();
  if (pure >= 0) {
    best.lift_a = basis_projector(pure, n);
    best.lift_b = best.lift_a;
    return best;
  }
  if (budget < 1) throw InvalidInputError("delta_rho: budget must be >= 1");

  const int pairs = n * (n - 1) / 2;
  const int dim_params = 2 * pairs;
  ComplexMatrix base = ComplexMatrix::Zero(n, n);
  base.diagonal() = d.weights.cast<Complex>();

  long used = 0;
  auto evaluate = [&](const RealVector& pa, const RealVector& pb, double& value) -> bool {
    ++used;
    ComplexMatrix a = base + detail::offdiag_from_params(pa, n);
    ComplexMatrix b = base + detail::offdiag_from_params(pb, n);
    if (detail::min_eigenvalue(a) < -1e-12 || detail::min_eigenvalue(b) < -1e-12) return false;
    value = 0.5 * trace_norm(a - b);
    return true;
  };

  auto params_of = [&](const ComplexMatrix& lift) {
    RealVector p(dim_params);
    int idx = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        p[idx] = lift(i, j).real();
        p[idx + 1] = lift(i, j).imag();
        idx += 2;
      }
    return p;
  };

  for (int restart = 0; restart < cfg.restarts && used < budget; ++restart) {
    SeedStream local = rng.fork(static_cast<std::uint64_t>(restart));
    RealVector pa = params_of(sample_lift(d, local));
    RealVector pb = params_of(sample_lift(d, local));
    double current = 0.0;
    if (!evaluate(pa, pb, current)) continue;

    double step = cfg.initial_step;
    while (step > cfg.min_step && used < budget) {
      double round_start = current;
      for (int which = 0; which < 2 && used < budget; ++which) {
        RealVector& p = (which == 0) ? pa : pb;
        for (int c = 0; c < dim_params && used < budget; ++c) {
          for (double sgn : {+1.0, -1.0}) {
            if (used >= budget) break;
            RealVector trial = p;
            trial[c] += sgn * step;
            double value = 0.0;
            if (evaluate(which == 0 ? trial : pa, which == 0 ? pb : trial, value) &&
                value > current) {
              p = trial;
              current = value;
              break;
            }
          }
        }
      }
      if (current <= round_start * (1.0 + cfg.min_rel_improvement)) step *= 0.5;
      if (round_start > 0.0 &&
          (current - round_start) / round_start < cfg.min_rel_improvement && step < 1e-5) {
        break;
      }
    }
    if (current > best.delta) {
      best.delta = current;
      best.lift_a = base + detail::offdiag_from_params(pa, n);
      best.lift_b = base + detail::offdiag_from_params(pb, n);
    }
  }
  best.evaluations = used;
  if (best.lift_a.size() == 0) {
    best.lift_a = base;
    best.lift_b = base;
  }
  return best;
}

}  // namespace tomoforge
