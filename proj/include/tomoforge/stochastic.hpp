#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "tomoforge/ambiguity.hpp"
#include "tomoforge/matrix.hpp"

namespace tomoforge {

/// Doubly stochastic matrix: nonnegative entries, unit row and column sums.
struct StochasticMatrix {
  RealMatrix t;

  explicit StochasticMatrix(RealMatrix m, double sum_tol = 1e-9, double neg_tol = 1e-12)
      : t(std::move(m)) {
    if (t.rows() != t.cols()) throw ShapeError("StochasticMatrix: not square");
    if (t.minCoeff() < -neg_tol) {
      throw InvalidInputError("StochasticMatrix: negative entry " + std::to_string(t.minCoeff()));
    }
    t = t.cwiseMax(0.0);  // clamp roundoff dust
    for (Eigen::Index i = 0; i < t.rows(); ++i) {
      if (std::abs(t.row(i).sum() - 1.0) > sum_tol) {
        throw InvalidInputError("StochasticMatrix: row sum != 1");
      }
      if (std::abs(t.col(i).sum() - 1.0) > sum_tol) {
        throw InvalidInputError("StochasticMatrix: column sum != 1");
      }
    }
  }

  int dim() const { return static_cast<int>(t.rows()); }

  /// (T lambda)_r = sum_s T_sr lambda_s.
  RealVector apply(const RealVector& lambda) const {
    if (lambda.size() != t.rows()) throw ShapeError("StochasticMatrix::apply: size mismatch");
    return t.transpose() * lambda;
  }
};

/// T_sr = |u_sr|^2. Doubly stochastic for unitary u by column/row normalization.
inline StochasticMatrix from_unitary(const ComplexMatrix& u, double unitary_tol = 1e-9) {
  require_unitary(u, unitary_tol, "from_unitary");
  return StochasticMatrix(u.cwiseAbs2());
}

/// Residual of the pushforward identity
/// Tr rho_D(lambda) (u (sum_r a_r P_r) u*) = sum_r (T lambda)_r a_r.
inline double pushforward_check(const DiagonalState& lambda, const ComplexMatrix& u,
                                const RealVector& a) {
  const int n = lambda.dim();
  if (u.rows() != n || a.size() != n) throw ShapeError("pushforward_check: size mismatch");
  ComplexMatrix observable = ComplexMatrix::Zero(n, n);
  for (int r = 0; r < n; ++r) observable += a[r] * basis_projector(r, n);
  ComplexMatrix rotated = u * observable * u.adjoint();
  Complex lhs(0.0, 0.0);
  for (int s = 0; s < n; ++s) lhs += lambda.weights[s] * rotated(s, s);

  RealVector pushed = from_unitary(u).apply(lambda.weights);
  double rhs = pushed.dot(a);
  return std::abs(lhs - Complex(rhs, 0.0));
}

/// Shannon entropy with 0 ln 0 = 0 (natural log).
inline double shannon_entropy(const RealVector& p) {
  double h = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) h -= p[i] * std::log(p[i]);
  }
  return h;
}

/// Entropies before and after the stochastic map. Doubly stochastic maps
/// cannot decrease entropy; a decrease beyond tolerance means T was not
/// doubly stochastic and is reported as a property violation.
inline std::pair<double, double> entropy_monotone(const DiagonalState& lambda,
                                                  const StochasticMatrix& t) {
  if (lambda.dim() != t.dim()) throw ShapeError("entropy_monotone: size mismatch");
  double before = shannon_entropy(lambda.weights);
  double after = shannon_entropy(t.apply(lambda.weights));
  if (after < before - 1e-10) {
    throw PropertyViolationError("entropy decreased under the map: " + std::to_string(before) +
                                 " -> " + std::to_string(after));
  }
  return {before, after};
}

struct BirkhoffTerm {
  double weight = 0.0;
  std::vector<int> perm;  // perm[row] = column
};

namespace detail {

/// Augmenting-path bipartite matching on the support pattern.
inline bool bipartite_match(const std::vector<std::vector<int>>& adj, int row,
                            std::vector<int>& match_col, std::vector<char>& seen) {
  for (int col : adj[row]) {
    if (seen[col]) continue;
    seen[col] = 1;
    if (match_col[col] < 0 || bipartite_match(adj, match_col[col], match_col, seen)) {
      match_col[col] = row;
      return true;
    }
  }
  return false;
}

inline bool perfect_matching(const RealMatrix& t, double tol, std::vector<int>& perm) {
  const int n = static_cast<int>(t.rows());
  std::vector<std::vector<int>> adj(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (t(i, j) > tol) adj[i].push_back(j);
  std::vector<int> match_col(n, -1);
  for (int row = 0; row < n; ++row) {
    std::vector<char> seen(n, 0);
    if (!bipartite_match(adj, row, match_col, seen)) return false;
  }
  perm.assign(n, -1);
  for (int col = 0; col < n; ++col) perm[match_col[col]] = col;
  return true;
}

/// Caratheodory reduction: while more terms remain than the Birkhoff
/// polytope's affine dimension + 1 = (N-1)^2 + 1 allows, find an affine
/// dependency among the permutation matrices and move weight along it until
/// one term drops out. Preserves the weighted sum and total weight exactly.
inline void caratheodory_prune(std::vector<BirkhoffTerm>& terms, int n) {
  const int bound = n * n - 2 * n + 2;
  while (static_cast<int>(terms.size()) > bound) {
    const int m = static_cast<int>(terms.size());
    Eigen::MatrixXd a(n * n + 1, m);
    for (int t = 0; t < m; ++t) {
      Eigen::VectorXd v = Eigen::VectorXd::Zero(n * n + 1);
      for (int row = 0; row < n; ++row) v[row * n + terms[t].perm[row]] = 1.0;
      v[n * n] = 1.0;
      a.col(t) = v;
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    Eigen::MatrixXd kernel = lu.kernel();
    if (kernel.cols() == 0 || kernel.cwiseAbs().maxCoeff() < 1e-12) {
      break;  // numerically independent; keep the longer decomposition
    }
    Eigen::VectorXd gamma = kernel.col(0);
    gamma /= gamma.cwiseAbs().maxCoeff();
    Eigen::Index peak = 0;
    gamma.cwiseAbs().maxCoeff(&peak);
    if (gamma[peak] < 0.0) gamma = -gamma;
    double theta = std::numeric_limits<double>::infinity();
    for (int t = 0; t < m; ++t) {
      if (gamma[t] > 1e-14) theta = std::min(theta, terms[t].weight / gamma[t]);
    }
    std::vector<BirkhoffTerm> next;
    next.reserve(terms.size() - 1);
    bool removed = false;
    for (int t = 0; t < m; ++t) {
      double w = terms[t].weight - theta * gamma[t];
      if (!removed && w <= 1e-14) {
        removed = true;  // drop exactly one vanished term per pass
        continue;
      }
      terms[t].weight = std::max(w, 0.0);
      next.push_back(std::move(terms[t]));
    }
    if (!removed) break;
    terms = std::move(next);
  }
}

}  // namespace detail

/// Greedy Birkhoff-von Neumann decomposition: repeatedly match the positive
/// support, subtract the minimal matched entry, and finally prune affine
/// dependencies so the term count respects the N^2 - 2N + 2 bound.
inline std::vector<BirkhoffTerm> birkhoff_decompose(const StochasticMatrix& t,
                                                    double tol = 1e-12) {
  const int n = t.dim();
  RealMatrix rem = t.t;
  std::vector<BirkhoffTerm> terms;
  double remaining = 1.0;

  while (remaining > n * tol) {
    std::vector<int> perm;
    if (!detail::perfect_matching(rem, tol, perm)) {
      throw DegeneracyError(
          "birkhoff_decompose: no perfect matching on the positive support; "
          "tolerance too small for the residual mass");
    }
    double w = std::numeric_limits<double>::infinity();
    for (int row = 0; row < n; ++row) w = std::min(w, rem(row, perm[row]));
    for (int row = 0; row < n; ++row) {
      rem(row, perm[row]) -= w;
      if (rem(row, perm[row]) <= tol) rem(row, perm[row]) = 0.0;
    }
    terms.push_back({w, std::move(perm)});
    remaining -= w;
    if (terms.size() > static_cast<std::size_t>(n * n + 1)) {
      throw DegeneracyError("birkhoff_decompose: did not converge");
    }
  }
  // Fold the dust back into the weights so they sum to 1 exactly.
  if (!terms.empty() && remaining > 0.0) terms.front().weight += remaining;
  detail::caratheodory_prune(terms, n);
  return terms;
}

/// Reassembles sum w_i Perm_i for residual checks.
inline RealMatrix birkhoff_reassemble(const std::vector<BirkhoffTerm>& terms, int n) {
  RealMatrix out = RealMatrix::Zero(n, n);
  for (const auto& term : terms) {
    for (int row = 0; row < n; ++row) out(row, term.perm[row]) += term.weight;
  }
  return out;
}

}  // namespace tomoforge
