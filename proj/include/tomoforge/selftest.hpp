#pragma once

#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "tomoforge/ambiguity.hpp"
#include "tomoforge/circle.hpp"
#include "tomoforge/coupled.hpp"
#include "tomoforge/entropy.hpp"
#include "tomoforge/reconstruct.hpp"
#include "tomoforge/stochastic.hpp"
#include "tomoforge/su2.hpp"

namespace tomoforge {

namespace detail {

inline void check(bool ok, const std::string& what) {
  if (!ok) throw PropertyViolationError(what);
}

}  // namespace detail

/// Compiled-in invariant suite behind the `selftest` subcommand: a reduced
/// sweep over every module's structural invariants. Returns the number of
/// failed checks and prints one line per check.
inline int run_selftest(std::uint64_t seed, std::FILE* out = stdout) {
  using detail::check;
  std::vector<std::pair<std::string, std::function<void()>>> checks;

  checks.emplace_back("trace norm axioms", [seed] {
    SeedStream rng(seed, 1);
    for (int it = 0; it < 20; ++it) {
      ComplexMatrix a = random_density(3, rng).matrix();
      ComplexMatrix b = random_density(3, rng).matrix();
      check(trace_norm(a + b) <= trace_norm(a) + trace_norm(b) + 1e-9, "triangle inequality");
      double d = trace_norm(a - b);
      check(d >= 0.0 && d <= 2.0 + 1e-12, "state-pair diameter");
    }
  });

  checks.emplace_back("hermitian exponential unitarity", [seed] {
    SeedStream rng(seed, 2);
    for (int it = 0; it < 10; ++it) {
      ComplexMatrix h = 4.0 * random_density(4, rng).matrix();
      ComplexMatrix u = matrix_exp_skew(h, 0.7);
      check(unitarity_defect(u) < 1e-10, "exp(-ith) unitary");
      check((matrix_exp_skew(h, 0.7) * matrix_exp_skew(h, -0.7) -
             ComplexMatrix::Identity(4, 4))
                    .cwiseAbs()
                    .maxCoeff() < 1e-10,
            "forward-backward identity");
    }
  });

  checks.emplace_back("generator basis Gram identity", [] {
    for (int n = 2; n <= 5; ++n) {
      HermitianBasis b = build_basis(n);
      for (int k = 0; k < b.size(); ++k)
        for (int l = 0; l < b.size(); ++l) {
          double g = (b.generators[k] * b.generators[l]).trace().real();
          check(std::abs(g - (k == l ? 2.0 : 0.0)) < 1e-10, "Tr(EE) = 2 delta");
        }
    }
  });

  checks.emplace_back("adjoint representation orthogonality", [seed] {
    SeedStream rng(seed, 3);
    for (int n : {2, 3, 4}) {
      HermitianBasis b = build_basis(n);
      RealMatrix d = adjoint_rep(haar_sample(n, rng), b);
      check((d.transpose() * d - RealMatrix::Identity(d.rows(), d.cols())).cwiseAbs().maxCoeff() <
                1e-9,
            "D orthogonal");
      check(std::abs(d.determinant() - 1.0) < 1e-9, "det D = 1");
    }
  });

  checks.emplace_back("orbit expansion identity", [seed] {
    SeedStream rng(seed, 4);
    for (int n : {2, 3, 4, 5}) {
      HermitianBasis b = build_basis(n);
      for (int it = 0; it < 20; ++it) orbit_point(haar_sample(n, rng), b);
    }
  });

  checks.emplace_back("finite protocol round trip", [seed] {
    SeedStream rng(seed, 5);
    for (int n = 2; n <= 4; ++n) {
      HermitianBasis basis = build_basis(n);
      for (int it = 0; it < 5; ++it) {
        DensityMatrix rho = random_density(n, rng);
        FiniteReconstruction rec = finite_reconstruct(exact_oracle(rho), basis);
        check(trace_norm(rec.matrix - rho.matrix()) <= 1e-9, "round trip 1e-9");
        check(rec.frame_queries == 1 + n * (n - 1), "query count");
      }
    }
  });

  checks.emplace_back("projector protocol query count", [seed] {
    SeedStream rng(seed, 6);
    for (int n = 2; n <= 4; ++n) {
      DensityMatrix rho = random_density(n, rng);
      ProjectorReconstruction rec = projector_protocol(exact_scalar_oracle(rho), n);
      check(rec.scalar_queries == n * n, "N^2 scalar queries");
      check(trace_norm(rec.matrix - rho.matrix()) <= 1e-9, "round trip");
    }
  });

  checks.emplace_back("measurement records are distributions", [seed] {
    SeedStream rng(seed, 7);
    for (int it = 0; it < 50; ++it) {
      DensityMatrix rho = random_density(4, rng);
      MeasurementRecord rec = measure(rho, haar_sample(4, rng));
      check(std::abs(rec.expectations.sum() - 1.0) < 1e-9, "sums to 1");
      check(rec.expectations.minCoeff() > -1e-9, "nonnegative");
    }
  });

  checks.emplace_back("pure diagonal lifts uniquely", [] {
    HermitianBasis basis = build_basis(3);
    DensityMatrix rho(basis_projector(1, 3));
    FiniteReconstruction rec = finite_reconstruct(exact_oracle(rho), basis);
    check(trace_norm(rec.matrix - basis_projector(1, 3)) < 1e-12, "projector returned");
  });

  checks.emplace_back("lift sampler validity", [seed] {
    SeedStream rng(seed, 8);
    RealVector w(3);
    w << 0.2, 0.3, 0.5;
    DiagonalState d(w);
    for (int it = 0; it < 50; ++it) {
      ComplexMatrix lift = sample_lift(d, rng);
      check(validate_density(lift).ok, "lift is a state");
      for (int i = 0; i < 3; ++i) {
        check(std::abs(lift(i, i).real() - w[i]) < 1e-12, "diagonal preserved");
      }
    }
  });

  checks.emplace_back("ambiguity closed form", [seed] {
    SeedStream rng(seed, 9);
    RealVector w(2);
    w << 0.3, 0.7;
    DeltaRhoResult r = delta_rho(DiagonalState(w), 12000, rng);
    check(std::abs(r.delta - 2.0 * std::sqrt(0.21)) < 1e-3, "2 sqrt(l1 l2)");
    RealVector pure(2);
    pure << 1.0, 0.0;
    check(delta_rho(DiagonalState(pure), 10, rng).delta == 0.0, "pure gives exactly 0");
  });

  checks.emplace_back("stochastic pushforward and entropy", [seed] {
    SeedStream rng(seed, 10);
    for (int n = 2; n <= 5; ++n) {
      for (int it = 0; it < 25; ++it) {
        RealVector w(n);
        for (int i = 0; i < n; ++i) w[i] = -std::log(1.0 - rng.uniform());
        w /= w.sum();
        DiagonalState lambda(w);
        ComplexMatrix u = haar_sample(n, rng);
        RealVector a(n);
        for (int i = 0; i < n; ++i) a[i] = 2.0 * rng.uniform() - 1.0;
        check(pushforward_check(lambda, u, a) <= 1e-10, "pushforward residual");
        entropy_monotone(lambda, from_unitary(u));  // throws on violation
      }
    }
  });

  checks.emplace_back("Birkhoff decomposition", [seed] {
    SeedStream rng(seed, 11);
    for (int n = 2; n <= 4; ++n) {
      for (int it = 0; it < 10; ++it) {
        StochasticMatrix t = from_unitary(haar_sample(n, rng));
        auto terms = birkhoff_decompose(t);
        check(static_cast<int>(terms.size()) <= n * n - 2 * n + 2, "term bound");
        check((birkhoff_reassemble(terms, n) - t.t).cwiseAbs().maxCoeff() <= 1e-8,
              "reassembly residual");
      }
    }
  });

  checks.emplace_back("coupled recovery round trip", [seed] {
    SeedStream rng(seed, 12);
    DensityMatrix rho_m = random_density(2, rng);
    DensityMatrix rho_s = random_density(2, rng);
    std::vector<CoupledConfig> configs;
    for (int c = 0; c < 4; ++c) {
      CoupledConfig cfg;
      cfg.n = cfg.N = 2;
      ComplexMatrix hs(2, 2), hm(2, 2);
      hs << rng.normal(), Complex(rng.normal(), rng.normal()), 0.0, rng.normal();
      hs(1, 0) = std::conj(hs(0, 1));
      hm << rng.normal(), Complex(rng.normal(), rng.normal()), 0.0, rng.normal();
      hm(1, 0) = std::conj(hm(0, 1));
      cfg.h_system = hs;
      cfg.h_apparatus = hm;
      cfg.couplings = RealMatrix::Zero(4, 4);
      for (int a = 0; a < 4; ++a)
        for (int k = 0; k < 4; ++k) cfg.couplings(a, k) = 2.0 * rng.uniform() - 1.0;
      cfg.t0 = 0.0;
      cfg.window = 0.7;
      cfg.t_read = 1.5;
      configs.push_back(cfg);
    }
    HermitianBasis basis_m = build_basis(2);
    RealVector obs(4 * basis_m.size());
    int row = 0;
    for (const auto& cfg : configs) {
      RealVector b = apparatus_read(evolve(cfg, rho_s, rho_m), basis_m, 2);
      obs.segment(row, b.size()) = b;
      row += static_cast<int>(b.size());
    }
    SystemRecovery rec = recover_system(build_design(configs, rho_m), obs);
    check(trace_norm(rec.rho_s - rho_s.matrix()) <= 1e-8, "rho_S recovered");
  });

  checks.emplace_back("mode equation Wronskian", [] {
    for (auto& profile : {CouplingProfile::bump(0.8, 5.0), CouplingProfile::rectangular(0.8, 5.0)}) {
      Trajectory traj = solve_modes(profile, 20.0, 1e-3);
      check(traj.max_wronskian_drift() <= 1e-8, "Wronskian drift");
    }
  });

  checks.emplace_back("momentum recovery", [] {
    CouplingProfile profile = CouplingProfile::bump(0.8, 5.0);
    Trajectory traj = b_expectation(profile, 2, 15.0, 1e-3);
    MomentumRecovery rec = recover_momentum(traj);
    check(rec.integer_n.has_value() && *rec.integer_n == 2, "integer momentum");
  });

  checks.emplace_back("Gaussian entropy saturation", [] {
    GridFunction psi = gaussian_line(20.0, 4096);
    EntropySum s = entropy_sum_rn(psi);
    check(std::abs(s.sum - (1.0 + std::log(M_PI))) < 1e-6, "1 + ln pi");
    check(s.q_derivative >= -1e-4, "q-derivative sign");
  });

  checks.emplace_back("circle single-mode saturation", [] {
    U1Check c = u1_check(single_mode_circle(2, 256), 1.5);
    check(std::abs(c.hy_slack) < 1e-10 && std::abs(c.entropy_slack) < 1e-10,
          "single mode saturates");
  });

  checks.emplace_back("tensor operator Gram and completeness", [seed] {
    SeedStream rng(seed, 13);
    TensorOperatorSet set = tensor_ops(1.0);
    for (int j = 0; j < set.rank_count(); ++j)
      for (int m = -j; m <= j; ++m) {
        check(std::abs((set.op(j, m) * set.op(j, m).adjoint()).trace().real() - 2.0) < 1e-10,
              "Gram normalization");
      }
    ComplexMatrix a = random_density(3, rng).matrix();
    ComplexMatrix rebuilt = ComplexMatrix::Zero(3, 3);
    for (int j = 0; j < set.rank_count(); ++j)
      for (int m = -j; m <= j; ++m) {
        rebuilt += 0.5 * ((set.op(j, m).adjoint() * a).trace()) * set.op(j, m);
      }
    check((a - rebuilt).cwiseAbs().maxCoeff() < 1e-10, "expansion completeness");
  });

  checks.emplace_back("spin tomography round trip", [seed] {
    SeedStream rng(seed, 14);
    ComplexMatrix rho = random_density(3, rng).matrix();
    auto oracle = [&](int i, const Euler& g) {
      su2::WignerEvaluator rep(1.0);
      ComplexMatrix u = rep(g);
      return (rho * u * basis_projector(i, 3) * u.adjoint()).trace().real();
    };
    ComplexMatrix rebuilt = spin_reconstruct(oracle, 1.0, 2.0);
    check(trace_norm(rebuilt - rho) <= 1e-7, "spin round trip");
  });

  int failures = 0;
  for (const auto& [name, fn] : checks) {
    try {
      fn();
      std::fprintf(out, "[ok]   %s\n", name.c_str());
    } catch (const std::exception& e) {
      ++failures;
      std::fprintf(out, "[FAIL] %s: %s\n", name.c_str(), e.what());
    }
  }
  std::fprintf(out, "%zu checks, %d failed\n", checks.size(), failures);
  return failures;
}

}  // namespace tomoforge
