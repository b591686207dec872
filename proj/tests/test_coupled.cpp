#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "tomoforge/coupled.hpp"

using namespace tomoforge;

namespace {

CoupledConfig make_config(int n, int N, SeedStream& rng, double coupling_scale = 1.0) {
  CoupledConfig cfg;
  cfg.n = n;
  cfg.N = N;
  cfg.h_system = oracles::random_hermitian(n, static_cast<unsigned>(rng.below(1u << 30)));
  cfg.h_apparatus = oracles::random_hermitian(N, static_cast<unsigned>(rng.below(1u << 30)));
  cfg.couplings = RealMatrix::Zero(n * n, N * N);
  for (int a = 0; a < n * n; ++a)
    for (int k = 0; k < N * N; ++k) {
      cfg.couplings(a, k) = coupling_scale * (2.0 * rng.uniform() - 1.0);
    }
  cfg.t0 = 0.0;
  cfg.window = 0.7;
  cfg.t_read = 1.5;
  return cfg;
}

}  // namespace

TEST(Evolve, DecoupledEvolutionStaysAProduct) {
  SeedStream rng(3);
  CoupledConfig cfg = make_config(2, 2, rng, 0.0);  // C = 0
  DensityMatrix rho_s = random_density(2, rng);
  DensityMatrix rho_m = random_density(2, rng);
  ComplexMatrix rho_t = evolve(cfg, rho_s, rho_m);

  // reduced system state must be the freely evolved rho_s
  ComplexMatrix u_s = matrix_exp_skew(cfg.h_system, cfg.t_read - cfg.t0);
  ComplexMatrix expected = u_s * rho_s.matrix() * u_s.adjoint();
  ComplexMatrix reduced = partial_trace_second(rho_t, 2, 2);
  EXPECT_LT((reduced - expected).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Evolve, PreservesTraceAndPositivity) {
  SeedStream rng(5);
  for (int it = 0; it < 5; ++it) {
    CoupledConfig cfg = make_config(2, 3, rng);
    DensityMatrix rho_s = random_density(2, rng);
    DensityMatrix rho_m = random_density(3, rng);
    ComplexMatrix rho_t = evolve(cfg, rho_s, rho_m);
    EXPECT_NEAR(std::abs(rho_t.trace() - Complex(1.0, 0.0)), 0.0, 1e-10);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (rho_t + rho_t.adjoint()));
    EXPECT_GE(es.eigenvalues().minCoeff(), -1e-9);
  }
}

TEST(Evolve, GenericCouplingEntanglesPureInputs) {
  SeedStream rng(7);
  CoupledConfig cfg = make_config(2, 2, rng);
  DensityMatrix rho_s = random_pure_density(2, rng);
  DensityMatrix rho_m = random_pure_density(2, rng);
  ComplexMatrix rho_t = evolve(cfg, rho_s, rho_m);
  ComplexMatrix reduced = partial_trace_first(rho_t, 2, 2);
  const double purity = (reduced * reduced).trace().real();
  EXPECT_LT(purity, 1.0 - 1e-6);
}

TEST(Evolve, RejectsDimensionMismatch) {
  SeedStream rng(9);
  CoupledConfig cfg = make_config(2, 2, rng);
  DensityMatrix rho3 = random_density(3, rng);
  DensityMatrix rho2 = random_density(2, rng);
  EXPECT_THROW(evolve(cfg, rho3, rho2), ShapeError);
}

TEST(CoupledConfig, RejectsBadTimes) {
  SeedStream rng(11);
  CoupledConfig cfg = make_config(2, 2, rng);
  cfg.t_read = cfg.t0 + cfg.window;  // readout must come after switch-off
  EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(ApparatusRead, ProductWithMaximallyMixedApparatusReadsZero) {
  SeedStream rng(13);
  DensityMatrix rho_s = random_density(2, rng);
  ComplexMatrix rho = kron(rho_s.matrix(), ComplexMatrix::Identity(3, 3) / 3.0);
  HermitianBasis basis_m = build_basis(3);
  RealVector b = apparatus_read(rho, basis_m, 2);
  EXPECT_LT(b.cwiseAbs().maxCoeff(), 1e-12);
}

TEST(ApparatusRead, ProductStateReadsApparatusBloch) {
  SeedStream rng(17);
  DensityMatrix rho_s = random_density(2, rng);
  DensityMatrix rho_m = random_density(3, rng);
  HermitianBasis basis_m = build_basis(3);
  RealVector b = apparatus_read(kron(rho_s.matrix(), rho_m.matrix()), basis_m, 2);
  RealVector expected = bloch_vector(rho_m.matrix(), basis_m);
  EXPECT_LT((b - expected).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(ApparatusRead, MatchesPartialTraceOracle) {
  SeedStream rng(19);
  CoupledConfig cfg = make_config(2, 3, rng);
  DensityMatrix rho_s = random_density(2, rng);
  DensityMatrix rho_m = random_density(3, rng);
  ComplexMatrix rho_t = evolve(cfg, rho_s, rho_m);
  HermitianBasis basis_m = build_basis(3);
  RealVector b = apparatus_read(rho_t, basis_m, 2);
  ComplexMatrix reduced = oracles::trace_out_first(rho_t, 2, 3);
  RealVector expected = bloch_vector(reduced, basis_m);
  EXPECT_LT((b - expected).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(BuildDesign, ZeroCouplingCarriesNoInformation) {
  SeedStream rng(23);
  std::vector<CoupledConfig> configs = {make_config(2, 2, rng, 0.0)};
  DensityMatrix rho_m = random_density(2, rng);
  DesignMatrix design = build_design(configs, rho_m);
  EXPECT_LT(design.m.cwiseAbs().maxCoeff(), 1e-12);
}

TEST(BuildDesign, ReadingsAreAffineInTheState) {
  SeedStream rng(29);
  CoupledConfig cfg = make_config(2, 2, rng);
  DensityMatrix rho_m = random_density(2, rng);
  DensityMatrix rho_a = random_density(2, rng);
  DensityMatrix rho_b = random_density(2, rng);
  DensityMatrix rho_mix(0.5 * (rho_a.matrix() + rho_b.matrix()));

  HermitianBasis basis_m = build_basis(2);
  auto readings = [&](const DensityMatrix& rho_s) {
    return apparatus_read(evolve(cfg, rho_s, rho_m), basis_m, 2);
  };
  RealVector mix = readings(rho_mix);
  RealVector avg = 0.5 * (readings(rho_a) + readings(rho_b));
  EXPECT_LT((mix - avg).cwiseAbs().maxCoeff(), 1e-10);

  // and the design reproduces the readings exactly
  DesignMatrix design = build_design({cfg}, rho_m);
  HermitianBasis basis_s = build_basis(2);
  RealVector x = bloch_vector(rho_a.matrix(), basis_s);
  RealVector predicted = design.m * x + design.offset;
  EXPECT_LT((predicted - readings(rho_a)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(BuildDesign, ThreeGenericCouplingsReachFullRank) {
  SeedStream rng(31);
  DensityMatrix rho_m = random_density(2, rng);
  std::vector<CoupledConfig> configs;
  for (int c = 0; c < 3; ++c) configs.push_back(make_config(2, 2, rng));
  DesignMatrix design = build_design(configs, rho_m);
  Eigen::JacobiSVD<RealMatrix> svd(design.m);
  int rank = 0;
  for (int i = 0; i < svd.singularValues().size(); ++i) {
    if (svd.singularValues()[i] > 1e-10 * svd.singularValues()[0]) ++rank;
  }
  EXPECT_EQ(rank, 3);
}

TEST(BuildDesign, RankNeverDropsWhenAddingConfigs) {
  SeedStream rng(37);
  DensityMatrix rho_m = random_density(2, rng);
  std::vector<CoupledConfig> configs;
  int last_rank = 0;
  for (int c = 0; c < 4; ++c) {
    configs.push_back(make_config(2, 2, rng));
    DesignMatrix design = build_design(configs, rho_m);
    Eigen::JacobiSVD<RealMatrix> svd(design.m);
    int rank = 0;
    for (int i = 0; i < svd.singularValues().size(); ++i) {
      if (svd.singularValues()[i] > 1e-10 * svd.singularValues()[0]) ++rank;
    }
    EXPECT_GE(rank, last_rank);
    last_rank = rank;
  }
}

TEST(BuildDesign, RejectsMixedDimensions) {
  SeedStream rng(41);
  std::vector<CoupledConfig> configs = {make_config(2, 2, rng), make_config(2, 3, rng)};
  DensityMatrix rho_m = random_density(2, rng);
  EXPECT_THROW(build_design(configs, rho_m), ConfigError);
}

TEST(RecoverSystem, RoundTripFromApparatusReadings) {
  SeedStream rng(43);
  DensityMatrix rho_m = random_density(2, rng);
  DensityMatrix rho_s = random_density(2, rng);
  std::vector<CoupledConfig> configs;
  for (int c = 0; c < 4; ++c) configs.push_back(make_config(2, 2, rng));

  HermitianBasis basis_m = build_basis(2);
  RealVector obs(static_cast<int>(configs.size()) * basis_m.size());
  int row = 0;
  for (const auto& cfg : configs) {
    RealVector b = apparatus_read(evolve(cfg, rho_s, rho_m), basis_m, 2);
    obs.segment(row, b.size()) = b;
    row += static_cast<int>(b.size());
  }
  DesignMatrix design = build_design(configs, rho_m);
  SystemRecovery rec = recover_system(design, obs);
  EXPECT_LT(trace_norm(rec.rho_s - rho_s.matrix()), 1e-8);
  EXPECT_EQ(rec.rank, 3);
}

TEST(RecoverSystem, ZeroCouplingIsUnderdetermined) {
  SeedStream rng(47);
  std::vector<CoupledConfig> configs = {make_config(2, 2, rng, 0.0)};
  DensityMatrix rho_m = random_density(2, rng);
  DesignMatrix design = build_design(configs, rho_m);
  RealVector obs = RealVector::Zero(design.m.rows());
  try {
    recover_system(design, obs);
    FAIL() << "expected UnderdeterminedError";
  } catch (const UnderdeterminedError& e) {
    EXPECT_TRUE(e.determined_directions.empty());
  }
}

TEST(RecoverSystem, NoiseAmplificationBoundedByCondition) {
  SeedStream rng(53);
  DensityMatrix rho_m = random_density(2, rng);
  DensityMatrix rho_s = random_density(2, rng);
  std::vector<CoupledConfig> configs;
  for (int c = 0; c < 4; ++c) configs.push_back(make_config(2, 2, rng));
  HermitianBasis basis_m = build_basis(2);
  RealVector obs(static_cast<int>(configs.size()) * basis_m.size());
  int row = 0;
  for (const auto& cfg : configs) {
    RealVector b = apparatus_read(evolve(cfg, rho_s, rho_m), basis_m, 2);
    obs.segment(row, b.size()) = b;
    row += static_cast<int>(b.size());
  }
  DesignMatrix design = build_design(configs, rho_m);
  SystemRecovery clean = recover_system(design, obs);

  RealVector noisy = obs;
  for (int i = 0; i < noisy.size(); ++i) noisy[i] += 1e-6 * (2.0 * rng.uniform() - 1.0);
  SystemRecovery perturbed = recover_system(design, noisy);
  const double err = trace_norm(perturbed.rho_s - clean.rho_s);
  EXPECT_LE(err, clean.condition * 1e-6 * 10.0);
}

TEST(RecoverSystem, PartialModeReturnsDeterminedSubspace) {
  SeedStream rng(59);
  std::vector<CoupledConfig> configs = {make_config(2, 2, rng, 0.0)};
  DensityMatrix rho_m = random_density(2, rng);
  DesignMatrix design = build_design(configs, rho_m);
  RealVector obs = RealVector::Zero(design.m.rows());
  SystemRecovery rec = recover_system(design, obs, RecoveryMode::partial);
  EXPECT_EQ(rec.rank, 0);
  EXPECT_TRUE(rec.determined_directions.empty());
}
