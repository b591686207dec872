#include <gtest/gtest.h>

#include <cmath>

#include "tomoforge/circle.hpp"

using namespace tomoforge;

TEST(SolveModes, FreeOscillator) {
  CouplingProfile off = CouplingProfile::rectangular(0.0, 1.0);
  Trajectory traj = solve_modes(off, 10.0, 1e-3);
  for (std::size_t k = 0; k < traj.size(); k += 500) {
    EXPECT_NEAR(traj.u1[k], std::cos(traj.t[k]), 1e-8);
    EXPECT_NEAR(traj.u2[k], std::sin(traj.t[k]), 1e-8);
  }
}

TEST(SolveModes, ConstantCouplingClosedForm) {
  const double lambda0 = 0.8;
  const double omega = std::sqrt(1.0 + lambda0 * lambda0);
  CouplingProfile profile = CouplingProfile::constant_coupling(lambda0);
  Trajectory traj = solve_modes(profile, 10.0, 1e-3);
  for (std::size_t k = 0; k < traj.size(); k += 250) {
    EXPECT_NEAR(traj.u1[k], std::cos(omega * traj.t[k]), 1e-7);
    EXPECT_NEAR(traj.u2[k], std::sin(omega * traj.t[k]) / omega, 1e-7);
  }
}

TEST(SolveModes, WronskianConservedForProfileFamily) {
  const double h = 1e-3, t_end = 20.0;
  std::vector<CouplingProfile> family = {
      CouplingProfile::rectangular(0.8, 5.0),
      CouplingProfile::bump(0.8, 5.0),
      CouplingProfile::constant_coupling(0.5),
      CouplingProfile::tabulated({0.0, 1.0, 2.5, 4.0}, {0.0, 0.7, 0.2, 0.0}),
  };
  for (const auto& profile : family) {
    Trajectory traj = solve_modes(profile, t_end, h);
    EXPECT_LE(traj.max_wronskian_drift(), 1e-8) << profile.name();
  }
}

TEST(SolveModes, InitialConditions) {
  Trajectory traj = solve_modes(CouplingProfile::bump(0.5, 2.0), 5.0, 1e-3);
  EXPECT_EQ(traj.u1[0], 1.0);
  EXPECT_EQ(traj.du1[0], 0.0);
  EXPECT_EQ(traj.u2[0], 0.0);
  EXPECT_EQ(traj.du2[0], 1.0);
  EXPECT_EQ(traj.wronskian[0], 1.0);
}

TEST(SolveModes, CoarseStepRaisesAccuracyError) {
  CouplingProfile strong = CouplingProfile::constant_coupling(30.0);
  EXPECT_THROW(solve_modes(strong, 20.0, 0.2), AccuracyError);
}

TEST(SolveModes, RejectsBadArguments) {
  CouplingProfile p = CouplingProfile::bump(0.5, 1.0);
  EXPECT_THROW(solve_modes(p, -1.0, 1e-3), InvalidInputError);
  EXPECT_THROW(solve_modes(p, 1.0, 0.0), InvalidInputError);
}

TEST(ParticularSolution, VanishesWithoutCoupling) {
  CouplingProfile off = CouplingProfile::rectangular(0.0, 1.0);
  Trajectory traj = solve_modes(off, 5.0, 1e-3);
  particular_solution(off, traj);
  for (double v : traj.u_par) EXPECT_NEAR(v, 0.0, 1e-12);
  EXPECT_EQ(traj.lambda1, 0.0);
  EXPECT_EQ(traj.lambda2, 0.0);
}

TEST(ParticularSolution, ConstantCouplingApproachesSteadyValue) {
  const double lambda0 = 0.6;
  CouplingProfile profile = CouplingProfile::constant_coupling(lambda0);
  Trajectory traj = solve_modes(profile, 12.0, 1e-3);
  particular_solution(profile, traj);
  // closed form: u_par = (lambda0/omega^2)(1 - cos(omega t))
  const double omega_sq = 1.0 + lambda0 * lambda0;
  for (std::size_t k = 0; k < traj.size(); k += 400) {
    const double expected = lambda0 / omega_sq * (1.0 - std::cos(std::sqrt(omega_sq) * traj.t[k]));
    EXPECT_NEAR(traj.u_par[k], expected, 1e-6);
  }
  // oscillates around the steady solution lambda0/(1+lambda0^2)
  double mean = 0.0;
  for (double v : traj.u_par) mean += v;
  mean /= double(traj.u_par.size());
  EXPECT_NEAR(mean, lambda0 / omega_sq, 0.05);
}

TEST(ParticularSolution, BumpResidualIsSmall) {
  CouplingProfile profile = CouplingProfile::bump(0.8, 5.0);
  Trajectory traj = solve_modes(profile, 15.0, 1e-3);
  EXPECT_NO_THROW(particular_solution(profile, traj));  // residual checked inside
  EXPECT_TRUE(traj.has_u_par);
}

TEST(ParticularSolution, RectangularSwitchOffKeepsAccuracy) {
  CouplingProfile profile = CouplingProfile::rectangular(0.8, 5.0);
  Trajectory traj = solve_modes(profile, 15.0, 1e-3);
  EXPECT_NO_THROW(particular_solution(profile, traj));
  // after switch-off the particular solution is frozen into the closed form
  for (std::size_t k = 0; k < traj.size(); ++k) {
    if (traj.t[k] <= 5.0) continue;
    const double closed = traj.lambda1 * traj.u2[k] - traj.lambda2 * traj.u1[k];
    EXPECT_NEAR(traj.u_par[k], closed, 1e-8);
  }
}

TEST(BExpectation, GroundStateMomentumGivesZeroSignal) {
  CouplingProfile profile = CouplingProfile::bump(0.8, 5.0);
  Trajectory traj = b_expectation(profile, 0, 12.0, 1e-3);
  for (double v : traj.b) EXPECT_EQ(v, 0.0);
}

TEST(BExpectation, SignalIsLinearInMomentum) {
  CouplingProfile profile = CouplingProfile::bump(0.8, 5.0);
  Trajectory one = b_expectation(profile, 1, 12.0, 1e-3);
  Trajectory three = b_expectation(profile, 3, 12.0, 1e-3);
  for (std::size_t k = 0; k < one.size(); k += 100) {
    EXPECT_NEAR(three.b[k], 3.0 * one.b[k], 1e-12);
  }
}

TEST(BExpectation, JunctionMatchesPostWindowForm) {
  CouplingProfile profile = CouplingProfile::bump(0.8, 5.0);
  Trajectory traj = b_expectation(profile, 2, 12.0, 1e-3);
  for (std::size_t k = 0; k < traj.size(); ++k) {
    if (traj.t[k] <= 5.0) continue;
    const double closed =
        traj.pi_expectation * (traj.lambda1 * traj.u2[k] - traj.lambda2 * traj.u1[k]);
    EXPECT_NEAR(traj.b[k], closed, 1e-6);
    break;  // first post-window sample is the junction
  }
}

TEST(RecoverMomentum, IntegersRoundTrip) {
  CouplingProfile profile = CouplingProfile::bump(0.8, 5.0);
  for (int n = -3; n <= 3; ++n) {
    Trajectory traj = b_expectation(profile, n, 15.0, 1e-3);
    MomentumRecovery rec = recover_momentum(traj);
    ASSERT_TRUE(rec.integer_n.has_value()) << "n = " << n;
    EXPECT_EQ(*rec.integer_n, n);
  }
}

TEST(RecoverMomentum, ZeroCouplingHasNoInformation) {
  CouplingProfile off = CouplingProfile::rectangular(0.0, 5.0);
  Trajectory traj = b_expectation(off, 3, 15.0, 1e-3);
  EXPECT_THROW(recover_momentum(traj), NoInformationError);
}

TEST(RecoverMomentum, MixtureGivesFractionalMomentum) {
  CouplingProfile profile = CouplingProfile::bump(0.8, 5.0);
  const double pi = mixture_momentum({{1, 0.5}, {2, 0.5}});
  Trajectory traj = b_expectation(profile, pi, 15.0, 1e-3);
  MomentumRecovery rec = recover_momentum(traj);
  EXPECT_NEAR(rec.pi_expectation, 1.5, 1e-4);
  EXPECT_FALSE(rec.integer_n.has_value());
}

TEST(RecoverMomentum, WindowsAgreeByMomentumConservation) {
  CouplingProfile profile = CouplingProfile::bump(0.8, 5.0);
  Trajectory traj = b_expectation(profile, 2, 19.0, 1e-3);
  // fit separately on two disjoint post-window stretches
  auto fit_window = [&](double lo, double hi) {
    double rr = 0.0, br = 0.0;
    for (std::size_t k = 0; k < traj.size(); ++k) {
      if (traj.t[k] <= lo || traj.t[k] > hi) continue;
      const double r = traj.lambda1 * traj.u2[k] - traj.lambda2 * traj.u1[k];
      rr += r * r;
      br += traj.b[k] * r;
    }
    return br / rr;
  };
  const double early = fit_window(5.0, 12.0);
  const double late = fit_window(12.0, 19.0);
  EXPECT_NEAR(early, late, 1e-5);
}

TEST(MixtureMomentum, ValidatesWeights) {
  EXPECT_THROW(mixture_momentum({{1, 0.5}, {2, 0.4}}), InvalidInputError);
  EXPECT_THROW(mixture_momentum({{1, -0.5}, {2, 1.5}}), InvalidInputError);
  EXPECT_NEAR(mixture_momentum({{-2, 0.25}, {0, 0.5}, {2, 0.25}}), 0.0, 1e-15);
}
