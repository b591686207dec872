#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tomoforge/errors.hpp"
#include "tomoforge/numeric.hpp"

namespace tomoforge {

/// Time-dependent coupling strength lambda(t), zero outside [0, T]. Profiles
/// carry their breakpoints so the integrator and the quadrature can treat
/// each smooth piece one-sidedly (a rectangular switch-off would otherwise
/// cost the fourth order).
class CouplingProfile {
public:
  static CouplingProfile rectangular(double lambda0, double t_off) {
    if (t_off <= 0.0) throw InvalidInputError("rectangular profile: T must be positive");
    CouplingProfile p;
    p.family_ = Family::rectangular;
    p.lambda0_ = lambda0;
    p.t_off_ = t_off;
    return p;
  }

  /// lambda0 sin^2(pi t / T) on [0, T]; C^1 at both ends.
  static CouplingProfile bump(double lambda0, double t_off) {
    if (t_off <= 0.0) throw InvalidInputError("bump profile: T must be positive");
    CouplingProfile p;
    p.family_ = Family::bump;
    p.lambda0_ = lambda0;
    p.t_off_ = t_off;
    return p;
  }

  /// Constant coupling for all t >= 0 (test mode; never switches off).
  static CouplingProfile constant_coupling(double lambda0) {
    CouplingProfile p;
    p.family_ = Family::constant;
    p.lambda0_ = lambda0;
    p.t_off_ = std::numeric_limits<double>::infinity();
    return p;
  }

  /// Piecewise-linear profile through (times, values); zero outside the
  /// tabulated range. times must start at 0 and increase.
  static CouplingProfile tabulated(std::vector<double> times, std::vector<double> values) {
    if (times.size() < 2 || times.size() != values.size()) {
      throw InvalidInputError("tabulated profile: need matching time/value lists, length >= 2");
    }
    if (times.front() != 0.0) throw InvalidInputError("tabulated profile: times must start at 0");
    for (std::size_t i = 1; i < times.size(); ++i) {
      if (times[i] <= times[i - 1]) {
        throw InvalidInputError("tabulated profile: times must increase");
      }
    }
    CouplingProfile p;
    p.family_ = Family::tabulated;
    p.t_off_ = times.back();
    p.knot_t_ = std::move(times);
    p.knot_v_ = std::move(values);
    return p;
  }

  double operator()(double t) const {
    if (t < 0.0 || t > t_off_) return 0.0;
    return on_value(t);
  }

  bool bounded_support() const { return std::isfinite(t_off_); }
  double support_end() const { return t_off_; }
  double amplitude() const { return lambda0_; }

  std::string name() const {
    switch (family_) {
      case Family::rectangular: return "rectangular";
      case Family::bump: return "bump";
      case Family::constant: return "constant";
      case Family::tabulated: return "tabulated";
    }
    return "?";
  }

  /// Value with the side of the switch-off point chosen by piece: piece 0 is
  /// the coupling window [0, T], piece 1 the free region beyond.
  double piece_value(int piece, double t) const {
    if (piece == 0) return on_value(t);
    return 0.0;
  }

  /// Breakpoints strictly inside (0, t_end).
  std::vector<double> interior_breakpoints(double t_end) const {
    std::vector<double> out;
    if (bounded_support() && t_off_ > 0.0 && t_off_ < t_end) out.push_back(t_off_);
    return out;
  }

  int piece_of(double t) const { return (t <= t_off_) ? 0 : 1; }

private:
  enum class Family { rectangular, bump, constant, tabulated };

  double on_value(double t) const {
    switch (family_) {
      case Family::rectangular:
      case Family::constant:
        return lambda0_;
      case Family::bump: {
        double s = std::sin(M_PI * t / t_off_);
        return lambda0_ * s * s;
      }
      case Family::tabulated: {
        auto it = std::upper_bound(knot_t_.begin(), knot_t_.end(), t);
        if (it == knot_t_.begin()) return knot_v_.front();
        if (it == knot_t_.end()) return knot_v_.back();
        std::size_t hi = static_cast<std::size_t>(it - knot_t_.begin());
        double w = (t - knot_t_[hi - 1]) / (knot_t_[hi] - knot_t_[hi - 1]);
        return (1.0 - w) * knot_v_[hi - 1] + w * knot_v_[hi];
      }
    }
    return 0.0;
  }

  Family family_ = Family::constant;
  double lambda0_ = 0.0;
  double t_off_ = std::numeric_limits<double>::infinity();
  std::vector<double> knot_t_;
  std::vector<double> knot_v_;
};

/// Sampled solution of the mode equation and derived quantities. u1, u2 are
/// the fundamental solutions with u1(0)=1, u1'(0)=0 and u2(0)=0, u2'(0)=1
/// (the unique initial data consistent with Wronskian = 1).
struct Trajectory {
  double h = 0.0;
  std::vector<double> t;
  std::vector<double> u1, du1, u2, du2;
  std::vector<double> wronskian;
  std::vector<double> u_par;
  std::vector<double> b;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double pi_expectation = 0.0;
  double support_end = std::numeric_limits<double>::infinity();
  bool has_u_par = false;
  bool has_b = false;

  std::size_t size() const { return t.size(); }
  double max_wronskian_drift() const {
    double m = 0.0;
    for (double w : wronskian) m = std::max(m, std::abs(w - 1.0));
    return m;
  }
};

namespace detail {

struct ModeState {
  std::array<double, 4> y;  // u1, du1, u2, du2
};

inline std::array<double, 4> mode_rhs(const std::array<double, 4>& y, double omega_sq) {
  return {y[1], -omega_sq * y[0], y[3], -omega_sq * y[2]};
}

inline void rk4_step(std::array<double, 4>& y, double t, double h, const CouplingProfile& profile,
                     int piece) {
  auto omega_sq = [&](double tau) {
    double l = profile.piece_value(piece, tau);
    return 1.0 + l * l;
  };
  auto add = [](const std::array<double, 4>& a, const std::array<double, 4>& b, double s) {
    std::array<double, 4> out;
    for (int i = 0; i < 4; ++i) out[i] = a[i] + s * b[i];
    return out;
  };
  auto k1 = mode_rhs(y, omega_sq(t));
  auto k2 = mode_rhs(add(y, k1, 0.5 * h), omega_sq(t + 0.5 * h));
  auto k3 = mode_rhs(add(y, k2, 0.5 * h), omega_sq(t + 0.5 * h));
  auto k4 = mode_rhs(add(y, k3, h), omega_sq(t + h));
  for (int i = 0; i < 4; ++i) {
    y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
}

/// Advances across [t0, t1], splitting at profile breakpoints so every RK4
/// stage sees a smooth coefficient.
inline void advance(std::array<double, 4>& y, double t0, double t1,
                    const CouplingProfile& profile, const std::vector<double>& breaks) {
  double cur = t0;
  for (double b : breaks) {
    if (b > t0 + 1e-15 && b < t1 - 1e-15) {
      rk4_step(y, cur, b - cur, profile, profile.piece_of(0.5 * (cur + b)));
      cur = b;
    }
  }
  rk4_step(y, cur, t1 - cur, profile, profile.piece_of(0.5 * (cur + t1)));
}

}  // namespace detail

/// Integrates the homogeneous mode equation u'' + (1 + lambda(t)^2) u = 0 for
/// both fundamental solutions with classical RK4 at fixed step h. The
/// Wronskian u1 u2' - u1' u2 is conserved by the equation and monitored as
/// the integrator invariant.
inline Trajectory solve_modes(const CouplingProfile& profile, double t_end, double h) {
  if (h <= 0.0 || t_end <= 0.0) throw InvalidInputError("solve_modes: need h > 0 and t_end > 0");
  const auto steps = static_cast<std::size_t>(std::llround(t_end / h));
  if (steps < 4) throw InvalidInputError("solve_modes: grid too coarse");

  Trajectory traj;
  traj.h = h;
  traj.support_end = profile.support_end();
  traj.t.reserve(steps + 1);
  const std::vector<double> breaks = profile.interior_breakpoints(t_end);

  std::array<double, 4> y = {1.0, 0.0, 0.0, 1.0};
  auto push = [&](double t, const std::array<double, 4>& v) {
    traj.t.push_back(t);
    traj.u1.push_back(v[0]);
    traj.du1.push_back(v[1]);
    traj.u2.push_back(v[2]);
    traj.du2.push_back(v[3]);
    traj.wronskian.push_back(v[0] * v[3] - v[1] * v[2]);
  };
  push(0.0, y);
  for (std::size_t k = 0; k < steps; ++k) {
    const double t0 = static_cast<double>(k) * h;
    const double t1 = static_cast<double>(k + 1) * h;
    detail::advance(y, t0, t1, profile, breaks);
    push(t1, y);
  }

  if (traj.max_wronskian_drift() > 1e-4) {
    throw AccuracyError("solve_modes: Wronskian drift " +
                        std::to_string(traj.max_wronskian_drift()) +
                        " exceeds 1e-4; use a smaller step");
  }
  return traj;
}

/// Particular solution of u'' + (1 + lambda^2) u = lambda by variation of
/// parameters: u_par = -u1 int lambda u2 + u2 int lambda u1, with the
/// integrals accumulated by composite Simpson piece by piece on the solver
/// grid. Also fixes lambda_i = int_0^T lambda u_i. The ODE residual is
/// verified pointwise away from breakpoints.
inline std::vector<double> particular_solution(const CouplingProfile& profile, Trajectory& traj) {
  const std::size_t m = traj.size();
  if (m == 0 || traj.u1.size() != m || traj.u2.size() != m) {
    throw ShapeError("particular_solution: trajectory grid is incomplete");
  }
  const double h = traj.h;

  // Node index ranges of the smooth pieces (breakpoints snap to the nearest
  // node; off-grid breakpoints lose local quadrature order only).
  std::vector<std::size_t> bounds = {0};
  for (double b : profile.interior_breakpoints(traj.t.back() + 0.5 * h)) {
    auto idx = static_cast<std::size_t>(std::llround(b / h));
    if (idx > bounds.back() && idx < m - 1) bounds.push_back(idx);
  }
  bounds.push_back(m - 1);

  std::vector<double> i1(m, 0.0), i2(m, 0.0);
  for (std::size_t p = 0; p + 1 < bounds.size(); ++p) {
    const std::size_t lo = bounds[p], hi = bounds[p + 1];
    const int piece = profile.piece_of(0.5 * (traj.t[lo] + traj.t[hi]));
    std::vector<double> g1(hi - lo + 1), g2(hi - lo + 1);
    for (std::size_t k = lo; k <= hi; ++k) {
      const double lam = profile.piece_value(piece, traj.t[k]);
      g1[k - lo] = lam * traj.u1[k];
      g2[k - lo] = lam * traj.u2[k];
    }
    auto c1 = cumulative_simpson(g1, h);
    auto c2 = cumulative_simpson(g2, h);
    const double base1 = i1[lo], base2 = i2[lo];
    for (std::size_t k = lo; k <= hi; ++k) {
      i1[k] = base1 + c1[k - lo];
      i2[k] = base2 + c2[k - lo];
    }
  }

  traj.u_par.resize(m);
  for (std::size_t k = 0; k < m; ++k) {
    traj.u_par[k] = -traj.u1[k] * i2[k] + traj.u2[k] * i1[k];
  }
  if (profile.bounded_support() && profile.support_end() <= traj.t.back() + 0.5 * h) {
    auto idx = std::min<std::size_t>(m - 1, static_cast<std::size_t>(std::llround(
                                                profile.support_end() / h)));
    traj.lambda1 = i1[idx];
    traj.lambda2 = i2[idx];
  } else {
    traj.lambda1 = i1.back();
    traj.lambda2 = i2.back();
  }
  traj.has_u_par = true;

  // Residual check u_par'' + (1+lambda^2) u_par - lambda = O(h^4), skipping
  // stencil windows that straddle a breakpoint.
  std::vector<double> upp = second_derivative(traj.u_par, h);
  const double tol = std::max(1e-7, 1e6 * h * h * h * h);
  for (std::size_t k = 2; k + 2 < m; ++k) {
    bool near_break = false;
    for (std::size_t j = 1; j + 1 < bounds.size(); ++j) {
      if (k + 2 >= bounds[j] && k <= bounds[j] + 2) near_break = true;
    }
    if (near_break) continue;
    const double lam = profile(traj.t[k]);
    const double res = upp[k] + (1.0 + lam * lam) * traj.u_par[k] - lam;
    if (std::abs(res) > tol) {
      throw AccuracyError("particular_solution: ODE residual " + std::to_string(res) +
                          " at t = " + std::to_string(traj.t[k]));
    }
  }
  return traj.u_par;
}

/// Expected momentum of a mixture sum p_n |n><n|.
inline double mixture_momentum(const std::vector<std::pair<int, double>>& terms) {
  double total = 0.0, psum = 0.0;
  for (const auto& [n, p] : terms) {
    if (p < 0.0) throw InvalidInputError("mixture_momentum: negative weight");
    total += p * n;
    psum += p;
  }
  if (std::abs(psum - 1.0) > 1e-12) {
    throw InvalidInputError("mixture_momentum: weights do not sum to 1");
  }
  return total;
}

/// Field expectation <B(t)> = <pi> u_par(t) for the oscillator ground state
/// of the apparatus. Past the switch-off the closed form
/// <pi> (lambda_1 u2 - lambda_2 u1) must agree with the in-window
/// construction; the junction is checked to 1e-6.
inline Trajectory b_expectation(const CouplingProfile& profile, double pi_expectation,
                                double t_end, double h) {
  Trajectory traj = solve_modes(profile, t_end, h);
  particular_solution(profile, traj);
  traj.pi_expectation = pi_expectation;
  traj.b.resize(traj.size());
  for (std::size_t k = 0; k < traj.size(); ++k) {
    traj.b[k] = pi_expectation * traj.u_par[k];
  }
  traj.has_b = true;

  if (profile.bounded_support()) {
    for (std::size_t k = 0; k < traj.size(); ++k) {
      if (traj.t[k] <= profile.support_end()) continue;
      const double closed = traj.lambda1 * traj.u2[k] - traj.lambda2 * traj.u1[k];
      if (std::abs(traj.u_par[k] - closed) > 1e-6) {
        throw ConsistencyError("b_expectation: post-window closed form disagrees at t = " +
                               std::to_string(traj.t[k]));
      }
    }
  }
  return traj;
}

inline Trajectory b_expectation(const CouplingProfile& profile, int n, double t_end, double h) {
  return b_expectation(profile, static_cast<double>(n), t_end, h);
}

struct MomentumRecovery {
  double pi_expectation = 0.0;
  std::optional<int> integer_n;
  double fit_rms = 0.0;
  std::size_t fit_points = 0;
};

/// Least-squares fit of <B(t)> against the post-window regressor
/// r(t) = lambda_1 u2(t) - lambda_2 u1(t). Rounds to the nearest integer
/// momentum when within 0.25.
inline MomentumRecovery recover_momentum(const Trajectory& traj) {
  if (!traj.has_b) throw InvalidInputError("recover_momentum: trajectory carries no <B(t)>");
  if (!std::isfinite(traj.support_end) || traj.support_end >= traj.t.back()) {
    throw NoInformationError("recover_momentum: no post-window samples");
  }
  double rr = 0.0, br = 0.0, n_pts = 0.0;
  std::vector<std::pair<double, double>> samples;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    if (traj.t[k] <= traj.support_end) continue;
    const double r = traj.lambda1 * traj.u2[k] - traj.lambda2 * traj.u1[k];
    samples.emplace_back(r, traj.b[k]);
    rr += r * r;
    br += traj.b[k] * r;
    n_pts += 1.0;
  }
  if (std::sqrt(rr * traj.h) < 1e-9) {
    throw NoInformationError("recover_momentum: regressor vanishes (lambda_1 = lambda_2 = 0)");
  }
  MomentumRecovery out;
  out.pi_expectation = br / rr;
  out.fit_points = samples.size();
  double sq = 0.0;
  for (const auto& [r, b] : samples) {
    const double e = b - out.pi_expectation * r;
    sq += e * e;
  }
  out.fit_rms = std::sqrt(sq / n_pts);
  const double rounded = std::round(out.pi_expectation);
  if (std::abs(out.pi_expectation - rounded) <= 0.25) {
    out.integer_n = static_cast<int>(rounded);
  }
  return out;
}

}  // namespace tomoforge
