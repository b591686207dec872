#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tomoforge/errors.hpp"
#include "tomoforge/numeric.hpp"

namespace tomoforge {

/// Uniformly sampled complex function, either on the line [-L, L) (M points,
/// x_j = -L + j dx) or on the circle (phi_j = 2 pi j / M).
struct GridFunction {
  enum class Domain { line, circle };

  Domain domain = Domain::line;
  double half_width = 0.0;  // L; unused on the circle
  Eigen::VectorXcd samples;

  static GridFunction line(double l, Eigen::VectorXcd values) {
    if (l <= 0.0) throw InvalidInputError("GridFunction: L must be positive");
    if (values.size() < 16) throw InvalidInputError("GridFunction: need at least 16 samples");
    return {Domain::line, l, std::move(values)};
  }
  static GridFunction circle(Eigen::VectorXcd values) {
    if (values.size() < 16) throw InvalidInputError("GridFunction: need at least 16 samples");
    return {Domain::circle, 0.0, std::move(values)};
  }

  int size() const { return static_cast<int>(samples.size()); }
  double dx() const {
    return domain == Domain::line ? 2.0 * half_width / size() : 2.0 * M_PI / size();
  }
  double x(int j) const {
    return domain == Domain::line ? -half_width + j * dx() : j * dx();
  }

  /// Every other sample, same domain; used for refinement estimates.
  GridFunction coarsened() const {
    Eigen::VectorXcd half(size() / 2);
    for (int j = 0; j < half.size(); ++j) half[j] = samples[2 * j];
    return {domain, half_width, std::move(half)};
  }

  double norm_p(double p) const {
    double acc = 0.0;
    const double w = (domain == Domain::line) ? dx() : 1.0 / size();
    for (int j = 0; j < size(); ++j) acc += w * std::pow(std::abs(samples[j]), p);
    return std::pow(acc, 1.0 / p);
  }
  double norm_2() const { return norm_p(2.0); }
};

/// Hausdorff-Young constant kappa(p, q) = (2pi/q)^{n/2q} (2pi/p)^{-n/2p},
/// q conjugate to p, for p in (1, 2].
inline double hy_constant(double p, int n) {
  if (!(p > 1.0 && p <= 2.0)) throw DomainError("hy_constant: p must lie in (1, 2]");
  if (n < 1) throw DomainError("hy_constant: dimension must be >= 1");
  const double q = p / (p - 1.0);
  return std::pow(2.0 * M_PI / q, n / (2.0 * q)) * std::pow(2.0 * M_PI / p, -n / (2.0 * p));
}

/// Continuum Fourier transform (2pi)^{-1/2} int e^{-ikx} psi(x) dx on the
/// conjugate grid k_m = (m - M/2) pi / L, via the DFT. The discrete chain is
/// exactly Parseval: dk sum |psi~|^2 = dx sum |psi|^2.
inline Eigen::VectorXcd continuum_fourier(const GridFunction& psi) {
  if (psi.domain != GridFunction::Domain::line) {
    throw DomainError("continuum_fourier: expects a line-domain function");
  }
  const int m = psi.size();
  std::vector<std::complex<double>> in(psi.samples.data(), psi.samples.data() + m);
  auto f = dft(in);
  Eigen::VectorXcd out(m);
  const double scale = psi.dx() / std::sqrt(2.0 * M_PI);
  for (int idx = 0; idx < m; ++idx) {
    const int m_signed = idx - m / 2;                    // frequency index
    const int r = ((m_signed % m) + m) % m;              // DFT bin
    const double sign = (m_signed % 2 == 0) ? 1.0 : -1.0;  // e^{i k L} = (-1)^m
    out[idx] = scale * sign * f[r];
  }
  return out;
}

/// Fourier coefficients c_m of a circle function, Phi = sum c_m e^{im phi},
/// for m in [-M/2, M/2).
inline Eigen::VectorXcd circle_coefficients(const GridFunction& phi) {
  if (phi.domain != GridFunction::Domain::circle) {
    throw DomainError("circle_coefficients: expects a circle-domain function");
  }
  const int m = phi.size();
  std::vector<std::complex<double>> in(phi.samples.data(), phi.samples.data() + m);
  auto f = dft(in);
  Eigen::VectorXcd out(m);
  for (int idx = 0; idx < m; ++idx) {
    const int m_signed = idx - m / 2;
    const int r = ((m_signed % m) + m) % m;
    out[idx] = f[r] / static_cast<double>(m);
  }
  return out;
}

namespace detail {

inline double lq_norm_weighted(const Eigen::VectorXcd& v, double w, double q) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) acc += w * std::pow(std::abs(v[i]), q);
  return std::pow(acc, 1.0 / q);
}

inline double entropy_weighted(const Eigen::VectorXcd& v, double w) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double a2 = std::norm(v[i]);
    if (a2 > 0.0) acc -= w * a2 * std::log(a2);
  }
  return acc;
}

inline double hy_slack_line(const GridFunction& psi, double p) {
  const double q = p / (p - 1.0);
  Eigen::VectorXcd tilde = continuum_fourier(psi);
  const double dk = M_PI / psi.half_width;
  return hy_constant(p, 1) * psi.norm_p(p) - lq_norm_weighted(tilde, dk, q);
}

}  // namespace detail

struct HyCheck {
  double slack = 0.0;
  double quad_error_estimate = 0.0;
  double norm_p = 0.0;
  double norm_q = 0.0;
};

/// Hausdorff-Young slack kappa ||psi||_p - ||psi~||_q on the line. Requires
/// decay at the grid boundary; the quadrature error estimate comes from
/// re-evaluating on the coarsened grid.
inline HyCheck hy_check_rn(const GridFunction& psi, double p) {
  if (psi.domain != GridFunction::Domain::line) {
    throw DomainError("hy_check_rn: expects a line-domain function");
  }
  const double peak = psi.samples.cwiseAbs().maxCoeff();
  const double edge = std::max(std::abs(psi.samples[0]), std::abs(psi.samples[psi.size() - 1]));
  if (peak <= 0.0 || edge >= 1e-8 * peak) {
    throw DomainError("hy_check_rn: function does not decay at the grid boundary");
  }
  HyCheck out;
  out.slack = detail::hy_slack_line(psi, p);
  out.quad_error_estimate = std::abs(out.slack - detail::hy_slack_line(psi.coarsened(), p));
  const double q = p / (p - 1.0);
  out.norm_p = psi.norm_p(p);
  out.norm_q = detail::lq_norm_weighted(continuum_fourier(psi), M_PI / psi.half_width, q);
  return out;
}

struct EntropySum {
  double s_x = 0.0;
  double s_p = 0.0;
  double sum = 0.0;
  double bound = 0.0;        // n (1 + ln pi), n = 1
  double q_derivative = 0.0; // dF/dq at q = 2+, F the HY slack
};

/// Position/momentum Shannon entropies of a normalized line function and the
/// forward difference of the HY slack in q at q = 2 (both are the entropic
/// inequality: sum >= 1 + ln pi, derivative >= 0).
inline EntropySum entropy_sum_rn(const GridFunction& psi, double dq = 1e-3) {
  if (psi.domain != GridFunction::Domain::line) {
    throw DomainError("entropy_sum_rn: expects a line-domain function");
  }
  if (std::abs(psi.norm_2() - 1.0) > 1e-8) {
    throw DomainError("entropy_sum_rn: function is not L2-normalized");
  }
  EntropySum out;
  out.s_x = detail::entropy_weighted(psi.samples, psi.dx());
  Eigen::VectorXcd tilde = continuum_fourier(psi);
  out.s_p = detail::entropy_weighted(tilde, M_PI / psi.half_width);
  out.sum = out.s_x + out.s_p;
  out.bound = 1.0 + std::log(M_PI);
  const double q = 2.0 + dq;
  const double p = q / (q - 1.0);
  out.q_derivative = detail::hy_slack_line(psi, p) / dq;  // F(2) = 0 by Parseval
  return out;
}

struct U1Check {
  double hy_slack = 0.0;
  double entropy_slack = 0.0;
  double s_function = 0.0;
  double s_coefficients = 0.0;
};

/// U(1) Hausdorff-Young and entropy inequality for a normalized circle
/// function: ||Phi||_p >= ||c||_q (constant 1) and the sum of the two
/// Shannon entropies is nonnegative. Aliasing in the coefficient tail is a
/// resolution error.
inline U1Check u1_check(const GridFunction& phi, double p) {
  if (phi.domain != GridFunction::Domain::circle) {
    throw DomainError("u1_check: expects a circle-domain function");
  }
  if (!(p > 1.0 && p <= 2.0)) throw DomainError("u1_check: p must lie in (1, 2]");
  if (std::abs(phi.norm_2() - 1.0) > 1e-8) {
    throw DomainError("u1_check: function is not L2-normalized");
  }
  Eigen::VectorXcd c = circle_coefficients(phi);
  const int m = phi.size();
  for (int idx = 0; idx < m; ++idx) {
    const int freq = idx - m / 2;
    if (std::abs(freq) > m / 4 && std::abs(c[idx]) > 1e-10) {
      throw ResolutionError("u1_check: coefficient tail above threshold at m = " +
                            std::to_string(freq) + "; refine the grid");
    }
  }
  const double q = p / (p - 1.0);
  U1Check out;
  out.hy_slack = phi.norm_p(p) - detail::lq_norm_weighted(c, 1.0, q);
  out.s_function = detail::entropy_weighted(phi.samples, 1.0 / m);
  out.s_coefficients = detail::entropy_weighted(c, 1.0);
  out.entropy_slack = out.s_function + out.s_coefficients;
  return out;
}

// --- ready-made test functions ---------------------------------------------

/// Normalized Gaussian exp(-x^2 / (2 s^2)) on [-L, L).
inline GridFunction gaussian_line(double l, int m, double width = 1.0) {
  Eigen::VectorXcd v(m);
  const double dx = 2.0 * l / m;
  for (int j = 0; j < m; ++j) {
    const double x = -l + j * dx;
    v[j] = std::exp(-x * x / (2.0 * width * width));
  }
  GridFunction g = GridFunction::line(l, std::move(v));
  g.samples /= g.norm_2();
  return g;
}

/// Normalized two-Gaussian superposition (strictly non-Gaussian).
inline GridFunction double_bump_line(double l, int m, double separation = 4.0,
                                     double width = 1.0) {
  Eigen::VectorXcd v(m);
  const double dx = 2.0 * l / m;
  for (int j = 0; j < m; ++j) {
    const double x = -l + j * dx;
    const double a = (x - 0.5 * separation) / width;
    const double b = (x + 0.5 * separation) / width;
    v[j] = std::exp(-0.5 * a * a) + std::exp(-0.5 * b * b);
  }
  GridFunction g = GridFunction::line(l, std::move(v));
  g.samples /= g.norm_2();
  return g;
}

/// Single circle mode e^{i m0 phi} (already unit norm).
inline GridFunction single_mode_circle(int m0, int m) {
  Eigen::VectorXcd v(m);
  for (int j = 0; j < m; ++j) {
    const double phi = 2.0 * M_PI * j / m;
    v[j] = std::polar(1.0, m0 * phi);
  }
  return GridFunction::circle(std::move(v));
}

}  // namespace tomoforge
