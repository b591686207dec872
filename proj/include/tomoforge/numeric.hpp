#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

#include "tomoforge/errors.hpp"

namespace tomoforge {

/// Compensated (Kahan) accumulator. Reductions over sample chunks use this so
/// the merged result does not depend on how work was split.
class KahanSum {
public:
  void add(double x) {
    double y = x - comp_;
    double t = sum_ + y;
    comp_ = (t - sum_) - y;
    sum_ = t;
  }
  double value() const { return sum_; }

private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Gauss-Legendre nodes and weights on [-1, 1], by Newton iteration on the
/// Legendre recurrence. Exact for polynomials of degree <= 2n-1.
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;

  explicit GaussLegendre(int n) {
    if (n < 1) throw InvalidInputError("Gauss-Legendre order must be >= 1");
    nodes.resize(n);
    weights.resize(n);
    for (int i = 0; i < n; ++i) {
      double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
          double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-15) break;
      }
      nodes[i] = x;
      weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
  }
};

/// Cumulative composite Simpson integral of uniformly spaced samples f_0..f_M.
/// Returns I with I[k] ~= integral from t_0 to t_k. Odd panels use the
/// quadratic through the three rightmost points, keeping O(h^4) throughout.
inline std::vector<double> cumulative_simpson(const std::vector<double>& f, double h) {
  const std::size_t m = f.size();
  std::vector<double> out(m, 0.0);
  if (m < 2) return out;
  if (m == 2) {
    out[1] = 0.5 * h * (f[0] + f[1]);
    return out;
  }
  for (std::size_t k = 1; k < m; ++k) {
    if (k % 2 == 0) {
      out[k] = out[k - 2] + h / 3.0 * (f[k - 2] + 4.0 * f[k - 1] + f[k]);
    } else if (k == 1) {
      // left edge: quadratic through f0,f1,f2 integrated over [t0,t1]
      out[1] = h / 12.0 * (5.0 * f[0] + 8.0 * f[1] - f[2]);
    } else {
      out[k] = out[k - 1] + h / 12.0 * (-f[k - 2] + 8.0 * f[k - 1] + 5.0 * f[k]);
    }
  }
  return out;
}

/// Second derivative of uniformly spaced samples by the 5-point stencil,
/// O(h^4) on interior points; the two points nearest each edge reuse the
/// nearest interior value (callers only inspect the interior).
inline std::vector<double> second_derivative(const std::vector<double>& f, double h) {
  const std::size_t m = f.size();
  std::vector<double> out(m, 0.0);
  if (m < 5) return out;
  const double h2 = h * h;
  for (std::size_t k = 2; k + 2 < m; ++k) {
    out[k] = (-f[k - 2] + 16.0 * f[k - 1] - 30.0 * f[k] + 16.0 * f[k + 1] - f[k + 2]) / (12.0 * h2);
  }
  out[0] = out[1] = out[2];
  out[m - 1] = out[m - 2] = out[m - 3];
  return out;
}

namespace detail {

inline void fft_radix2(std::vector<std::complex<double>>& a, bool inverse) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    double ang = 2.0 * M_PI / static_cast<double>(len) * (inverse ? 1.0 : -1.0);
    std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        std::complex<double> u = a[i + k];
        std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
}

}  // namespace detail

/// Forward DFT, F_r = sum_j a_j exp(-2 pi i r j / M). Radix-2 when M is a
/// power of two, direct O(M^2) sum otherwise (grids here stay small).
inline std::vector<std::complex<double>> dft(const std::vector<std::complex<double>>& a) {
  const std::size_t m = a.size();
  if (m == 0) return {};
  if ((m & (m - 1)) == 0) {
    auto out = a;
    detail::fft_radix2(out, false);
    return out;
  }
  std::vector<std::complex<double>> out(m);
  for (std::size_t r = 0; r < m; ++r) {
    std::complex<double> acc(0.0, 0.0);
    for (std::size_t j = 0; j < m; ++j) {
      double ang = -2.0 * M_PI * static_cast<double>(r) * static_cast<double>(j) / static_cast<double>(m);
      acc += a[j] * std::complex<double>(std::cos(ang), std::sin(ang));
    }
    out[r] = acc;
  }
  return out;
}

/// Worker cap: min(requested, TOMOFORGE_THREADS if set, hardware). Unset env
/// means sequential execution.
inline int worker_count(int requested) {
  int cap = 1;
  if (const char* env = std::getenv("TOMOFORGE_THREADS")) {
    cap = std::max(1, std::atoi(env));
  }
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw < 1) hw = 1;
  return std::max(1, std::min({requested, cap, hw}));
}

/// Runs fn(chunk_index) for chunk_index in [0, chunks), possibly on several
/// threads. Chunk indices are dealt round-robin, so any reduction the caller
/// performs afterwards in index order is schedule-independent.
inline void parallel_chunks(int chunks, int threads, const std::function<void(int)>& fn) {
  threads = std::min(std::max(threads, 1), chunks);
  if (threads <= 1) {
    for (int c = 0; c < chunks; ++c) fn(c);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&, t]() {
      for (int c = t; c < chunks; c += threads) fn(c);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace tomoforge
