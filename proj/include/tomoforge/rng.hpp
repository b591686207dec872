#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace tomoforge {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace detail

/// Reproducible random stream keyed by (seed, stream id). fork(i) derives an
/// independent substream, so workers can draw concurrently and results can be
/// merged in a fixed order regardless of scheduling.
class SeedStream {
public:
  explicit SeedStream(std::uint64_t seed, std::uint64_t stream = 0)
      : seed_(seed), stream_(stream) {
    std::uint64_t s = seed ^ (0x8000000000000000ull | stream);
    std::seed_seq seq{detail::splitmix64(s), detail::splitmix64(s),
                      detail::splitmix64(s), detail::splitmix64(s)};
    engine_.seed(seq);
  }

  /// Independent substream i of this stream.
  SeedStream fork(std::uint64_t i) const {
    std::uint64_t s = stream_;
    std::uint64_t mixed = detail::splitmix64(s) ^ (i * 0xd1342543de82ef95ull + 1);
    return SeedStream(seed_, mixed);
  }

  std::uint64_t seed() const { return seed_; }
  std::mt19937_64& engine() { return engine_; }

  /// Uniform double in [0, 1).
  double uniform() { return uniform_(engine_); }
  /// Standard normal.
  double normal() { return normal_(engine_); }
  /// Complex standard normal, re and im independent N(0,1).
  std::complex<double> complex_normal() {
    double re = normal();
    double im = normal();
    return {re, im};
  }
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(engine_);
  }

private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace tomoforge
