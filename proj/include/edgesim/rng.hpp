#ifndef EDGESIM_RNG_HPP
#define EDGESIM_RNG_HPP

#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

namespace edgesim {

// splitmix64 finalizer; avalanches a 64-bit state into a seed.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Deterministic child seed for stream `index` under a master seed.
/// Every Monte-Carlo trial, sweep point, and training run derives its own
/// stream through this, so results do not depend on thread count or
/// evaluation order.
inline std::uint64_t mix_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t s = master + 0x9e3779b97f4a7c15ULL * (index + 1);
  return splitmix64(s);
}

/// mt19937_64 wrapped with fixed variate transforms. The standard pins the
/// engine's output sequence; the distributions in <random> are
/// implementation-defined, so the transforms live here instead.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  /// Exponential with the given mean, by inversion.
  double exponential(double mean) { return -mean * std::log1p(-uniform01()); }

  /// Standard normal via Box-Muller (first variate only; cheap enough here).
  double normal01() {
    double u1 = uniform01();
    double u2 = uniform01();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  /// Index uniform on {0, ..., n-1}; n must be far below 2^53.
  std::size_t index_below(std::size_t n) {
    auto i = static_cast<std::size_t>(uniform01() * static_cast<double>(n));
    return i < n ? i : n - 1;
  }

  std::uint64_t bits() { return eng_(); }

 private:
  std::mt19937_64 eng_;
};

/// Fisher-Yates permutation of {0, ..., n-1}.
inline std::vector<long> shuffled_indices(long n, Rng& rng) {
  std::vector<long> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0L);
  for (long i = n - 1; i > 0; --i) {
    std::size_t j = rng.index_below(static_cast<std::size_t>(i) + 1);
    std::swap(idx[static_cast<std::size_t>(i)], idx[j]);
  }
  return idx;
}

}  // namespace edgesim

#endif
