#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "oefd/types.hpp"

namespace oefd {

// Counter-based generator in the SplitMix64 family. The draw at position i is
// a pure function of (seed, stream, i), so sequences are identical across
// platforms and independent streams can be split off for parallel generation.
// Gaussians use Box-Muller directly rather than std::normal_distribution,
// whose algorithm is implementation-defined.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed, std::uint64_t stream = 0)
      : seed_(seed), stream_(stream), counter_(0) {}

  // Same seed, independent sequence; counter starts at zero.
  RandomSource split(std::uint64_t stream) const { return RandomSource(seed_, stream); }

  std::uint64_t next_u64() {
    std::uint64_t z = base() + (++counter_) * 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1), 53-bit resolution.
  Real next_double() { return static_cast<Real>(next_u64() >> 11) * 0x1.0p-53; }

  Real next_uniform(Real lo, Real hi) { return lo + (hi - lo) * next_double(); }

  // Standard normal; consumes exactly two draws, keeps no cached half.
  Real next_gaussian() {
    Real u1 = next_double();
    Real u2 = next_double();
    while (u1 <= 0.0) u1 = next_double();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi_v<Real> * u2);
  }

  Vector gaussian_vector(Index n) {
    Vector v(n);
    for (Index i = 0; i < n; ++i) v[i] = next_gaussian();
    return v;
  }

  Vector unit_vector(Index n) {
    Vector v = gaussian_vector(n);
    Real norm = v.norm();
    while (norm < 1e-12) {
      v = gaussian_vector(n);
      norm = v.norm();
    }
    return v / norm;
  }

  Matrix uniform_matrix(Index rows, Index cols, Real lo, Real hi) {
    Matrix m(rows, cols);
    for (Index r = 0; r < rows; ++r)
      for (Index c = 0; c < cols; ++c) m(r, c) = next_uniform(lo, hi);
    return m;
  }

  Matrix gaussian_matrix(Index rows, Index cols) {
    Matrix m(rows, cols);
    for (Index r = 0; r < rows; ++r)
      for (Index c = 0; c < cols; ++c) m(r, c) = next_gaussian();
    return m;
  }

  // Fisher-Yates over [0, n); used for epoch shuffles.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(next_u64() % i);
      std::swap(v[i - 1], v[j]);
    }
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }
  std::uint64_t counter() const { return counter_; }

  static RandomSource restore(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    RandomSource r(seed, stream);
    r.counter_ = counter;
    return r;
  }

  bool operator==(const RandomSource&) const = default;

 private:
  std::uint64_t base() const {
    // Scramble the stream id so streams with nearby indices decorrelate.
    std::uint64_t s = (stream_ + 1) * 0xD1342543DE82EF95ull;
    s = (s ^ (s >> 32)) * 0xDABA0B6EB09322E3ull;
    return seed_ ^ (s ^ (s >> 32));
  }

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_;
};

}  // namespace oefd
