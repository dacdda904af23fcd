#pragma once

#include "seed/types.hpp"

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace seed {

/// Seeded random source with portable draw algorithms. The std:: distribution
/// objects are implementation-defined, so the few draws we need are spelled
/// out explicitly; results are reproducible for a given seed on any platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [0, n).
  Index uniform_index(Index n) {
    // Rejection sampling to avoid modulo bias.
    const std::uint64_t un = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % un;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return static_cast<Index>(x % un);
  }

  /// Standard normal via Box-Muller; caches the second value of each pair.
  double normal() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    double u1 = uniform01();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    const double u2 = uniform01();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * M_PI * u2;
    cached_ = radius * std::sin(angle);
    has_cached_ = true;
    return radius * std::cos(angle);
  }

  Vector normal_vector(Index n) {
    Vector v(n);
    for (Index i = 0; i < n; ++i) v(i) = normal();
    return v;
  }

  Matrix normal_matrix(Index rows, Index cols) {
    Matrix m(rows, cols);
    for (Index j = 0; j < cols; ++j)
      for (Index i = 0; i < rows; ++i) m(i, j) = normal();
    return m;
  }

  /// First `count` elements of a random permutation of [0, n).
  std::vector<Index> sample_without_replacement(Index n, Index count) {
    std::vector<Index> pool(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) pool[static_cast<std::size_t>(i)] = i;
    for (Index i = 0; i < count; ++i) {
      const Index j = i + uniform_index(n - i);
      std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
    }
    pool.resize(static_cast<std::size_t>(count));
    return pool;
  }

  /// Index drawn with probability proportional to weights[i]; weights must be
  /// non-negative with a positive sum.
  Index pick_weighted(const Vector& weights) {
    const double total = weights.sum();
    if (!(total > 0.0)) throw NumericalError("pick_weighted: total weight is not positive");
    double u = uniform01() * total;
    for (Index i = 0; i < weights.size(); ++i) {
      u -= weights(i);
      if (u < 0.0) return i;
    }
    return weights.size() - 1;  // rounding fell off the end
  }

 private:
  std::mt19937_64 engine_;
  bool has_cached_ = false;
  double cached_ = 0.0;
};

}  // namespace seed
