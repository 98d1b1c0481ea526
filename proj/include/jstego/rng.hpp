#pragma once

#include <algorithm>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace jstego {

/// SplitMix64 output function applied to `x + 0x9E3779B97F4A7C15`.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Deterministic random source.
///
/// The engine is std::mt19937_64 (its output sequence is fixed by the C++
/// standard) seeded with splitmix64(seed). Child streams are derived with
/// split(stream) = Rng(splitmix64(seed) ^ splitmix64(~stream)), so each
/// consumer of randomness owns an independent, reproducible sequence.
/// Distributions are implemented here instead of using <random>'s
/// distribution classes, whose outputs differ between standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0);

  std::uint64_t seed() const noexcept { return seed_; }
  Rng split(std::uint64_t stream) const;

  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on [lo, hi).
  double uniform(double lo, double hi);
  /// Uniform integer in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound);
  /// Uniform integer in [lo, hi] (inclusive).
  std::int64_t between(std::int64_t lo, std::int64_t hi);
  /// Standard normal via Box-Muller (one value per call, no caching).
  double normal();
  Eigen::VectorXd normal_vector(Eigen::Index n);
  /// Uniform point on the unit sphere S^{n-1}.
  Eigen::VectorXd unit_vector(Eigen::Index n);
  /// Haar-distributed orthogonal matrix (Gram-Schmidt on a Gaussian matrix).
  Eigen::MatrixXd orthogonal_matrix(Eigen::Index n);

  template <typename It>
  void shuffle(It first, It last) {
    auto count = static_cast<std::uint64_t>(last - first);
    for (std::uint64_t i = count; i > 1; --i) {
      std::uint64_t j = below(i);
      std::iter_swap(first + (i - 1), first + j);
    }
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace jstego
