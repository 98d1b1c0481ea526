#include "jstego/rng.hpp"

#include <cmath>
#include <numbers>

#include "jstego/error.hpp"

namespace jstego {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  std::uint64_t z = x + 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Rng::Rng(std::uint64_t seed) : seed_(seed), engine_(splitmix64(seed)) {}

Rng Rng::split(std::uint64_t stream) const {
  return Rng(splitmix64(seed_) ^ splitmix64(~stream));
}

std::uint64_t Rng::next_u64() { return engine_(); }

double Rng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

std::uint64_t Rng::below(std::uint64_t bound) {
  if (bound == 0) throw Error(ErrorCode::InvalidArgument, "Rng::below(0)");
  // Rejection keeps the result unbiased: discard the partial top bucket.
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    std::uint64_t r = next_u64();
    if (r >= threshold) return r % bound;
  }
}

std::int64_t Rng::between(std::int64_t lo, std::int64_t hi) {
  if (hi < lo) throw Error(ErrorCode::InvalidArgument, "Rng::between(lo > hi)");
  auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  return lo + static_cast<std::int64_t>(below(span));
}

double Rng::normal() {
  double u1 = 1.0 - uniform();  // (0, 1]
  double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Eigen::VectorXd Rng::normal_vector(Eigen::Index n) {
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = normal();
  return v;
}

Eigen::VectorXd Rng::unit_vector(Eigen::Index n) {
  for (;;) {
    Eigen::VectorXd v = normal_vector(n);
    double norm = v.norm();
    if (norm > 1e-12) return v / norm;
  }
}

Eigen::MatrixXd Rng::orthogonal_matrix(Eigen::Index n) {
  Eigen::MatrixXd q(n, n);
  for (Eigen::Index j = 0; j < n;) {
    Eigen::VectorXd v = normal_vector(n);
    for (Eigen::Index k = 0; k < j; ++k) v -= q.col(k).dot(v) * q.col(k);
    double norm = v.norm();
    if (norm < 1e-8) continue;
    q.col(j) = v / norm;
    ++j;
  }
  return q;
}

}  // namespace jstego
