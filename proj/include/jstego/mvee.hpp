#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "jstego/linalg.hpp"
#include "jstego/rng.hpp"

namespace jstego {

// Finite point set in R^n, points stored as the columns of an n x m matrix.
class PointSet {
 public:
  PointSet() = default;
  /// Throws DimensionMismatch if the rows have differing lengths or are empty.
  static PointSet from_rows(const std::vector<std::vector<double>>& rows);
  static PointSet from_points(std::span<const Vector> points);
  explicit PointSet(Matrix columns);

  Eigen::Index dim() const noexcept { return points_.rows(); }
  Eigen::Index size() const noexcept { return points_.cols(); }
  Eigen::Ref<const Vector> point(Eigen::Index i) const { return points_.col(i); }
  const Matrix& matrix() const noexcept { return points_; }

  /// True unless m >= n+1 and the centered point matrix has full rank n
  /// (singular values below 1e-10 x largest count as zero).
  bool degenerate() const;

 private:
  Matrix points_;
};

// Simplex weights over the points of a PointSet.
struct WeightVector {
  Vector weights;

  Eigen::Index size() const noexcept { return weights.size(); }
  double operator[](Eigen::Index i) const { return weights[i]; }
  /// Sum within 1e-12 of one and no negative entries.
  bool valid() const;
};

// E = { x : (x - c)^T Q (x - c) <= 1 }.
struct Ellipsoid {
  Vector center;
  Matrix shape;

  Eigen::Index dim() const noexcept { return center.size(); }
  /// Symmetric within 1e-12 relative and positive definite.
  bool valid() const;
  /// Semi-axis lengths 1/sqrt(lambda_i(Q)), descending.
  Vector semi_axes() const;
  /// Volume up to the unit-ball constant: prod of semi-axes.
  double volume_factor() const;
};

struct SolveReport {
  std::size_t iterations = 0;
  /// max(eps_plus, eps_minus) at termination.
  double final_eps = 0.0;
  std::vector<Eigen::Index> support;
  /// log det Lambda(p^k), one entry for the start point and each step.
  /// Lambda is formed from the centered, max-abs-scaled points, which shifts
  /// every entry by the same constant relative to the raw coordinates.
  std::vector<double> logdet_trace;
  std::size_t plus_steps = 0;
  std::size_t away_steps = 0;
  std::size_t drop_steps = 0;
  /// Extreme lifted leverages at termination: max over all points and min
  /// over the support of q_i^T Lambda^{-1} q_i.
  double kappa_max = 0.0;
  double kappa_min_support = 0.0;
};

struct MveeResult {
  WeightVector weights;
  Ellipsoid ellipsoid;
  SolveReport report;
};

struct MveeOptions {
  double eps = 1e-7;
  /// 0 selects the default cap 100 * d * (log d + 1/eps).
  std::size_t max_iterations = 0;
  /// Full refactorization of Lambda^{-1} every this many steps.
  std::size_t refactor_every = 50;
};

/// Supplies the k-th probe direction (k = 0, 1, ...) for the core-set loop.
/// The returned vector need not be orthogonal to the current span.
using DirectionSource = std::function<Vector(std::size_t k)>;

/// Initial core set X0 (sorted point indices). All indices are returned
/// when m <= 2n; otherwise n+1 <= |X0| <= 2n.
std::vector<Eigen::Index> coreset_init(const PointSet& ps, Rng& rng);
std::vector<Eigen::Index> coreset_init(const PointSet& ps,
                                       const DirectionSource& directions);

/// Khachiyan/Todd-Yildirim coordinate ascent with away steps on the lifted
/// D-optimal design problem; stops once every point has leverage at most
/// (1 + eps) d (tightened so the de-lifted ellipsoid also contains every
/// point within 1 + eps) and every support point at least (1 - eps) d.
MveeResult solve_mvee(const PointSet& ps, const MveeOptions& options, Rng& rng);
MveeResult solve_mvee(const PointSet& ps, double eps, Rng& rng);

/// Default iteration cap 100 * d * (log d + 1/eps), d = n + 1.
std::size_t default_iteration_cap(Eigen::Index n, double eps);

/// c = sum p_i a_i, Q = (1/n) M^{-1}, M = sum p_i a_i a_i^T - c c^T.
Ellipsoid ellipsoid_from_weights(const PointSet& ps, const WeightVector& p);

struct PrincipalAxis {
  /// Endpoint c + half_length * u of the longest axis. The sign of u is
  /// fixed so its largest-magnitude coordinate is positive.
  Vector endpoint;
  Vector direction;
  double half_length = 0.0;
  /// lambda_2 / lambda_min of Q (infinity in one dimension).
  double gap_ratio = 0.0;
};

/// Longest semi-axis of `e`. Throws NoUniqueAxis unless
/// lambda_2 / lambda_min >= 1 + gap_tol.
PrincipalAxis principal_axis(const Ellipsoid& e, double gap_tol = 0.1);

bool contains(const Ellipsoid& e, const Vector& x, double slack = 0.0);

}  // namespace jstego
