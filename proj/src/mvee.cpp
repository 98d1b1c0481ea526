#include "jstego/mvee.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "jstego/error.hpp"

namespace jstego {

// ---------------------------------------------------------------------------
// Value types

PointSet::PointSet(Matrix columns) : points_(std::move(columns)) {}

PointSet PointSet::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty() || rows.front().empty())
    throw Error(ErrorCode::DimensionMismatch, "point set is empty");
  const auto n = static_cast<Eigen::Index>(rows.front().size());
  Matrix pts(n, static_cast<Eigen::Index>(rows.size()));
  for (std::size_t j = 0; j < rows.size(); ++j) {
    if (static_cast<Eigen::Index>(rows[j].size()) != n)
      throw Error(ErrorCode::DimensionMismatch,
                  "point " + std::to_string(j) + " has " + std::to_string(rows[j].size()) +
                      " coordinates, expected " + std::to_string(n));
    for (Eigen::Index i = 0; i < n; ++i) pts(i, static_cast<Eigen::Index>(j)) = rows[j][i];
  }
  return PointSet(std::move(pts));
}

PointSet PointSet::from_points(std::span<const Vector> points) {
  if (points.empty() || points.front().size() == 0)
    throw Error(ErrorCode::DimensionMismatch, "point set is empty");
  const Eigen::Index n = points.front().size();
  Matrix pts(n, static_cast<Eigen::Index>(points.size()));
  for (std::size_t j = 0; j < points.size(); ++j) {
    if (points[j].size() != n)
      throw Error(ErrorCode::DimensionMismatch, "point " + std::to_string(j) + " has wrong dimension");
    pts.col(static_cast<Eigen::Index>(j)) = points[j];
  }
  return PointSet(std::move(pts));
}

bool PointSet::degenerate() const {
  const Eigen::Index n = dim();
  const Eigen::Index m = size();
  if (n == 0 || m < n + 1) return true;
  if (!points_.allFinite()) return true;
  const Vector mean = points_.rowwise().mean();
  const Matrix centered = points_.colwise() - mean;
  return numerical_rank(centered, 1e-10) < n;
}

bool WeightVector::valid() const {
  if (weights.size() == 0) return false;
  if ((weights.array() < 0.0).any() || !weights.allFinite()) return false;
  return std::abs(weights.sum() - 1.0) <= 1e-12;
}

bool Ellipsoid::valid() const {
  const Eigen::Index n = center.size();
  if (n == 0 || shape.rows() != n || shape.cols() != n) return false;
  if (!center.allFinite() || !shape.allFinite()) return false;
  const double scale = shape.cwiseAbs().maxCoeff();
  if ((shape - shape.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) return false;
  Eigen::LLT<Matrix> llt(0.5 * (shape + shape.transpose()));
  return llt.info() == Eigen::Success;
}

Vector Ellipsoid::semi_axes() const {
  const SymmetricEigen eig = jacobi_eigen(shape);
  Vector axes(eig.values.size());
  // Ascending eigenvalues give descending semi-axes.
  for (Eigen::Index i = 0; i < axes.size(); ++i) axes[i] = 1.0 / std::sqrt(eig.values[i]);
  return axes;
}

double Ellipsoid::volume_factor() const {
  return 1.0 / std::sqrt(shape.determinant());
}

// ---------------------------------------------------------------------------
// Core set

std::vector<Eigen::Index> coreset_init(const PointSet& ps, Rng& rng) {
  return coreset_init(ps, [&rng, n = ps.dim()](std::size_t) { return rng.normal_vector(n); });
}

std::vector<Eigen::Index> coreset_init(const PointSet& ps, const DirectionSource& directions) {
  if (ps.degenerate())
    throw Error(ErrorCode::DegenerateInput, "affine hull of the points is not full-dimensional");
  const Eigen::Index n = ps.dim();
  const Eigen::Index m = ps.size();
  std::vector<Eigen::Index> chosen;
  if (m <= 2 * n) {
    chosen.resize(static_cast<std::size_t>(m));
    std::iota(chosen.begin(), chosen.end(), Eigen::Index{0});
    return chosen;
  }

  const Matrix& a = ps.matrix();
  const double scale = std::max(a.cwiseAbs().maxCoeff(), 1.0);
  std::vector<Vector> basis;  // orthonormal basis of psi
  std::size_t k = 0;
  const std::size_t max_draws = 64 * static_cast<std::size_t>(n) + 64;

  while (static_cast<Eigen::Index>(basis.size()) < n) {
    if (k >= max_draws)
      throw Error(ErrorCode::DegenerateInput, "core set: no usable direction orthogonal to the span");
    Vector b = directions(k++);
    if (b.size() != n) throw Error(ErrorCode::DimensionMismatch, "core set direction has wrong size");
    const double raw = b.norm();
    for (const Vector& e : basis) b -= e.dot(b) * e;  // modified Gram-Schmidt
    if (!(b.norm() > 1e-10 * raw)) continue;
    b.normalize();

    const Eigen::RowVectorXd proj = b.transpose() * a;
    Eigen::Index hi = 0;
    Eigen::Index lo = 0;
    proj.maxCoeff(&hi);
    proj.minCoeff(&lo);
    if (!(proj[hi] - proj[lo] > 1e-12 * scale))
      throw Error(ErrorCode::DegenerateInput, "all extreme points coincide along a probe direction");
    chosen.push_back(hi);
    chosen.push_back(lo);

    Vector diff = a.col(lo) - a.col(hi);
    for (const Vector& e : basis) diff -= e.dot(diff) * e;
    const double len = diff.norm();
    if (!(len > 1e-12 * scale))
      throw Error(ErrorCode::DegenerateInput, "core set span could not be extended");
    basis.push_back(diff / len);
  }

  std::sort(chosen.begin(), chosen.end());
  chosen.erase(std::unique(chosen.begin(), chosen.end()), chosen.end());
  return chosen;
}

// ---------------------------------------------------------------------------
// Solver

std::size_t default_iteration_cap(Eigen::Index n, double eps) {
  const double d = static_cast<double>(n + 1);
  const double cap = 100.0 * d * (std::log(d) + 1.0 / eps);
  if (!(cap < 1e18)) return static_cast<std::size_t>(1e18);
  return static_cast<std::size_t>(std::ceil(cap));
}

namespace {

// Lifted design state: weights p, Lambda(p)^{-1} and log det Lambda(p).
struct LiftedState {
  const Matrix& lifted;  // d x m, columns q_i = (a_i, 1)
  Vector p;
  Matrix inverse;
  double logdet = 0.0;

  // Rebuilds Lambda(p)^{-1} from scratch. Returns false if Lambda is not PD.
  bool refactor() {
    p = p.cwiseMax(0.0);
    p /= p.sum();
    const Matrix lambda = lifted * p.asDiagonal() * lifted.transpose();
    Eigen::LLT<Matrix> llt(lambda);
    if (llt.info() != Eigen::Success) return false;
    const Matrix& l = llt.matrixLLT();
    logdet = 0.0;
    for (Eigen::Index i = 0; i < l.rows(); ++i) logdet += 2.0 * std::log(l(i, i));
    inverse = llt.solve(Matrix::Identity(lambda.rows(), lambda.cols()));
    inverse = 0.5 * (inverse + inverse.transpose()).eval();
    return true;
  }

  Vector leverages() const {
    return (lifted.cwiseProduct(inverse * lifted)).colwise().sum().transpose();
  }
};

}  // namespace

MveeResult solve_mvee(const PointSet& ps, double eps, Rng& rng) {
  MveeOptions options;
  options.eps = eps;
  return solve_mvee(ps, options, rng);
}

MveeResult solve_mvee(const PointSet& ps, const MveeOptions& options, Rng& rng) {
  const double eps = options.eps;
  if (!(eps > 0.0 && eps < 1.0))
    throw Error(ErrorCode::InvalidArgument, "tolerance must lie in (0, 1)");
  const std::vector<Eigen::Index> core = coreset_init(ps, rng);

  const Eigen::Index n = ps.dim();
  const Eigen::Index m = ps.size();
  const double d = static_cast<double>(n + 1);
  const std::size_t cap =
      options.max_iterations > 0 ? options.max_iterations : default_iteration_cap(n, eps);
  const std::size_t refactor_every = std::max<std::size_t>(options.refactor_every, 1);

  // Leverages and weights are invariant under translation and scaling of
  // the points, so the solve runs on centered, unit-scale coordinates.
  const Vector mean = ps.matrix().rowwise().mean();
  Matrix lifted(n + 1, m);
  lifted.topRows(n) = ps.matrix().colwise() - mean;
  const double spread = lifted.topRows(n).cwiseAbs().maxCoeff();
  if (spread > 0.0) lifted.topRows(n) /= spread;
  lifted.row(n).setOnes();

  LiftedState state{lifted, Vector::Zero(m), Matrix(), 0.0};
  for (Eigen::Index i : core) state.p[i] = 1.0 / static_cast<double>(core.size());
  if (!state.refactor())
    throw Error(ErrorCode::DegenerateInput, "initial core set does not span the lifted space");

  // The plus side is held to eps * n / d so that the de-lifted ellipsoid,
  // whose containment level is (kappa - 1) / n, contains every point within
  // 1 + eps.
  const double plus_target = eps * static_cast<double>(n) / d;

  MveeResult result;
  SolveReport& report = result.report;
  report.logdet_trace.push_back(state.logdet);
  std::size_t since_refactor = 0;

  for (;;) {
    Vector kappa = state.leverages();
    Eigen::Index j_plus = 0;
    const double kappa_plus = kappa.maxCoeff(&j_plus);
    Eigen::Index j_minus = -1;
    double kappa_minus = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < m; ++i) {
      if (state.p[i] > 0.0 && kappa[i] < kappa_minus) {
        kappa_minus = kappa[i];
        j_minus = i;
      }
    }
    const double eps_plus = kappa_plus / d - 1.0;
    const double eps_minus = 1.0 - kappa_minus / d;

    if (eps_plus <= plus_target && eps_minus <= eps) {
      if (since_refactor == 0) {
        report.final_eps = std::max({eps_plus, eps_minus, 0.0});
        report.kappa_max = kappa_plus;
        report.kappa_min_support = kappa_minus;
        break;
      }
      // Confirm the certificate against a fresh factorization.
      if (!state.refactor())
        throw Error(ErrorCode::SingularWeights, "lifted moment matrix became singular");
      report.logdet_trace.back() = state.logdet;
      since_refactor = 0;
      continue;
    }
    if (report.iterations >= cap)
      throw Error(ErrorCode::NoConvergence,
                  "iteration cap " + std::to_string(cap) + " reached at eps " +
                      std::to_string(std::max(eps_plus, eps_minus)));

    const bool plus_step = eps_plus >= eps_minus;
    const Eigen::Index j = plus_step ? j_plus : j_minus;
    const double kj = kappa[j];
    const Vector qj = lifted.col(j);
    double gain = 0.0;
    bool updated = false;

    if (plus_step) {
      const double beta = (kj - d) / (d * (kj - 1.0));
      state.p *= 1.0 - beta;
      state.p[j] += beta;
      updated = sherman_morrison_update(state.inverse, qj, 1.0 - beta, beta);
      gain = (d - 1.0) * std::log1p(-beta) + std::log1p(beta * (kj - 1.0));
      ++report.plus_steps;
    } else {
      const double pj = state.p[j];
      const double beta_drop = pj / (1.0 - pj);
      const double beta_line = kj > 1.0 ? (d - kj) / (d * (kj - 1.0))
                                        : std::numeric_limits<double>::infinity();
      const bool drop = beta_drop <= beta_line;
      const double beta = drop ? beta_drop : beta_line;
      state.p *= 1.0 + beta;
      state.p[j] -= beta;
      if (drop) {
        state.p[j] = 0.0;
        ++report.drop_steps;
      } else {
        state.p[j] = std::max(state.p[j], 0.0);
        ++report.away_steps;
      }
      updated = sherman_morrison_update(state.inverse, qj, 1.0 + beta, -beta);
      gain = (d - 1.0) * std::log1p(beta) + std::log1p(-beta * (kj - 1.0));
    }
    ++report.iterations;
    ++since_refactor;

    if (!updated || since_refactor >= refactor_every) {
      if (!state.refactor())
        throw Error(ErrorCode::SingularWeights, "lifted moment matrix became singular");
      since_refactor = 0;
    } else {
      state.logdet += gain;
    }
    report.logdet_trace.push_back(state.logdet);
  }

  state.p = state.p.cwiseMax(0.0);
  state.p /= state.p.sum();
  for (Eigen::Index i = 0; i < m; ++i)
    if (state.p[i] > 0.0) report.support.push_back(i);

  result.weights.weights = state.p;
  result.ellipsoid = ellipsoid_from_weights(ps, result.weights);
  return result;
}

// ---------------------------------------------------------------------------
// De-lifting and queries

Ellipsoid ellipsoid_from_weights(const PointSet& ps, const WeightVector& p) {
  if (p.size() != ps.size())
    throw Error(ErrorCode::DimensionMismatch, "weight vector length differs from point count");
  if (!p.valid()) throw Error(ErrorCode::InvalidArgument, "weights are not on the simplex");
  const Eigen::Index n = ps.dim();
  const Matrix& a = ps.matrix();

  Ellipsoid e;
  e.center = a * p.weights;
  const Matrix centered = a.colwise() - e.center;
  Matrix moment = centered * p.weights.asDiagonal() * centered.transpose();
  moment = 0.5 * (moment + moment.transpose()).eval();

  const SymmetricEigen eig = jacobi_eigen(moment);
  const double lo = eig.values.minCoeff();
  const double hi = eig.values.maxCoeff();
  if (!(lo > 0.0) || hi / lo > 1e14)
    throw Error(ErrorCode::SingularWeights, "weighted second moment is numerically singular");
  const Vector inv = (static_cast<double>(n) * eig.values.array()).inverse();
  e.shape = eig.vectors * inv.asDiagonal() * eig.vectors.transpose();
  e.shape = 0.5 * (e.shape + e.shape.transpose()).eval();
  return e;
}

PrincipalAxis principal_axis(const Ellipsoid& e, double gap_tol) {
  if (!e.valid()) throw Error(ErrorCode::InvalidArgument, "ellipsoid is not valid");
  const SymmetricEigen eig = jacobi_eigen(e.shape, 1e-12, 100);
  const double lambda_min = eig.values[0];
  PrincipalAxis axis;
  axis.gap_ratio = eig.values.size() > 1 ? eig.values[1] / lambda_min
                                         : std::numeric_limits<double>::infinity();
  if (!(axis.gap_ratio >= 1.0 + gap_tol))
    throw Error(ErrorCode::NoUniqueAxis,
                "eigen-gap ratio " + std::to_string(axis.gap_ratio) + " below 1 + " +
                    std::to_string(gap_tol));
  axis.half_length = 1.0 / std::sqrt(lambda_min);
  axis.direction = eig.vectors.col(0);
  Eigen::Index big = 0;
  axis.direction.cwiseAbs().maxCoeff(&big);
  if (axis.direction[big] < 0.0) axis.direction = -axis.direction;
  axis.endpoint = e.center + axis.half_length * axis.direction;
  return axis;
}

bool contains(const Ellipsoid& e, const Vector& x, double slack) {
  if (x.size() != e.dim())
    throw Error(ErrorCode::DimensionMismatch, "point and ellipsoid dimensions differ");
  const Vector r = x - e.center;
  return r.dot(e.shape * r) <= 1.0 + slack;
}

}  // namespace jstego
