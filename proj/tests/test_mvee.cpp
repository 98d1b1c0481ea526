#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "ellipse_oracle.hpp"
#include "jstego/error.hpp"
#include "jstego/mvee.hpp"

namespace jstego {
namespace {

PointSet random_points(Rng& rng, Eigen::Index n, Eigen::Index m) {
  Matrix pts(n, m);
  for (Eigen::Index j = 0; j < m; ++j) pts.col(j) = rng.normal_vector(n);
  return PointSet(pts);
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an Error";
  return ErrorCode::InvalidArgument;
}

// Leverages q_i^T Lambda(p)^{-1} q_i recomputed from scratch on raw points.
Vector leverages(const PointSet& ps, const Vector& p) {
  const Eigen::Index n = ps.dim();
  Matrix lifted(n + 1, ps.size());
  lifted.topRows(n) = ps.matrix();
  lifted.row(n).setOnes();
  const Matrix lambda = lifted * p.asDiagonal() * lifted.transpose();
  const Matrix solved = lambda.ldlt().solve(lifted);
  return lifted.cwiseProduct(solved).colwise().sum().transpose();
}

// --- coreset_init ----------------------------------------------------------

TEST(Coreset, SquareWithCentreUsesOnlyCorners) {
  const PointSet ps = PointSet::from_rows({{1, 1}, {-1, 1}, {-1, -1}, {1, -1}, {0, 0}});
  const std::vector<Vector> dirs{Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 1)};
  const auto core = coreset_init(ps, [&](std::size_t k) { return dirs.at(k); });
  EXPECT_GE(core.size(), 3u);
  EXPECT_LE(core.size(), 4u);
  for (Eigen::Index i : core) EXPECT_LT(i, 4) << "centre point must not be extreme";
}

TEST(Coreset, SmallSetsReturnEverything) {
  Rng rng(1);
  const PointSet tri = PointSet::from_rows({{0, 0}, {1, 0}, {0, 1}});
  EXPECT_EQ(coreset_init(tri, rng), (std::vector<Eigen::Index>{0, 1, 2}));
  const PointSet four = PointSet::from_rows({{0, 0}, {1, 0}, {0, 1}, {3, 3}});
  EXPECT_EQ(coreset_init(four, rng).size(), 4u);
}

TEST(Coreset, SizeBoundsOnRandomSets) {
  Rng rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index n = 2 + trial % 7;
    const PointSet ps = random_points(rng, n, 2 * n + 1 + trial);
    const auto core = coreset_init(ps, rng);
    EXPECT_GE(static_cast<Eigen::Index>(core.size()), n + 1);
    EXPECT_LE(static_cast<Eigen::Index>(core.size()), 2 * n);
    EXPECT_TRUE(std::is_sorted(core.begin(), core.end()));
  }
}

TEST(Coreset, CollinearPointsAreDegenerate) {
  Rng rng(3);
  const PointSet line = PointSet::from_rows({{0, 0}, {1, 1}, {2, 2}, {3, 3}, {4, 4}, {5, 5}});
  EXPECT_TRUE(line.degenerate());
  EXPECT_EQ(code_of([&] { coreset_init(line, rng); }), ErrorCode::DegenerateInput);
  EXPECT_EQ(code_of([&] { solve_mvee(line, 1e-7, rng); }), ErrorCode::DegenerateInput);
}

TEST(PointSet, RaggedRowsRejected) {
  EXPECT_EQ(code_of([] { PointSet::from_rows({{0, 0}, {1}}); }), ErrorCode::DimensionMismatch);
}

// --- solve_mvee -----------------------------------------------------------

TEST(SolveMvee, CrossPolytopeGivesUnitDisk) {
  Rng rng(4);
  const PointSet ps = PointSet::from_rows({{1, 0}, {-1, 0}, {0, 1}, {0, -1}});
  const MveeResult r = solve_mvee(ps, 1e-9, rng);
  EXPECT_LT(r.ellipsoid.center.cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((r.ellipsoid.shape - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(SolveMvee, TriangleGivesSteinerCircumellipse) {
  Rng rng(5);
  const PointSet ps = PointSet::from_rows({{0, 0}, {1, 0}, {0, 1}});
  const MveeResult r = solve_mvee(ps, 1e-9, rng);
  EXPECT_NEAR(r.ellipsoid.center[0], 1.0 / 3.0, 1e-9);
  EXPECT_NEAR(r.ellipsoid.center[1], 1.0 / 3.0, 1e-9);
  const double area = std::numbers::pi * r.ellipsoid.volume_factor();
  // Frozen from the brute-force oracle (see EllipseOracle tests): 2 pi / (3 sqrt 3).
  EXPECT_NEAR(area, 1.2091995761561452, 1e-8);
}

TEST(SolveMvee, IntervalInOneDimension) {
  Rng rng(6);
  const PointSet ps = PointSet::from_rows({{-3}, {5}});
  const MveeResult r = solve_mvee(ps, 1e-9, rng);
  EXPECT_NEAR(r.ellipsoid.center[0], 1.0, 1e-12);
  EXPECT_NEAR(r.ellipsoid.semi_axes()[0], 4.0, 1e-10);
}

TEST(SolveMvee, InteriorPointsCarryNoWeight) {
  Rng rng(7);
  const PointSet ps = PointSet::from_rows({{2, 0}, {-2, 0}, {0, 1}, {0, -1}, {0.1, 0.2}, {-0.5, 0.1}});
  const MveeResult r = solve_mvee(ps, 1e-9, rng);
  EXPECT_LT(r.weights[4], 1e-8);
  EXPECT_LT(r.weights[5], 1e-8);
  EXPECT_NEAR(r.ellipsoid.shape(0, 0), 0.25, 1e-8);
  EXPECT_NEAR(r.ellipsoid.shape(1, 1), 1.0, 1e-8);
}

TEST(SolveMvee, RejectsBadTolerance) {
  Rng rng(8);
  const PointSet ps = PointSet::from_rows({{0, 0}, {1, 0}, {0, 1}});
  EXPECT_EQ(code_of([&] { solve_mvee(ps, 0.0, rng); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([&] { solve_mvee(ps, 1.0, rng); }), ErrorCode::InvalidArgument);
}

TEST(SolveMvee, IterationCapRaisesNoConvergence) {
  Rng rng(9);
  const PointSet ps = random_points(rng, 5, 200);
  MveeOptions opts;
  opts.eps = 1e-9;
  opts.max_iterations = 3;
  EXPECT_EQ(code_of([&] { solve_mvee(ps, opts, rng); }), ErrorCode::NoConvergence);
}

TEST(SolveMvee, DefaultCapFormula) {
  // 100 * 3 * (log 3 + 1000) for n = 2, eps = 1e-3.
  EXPECT_EQ(default_iteration_cap(2, 1e-3),
            static_cast<std::size_t>(std::ceil(300.0 * (std::log(3.0) + 1000.0))));
}

// Certificate, monotone dual and containment on random instances.
TEST(SolveMvee, InvariantsOnRandomInstances) {
  Rng rng(10);
  const double eps = 1e-7;
  for (int trial = 0; trial < 40; ++trial) {
    const Eigen::Index n = 1 + trial % 8;
    const Eigen::Index m = n + 1 + static_cast<Eigen::Index>(rng.below(60));
    const PointSet ps = random_points(rng, n, m);
    const MveeResult r = solve_mvee(ps, eps, rng);
    ASSERT_TRUE(r.weights.valid());
    ASSERT_TRUE(r.ellipsoid.valid());
    EXPECT_LE(r.report.final_eps, eps);

    const double d = static_cast<double>(n + 1);
    const Vector kappa = leverages(ps, r.weights.weights);
    for (Eigen::Index i = 0; i < m; ++i) {
      EXPECT_LE(kappa[i], (1 + eps) * d * (1 + 1e-12)) << "trial " << trial;
      if (r.weights[i] > 0) EXPECT_GE(kappa[i], (1 - eps) * d * (1 - 1e-12)) << "trial " << trial;
      EXPECT_TRUE(contains(r.ellipsoid, ps.point(i), (1 + eps) * (1 + 1e-9) - 1));
    }
    const auto& trace = r.report.logdet_trace;
    for (std::size_t k = 1; k < trace.size(); ++k)
      EXPECT_GE(trace[k], trace[k - 1] - 1e-12 * std::max(1.0, std::abs(trace[k - 1])));
  }
}

TEST(SolveMvee, AffineEquivariance) {
  Rng rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index n = 2 + trial % 4;
    const PointSet ps = random_points(rng, n, 4 * n);
    const Matrix rot = rng.orthogonal_matrix(n);
    const double scale = rng.uniform(0.5, 3.0);
    const Vector shift = rng.normal_vector(n);
    const PointSet moved(((scale * rot) * ps.matrix()).colwise() + shift);

    const Ellipsoid e = solve_mvee(ps, 1e-10, rng).ellipsoid;
    const Ellipsoid f = solve_mvee(moved, 1e-10, rng).ellipsoid;
    const Vector expect_center = scale * rot * e.center + shift;
    const Matrix expect_shape = rot * e.shape * rot.transpose() / (scale * scale);
    EXPECT_LT((f.center - expect_center).cwiseAbs().maxCoeff(), 1e-8) << "trial " << trial;
    EXPECT_LT((f.shape - expect_shape).norm() / expect_shape.norm(), 1e-6) << "trial " << trial;
  }
}

TEST(SolveMvee, NoWorseThanBruteForceOracle) {
  Rng rng(13);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<Eigen::Vector2d> pts;
    const int m = 3 + trial % 4;
    for (int i = 0; i < m; ++i) pts.emplace_back(rng.uniform(-1, 1), rng.uniform(-1, 1));
    std::vector<std::vector<double>> rows;
    for (const auto& p : pts) rows.push_back({p.x(), p.y()});
    const PointSet ps = PointSet::from_rows(rows);
    if (ps.degenerate()) continue;
    const double ours = std::numbers::pi * solve_mvee(ps, 1e-7, rng).ellipsoid.volume_factor();
    const double brute = oracle::min_area_ellipse(pts).area;
    EXPECT_LE(ours, (1 + 1e-4) * brute) << "trial " << trial;
  }
}

// --- ellipsoid_from_weights ----------------------------------------------

TEST(EllipsoidFromWeights, UniformCrossPolytope) {
  const PointSet ps = PointSet::from_rows({{1, 0}, {-1, 0}, {0, 1}, {0, -1}});
  const Ellipsoid e = ellipsoid_from_weights(ps, {Vector::Constant(4, 0.25)});
  EXPECT_LT(e.center.norm(), 1e-15);
  EXPECT_LT((e.shape - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(EllipsoidFromWeights, IntervalMidpoint) {
  const PointSet ps = PointSet::from_rows({{-3}, {5}});
  const Ellipsoid e = ellipsoid_from_weights(ps, {Eigen::Vector2d(0.5, 0.5)});
  EXPECT_DOUBLE_EQ(e.center[0], 1.0);
  EXPECT_DOUBLE_EQ(e.shape(0, 0), 1.0 / 16.0);
}

TEST(EllipsoidFromWeights, CollinearSupportIsSingular) {
  const PointSet ps = PointSet::from_rows({{0, 0}, {1, 1}, {0, 1}});
  EXPECT_EQ(code_of([&] { ellipsoid_from_weights(ps, {Eigen::Vector3d(0.5, 0.5, 0.0)}); }),
            ErrorCode::SingularWeights);
}

// --- principal_axis and contains ------------------------------------------

TEST(PrincipalAxis, DiagonalCase) {
  Ellipsoid e{Vector::Zero(3), Vector(Eigen::Vector3d(0.25, 1, 1)).asDiagonal()};
  const PrincipalAxis a = principal_axis(e, 0.1);
  EXPECT_NEAR(a.half_length, 2.0, 1e-14);
  EXPECT_LT((a.endpoint - Eigen::Vector3d(2, 0, 0)).norm(), 1e-14);
  EXPECT_NEAR(a.gap_ratio, 4.0, 1e-12);
}

TEST(PrincipalAxis, SphereHasNoUniqueAxis) {
  Ellipsoid e{Vector::Zero(3), Matrix::Identity(3, 3)};
  EXPECT_EQ(code_of([&] { principal_axis(e, 0.1); }), ErrorCode::NoUniqueAxis);
}

TEST(PrincipalAxis, RotatedEllipsoid) {
  Rng rng(14);
  const Matrix r = rng.orthogonal_matrix(3);
  const Matrix q = r.transpose() * Vector(Eigen::Vector3d(1.0 / 9, 1, 1)).asDiagonal() * r;
  const PrincipalAxis a = principal_axis({Vector::Zero(3), q}, 0.1);
  EXPECT_NEAR(a.half_length, 3.0, 1e-10);
  // Q (R^T e_1) = (1/9) R^T e_1, so the axis is +-3 R^T e_1.
  const Vector expected = 3.0 * r.transpose().col(0);
  EXPECT_LT(std::min((a.endpoint - expected).norm(), (a.endpoint + expected).norm()), 1e-8);
}

TEST(PrincipalAxis, RotationEquivariance) {
  Rng rng(15);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::Index n = 2 + trial % 5;
    Vector diag(n);
    for (Eigen::Index i = 0; i < n; ++i) diag[i] = 1.0 + i;
    const Matrix base_rot = rng.orthogonal_matrix(n);
    const Matrix q = base_rot * diag.asDiagonal() * base_rot.transpose();
    const Matrix r = rng.orthogonal_matrix(n);
    const PrincipalAxis a = principal_axis({Vector::Zero(n), q});
    const PrincipalAxis b = principal_axis({Vector::Zero(n), r.transpose() * q * r});
    const Vector moved = r.transpose() * a.endpoint;
    EXPECT_LT(std::min((b.endpoint - moved).norm(), (b.endpoint + moved).norm()), 1e-8);
  }
}

TEST(PrincipalAxis, OneDimensionAlwaysUnique) {
  const PrincipalAxis a = principal_axis({Vector::Constant(1, 1.0), Matrix::Constant(1, 1, 1.0 / 16)});
  EXPECT_NEAR(a.half_length, 4.0, 1e-14);
  EXPECT_NEAR(a.endpoint[0], 5.0, 1e-14);
}

TEST(Contains, UnitDisk) {
  const Ellipsoid disk{Vector::Zero(2), Matrix::Identity(2, 2)};
  EXPECT_TRUE(contains(disk, Eigen::Vector2d(1, 0), 0.0));
  EXPECT_FALSE(contains(disk, Eigen::Vector2d(1.001, 0), 0.0));
  EXPECT_TRUE(contains(disk, Eigen::Vector2d(1.001, 0), 0.01));
  EXPECT_EQ(code_of([&] { contains(disk, Eigen::Vector3d(0, 0, 0)); }),
            ErrorCode::DimensionMismatch);
}

}  // namespace
}  // namespace jstego
