#include "jstego/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "jstego/error.hpp"

namespace jstego {

namespace {

double off_diagonal_norm(const Matrix& a) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      if (i != j) sum += a(i, j) * a(i, j);
  return std::sqrt(sum);
}

}  // namespace

SymmetricEigen jacobi_eigen(const Matrix& input, double tol, int max_sweeps) {
  if (input.rows() != input.cols())
    throw Error(ErrorCode::DimensionMismatch, "jacobi_eigen: matrix not square");
  const Eigen::Index n = input.rows();
  Matrix a = 0.5 * (input + input.transpose());
  Matrix v = Matrix::Identity(n, n);

  const double scale = std::max(a.norm(), std::numeric_limits<double>::min());
  auto sweep = [&] {
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        // Rotation angle that annihilates a(p, q), small-angle branch of
        // the classical formulation.
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  };

  SymmetricEigen out;
  for (; out.sweeps < max_sweeps; ++out.sweeps) {
    if (off_diagonal_norm(a) <= tol * scale) {
      out.converged = true;
      break;
    }
    sweep();
  }
  if (!out.converged && off_diagonal_norm(a) <= tol * scale) out.converged = true;
  // Convergence is quadratic near the end: one more sweep takes the residual
  // from tol down to round-off, which the eigenvectors need when the caller
  // scales them by large half-lengths.
  if (out.converged && off_diagonal_norm(a) > 0.0) {
    sweep();
    ++out.sweeps;
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index i, Eigen::Index j) { return a(i, i) < a(j, j); });
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]);
    out.vectors.col(k) = v.col(order[k]);
  }
  return out;
}

bool sherman_morrison_update(Matrix& inverse, const Vector& u, double scale,
                             double coef) {
  if (!(scale > 0.0)) return false;
  const Vector y = inverse * u;
  const double kappa = u.dot(y);
  const double denom = scale + coef * kappa;
  if (!(std::abs(denom) > 1e-14 * scale)) return false;
  inverse -= (coef / denom) * (y * y.transpose());
  inverse /= scale;
  // Keep the stored inverse exactly symmetric.
  inverse = 0.5 * (inverse + inverse.transpose()).eval();
  return true;
}

Matrix inverse_sqrt_spd(const Matrix& a) {
  const SymmetricEigen eig = jacobi_eigen(a);
  if (eig.values.size() == 0 || !(eig.values.minCoeff() > 0.0))
    throw Error(ErrorCode::SingularWeights, "inverse_sqrt_spd: matrix not positive definite");
  Vector scaled = eig.values.array().rsqrt();
  return eig.vectors * scaled.asDiagonal() * eig.vectors.transpose();
}

Eigen::Index numerical_rank(const Matrix& a, double rel_tol) {
  if (a.size() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(a);
  const Vector& sv = svd.singularValues();
  if (sv.size() == 0 || sv[0] == 0.0) return 0;
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv[i] > rel_tol * sv[0]) ++rank;
  return rank;
}

}  // namespace jstego
