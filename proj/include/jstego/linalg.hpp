#pragma once

#include <Eigen/Dense>

namespace jstego {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Eigen-decomposition of a symmetric matrix, eigenvalues ascending,
// eigenvectors stored as matching columns.
struct SymmetricEigen {
  Vector values;
  Matrix vectors;
  int sweeps = 0;
  bool converged = false;
};

/// Cyclic Jacobi rotations. A sweep visits every off-diagonal pair once;
/// iteration stops when the off-diagonal Frobenius norm falls below
/// `tol` times the Frobenius norm of the input, after which one polishing
/// sweep is applied.
SymmetricEigen jacobi_eigen(const Matrix& a, double tol = 1e-12,
                            int max_sweeps = 100);

/// In-place Sherman-Morrison update of `inverse` = A^{-1} to
/// (scale * A + coef * u u^T)^{-1}. Returns false (leaving `inverse`
/// untouched) when the update would be singular.
bool sherman_morrison_update(Matrix& inverse, const Vector& u, double scale,
                             double coef);

/// Symmetric square root of the inverse, S = A^{-1/2}, for SPD A.
Matrix inverse_sqrt_spd(const Matrix& a);

/// Singular values of `a` below rel_tol * largest are treated as zero.
Eigen::Index numerical_rank(const Matrix& a, double rel_tol = 1e-10);

}  // namespace jstego
