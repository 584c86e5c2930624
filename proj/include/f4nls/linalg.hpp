#pragma once

// Dense symmetric linear algebra shared by the operator, total-positivity and
// coercivity modules.  Eigensolves go through LAPACK (dsyevd / dsyevr).

#include <Eigen/Dense>

#include <span>
#include <stdexcept>
#include <string>

#include "f4nls/grid.hpp"

namespace f4nls {

/// Raised when a numerical kernel fails (eigensolver non-convergence,
/// rank-deficient constraints, detected blow-up).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SymmetricEigen {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // columns, empty when not requested
};

/// Full eigendecomposition of a symmetric matrix (upper triangle is read).
SymmetricEigen eigh(Eigen::MatrixXd a, bool vectors = true);

/// Eigenpairs with ascending indices [first, last] (0-based, inclusive).
SymmetricEigen eigh_range(Eigen::MatrixXd a, int first, int last, bool vectors = true);

inline SymmetricEigen eigh_lowest(Eigen::MatrixXd a, int count, bool vectors = true) {
  return eigh_range(std::move(a), 0, count - 1, vectors);
}

/// Real symmetric circulant matrix of a real even symbol given in FFT order.
Eigen::MatrixXd circulant_from_symbol(const Grid& grid, std::span<const double> symbol);

/// Applies a Fourier multiplier to every column of `m` (in place).
void apply_symbol_to_columns(const Grid& grid, std::span<const double> symbol, Eigen::MatrixXd& m);

/// Orthonormal basis of span(columns); throws NumericalError when the
/// columns are numerically dependent (relative pivot below `rank_tol`).
Eigen::MatrixXd orthonormal_basis(const Eigen::MatrixXd& columns, double rank_tol = 1e-10);

/// P B P + shift * Q Q^T with P = I - Q Q^T.  The constraint directions are
/// mapped to the eigenvalue `shift`, the complement keeps the spectrum of the
/// compressed form.  Symmetry is preserved exactly.
Eigen::MatrixXd compress_to_complement(const Eigen::MatrixXd& b, const Eigen::MatrixXd& q, double shift);

/// Upper bound on the spectral radius (max absolute row sum).
double gershgorin_bound(const Eigen::MatrixXd& b);

}  // namespace f4nls
