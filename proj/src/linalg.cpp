#include "f4nls/linalg.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <vector>

namespace f4nls {

SymmetricEigen eigh(Eigen::MatrixXd a, bool vectors) {
  const auto n = static_cast<lapack_int>(a.rows());
  if (a.cols() != a.rows()) throw std::invalid_argument("eigh: matrix must be square");
  SymmetricEigen out;
  out.values.resize(n);
  const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, vectors ? 'V' : 'N', 'U', n, a.data(), n,
                                         out.values.data());
  if (info != 0) throw NumericalError("dsyevd failed to converge (info=" + std::to_string(info) + ")");
  if (vectors) out.vectors = std::move(a);
  return out;
}

SymmetricEigen eigh_range(Eigen::MatrixXd a, int first, int last, bool vectors) {
  const auto n = static_cast<lapack_int>(a.rows());
  if (a.cols() != a.rows()) throw std::invalid_argument("eigh_range: matrix must be square");
  if (first < 0 || last < first || last >= n) throw std::invalid_argument("eigh_range: bad index range");
  const lapack_int count = last - first + 1;
  lapack_int found = 0;
  Eigen::VectorXd w(n);
  Eigen::MatrixXd z;
  std::vector<lapack_int> support;
  if (vectors) {
    z.resize(n, count);
    support.resize(2 * static_cast<std::size_t>(count));
  }
  const lapack_int info =
      LAPACKE_dsyevr(LAPACK_COL_MAJOR, vectors ? 'V' : 'N', 'I', 'U', n, a.data(), n, 0.0, 0.0,
                     first + 1, last + 1, 0.0, &found, w.data(), vectors ? z.data() : nullptr, n,
                     vectors ? support.data() : nullptr);
  if (info != 0 || found != count)
    throw NumericalError("dsyevr failed (info=" + std::to_string(info) + ")");
  SymmetricEigen out;
  out.values = w.head(count);
  if (vectors) out.vectors = std::move(z);
  return out;
}

Eigen::MatrixXd circulant_from_symbol(const Grid& grid, std::span<const double> symbol) {
  const int n = grid.size();
  std::vector<cplx> s(symbol.begin(), symbol.end());
  std::vector<cplx> c(n);
  grid.inverse(s, c);
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const int d = ((i - j) % n + n) % n;
      // Symmetrize c[d] and c[n-d] so the matrix is exactly symmetric.
      m(i, j) = 0.5 * (c[d].real() + c[(n - d) % n].real());
    }
  return m;
}

void apply_symbol_to_columns(const Grid& grid, std::span<const double> symbol, Eigen::MatrixXd& m) {
  const int n = grid.size();
  if (m.rows() != n) throw std::invalid_argument("apply_symbol_to_columns: row count mismatch");
  std::vector<cplx> a(n), b(n);
  for (Eigen::Index col = 0; col < m.cols(); ++col) {
    for (int j = 0; j < n; ++j) a[j] = m(j, col);
    grid.forward(a, b);
    for (int k = 0; k < n; ++k) b[k] *= symbol[k];
    grid.inverse(b, a);
    for (int j = 0; j < n; ++j) m(j, col) = a[j].real();
  }
}

Eigen::MatrixXd orthonormal_basis(const Eigen::MatrixXd& columns, double rank_tol) {
  const Eigen::Index k = columns.cols();
  if (k == 0) return Eigen::MatrixXd(columns.rows(), 0);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(columns);
  const auto& r = qr.matrixR();
  const double scale = std::abs(r(0, 0));
  for (Eigen::Index i = 0; i < k; ++i)
    if (!(std::abs(r(i, i)) > rank_tol * scale))
      throw NumericalError("degenerate constraint set (numerically dependent directions)");
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(columns.rows(), k);
  return q;
}

Eigen::MatrixXd compress_to_complement(const Eigen::MatrixXd& b, const Eigen::MatrixXd& q, double shift) {
  if (q.cols() == 0) return b;
  const Eigen::MatrixXd w = b * q;                // N x k
  const Eigen::MatrixXd k = q.transpose() * w;    // k x k
  Eigen::MatrixXd out = b;
  out.noalias() -= q * w.transpose();
  out.noalias() -= w * q.transpose();
  const Eigen::MatrixXd kk = 0.5 * (k + k.transpose()) + shift * Eigen::MatrixXd::Identity(q.cols(), q.cols());
  out.noalias() += q * kk * q.transpose();
  // Roundoff in the rank-k updates can leave O(eps) asymmetry.
  out = 0.5 * (out + out.transpose()).eval();
  return out;
}

double gershgorin_bound(const Eigen::MatrixXd& b) { return b.cwiseAbs().rowwise().sum().maxCoeff(); }

}  // namespace f4nls
