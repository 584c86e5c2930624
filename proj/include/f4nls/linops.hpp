#pragma once

// Linearized operators around the standing wave,
//   L1 = d^4 - d^2 + alpha - 3 phi^2,   L2 = d^4 - d^2 + alpha - phi^2,
// discretized as dense symmetric matrices (circulant Fourier multiplier minus a
// diagonal potential), with spectra, constrained minima and Garding bounds.

#include <Eigen/Dense>

#include <vector>

#include "f4nls/grid.hpp"
#include "f4nls/linalg.hpp"
#include "f4nls/wave.hpp"

namespace f4nls {

enum class OperatorKind { L1, L2 };

/// m(xi) = xi^4 + xi^2.
inline double dispersion_symbol(double xi) {
  const double s = xi * xi;
  return s * s + s;
}

struct OperatorDisc {
  GridPtr grid;
  double shift = 0.0;            // alpha
  std::vector<double> symbol;    // m(xi) + alpha, FFT order
  RealField potential;           // subtracted on the diagonal
  Eigen::MatrixXd matrix;        // symmetric N x N

  /// Matrix-free application through the FFT.
  RealField apply(const RealField& f) const;
  RealField apply_matrix(const RealField& f) const;
};

OperatorDisc build_operator(OperatorKind which, const WaveProfile& wave);
/// Generic constructor: d^4 - d^2 + shift - potential.
OperatorDisc build_operator(const RealField& potential, double shift);

struct SpectrumReport {
  std::vector<double> eigenvalues;     // ascending
  std::vector<RealField> eigenvectors; // unit L2 norm
  std::vector<double> residuals;       // ||A v - lambda v||_L2
  int n_negative = 0;
  int n_zero = 0;
  double essential_edge = 0.0;
  double tol_zero = 1e-6;
};

/// The k lowest eigenpairs.
SpectrumReport spectrum(const OperatorDisc& op, int k, double tol_zero = 1e-6);

struct ConstrainedMin {
  double value = 0.0;
  RealField minimizer;  // unit norm in the requested inner product
};

/// min (A v, v) / (v, v)_norm over v with (c, v)_L2 = 0 for every constraint.
/// Constraints are always L2 pairings; `norm` only selects the denominator.
ConstrainedMin constrained_min(const OperatorDisc& op, const std::vector<RealField>& constraints,
                               InnerProductKind norm = InnerProductKind::L2);

/// One constraint with its own pairing, for the H2 pencil.
struct Constraint {
  RealField direction;
  InnerProductKind pairing = InnerProductKind::L2;
};

/// min [(A v, v) + 2 M (d, v)_L2^2] / ||v||_H2^2 over the constraint
/// complement, d = *penalty_direction and M = penalty (no penalty when the
/// direction is null).
ConstrainedMin pencil_min(const OperatorDisc& op, const std::vector<Constraint>& constraints,
                          const RealField* penalty_direction = nullptr, double penalty = 0.0);

/// Pieces of the H2 pencil in the symmetric form
/// H^{-1/2} (A + penalty) H^{-1/2}, exposed for the penalty calibration.
struct H2Pencil {
  Eigen::MatrixXd compressed;  // constraint directions shifted out
  Eigen::MatrixXd basis;       // orthonormal constraint basis (transformed space)
  double shift = 0.0;
  std::vector<double> inv_sqrt_weight;  // FFT order
};
H2Pencil build_h2_pencil(const OperatorDisc& op, const std::vector<Constraint>& constraints);
/// Constraint vector in the transformed variable y (v = H^{-1/2} y):
/// H^{-1/2} d for an L2 pairing, H^{1/2} d for an H2 pairing.
Eigen::VectorXd h2_transform_direction(const OperatorDisc& op, const RealField& d, InnerProductKind pairing);

struct GardingCertificate {
  double epsilon = 0.0;
  double constant = 0.0;  // C
  double min_eig = 0.0;   // lambda_min(A - eps H + C I), checked
  bool valid = false;
};

/// Smallest C with A - eps H + C I >= 0.  Requires 0 < eps < 1.
GardingCertificate garding_certify(const OperatorDisc& op, double epsilon);

/// Min Rayleigh quotient of diag(L1, L2) acting on pairs (P, Q) over the
/// complement of the given pair constraints (L2 pairings of the pair space).
double matrix_operator_min(const OperatorDisc& l1, const OperatorDisc& l2,
                           const std::vector<ComplexField>& constraints);

/// Max over j of |f(x_j) - s f(-x_j)| / max|f|, with s = +1 (even) or -1 (odd);
/// returns the smaller of the two defects and sets `even` accordingly.
double parity_defect(const RealField& f, bool* even = nullptr);

}  // namespace f4nls
