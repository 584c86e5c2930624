#pragma once

// The quantity I = (chi, phi) with L1 chi = phi, computed from the dense
// eigendecomposition and from the even-mode series of the frequency-side
// family, and lower bounds of the second variation G''(Phi) = diag(L1, L2)
// against the H2 norm on constrained subspaces.

#include <optional>
#include <string>
#include <vector>

#include "f4nls/linops.hpp"
#include "f4nls/wave.hpp"

namespace f4nls {

struct WeinsteinReport {
  double value = 0.0;           // I = (chi, phi)_L2
  RealField chi;
  double kernel_overlap = 0.0;  // (chi, phi')_L2
  double solve_residual = 0.0;  // ||L1 chi - phi||_L2
  int modes_used = 0;
  int n_zero = 0;
};

/// Pseudo-inverse of L1 on phi, excluding |lambda| <= tol_zero.  Throws
/// NumericalError unless exactly one eigenvalue is that small.
WeinsteinReport weinstein_direct(const OperatorDisc& l1, const WaveProfile& wave, double tol_zero = 1e-6);

struct WeinsteinSeries {
  double prefactor = 0.0;      // a = (2^{n+r-1} Gamma(r) / (pi Gamma(n)))^2
  double raw_sum = 0.0;        // a * sum_j
  double normalization = 0.0;  // pi^2 / (3 b)
  double estimate = 0.0;       // normalization * raw_sum
  double tail_bound = 0.0;
  int terms = 0;
};

/// Partial sum over j = 0..j_max with n = 2, r = 2 and the even-mode
/// eigenvalues lambda_{2j} of the L1 family at theta = 0:
///   a sum_j lambda/(1 - lambda) * Gamma(2j+1)(2j+n+r-1/2)/Gamma(2j+2n+r+1)
///         * [Gamma(j+n)Gamma(j+n+r-1/2) / (Gamma(j+1)Gamma(j+r+1/2))]^2,
/// scaled by pi^2 / (3 b) to the raw potential 3 phi^2 of width b.
WeinsteinSeries weinstein_series(const std::vector<double>& even_lambda, int j_max, double width);

struct PairConstraint {
  ComplexField direction;
  InnerProductKind pairing = InnerProductKind::L2;
  std::string label;
};

struct SubspaceBoundReport {
  std::string label;
  std::vector<std::string> constraints;
  double lambda_min = 0.0;
  double p_block = 0.0;
  double q_block = 0.0;
  std::optional<double> penalty;  // M
  bool decoupled = true;
  // Unit-H2 minimizers of each block (decoupled path only); the worst
  // directions for the quadratic lower bound.
  RealField p_minimizer, q_minimizer;
};

/// Linearized operators on one grid.
struct SecondVariation {
  WaveProfile wave;
  OperatorDisc l1, l2;
  explicit SecondVariation(const GridPtr& grid);
};

/// lambda_min of (G''(Phi) + 2 M (Phi, .)^2) against the H2 norm on the
/// complement of the constraints.  Uses the per-component pencils when every
/// constraint lives on one component; `force_pair_space` selects the 2N path.
SubspaceBoundReport subspace_bound(const SecondVariation& sv, const std::vector<PairConstraint>& constraints,
                                   std::optional<double> penalty = std::nullopt, std::string label = {},
                                   bool force_pair_space = false);

/// Q orthogonal to phi, P orthogonal to phi and phi' (all L2).
std::vector<PairConstraint> orthogonality_constraints(const WaveProfile& wave);
/// H2-orthogonal to J Phi and Phi', L2-orthogonal to Phi.
std::vector<PairConstraint> z_constraints(const WaveProfile& wave);
/// H2-orthogonal to J Phi and Phi' (the symmetry directions).
std::vector<PairConstraint> symmetry_constraints(const WaveProfile& wave);

/// lambda_min(M) on the symmetry complement from one eigendecomposition of the
/// unpenalized pencil and the secular equation of the rank-one update.
class PenaltyCurve {
 public:
  explicit PenaltyCurve(const SecondVariation& sv);
  double operator()(double m) const;
  double q_block() const { return q_block_; }
  double p_block_unpenalized() const { return values_[0]; }

 private:
  Eigen::VectorXd values_;   // ascending
  Eigen::VectorXd weights_;  // squared components of the penalty direction
  double scale_ = 0.0;       // 2 h
  double q_block_ = 0.0;
};

struct Calibration {
  double penalty = 0.0;       // M
  double target = 0.0;        // delta / 2
  double lambda_min = 0.0;    // secular value at M
  double lambda_check = 0.0;  // direct pencil solve at M
};

/// Smallest M (1e-3 relative) with lambda_min(M) >= delta / 2 on the
/// symmetry complement.  Throws std::domain_error when unreachable.
Calibration calibrate_M(const SecondVariation& sv, double delta);

/// Minimum of [<G'' v, v> + 2 M (Phi, v)^2] / ||v||_H2^2 over n seeded random
/// band-limited v projected onto the symmetry complement.
double penalty_sample_min(const SecondVariation& sv, double penalty, int n_samples, std::uint64_t seed);

}  // namespace f4nls
