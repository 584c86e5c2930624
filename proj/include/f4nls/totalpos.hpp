#pragma once

// Frequency-side machinery: the sech^2 transform rho, PF(2) / log-concavity
// checks, and the compact family
//   (S_theta g)(xi) = 1 / (2 pi w_theta(xi)) int K(xi - eta) g(eta) d eta,
//   w_theta = m(xi) + alpha + theta,   K = transform of the potential,
// whose eigenvalue-one crossings encode eigenvalues -theta of L1 / L2.
//
// Transform convention: f^(xi) = int f(x) e^{-i xi x} dx, so that
// (f g)^ = (1 / 2 pi) f^ * g^.  For the rescaled wave 3 phi^2 = (sqrt 3 phi)^2
// the potential kernel is just 3 (phi^2)^; no normalization is imposed.

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "f4nls/linops.hpp"
#include "f4nls/wave.hpp"

namespace f4nls {

/// pi xi / sinh(pi xi / 2), the transform of sech^2; rho(0) = 2.
double rho(double xi);

/// Uniform symmetric frequency grid xi_i = (i - (M - 1) / 2) * step on [-Xi, Xi].
struct FrequencyGrid {
  double half_width = 40.0;
  int n_points = 1600;
  double step() const { return 2.0 * half_width / n_points; }
  double node(int i) const { return (i - 0.5 * (n_points - 1)) * step(); }
};

/// Samples of an even kernel at the offsets k * step, k = -K..K.
struct KernelFn {
  double step = 0.0;
  int half_count = 0;
  std::vector<double> values;  // index k + half_count
  double at_offset(int k) const { return values[static_cast<std::size_t>(k + half_count)]; }
  double offset(int k) const { return k * step; }
};

KernelFn sample_kernel(const std::function<double(double)>& fn, double step, int half_count);

/// phi^(xi) = (a / b) rho(xi / b).
double profile_transform(const WaveProfile& wave, double xi);
/// (phi^2)^ in closed form, used as a test oracle only.
double squared_profile_transform_exact(const WaveProfile& wave, double xi);

/// coefficient * (phi^2)^ sampled at the offsets of `grid`, computed as the
/// discrete self-convolution (1 / 2 pi) sum phi^(xi - eta_k) phi^(eta_k) step.
KernelFn potential_kernel(const WaveProfile& wave, const FrequencyGrid& grid, double coefficient);
KernelFn potential_kernel(OperatorKind which, const WaveProfile& wave, const FrequencyGrid& grid);

struct Pf2Report {
  bool pass = true;
  double max_second_log_derivative = 0.0;  // must stay < 0
  int nodes_checked = 0;
  int quadruples_checked = 0;
  double min_determinant = 0.0;            // relative (divided by the product)
  std::string first_violation;             // empty when pass
};

/// Log-concavity of h sampled on x_k = k * step (k = -K..K) via second
/// differences of log h, plus `n_quadruples` seeded 2x2 minor spot-checks
/// h(x1 - y1) h(x2 - y2) - h(x1 - y2) h(x2 - y1) >= 0 (x1 < x2, y1 < y2).
Pf2Report pf2_check(const KernelFn& h, int n_quadruples = 1000, std::uint64_t seed = 20240229);

struct SThetaOperator {
  double theta = 0.0;
  FrequencyGrid grid;
  std::vector<double> weight;  // w_theta at the nodes
  Eigen::MatrixXd symmetric;   // K(xi_i - xi_j) step / (2 pi sqrt(w_i w_j))
  Eigen::MatrixXd plain() const;  // K(xi_i - xi_j) step / (2 pi w_i)
};

SThetaOperator build_stheta(const KernelFn& kernel, double theta, const FrequencyGrid& grid,
                            double alpha = wave_constants::frequency);

struct SThetaSpectrum {
  std::vector<double> values;             // decreasing |lambda|
  std::vector<Eigen::VectorXd> vectors;   // unit Euclidean, symmetric-form eigenvectors
  std::vector<bool> even;                 // parity in xi
};

/// The `count` eigenvalues of largest modulus of the symmetric form.
SThetaSpectrum stheta_spectrum(const SThetaOperator& op, int count, bool vectors = true);

struct EigCurve {
  std::vector<double> theta;
  std::vector<std::vector<double>> lambda;  // lambda[i][t], decreasing |.| in i
  std::vector<bool> ground_one_signed;      // per theta
};

EigCurve eig_curve(const KernelFn& kernel, const std::vector<double>& thetas, const FrequencyGrid& grid,
                   int count = 3, double alpha = wave_constants::frequency);

/// theta* > 0 with lambda_0(theta*) = 1 (bisection); nullopt when
/// lambda_0(0) <= 1.
std::optional<double> crossing_theta(const KernelFn& kernel, const FrequencyGrid& grid,
                                     double tol = 1e-10, double alpha = wave_constants::frequency);

/// Eigenvalues of the even eigenvectors at theta = 0, ordered by modulus.
std::vector<double> even_eigenvalues(const KernelFn& kernel, const FrequencyGrid& grid, int count,
                                     double alpha = wave_constants::frequency);

}  // namespace f4nls
