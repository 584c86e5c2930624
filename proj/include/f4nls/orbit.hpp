#pragma once

// Distance to the orbit {e^{-i theta} phi(. - r)} in H2 x H2, the Lyapunov
// functional V = G - G(Phi) + M (F - F(Phi))^2, and perturbed-wave runs.

#include <cstdint>
#include <string>
#include <vector>

#include "f4nls/dynamics.hpp"
#include "f4nls/grid.hpp"
#include "f4nls/wave.hpp"

namespace f4nls {

struct OrbitFit {
  double theta = 0.0;
  double shift = 0.0;     // r
  double distance = 0.0;  // ||v - e^{-i theta} phi(. - r)||_H2
  double orth_rotation = 0.0;     // (v - fit, J fit)_H2
  double orth_translation = 0.0;  // (v - fit, d/dx fit)_H2
  bool converged = true;
  int iterations = 0;
};

class OrbitFitter {
 public:
  explicit OrbitFitter(const WaveProfile& wave);
  /// Closed-form rotation for each shift; coarse scan over grid shifts by one
  /// inverse FFT, then Newton refinement of |c(r)|^2 on the continuous shift.
  OrbitFit fit(const ComplexField& v) const;
  double distance(const ComplexField& v) const { return fit(v).distance; }
  /// e^{-i theta} phi(. - r).
  ComplexField orbit_point(double theta, double shift) const;

 private:
  WaveProfile wave_;
  std::vector<cplx> weighted_conj_;  // w_k conj(phi^_k)
};

struct LyapunovValue {
  double value = 0.0;     // V
  double penalty = 0.0;   // M
  double g_excess = 0.0;  // G(v) - q1
  double mass_term = 0.0; // M (F(v) - q2)^2
};

class LyapunovFunctional {
 public:
  LyapunovFunctional(const WaveProfile& wave, double penalty);
  LyapunovValue operator()(const ComplexField& v) const;
  /// L2 gradient G'(v) + 2 M (F(v) - q2) v.
  ComplexField gradient(const ComplexField& v) const;
  double q1() const { return q1_; }
  double q2() const { return q2_; }
  double penalty() const { return m_; }

 private:
  double m_, q1_, q2_;
};

struct QuadraticCheck {
  double c = 0.0;                 // min V / d^2 over the samples
  double rho = 0.0;
  double orbit_radius = 0.0;      // R = ||phi||_H2^2 / 2
  double max_symmetry_pairing = 0.0;
  int samples = 0;
  int excluded = 0;               // on-orbit samples (d ~ 0)
  int violations = 0;             // V <= 0
  int first_violation = -1;
};

/// Seeded random smooth perturbations v = Phi + z with ||z||_H2 in
/// (0.2 rho, rho); ratios V(v) / d(v)^2 and the symmetry pairings
/// <V'(v), J v>, <V'(v), v_x>.  Extra directions (unit H2) are appended to
/// the random set at amplitudes rho / 4 and rho / 2.
QuadraticCheck lyapunov_quadratic_check(const WaveProfile& wave, double penalty, double rho, int n_samples,
                                        std::uint64_t seed, const std::vector<ComplexField>& extra = {});

enum class PerturbationFamily { Even, Odd, RandomBandlimited, MassPreserving };
PerturbationFamily parse_family(const std::string& name);
std::string family_name(PerturbationFamily f);

/// Unit-H2 perturbation direction of the family (seeded for the random ones).
ComplexField perturbation(PerturbationFamily family, const GridPtr& grid, std::uint64_t seed);
/// Initial datum Phi + delta z (rescaled to F = F(Phi) for the mass-preserving family).
ComplexField perturbed_wave(const WaveProfile& wave, PerturbationFamily family, double delta, std::uint64_t seed);

struct StabilityRun {
  double delta = 0.0;
  double dt = 0.0;
  double sup_distance = 0.0;
  double v0 = 0.0;
  double v_drift = 0.0;     // max |V(t) - V0| / |V0|
  double energy_drift = 0.0;
  double mass_drift = 0.0;
  double worst_chain = 0.0; // max c d^2 / V0
  bool c_bound_ok = true;   // c d(t)^2 <= V0 at every record
  std::vector<double> times, distances;
};

struct StabilitySweep {
  std::string family;
  std::vector<StabilityRun> runs;
  double spearman = 0.0;  // rank correlation of sup-d with delta
};

struct StabilityConfig {
  IntegratorConfig integrator{1e-3, 100.0, 100};
  double penalty = 1.0;  // M
  double c = 0.0;        // certified quadratic constant
  std::uint64_t seed = 1;
  /// dt is reduced to min(dt, dt_ref sqrt(delta / delta_ref)) so the
  /// splitting error in V (relative size ~ dt^2 / delta) stays in budget.
  double dt_ref = 4e-5;
  double delta_ref = 1e-3;
};

/// Integrator aborts (blow-up guard) propagate as NumericalError.
StabilitySweep stability_experiment(const WaveProfile& wave, PerturbationFamily family,
                                    const std::vector<double>& amplitudes, const StabilityConfig& cfg);

double spearman(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace f4nls
