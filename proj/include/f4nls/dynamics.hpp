#pragma once

// Strang split-step integration of i u_t + u_xx - u_xxxx + |u|^2 u = 0.
// Both sub-flows are solved exactly: the nonlinear one is a pointwise phase
// rotation (|u| is invariant), the linear one a diagonal Fourier phase.

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "f4nls/grid.hpp"
#include "f4nls/wave.hpp"

namespace f4nls {

struct IntegratorConfig {
  double dt = 1e-3;
  double t_max = 1.0;
  int record_every = 100;
  bool reverse = false;  // integrate backwards in time (t -> -t)
  void validate() const;
};

struct TrajectoryDiagnostics {
  std::vector<double> times;
  std::vector<double> energy;
  std::vector<double> mass;
  // Filled by observers (orbit module); may stay empty.
  std::vector<double> lyapunov;
  std::vector<double> distance;
  std::vector<double> theta;
  std::vector<double> shift;
  ComplexField terminal;
  long steps = 0;

  double max_relative_energy_drift() const;
  double max_relative_mass_drift() const;
};

/// Called at every recorded time (t = 0 included) with the current state.
using TrajectoryObserver = std::function<void(double t, const ComplexField& u, TrajectoryDiagnostics& diag)>;

class SplitStepIntegrator {
 public:
  /// dt may be negative for backward integration.
  SplitStepIntegrator(GridPtr grid, double dt);

  double dt() const { return dt_; }
  /// One Strang step N(dt/2) L(dt) N(dt/2).
  ComplexField step(const ComplexField& u) const;
  /// `count` consecutive steps, merging adjacent nonlinear half steps.
  void advance(ComplexField& u, long count) const;

 private:
  void nonlinear(ComplexField& u, double tau) const;
  void linear(ComplexField& u) const;

  GridPtr grid_;
  double dt_;
  std::vector<cplx> phase_;  // exp(-i (xi^2 + xi^4) dt)
  mutable std::vector<cplx> work_;
};

/// Convenience wrapper for a single step.
ComplexField step(const ComplexField& u, double dt);

/// Integrate to t_max, recording E and F every `record_every` steps and at
/// the end.  Throws NumericalError when max|u| exceeds 1e6.
TrajectoryDiagnostics evolve(const ComplexField& u0, const IntegratorConfig& cfg,
                             const TrajectoryObserver& observer = {});

/// Frequency of a standing wave from the fitted rotation angles theta(t)
/// (u ~ e^{-i theta} phi(. - r)): minus the least-squares slope of the
/// unwrapped angles.
double phase_rate(const std::vector<double>& times, const std::vector<double>& theta);

/// CSV rows t,E,F,V,d,theta,r (empty cells for unrecorded series).
void write_trajectory_csv(std::ostream& os, const TrajectoryDiagnostics& diag);

/// Binary field dump: "F4NLSFLD", uint32 N, float64 L, then N complex values
/// as interleaved float64 (re, im), all little-endian.
void write_field(const std::string& path, const ComplexField& u);
ComplexField read_field(const std::string& path);

}  // namespace f4nls
