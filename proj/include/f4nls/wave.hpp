#pragma once

// Explicit standing-wave profile phi(x) = a sech^2(b x) of
//   phi'''' - phi'' + alpha phi - phi^3 = 0,   alpha = 4/25,
// and the conserved functionals of the fourth-order cubic NLS
//   i u_t + u_xx - u_xxxx + |u|^2 u = 0.

#include <cmath>
#include <utility>

#include "f4nls/grid.hpp"

namespace f4nls {

namespace wave_constants {
inline const double amplitude = std::sqrt(3.0 / 10.0);
inline const double width = std::sqrt(1.0 / 20.0);
inline constexpr double frequency = 4.0 / 25.0;
}  // namespace wave_constants

struct WaveProfile {
  double amplitude = wave_constants::amplitude;
  double width = wave_constants::width;
  double frequency = wave_constants::frequency;
  RealField samples;     // phi
  RealField derivative;  // phi', sampled from the closed form

  const GridPtr& grid() const { return samples.grid; }
  double operator()(double x) const;
  /// The wave as a pair (phi, 0).
  ComplexField pair() const { return to_complex(samples); }
};

WaveProfile profile(const GridPtr& grid);

/// max |f'''' - f'' + alpha f - f^3| with spectral derivatives.
double ode_residual(const RealField& f, double alpha);
inline double ode_residual(const WaveProfile& p) { return ode_residual(p.samples, p.frequency); }

struct FunctionalValue {
  double energy = 0.0;  // E = 1/2 int |u_xx|^2 + |u_x|^2 - 1/2 |u|^4
  double mass = 0.0;    // F = 1/2 int |u|^2
  double g = 0.0;       // G = E + alpha F
};

FunctionalValue functionals(const ComplexField& u, double alpha = wave_constants::frequency);
FunctionalValue functionals(const RealField& p, const RealField& q,
                            double alpha = wave_constants::frequency);

/// L2 gradient of G: (d^4 - d^2 + alpha - |u|^2) u, componentwise on (P, Q).
ComplexField gradient_G(const ComplexField& u, double alpha = wave_constants::frequency);
std::pair<RealField, RealField> gradient_G(const RealField& p, const RealField& q,
                                           double alpha = wave_constants::frequency);

}  // namespace f4nls
