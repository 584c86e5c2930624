#include "f4nls/wave.hpp"

#include <algorithm>

namespace f4nls {

double WaveProfile::operator()(double x) const {
  const double s = 1.0 / std::cosh(width * x);
  return amplitude * s * s;
}

WaveProfile profile(const GridPtr& grid) {
  WaveProfile p;
  p.samples = sample_with(grid, [&](double x) { return p(x); });
  p.derivative = sample_with(grid, [&](double x) {
    const double s = 1.0 / std::cosh(p.width * x);
    return -2.0 * p.amplitude * p.width * s * s * std::tanh(p.width * x);
  });
  return p;
}

double ode_residual(const RealField& f, double alpha) {
  const RealField d2 = derivative(f, 2);
  const RealField d4 = derivative(f, 4);
  double worst = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) {
    const double v = f[j];
    worst = std::max(worst, std::abs(d4[j] - d2[j] + alpha * v - v * v * v));
  }
  return worst;
}

FunctionalValue functionals(const ComplexField& u, double alpha) {
  const Grid& g = *u.grid;
  const auto c = spectrum(u);
  const auto xi = g.frequencies();
  // Quadratic parts on the Fourier side so that the energy is exactly the
  // potential of gradient_G (same symbols, Nyquist included).
  double kinetic = 0.0, mass = 0.0;
  for (std::size_t k = 0; k < c.size(); ++k) {
    const double s = xi[k] * xi[k];
    const double p = std::norm(c[k]);
    kinetic += (s * s + s) * p;
    mass += p;
  }
  const double h = g.spacing();
  kinetic *= h / g.size();
  mass *= h / g.size();
  double quartic = 0.0;
  for (const auto& v : u.values) {
    const double a = std::norm(v);
    quartic += a * a;
  }
  quartic *= h;
  FunctionalValue out;
  out.energy = 0.5 * (kinetic - 0.5 * quartic);
  out.mass = 0.5 * mass;
  out.g = out.energy + alpha * out.mass;
  return out;
}

FunctionalValue functionals(const RealField& p, const RealField& q, double alpha) {
  return functionals(from_pair(p, q), alpha);
}

ComplexField gradient_G(const ComplexField& u, double alpha) {
  const ComplexField d2 = derivative(u, 2);
  const ComplexField d4 = derivative(u, 4);
  ComplexField out(u.grid);
  for (std::size_t j = 0; j < u.size(); ++j)
    out[j] = d4[j] - d2[j] + (alpha - std::norm(u[j])) * u[j];
  return out;
}

std::pair<RealField, RealField> gradient_G(const RealField& p, const RealField& q, double alpha) {
  const ComplexField g = gradient_G(from_pair(p, q), alpha);
  return {real_part(g), imag_part(g)};
}

}  // namespace f4nls
