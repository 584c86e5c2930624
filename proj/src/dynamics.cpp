#include "f4nls/dynamics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numbers>
#include <ostream>

#include "f4nls/linalg.hpp"
#include "f4nls/linops.hpp"

namespace f4nls {

void IntegratorConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("integrator: dt must be positive");
  if (!(t_max >= dt)) throw std::invalid_argument("integrator: t_max must be >= dt");
  if (record_every < 1) throw std::invalid_argument("integrator: record_every must be >= 1");
}

double TrajectoryDiagnostics::max_relative_energy_drift() const {
  double worst = 0.0;
  for (double e : energy) worst = std::max(worst, std::abs(e - energy.front()) / std::abs(energy.front()));
  return worst;
}

double TrajectoryDiagnostics::max_relative_mass_drift() const {
  double worst = 0.0;
  for (double f : mass) worst = std::max(worst, std::abs(f - mass.front()) / std::abs(mass.front()));
  return worst;
}

SplitStepIntegrator::SplitStepIntegrator(GridPtr grid, double dt) : grid_(std::move(grid)), dt_(dt) {
  if (dt == 0.0 || !std::isfinite(dt)) throw std::invalid_argument("integrator: dt must be nonzero");
  const auto xi = grid_->frequencies();
  phase_.resize(xi.size());
  for (std::size_t k = 0; k < xi.size(); ++k) phase_[k] = std::polar(1.0, -dispersion_symbol(xi[k]) * dt_);
  work_.resize(xi.size());
}

void SplitStepIntegrator::nonlinear(ComplexField& u, double tau) const {
  for (auto& v : u.values) v *= std::polar(1.0, std::norm(v) * tau);
}

void SplitStepIntegrator::linear(ComplexField& u) const {
  grid_->forward(u.values, work_);
  for (std::size_t k = 0; k < work_.size(); ++k) work_[k] *= phase_[k];
  grid_->inverse(work_, u.values);
}

ComplexField SplitStepIntegrator::step(const ComplexField& u) const {
  require_same_grid(*grid_, *u.grid);
  ComplexField out = u;
  advance(out, 1);
  return out;
}

namespace {

long double discrete_mass(const std::vector<cplx>& v) {
  long double s = 0.0L;
  for (const auto& z : v) s += static_cast<long double>(z.real()) * z.real() + static_cast<long double>(z.imag()) * z.imag();
  return s;
}

}  // namespace

void SplitStepIntegrator::advance(ComplexField& u, long count) const {
  if (count <= 0) return;
  // Both sub-flows conserve the discrete mass exactly, but FFT and phase
  // roundoff are biased (~1e-17 per step); over 1e6 steps that bias shows up
  // in the Lyapunov functional.  Restoring the mass removes only roundoff.
  const long double reference = discrete_mass(u.values);
  auto restore = [&] {
    const long double now = discrete_mass(u.values);
    if (now > 0.0L && reference > 0.0L) {
      const double scale = static_cast<double>(std::sqrt(reference / now));
      for (auto& v : u.values) v *= scale;
    }
  };
  nonlinear(u, 0.5 * dt_);
  for (long i = 0; i < count; ++i) {
    linear(u);
    nonlinear(u, i + 1 < count ? dt_ : 0.5 * dt_);
    restore();
  }
}

ComplexField step(const ComplexField& u, double dt) { return SplitStepIntegrator(u.grid, dt).step(u); }

TrajectoryDiagnostics evolve(const ComplexField& u0, const IntegratorConfig& cfg, const TrajectoryObserver& observer) {
  cfg.validate();
  const double dt = cfg.reverse ? -cfg.dt : cfg.dt;
  const SplitStepIntegrator integ(u0.grid, dt);
  const long total = std::max(1L, std::lround(cfg.t_max / cfg.dt));
  TrajectoryDiagnostics diag;
  ComplexField u = u0;
  auto record = [&](long k) {
    const double m = max_abs(u);
    if (!(m <= 1e6))
      throw NumericalError("evolve: blow-up guard triggered (max|u| = " + std::to_string(m) +
                           " at t = " + std::to_string(k * dt) + ")");
    const double t = k * dt;
    const auto fv = functionals(u);
    diag.times.push_back(t);
    diag.energy.push_back(fv.energy);
    diag.mass.push_back(fv.mass);
    if (observer) observer(t, u, diag);
  };
  record(0);
  long done = 0;
  while (done < total) {
    const long chunk = std::min<long>(cfg.record_every, total - done);
    integ.advance(u, chunk);
    done += chunk;
    record(done);
  }
  diag.steps = total;
  diag.terminal = std::move(u);
  return diag;
}

double phase_rate(const std::vector<double>& times, const std::vector<double>& theta) {
  const std::size_t n = times.size();
  if (n < 2 || theta.size() != n) throw std::invalid_argument("phase_rate: need >= 2 matching samples");
  std::vector<double> unwrapped(n);
  unwrapped[0] = theta[0];
  for (std::size_t i = 1; i < n; ++i) {
    double d = std::remainder(theta[i] - theta[i - 1], 2.0 * std::numbers::pi);
    // A jump of close to pi between records is ambiguous.
    if (std::abs(d) > 0.9 * std::numbers::pi)
      throw NumericalError("phase_rate: unwrap failure (records too sparse or data too noisy)");
    unwrapped[i] = unwrapped[i - 1] + d;
  }
  double st = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    st += times[i];
    sy += unwrapped[i];
  }
  st /= n;
  sy /= n;
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    num += (times[i] - st) * (unwrapped[i] - sy);
    den += (times[i] - st) * (times[i] - st);
  }
  return -num / den;
}

void write_trajectory_csv(std::ostream& os, const TrajectoryDiagnostics& diag) {
  os << "t,E,F,V,d,theta,r\n";
  auto cell = [&](const std::vector<double>& v, std::size_t i) {
    os << ',';
    if (i < v.size()) os << v[i];
  };
  const auto old = os.precision(17);
  for (std::size_t i = 0; i < diag.times.size(); ++i) {
    os << diag.times[i];
    cell(diag.energy, i);
    cell(diag.mass, i);
    cell(diag.lyapunov, i);
    cell(diag.distance, i);
    cell(diag.theta, i);
    cell(diag.shift, i);
    os << '\n';
  }
  os.precision(old);
}

namespace {

constexpr char kMagic[8] = {'F', '4', 'N', 'L', 'S', 'F', 'L', 'D'};

template <class T>
void put_le(std::ostream& os, T value) {
  unsigned char b[sizeof(T)];
  std::memcpy(b, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
  os.write(reinterpret_cast<const char*>(b), sizeof(T));
}

template <class T>
T get_le(std::istream& is) {
  unsigned char b[sizeof(T)];
  if (!is.read(reinterpret_cast<char*>(b), sizeof(T))) throw std::runtime_error("field dump: truncated file");
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
  T value;
  std::memcpy(&value, b, sizeof(T));
  return value;
}

}  // namespace

void write_field(const std::string& path, const ComplexField& u) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  os.write(kMagic, sizeof(kMagic));
  put_le<std::uint32_t>(os, static_cast<std::uint32_t>(u.size()));
  put_le<double>(os, u.grid->half_length());
  for (const auto& v : u.values) {
    put_le<double>(os, v.real());
    put_le<double>(os, v.imag());
  }
  if (!os) throw std::runtime_error("write failed: " + path);
}

ComplexField read_field(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  char magic[8];
  if (!is.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw std::runtime_error("field dump: bad magic in " + path);
  const auto n = get_le<std::uint32_t>(is);
  const auto half_length = get_le<double>(is);
  ComplexField u(make_grid(half_length, static_cast<int>(n)));
  for (auto& v : u.values) {
    const double re = get_le<double>(is);
    const double im = get_le<double>(is);
    v = {re, im};
  }
  return u;
}

}  // namespace f4nls
