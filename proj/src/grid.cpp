#include "f4nls/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <string>

namespace f4nls {

namespace {

// The FFTW planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_complex* as_fftw(const cplx* p) {
  return reinterpret_cast<fftw_complex*>(const_cast<cplx*>(p));
}

}  // namespace

Grid::Grid(double half_length, int n_points)
    : half_length_(half_length), n_(n_points), spacing_(2.0 * half_length / n_points) {
  nodes_.resize(n_);
  freqs_.resize(n_);
  const double dk = std::numbers::pi / half_length_;
  for (int j = 0; j < n_; ++j) {
    nodes_[j] = -half_length_ + j * spacing_;
    const int k = j < n_ / 2 ? j : j - n_;
    freqs_[j] = dk * k;
  }
  std::vector<cplx> a(n_), b(n_);
  std::lock_guard lock(planner_mutex());
  forward_plan_ = fftw_plan_dft_1d(n_, as_fftw(a.data()), as_fftw(b.data()), FFTW_FORWARD,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
  inverse_plan_ = fftw_plan_dft_1d(n_, as_fftw(a.data()), as_fftw(b.data()), FFTW_BACKWARD,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
}

Grid::~Grid() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
}

double Grid::frequency_step() const { return std::numbers::pi / half_length_; }
double Grid::max_frequency() const { return frequency_step() * (n_ / 2); }

void Grid::forward(std::span<const cplx> in, std::span<cplx> out) const {
  fftw_execute_dft(static_cast<fftw_plan>(forward_plan_), as_fftw(in.data()), as_fftw(out.data()));
}

void Grid::inverse(std::span<const cplx> in, std::span<cplx> out) const {
  fftw_execute_dft(static_cast<fftw_plan>(inverse_plan_), as_fftw(in.data()), as_fftw(out.data()));
  const double s = 1.0 / n_;
  for (auto& v : out) v *= s;
}

GridPtr make_grid(double half_length, int n_points) {
  if (!(half_length > 0.0) || !std::isfinite(half_length))
    throw std::invalid_argument("grid half length must be positive");
  if (n_points % 2 != 0) throw std::invalid_argument("grid size must be even");
  if (n_points < 16) throw std::invalid_argument("grid size must be at least 16");
  return GridPtr(new Grid(half_length, n_points));
}

void require_same_grid(const Grid& a, const Grid& b) {
  if (!a.same_as(b))
    throw std::invalid_argument("grid mismatch: (L=" + std::to_string(a.half_length()) +
                                ", N=" + std::to_string(a.size()) + ") vs (L=" +
                                std::to_string(b.half_length()) + ", N=" +
                                std::to_string(b.size()) + ")");
}

RealField sample(const GridPtr& grid, double (*fn)(double)) { return sample_with(grid, fn); }

ComplexField to_complex(const RealField& f) {
  ComplexField u(f.grid);
  for (std::size_t j = 0; j < f.size(); ++j) u.values[j] = f.values[j];
  return u;
}

ComplexField from_pair(const RealField& p, const RealField& q) {
  require_same_grid(*p.grid, *q.grid);
  ComplexField u(p.grid);
  for (std::size_t j = 0; j < p.size(); ++j) u.values[j] = {p.values[j], q.values[j]};
  return u;
}

RealField real_part(const ComplexField& u) {
  RealField f(u.grid);
  for (std::size_t j = 0; j < u.size(); ++j) f.values[j] = u.values[j].real();
  return f;
}

RealField imag_part(const ComplexField& u) {
  RealField f(u.grid);
  for (std::size_t j = 0; j < u.size(); ++j) f.values[j] = u.values[j].imag();
  return f;
}

std::vector<cplx> spectrum(const ComplexField& u) {
  std::vector<cplx> out(u.size());
  u.grid->forward(u.values, out);
  return out;
}

std::vector<cplx> spectrum(const RealField& f) { return spectrum(to_complex(f)); }

ComplexField from_spectrum(const GridPtr& grid, std::vector<cplx> coeffs) {
  ComplexField u(grid);
  grid->inverse(coeffs, u.values);
  return u;
}

ComplexField apply_multiplier(const ComplexField& u, std::span<const double> symbol) {
  auto c = spectrum(u);
  for (std::size_t k = 0; k < c.size(); ++k) c[k] *= symbol[k];
  return from_spectrum(u.grid, std::move(c));
}

RealField apply_multiplier(const RealField& f, std::span<const double> symbol) {
  return real_part(apply_multiplier(to_complex(f), symbol));
}

namespace {

std::vector<cplx> derivative_symbol(const Grid& g, int order) {
  if (order < 1 || order > 4) throw std::invalid_argument("derivative order must be 1..4");
  const auto xi = g.frequencies();
  std::vector<cplx> s(xi.size());
  const cplx i{0.0, 1.0};
  for (std::size_t k = 0; k < xi.size(); ++k) s[k] = std::pow(i * xi[k], order);
  // (i xi)^n leaves tiny imaginary parts for even n; clean them.
  if (order % 2 == 0)
    for (auto& v : s) v = {v.real(), 0.0};
  else
    s[g.size() / 2] = 0.0;
  return s;
}

}  // namespace

ComplexField derivative(const ComplexField& u, int order) {
  const auto s = derivative_symbol(*u.grid, order);
  auto c = spectrum(u);
  for (std::size_t k = 0; k < c.size(); ++k) c[k] *= s[k];
  return from_spectrum(u.grid, std::move(c));
}

RealField derivative(const RealField& f, int order) {
  return real_part(derivative(to_complex(f), order));
}

double inner(const ComplexField& u, const ComplexField& v, InnerProductKind kind) {
  require_same_grid(*u.grid, *v.grid);
  const double h = u.grid->spacing();
  if (kind == InnerProductKind::L2) {
    double s = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j)
      s += u.values[j].real() * v.values[j].real() + u.values[j].imag() * v.values[j].imag();
    return h * s;
  }
  const auto a = spectrum(u);
  const auto b = spectrum(v);
  const auto xi = u.grid->frequencies();
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += h2_weight(xi[k]) * std::real(a[k] * std::conj(b[k]));
  return h * s / u.grid->size();
}

double inner(const RealField& f, const RealField& g, InnerProductKind kind) {
  require_same_grid(*f.grid, *g.grid);
  if (kind == InnerProductKind::L2) {
    double s = 0.0;
    for (std::size_t j = 0; j < f.size(); ++j) s += f.values[j] * g.values[j];
    return f.grid->spacing() * s;
  }
  return inner(to_complex(f), to_complex(g), kind);
}

double norm(const RealField& f, InnerProductKind kind) { return std::sqrt(inner(f, f, kind)); }
double norm(const ComplexField& u, InnerProductKind kind) { return std::sqrt(inner(u, u, kind)); }

double max_abs(const RealField& f) {
  double m = 0.0;
  for (double v : f.values) m = std::max(m, std::abs(v));
  return m;
}

double max_abs(const ComplexField& u) {
  double m = 0.0;
  for (const auto& v : u.values) m = std::max(m, std::abs(v));
  return m;
}

ComplexField translate(const ComplexField& u, double r) {
  if (r == 0.0) return u;
  auto c = spectrum(u);
  const auto xi = u.grid->frequencies();
  for (std::size_t k = 0; k < c.size(); ++k) c[k] *= std::polar(1.0, -xi[k] * r);
  return from_spectrum(u.grid, std::move(c));
}

RealField translate(const RealField& f, double r) { return real_part(translate(to_complex(f), r)); }

RealField random_smooth_field(const GridPtr& grid, double cutoff, double width, std::mt19937_64& gen) {
  std::normal_distribution<double> normal;
  const auto xi = grid->frequencies();
  const int n = grid->size();
  std::vector<cplx> c(n, 0.0);
  // Fill k >= 0 and mirror so the field is real.
  for (int k = 1; k < n / 2; ++k) {
    if (xi[k] > cutoff) break;
    const cplx z{normal(gen), normal(gen)};
    c[k] = z;
    c[n - k] = std::conj(z);
  }
  c[0] = normal(gen);
  RealField f = real_part(from_spectrum(grid, std::move(c)));
  const auto x = grid->nodes();
  for (int j = 0; j < n; ++j) f[j] *= std::exp(-0.5 * x[j] * x[j] / (width * width));
  return f;
}

ComplexField rotate(const ComplexField& u, double theta) {
  ComplexField out = u;
  const cplx phase = std::polar(1.0, -theta);
  for (auto& v : out.values) v *= phase;
  return out;
}

}  // namespace f4nls
