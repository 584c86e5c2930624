#pragma once

// Periodic spectral grid on [-L, L) and sampled fields.
//
// FFT convention (used by every multiplier in the library):
//   forward  f^_k = sum_j f_j exp(-2 pi i j k / N)        (unnormalized)
//   inverse  f_j  = (1/N) sum_k f^_k exp(+2 pi i j k / N)
// Spectral arrays are kept in FFT order, k = 0, 1, ..., N/2-1, -N/2, ..., -1,
// with angular frequency xi_k = pi k / L.  The node offset x_0 = -L only
// contributes a phase that cancels in every multiplier, so derivatives,
// translations and Sobolev weights act directly on these coefficients.

#include <complex>
#include <cstddef>
#include <memory>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

namespace f4nls {

using cplx = std::complex<double>;

class Grid;
using GridPtr = std::shared_ptr<const Grid>;

enum class InnerProductKind { L2, H2 };

/// Sobolev weight used by the H2 inner product: 1 + xi^2 + xi^4.
inline double h2_weight(double xi) {
  const double s = xi * xi;
  return 1.0 + s + s * s;
}

class Grid {
 public:
  ~Grid();
  Grid(const Grid&) = delete;
  Grid& operator=(const Grid&) = delete;

  double half_length() const { return half_length_; }
  int size() const { return n_; }
  double spacing() const { return spacing_; }
  /// pi / L, the spacing of the discrete frequencies.
  double frequency_step() const;
  double max_frequency() const;

  std::span<const double> nodes() const { return nodes_; }
  /// Angular frequencies in FFT order.
  std::span<const double> frequencies() const { return freqs_; }

  void forward(std::span<const cplx> in, std::span<cplx> out) const;
  void inverse(std::span<const cplx> in, std::span<cplx> out) const;

  bool same_as(const Grid& other) const {
    return n_ == other.n_ && half_length_ == other.half_length_;
  }

 private:
  friend GridPtr make_grid(double half_length, int n_points);
  Grid(double half_length, int n_points);

  double half_length_;
  int n_;
  double spacing_;
  std::vector<double> nodes_;
  std::vector<double> freqs_;
  void* forward_plan_ = nullptr;
  void* inverse_plan_ = nullptr;
};

/// Uniform periodic grid on [-L, L) with N nodes x_j = -L + j h.
/// Requires L > 0, N even and N >= 16.
GridPtr make_grid(double half_length, int n_points);

void require_same_grid(const Grid& a, const Grid& b);

template <class T>
struct BasicField {
  GridPtr grid;
  std::vector<T> values;

  BasicField() = default;
  explicit BasicField(GridPtr g) : grid(std::move(g)), values(grid->size(), T{}) {}
  BasicField(GridPtr g, std::vector<T> v) : grid(std::move(g)), values(std::move(v)) {
    if (static_cast<int>(values.size()) != grid->size())
      throw std::invalid_argument("field length does not match grid size");
  }

  std::size_t size() const { return values.size(); }
  T& operator[](std::size_t i) { return values[i]; }
  const T& operator[](std::size_t i) const { return values[i]; }

  BasicField& operator+=(const BasicField& o) {
    require_same_grid(*grid, *o.grid);
    for (std::size_t i = 0; i < values.size(); ++i) values[i] += o.values[i];
    return *this;
  }
  BasicField& operator-=(const BasicField& o) {
    require_same_grid(*grid, *o.grid);
    for (std::size_t i = 0; i < values.size(); ++i) values[i] -= o.values[i];
    return *this;
  }
  BasicField& operator*=(T s) {
    for (auto& v : values) v *= s;
    return *this;
  }
  friend BasicField operator+(BasicField a, const BasicField& b) { return a += b; }
  friend BasicField operator-(BasicField a, const BasicField& b) { return a -= b; }
  friend BasicField operator*(BasicField a, T s) { return a *= s; }
  friend BasicField operator*(T s, BasicField a) { return a *= s; }
};

using RealField = BasicField<double>;
/// Complex fields double as real pairs (P, Q) through u = P + iQ.
using ComplexField = BasicField<cplx>;

RealField sample(const GridPtr& grid, double (*fn)(double));
template <class Fn>
RealField sample_with(const GridPtr& grid, Fn&& fn) {
  RealField f(grid);
  const auto x = grid->nodes();
  for (int j = 0; j < grid->size(); ++j) f.values[j] = fn(x[j]);
  return f;
}

ComplexField to_complex(const RealField& f);
ComplexField from_pair(const RealField& p, const RealField& q);
RealField real_part(const ComplexField& u);
RealField imag_part(const ComplexField& u);

/// Forward transform (unnormalized, FFT order).
std::vector<cplx> spectrum(const RealField& f);
std::vector<cplx> spectrum(const ComplexField& u);
ComplexField from_spectrum(const GridPtr& grid, std::vector<cplx> coeffs);

/// Multiply the spectrum by a real symbol given in FFT order.
RealField apply_multiplier(const RealField& f, std::span<const double> symbol);
ComplexField apply_multiplier(const ComplexField& u, std::span<const double> symbol);

/// Spectral derivative of order 1, 2, 3 or 4: multiplication by (i xi)^order.
/// Odd orders zero the Nyquist mode so that real fields stay real.
RealField derivative(const RealField& f, int order);
ComplexField derivative(const ComplexField& u, int order);

/// Periodic trapezoid quadrature; H2 uses the Fourier weight 1 + xi^2 + xi^4.
/// For complex fields this is the real inner product Re int u conj(v) of the
/// pair space L2 x L2 (resp. H2 x H2).
double inner(const RealField& f, const RealField& g, InnerProductKind kind);
double inner(const ComplexField& u, const ComplexField& v, InnerProductKind kind);
double norm(const RealField& f, InnerProductKind kind);
double norm(const ComplexField& u, InnerProductKind kind);
double max_abs(const RealField& f);
double max_abs(const ComplexField& u);

/// f(. - r) by the Fourier phase shift exp(-i xi r).
RealField translate(const RealField& f, double r);
ComplexField translate(const ComplexField& u, double r);

/// Seeded smooth random field: Gaussian Fourier coefficients on |xi| <= cutoff,
/// localized by the window exp(-x^2 / (2 width^2)).  Unnormalized.
RealField random_smooth_field(const GridPtr& grid, double cutoff, double width, std::mt19937_64& gen);

/// Rotation e^{-i theta} u, i.e. (P, Q) -> (cos P + sin Q, -sin P + cos Q).
ComplexField rotate(const ComplexField& u, double theta);

}  // namespace f4nls
