#include "f4nls/totalpos.hpp"

#include <boost/math/tools/toms748_solve.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

namespace f4nls {

double rho(double xi) {
  const double t = 0.5 * std::numbers::pi * xi;
  if (std::abs(t) < 1e-4) {
    // t / sinh t = 1 - t^2/6 + 7 t^4/360
    const double t2 = t * t;
    return 2.0 * (1.0 - t2 / 6.0 + 7.0 * t2 * t2 / 360.0);
  }
  return 2.0 * t / std::sinh(t);
}

double profile_transform(const WaveProfile& wave, double xi) {
  return wave.amplitude / wave.width * rho(xi / wave.width);
}

double squared_profile_transform_exact(const WaveProfile& wave, double xi) {
  const double s = xi / wave.width;
  return wave.amplitude * wave.amplitude / wave.width * rho(s) * (s * s + 4.0) / 6.0;
}

KernelFn sample_kernel(const std::function<double(double)>& fn, double step, int half_count) {
  KernelFn k;
  k.step = step;
  k.half_count = half_count;
  k.values.resize(2 * static_cast<std::size_t>(half_count) + 1);
  for (int i = -half_count; i <= half_count; ++i) k.values[i + half_count] = fn(i * step);
  return k;
}

KernelFn potential_kernel(const WaveProfile& wave, const FrequencyGrid& grid, double coefficient) {
  KernelFn k;
  k.step = grid.step();
  k.half_count = grid.n_points - 1;
  // phi^ decays like exp(-pi |xi| / 2b); 7 frequency units of padding leave a
  // relative truncation error far below roundoff.
  const int pad = static_cast<int>(std::ceil(7.0 / k.step));
  const int reach = k.half_count + pad;
  std::vector<double> base(2 * static_cast<std::size_t>(reach) + 1);
  for (int j = -reach; j <= reach; ++j) base[j + reach] = profile_transform(wave, j * k.step);
  const double scale = coefficient * k.step / (2.0 * std::numbers::pi);
  k.values.assign(2 * static_cast<std::size_t>(k.half_count) + 1, 0.0);
  for (int n = 0; n <= k.half_count; ++n) {
    double s = 0.0;
    for (int j = -reach; j <= reach; ++j) {
      const int m = n - j;
      if (m < -reach || m > reach) continue;
      s += base[m + reach] * base[j + reach];
    }
    k.values[k.half_count + n] = scale * s;
    k.values[k.half_count - n] = scale * s;
  }
  return k;
}

KernelFn potential_kernel(OperatorKind which, const WaveProfile& wave, const FrequencyGrid& grid) {
  return potential_kernel(wave, grid, which == OperatorKind::L1 ? 3.0 : 1.0);
}

Pf2Report pf2_check(const KernelFn& h, int n_quadruples, std::uint64_t seed) {
  Pf2Report rep;
  const int kk = h.half_count;
  const int n = 2 * kk + 1;
  std::vector<double> lg(n);
  for (int i = 0; i < n; ++i) {
    if (!(h.values[i] > 0.0)) {
      rep.pass = false;
      std::ostringstream os;
      os << "non-positive sample h(" << h.offset(i - kk) << ") = " << h.values[i];
      rep.first_violation = os.str();
      return rep;
    }
    lg[i] = std::log(h.values[i]);
  }
  const double inv = 1.0 / (h.step * h.step);
  rep.max_second_log_derivative = -std::numeric_limits<double>::infinity();
  auto record = [&](int i, double d2) {
    ++rep.nodes_checked;
    rep.max_second_log_derivative = std::max(rep.max_second_log_derivative, d2);
    if (!(d2 < 0.0) && rep.pass) {
      rep.pass = false;
      std::ostringstream os;
      os << "(log h)'' = " << d2 << " >= 0 at x = " << h.offset(i - kk);
      rep.first_violation = os.str();
    }
  };
  if (n >= 4) {
    // One-sided second-order stencils at the two ends, central inside.
    record(0, (2 * lg[0] - 5 * lg[1] + 4 * lg[2] - lg[3]) * inv);
    for (int i = 1; i + 1 < n; ++i) record(i, (lg[i - 1] - 2 * lg[i] + lg[i + 1]) * inv);
    record(n - 1, (2 * lg[n - 1] - 5 * lg[n - 2] + 4 * lg[n - 3] - lg[n - 4]) * inv);
  }

  std::mt19937_64 gen(seed);
  std::uniform_int_distribution<int> pick(0, kk);
  rep.min_determinant = std::numeric_limits<double>::infinity();
  for (int q = 0; q < n_quadruples; ++q) {
    int x1 = pick(gen), x2 = pick(gen), y1 = pick(gen), y2 = pick(gen);
    while (x1 == x2) x2 = pick(gen);
    while (y1 == y2) y2 = pick(gen);
    if (x1 > x2) std::swap(x1, x2);
    if (y1 > y2) std::swap(y1, y2);
    auto at = [&](int d) { return lg[d + kk]; };
    // In the log domain: det / (h(x1-y2) h(x2-y1)) = exp(s) - 1.
    const double s = at(x1 - y1) + at(x2 - y2) - at(x1 - y2) - at(x2 - y1);
    const double rel = std::expm1(s);
    ++rep.quadruples_checked;
    rep.min_determinant = std::min(rep.min_determinant, rel);
    if (rel < -1e-12 && rep.pass) {
      rep.pass = false;
      std::ostringstream os;
      os << "2x2 minor " << rel << " < 0 at quadruple #" << q << " (x=" << h.offset(x1) << ","
         << h.offset(x2) << "; y=" << h.offset(y1) << "," << h.offset(y2) << ")";
      rep.first_violation = os.str();
    }
  }
  return rep;
}

Eigen::MatrixXd SThetaOperator::plain() const {
  const Eigen::Index m = symmetric.rows();
  Eigen::MatrixXd s(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) s(i, j) = symmetric(i, j) * std::sqrt(weight[j] / weight[i]);
  return s;
}

SThetaOperator build_stheta(const KernelFn& kernel, double theta, const FrequencyGrid& grid, double alpha) {
  if (!(theta >= 0.0)) throw std::invalid_argument("build_stheta: theta must be >= 0");
  if (std::abs(kernel.step - grid.step()) > 1e-14 * grid.step() || kernel.half_count < grid.n_points - 1)
    throw std::invalid_argument("build_stheta: kernel does not cover the frequency grid");
  SThetaOperator op;
  op.theta = theta;
  op.grid = grid;
  const int m = grid.n_points;
  op.weight.resize(m);
  std::vector<double> isw(m);
  for (int i = 0; i < m; ++i) {
    op.weight[i] = dispersion_symbol(grid.node(i)) + alpha + theta;
    isw[i] = 1.0 / std::sqrt(op.weight[i]);
  }
  const double c = grid.step() / (2.0 * std::numbers::pi);
  op.symmetric.resize(m, m);
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < m; ++i) op.symmetric(i, j) = c * kernel.at_offset(i - j) * isw[i] * isw[j];
  return op;
}

namespace {

bool is_even(const Eigen::VectorXd& v) {
  return (v - v.reverse()).norm() <= (v + v.reverse()).norm();
}

}  // namespace

SThetaSpectrum stheta_spectrum(const SThetaOperator& op, int count, bool vectors) {
  // The kernel is the transform of a nonnegative function, hence positive
  // definite, and S~ = D K D is positive semidefinite: the eigenvalues of
  // largest modulus are the largest ones.
  const int m = static_cast<int>(op.symmetric.rows());
  const auto eig = eigh_range(op.symmetric, m - count, m - 1, vectors);
  SThetaSpectrum out;
  for (int i = count - 1; i >= 0; --i) {
    out.values.push_back(eig.values[i]);
    if (vectors) {
      Eigen::VectorXd v = eig.vectors.col(i);
      if (v.sum() < 0) v = -v;
      out.even.push_back(is_even(v));
      out.vectors.push_back(std::move(v));
    }
  }
  return out;
}

EigCurve eig_curve(const KernelFn& kernel, const std::vector<double>& thetas, const FrequencyGrid& grid,
                   int count, double alpha) {
  for (std::size_t i = 0; i < thetas.size(); ++i)
    if (thetas[i] < 0.0 || (i > 0 && !(thetas[i] > thetas[i - 1])))
      throw std::invalid_argument("eig_curve: theta values must be ascending and >= 0");
  EigCurve c;
  c.theta = thetas;
  c.lambda.assign(count, {});
  for (double t : thetas) {
    const auto sp = stheta_spectrum(build_stheta(kernel, t, grid, alpha), count, true);
    for (int i = 0; i < count; ++i) c.lambda[i].push_back(sp.values[i]);
    const auto& v = sp.vectors[0];
    // One-signed up to roundoff in the exponentially small tails.
    c.ground_one_signed.push_back(v.minCoeff() >= -1e-12 * v.maxCoeff());
  }
  return c;
}

std::optional<double> crossing_theta(const KernelFn& kernel, const FrequencyGrid& grid, double tol,
                                     double alpha) {
  auto f = [&](double t) {
    return stheta_spectrum(build_stheta(kernel, t, grid, alpha), 1, false).values[0] - 1.0;
  };
  const double f0 = f(0.0);
  if (f0 <= 0.0) return std::nullopt;
  double lo = 0.0, hi = 1.0, fhi = f(hi);
  while (fhi > 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e6) throw NumericalError("crossing_theta: no sign change below theta = 1e6");
    fhi = f(hi);
  }
  const double flo = lo == 0.0 ? f0 : f(lo);
  std::uintmax_t iters = 100;
  const auto r = boost::math::tools::toms748_solve(
      f, lo, hi, flo, fhi, [tol](double a, double b) { return std::abs(b - a) <= tol; }, iters);
  return 0.5 * (r.first + r.second);
}

std::vector<double> even_eigenvalues(const KernelFn& kernel, const FrequencyGrid& grid, int count,
                                     double alpha) {
  const auto op = build_stheta(kernel, 0.0, grid, alpha);
  int window = 2 * count + 4;
  for (;;) {
    const auto sp = stheta_spectrum(op, window, true);
    std::vector<double> out;
    for (int i = 0; i < window && static_cast<int>(out.size()) < count; ++i)
      if (sp.even[i]) out.push_back(sp.values[i]);
    if (static_cast<int>(out.size()) == count) return out;
    if (window >= grid.n_points) throw NumericalError("even_eigenvalues: not enough even modes");
    window = std::min(2 * window, grid.n_points);
  }
}

}  // namespace f4nls
