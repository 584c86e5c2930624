#include "f4nls/linops.hpp"

#include <algorithm>
#include <cmath>

namespace f4nls {

namespace {

Eigen::Map<const Eigen::VectorXd> as_vector(const RealField& f) {
  return {f.values.data(), static_cast<Eigen::Index>(f.size())};
}

RealField as_field(const GridPtr& g, const Eigen::VectorXd& v) {
  return RealField(g, std::vector<double>(v.data(), v.data() + v.size()));
}

std::vector<double> symbol_of(const Grid& g, double (*fn)(double, double), double arg) {
  const auto xi = g.frequencies();
  std::vector<double> s(xi.size());
  for (std::size_t k = 0; k < xi.size(); ++k) s[k] = fn(xi[k], arg);
  return s;
}

}  // namespace

RealField OperatorDisc::apply(const RealField& f) const {
  require_same_grid(*grid, *f.grid);
  RealField out = apply_multiplier(f, symbol);
  for (std::size_t j = 0; j < out.size(); ++j) out[j] -= potential[j] * f[j];
  return out;
}

RealField OperatorDisc::apply_matrix(const RealField& f) const {
  require_same_grid(*grid, *f.grid);
  return as_field(grid, matrix * as_vector(f));
}

OperatorDisc build_operator(const RealField& potential, double shift) {
  OperatorDisc op;
  op.grid = potential.grid;
  op.shift = shift;
  op.symbol = symbol_of(*op.grid, [](double xi, double a) { return dispersion_symbol(xi) + a; }, shift);
  op.potential = potential;
  op.matrix = circulant_from_symbol(*op.grid, op.symbol);
  op.matrix.diagonal() -= as_vector(potential);
  return op;
}

OperatorDisc build_operator(OperatorKind which, const WaveProfile& wave) {
  const double c = which == OperatorKind::L1 ? 3.0 : 1.0;
  RealField v(wave.grid());
  for (std::size_t j = 0; j < v.size(); ++j) v[j] = c * wave.samples[j] * wave.samples[j];
  return build_operator(v, wave.frequency);
}

SpectrumReport spectrum(const OperatorDisc& op, int k, double tol_zero) {
  const int n = op.grid->size();
  if (k < 1 || k > n) throw std::invalid_argument("spectrum: k must be in [1, N]");
  const auto eig = eigh_lowest(op.matrix, k);
  SpectrumReport rep;
  rep.tol_zero = tol_zero;
  rep.essential_edge = op.shift;
  const double scale = 1.0 / std::sqrt(op.grid->spacing());
  for (int i = 0; i < k; ++i) {
    const double lam = eig.values[i];
    Eigen::VectorXd v = eig.vectors.col(i);
    // Fix the sign: positive mean, or positive first slope for odd vectors.
    double s = v.sum();
    if (std::abs(s) < 1e-8 * std::sqrt(double(n))) {
      Eigen::Index at = 0;
      v.cwiseAbs().maxCoeff(&at);
      s = at < n / 2 ? -v[at] : v[at];
    }
    if (s < 0) v = -v;
    const Eigen::VectorXd r = op.matrix * v - lam * v;
    rep.eigenvalues.push_back(lam);
    rep.residuals.push_back(r.norm());  // unit Euclidean vector: ratio is scale free
    rep.eigenvectors.push_back(as_field(op.grid, v * scale));
    if (lam < -tol_zero) ++rep.n_negative;
    else if (std::abs(lam) <= tol_zero) ++rep.n_zero;
  }
  return rep;
}

ConstrainedMin constrained_min(const OperatorDisc& op, const std::vector<RealField>& constraints,
                               InnerProductKind norm) {
  if (norm == InnerProductKind::H2) {
    std::vector<Constraint> cs;
    for (const auto& c : constraints) cs.push_back({c, InnerProductKind::L2});
    return pencil_min(op, cs);
  }
  const int n = op.grid->size();
  Eigen::MatrixXd c(n, static_cast<Eigen::Index>(constraints.size()));
  for (std::size_t i = 0; i < constraints.size(); ++i) {
    require_same_grid(*op.grid, *constraints[i].grid);
    c.col(static_cast<Eigen::Index>(i)) = as_vector(constraints[i]);
  }
  const Eigen::MatrixXd q = orthonormal_basis(c);
  const double sigma = gershgorin_bound(op.matrix) + 1.0;
  const auto eig = eigh_lowest(compress_to_complement(op.matrix, q, sigma), 1);
  ConstrainedMin out;
  out.value = eig.values[0];
  out.minimizer = as_field(op.grid, eig.vectors.col(0) / std::sqrt(op.grid->spacing()));
  return out;
}

namespace {

std::vector<double> weight_power(const Grid& g, double power) {
  const auto xi = g.frequencies();
  std::vector<double> s(xi.size());
  for (std::size_t k = 0; k < xi.size(); ++k) s[k] = std::pow(h2_weight(xi[k]), power);
  return s;
}

// H^{-1/2} A H^{-1/2} = circulant((m + alpha) / w) - S diag(V) S.
Eigen::MatrixXd transformed_operator(const OperatorDisc& op, const std::vector<double>& inv_sqrt_w) {
  const Grid& g = *op.grid;
  std::vector<double> ratio(op.symbol.size());
  for (std::size_t k = 0; k < ratio.size(); ++k) ratio[k] = op.symbol[k] * inv_sqrt_w[k] * inv_sqrt_w[k];
  Eigen::MatrixXd a = circulant_from_symbol(g, ratio);
  Eigen::MatrixXd sv = as_vector(op.potential).asDiagonal();
  apply_symbol_to_columns(g, inv_sqrt_w, sv);  // S diag(V)
  sv.transposeInPlace();                       // diag(V) S
  apply_symbol_to_columns(g, inv_sqrt_w, sv);  // S diag(V) S
  a -= 0.5 * (sv + sv.transpose());
  return a;
}

Eigen::VectorXd apply_symbol(const std::vector<double>& symbol, const RealField& f) {
  return as_vector(apply_multiplier(f, symbol));
}

}  // namespace

Eigen::VectorXd h2_transform_direction(const OperatorDisc& op, const RealField& d, InnerProductKind pairing) {
  require_same_grid(*op.grid, *d.grid);
  return apply_symbol(weight_power(*op.grid, pairing == InnerProductKind::L2 ? -0.5 : 0.5), d);
}

H2Pencil build_h2_pencil(const OperatorDisc& op, const std::vector<Constraint>& constraints) {
  const Grid& g = *op.grid;
  H2Pencil p;
  p.inv_sqrt_weight = weight_power(g, -0.5);
  const auto sqrt_w = weight_power(g, 0.5);
  Eigen::MatrixXd a = transformed_operator(op, p.inv_sqrt_weight);
  // (c, v)_L2 = (S c)^T y and (c, v)_H2 ~ (H^{1/2} c)^T y for v = S y.
  Eigen::MatrixXd c(g.size(), static_cast<Eigen::Index>(constraints.size()));
  for (std::size_t i = 0; i < constraints.size(); ++i) {
    require_same_grid(g, *constraints[i].direction.grid);
    const auto& sym = constraints[i].pairing == InnerProductKind::L2 ? p.inv_sqrt_weight : sqrt_w;
    c.col(static_cast<Eigen::Index>(i)) = apply_symbol(sym, constraints[i].direction);
  }
  p.basis = orthonormal_basis(c);
  p.shift = gershgorin_bound(a) + 1.0;
  p.compressed = compress_to_complement(a, p.basis, p.shift);
  return p;
}

ConstrainedMin pencil_min(const OperatorDisc& op, const std::vector<Constraint>& constraints,
                          const RealField* penalty_direction, double penalty) {
  H2Pencil p = build_h2_pencil(op, constraints);
  if (penalty_direction && penalty != 0.0) {
    Eigen::VectorXd u = h2_transform_direction(op, *penalty_direction, InnerProductKind::L2);
    if (p.basis.cols() > 0) u -= p.basis * (p.basis.transpose() * u);
    const double c = 2.0 * penalty * op.grid->spacing();
    p.compressed.noalias() += c * u * u.transpose();
  }
  const auto eig = eigh_lowest(std::move(p.compressed), 1);
  ConstrainedMin out;
  out.value = eig.values[0];
  RealField y = as_field(op.grid, eig.vectors.col(0));
  out.minimizer = apply_multiplier(y, p.inv_sqrt_weight);
  out.minimizer *= 1.0 / norm(out.minimizer, InnerProductKind::H2);
  return out;
}

GardingCertificate garding_certify(const OperatorDisc& op, double epsilon) {
  if (!(epsilon > 0.0))
    throw std::invalid_argument("garding_certify: epsilon must be positive");
  if (epsilon >= 1.0)
    throw std::invalid_argument("garding_certify: no constant exists for epsilon >= 1 "
                                "(m(xi) + alpha < eps (1 + xi^2 + xi^4) as xi -> infinity)");
  const auto xi = op.grid->frequencies();
  std::vector<double> sym(xi.size());
  for (std::size_t k = 0; k < xi.size(); ++k) sym[k] = op.symbol[k] - epsilon * h2_weight(xi[k]);
  Eigen::MatrixXd b = circulant_from_symbol(*op.grid, sym);
  b.diagonal() -= as_vector(op.potential);
  GardingCertificate cert;
  cert.epsilon = epsilon;
  cert.constant = -eigh_lowest(b, 1, false).values[0];
  b.diagonal().array() += cert.constant;
  cert.min_eig = eigh_lowest(std::move(b), 1, false).values[0];
  cert.valid = cert.min_eig >= -1e-10;
  return cert;
}

double matrix_operator_min(const OperatorDisc& l1, const OperatorDisc& l2,
                           const std::vector<ComplexField>& constraints) {
  require_same_grid(*l1.grid, *l2.grid);
  const Eigen::Index n = l1.grid->size();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  a.topLeftCorner(n, n) = l1.matrix;
  a.bottomRightCorner(n, n) = l2.matrix;
  Eigen::MatrixXd c(2 * n, static_cast<Eigen::Index>(constraints.size()));
  for (std::size_t i = 0; i < constraints.size(); ++i) {
    require_same_grid(*l1.grid, *constraints[i].grid);
    for (Eigen::Index j = 0; j < n; ++j) {
      c(j, static_cast<Eigen::Index>(i)) = constraints[i][j].real();
      c(n + j, static_cast<Eigen::Index>(i)) = constraints[i][j].imag();
    }
  }
  const Eigen::MatrixXd q = orthonormal_basis(c);
  const double sigma = gershgorin_bound(a) + 1.0;
  return eigh_lowest(compress_to_complement(a, q, sigma), 1, false).values[0];
}

double parity_defect(const RealField& f, bool* even) {
  const std::size_t n = f.size();
  const double scale = std::max(max_abs(f), 1e-300);
  double de = 0.0, dodd = 0.0;
  for (std::size_t j = 1; j < n; ++j) {
    // x_j = -L + j h reflects to x_{N-j}; x_0 = -L is its own periodic image.
    const double a = f[j], b = f[n - j];
    de = std::max(de, std::abs(a - b));
    dodd = std::max(dodd, std::abs(a + b));
  }
  dodd = std::max(dodd, std::abs(f[0]) * 2.0);
  if (even) *even = de <= dodd;
  return std::min(de, dodd) / scale;
}

}  // namespace f4nls
