#include "f4nls/coercivity.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace f4nls {

namespace {

Eigen::Map<const Eigen::VectorXd> as_vector(const RealField& f) {
  return {f.values.data(), static_cast<Eigen::Index>(f.size())};
}

}  // namespace

WeinsteinReport weinstein_direct(const OperatorDisc& l1, const WaveProfile& wave, double tol_zero) {
  require_same_grid(*l1.grid, *wave.grid());
  const auto eig = eigh(l1.matrix);
  const Eigen::Map<const Eigen::VectorXd> phi = as_vector(wave.samples);
  WeinsteinReport rep;
  Eigen::VectorXd chi = Eigen::VectorXd::Zero(phi.size());
  for (Eigen::Index k = 0; k < eig.values.size(); ++k) {
    const double lam = eig.values[k];
    if (std::abs(lam) <= tol_zero) {
      ++rep.n_zero;
      continue;
    }
    const auto v = eig.vectors.col(k);
    chi += (v.dot(phi) / lam) * v;
    ++rep.modes_used;
  }
  if (rep.n_zero != 1)
    throw NumericalError("weinstein_direct: expected a one-dimensional kernel of L1, found " +
                         std::to_string(rep.n_zero) + " eigenvalues with |lambda| <= tol_zero");
  const double h = l1.grid->spacing();
  rep.chi = RealField(l1.grid, std::vector<double>(chi.data(), chi.data() + chi.size()));
  rep.value = h * chi.dot(phi);
  rep.kernel_overlap = inner(rep.chi, wave.derivative, InnerProductKind::L2);
  rep.solve_residual = std::sqrt(h) * (l1.matrix * chi - phi).norm();
  return rep;
}

WeinsteinSeries weinstein_series(const std::vector<double>& even_lambda, int j_max, double width) {
  if (j_max < 10) throw std::invalid_argument("weinstein_series: j_max must be >= 10");
  if (static_cast<int>(even_lambda.size()) < j_max + 1)
    throw std::invalid_argument("weinstein_series: need j_max + 1 even eigenvalues");
  constexpr double n = 2.0, r = 2.0;
  WeinsteinSeries s;
  s.prefactor = std::pow(std::pow(2.0, n + r - 1.0) * std::tgamma(r) / (std::numbers::pi * std::tgamma(n)), 2);
  s.normalization = std::numbers::pi * std::numbers::pi / (3.0 * width);
  double sum = 0.0, last = 0.0;
  for (int j = 0; j <= j_max; ++j) {
    const double lam = even_lambda[j];
    if (j >= 1 && std::abs(1.0 - lam) < 1e-12)
      throw NumericalError("weinstein_series: lambda_{2j} = 1 for j = " + std::to_string(j));
    const double jj = j;
    const double first = std::exp(std::lgamma(2 * jj + 1) - std::lgamma(2 * jj + 2 * n + r + 1)) *
                         (2 * jj + n + r - 0.5);
    const double second = std::exp(std::lgamma(jj + n) + std::lgamma(jj + n + r - 0.5) -
                                   std::lgamma(jj + 1) - std::lgamma(jj + r + 0.5));
    last = lam / (1.0 - lam) * first * second * second;
    sum += last;
  }
  s.terms = j_max + 1;
  s.raw_sum = s.prefactor * sum;
  s.estimate = s.normalization * s.raw_sum;
  // Terms decay like j^-5; the remainder is below |t_J| J / 3.
  s.tail_bound = std::abs(s.normalization * s.prefactor * last) * j_max / 3.0;
  return s;
}

SecondVariation::SecondVariation(const GridPtr& grid)
    : wave(profile(grid)),
      l1(build_operator(OperatorKind::L1, wave)),
      l2(build_operator(OperatorKind::L2, wave)) {}

std::vector<PairConstraint> orthogonality_constraints(const WaveProfile& wave) {
  const RealField zero(wave.grid());
  return {{from_pair(zero, wave.samples), InnerProductKind::L2, "Q _|_ phi (L2)"},
          {from_pair(wave.samples, zero), InnerProductKind::L2, "P _|_ phi (L2)"},
          {from_pair(wave.derivative, zero), InnerProductKind::L2, "P _|_ phi' (L2)"}};
}

std::vector<PairConstraint> symmetry_constraints(const WaveProfile& wave) {
  const RealField zero(wave.grid());
  return {{from_pair(zero, wave.samples), InnerProductKind::H2, "J Phi (H2)"},
          {from_pair(wave.derivative, zero), InnerProductKind::H2, "Phi' (H2)"}};
}

std::vector<PairConstraint> z_constraints(const WaveProfile& wave) {
  auto c = symmetry_constraints(wave);
  c.push_back({wave.pair(), InnerProductKind::L2, "Phi (L2)"});
  return c;
}

namespace {

enum class Component { P, Q, Both };

Component component_of(const ComplexField& u) {
  double re = 0.0, im = 0.0;
  for (const auto& v : u.values) {
    re = std::max(re, std::abs(v.real()));
    im = std::max(im, std::abs(v.imag()));
  }
  if (im <= 1e-14 * re) return Component::P;
  if (re <= 1e-14 * im) return Component::Q;
  return Component::Both;
}

double pair_space_bound(const SecondVariation& sv, const std::vector<PairConstraint>& constraints,
                        std::optional<double> penalty) {
  const Eigen::Index n = sv.l1.grid->size();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  a.topLeftCorner(n, n) = build_h2_pencil(sv.l1, {}).compressed;
  a.bottomRightCorner(n, n) = build_h2_pencil(sv.l2, {}).compressed;
  auto lift = [&](const ComplexField& u, InnerProductKind pairing) {
    Eigen::VectorXd v(2 * n);
    v.head(n) = h2_transform_direction(sv.l1, real_part(u), pairing);
    v.tail(n) = h2_transform_direction(sv.l2, imag_part(u), pairing);
    return v;
  };
  Eigen::MatrixXd c(2 * n, static_cast<Eigen::Index>(constraints.size()));
  for (std::size_t i = 0; i < constraints.size(); ++i)
    c.col(static_cast<Eigen::Index>(i)) = lift(constraints[i].direction, constraints[i].pairing);
  const Eigen::MatrixXd q = orthonormal_basis(c);
  const double sigma = gershgorin_bound(a) + 1.0;
  Eigen::MatrixXd b = compress_to_complement(a, q, sigma);
  if (penalty && *penalty != 0.0) {
    Eigen::VectorXd u = lift(sv.wave.pair(), InnerProductKind::L2);
    if (q.cols() > 0) u -= q * (q.transpose() * u);
    b.noalias() += (2.0 * *penalty * sv.l1.grid->spacing()) * u * u.transpose();
  }
  return eigh_lowest(std::move(b), 1, false).values[0];
}

}  // namespace

SubspaceBoundReport subspace_bound(const SecondVariation& sv, const std::vector<PairConstraint>& constraints,
                                   std::optional<double> penalty, std::string label, bool force_pair_space) {
  if (penalty && *penalty < 0.0) throw std::invalid_argument("subspace_bound: M must be >= 0");
  SubspaceBoundReport rep;
  rep.label = std::move(label);
  rep.penalty = penalty;
  for (const auto& c : constraints) rep.constraints.push_back(c.label);

  std::vector<Constraint> on_p, on_q;
  bool coupled = force_pair_space;
  for (const auto& c : constraints) {
    require_same_grid(*sv.l1.grid, *c.direction.grid);
    switch (component_of(c.direction)) {
      case Component::P: on_p.push_back({real_part(c.direction), c.pairing}); break;
      case Component::Q: on_q.push_back({imag_part(c.direction), c.pairing}); break;
      case Component::Both: coupled = true; break;
    }
  }
  if (coupled) {
    rep.decoupled = false;
    rep.lambda_min = rep.p_block = rep.q_block = pair_space_bound(sv, constraints, penalty);
    return rep;
  }
  // The penalty direction Phi = (phi, 0) only touches the P block.
  const bool has_penalty = penalty && *penalty != 0.0;
  auto p_min = pencil_min(sv.l1, on_p, has_penalty ? &sv.wave.samples : nullptr, has_penalty ? *penalty : 0.0);
  auto q_min = pencil_min(sv.l2, on_q);
  rep.p_block = p_min.value;
  rep.q_block = q_min.value;
  rep.p_minimizer = std::move(p_min.minimizer);
  rep.q_minimizer = std::move(q_min.minimizer);
  rep.lambda_min = std::min(rep.p_block, rep.q_block);
  return rep;
}

PenaltyCurve::PenaltyCurve(const SecondVariation& sv) {
  const auto constraints = symmetry_constraints(sv.wave);
  H2Pencil p = build_h2_pencil(sv.l1, {{real_part(constraints[1].direction), constraints[1].pairing}});
  Eigen::VectorXd u = h2_transform_direction(sv.l1, sv.wave.samples, InnerProductKind::L2);
  u -= p.basis * (p.basis.transpose() * u);
  const auto eig = eigh(std::move(p.compressed));
  values_ = eig.values;
  weights_ = (eig.vectors.transpose() * u).array().square();
  scale_ = 2.0 * sv.l1.grid->spacing();
  q_block_ = pencil_min(sv.l2, {{imag_part(constraints[0].direction), constraints[0].pairing}}).value;
}

double PenaltyCurve::operator()(double m) const {
  // Smallest eigenvalue of diag(values) + c z z^T: the root of the secular
  // function 1 + c sum w_k / (values_k - mu) in (values_0, values_1).
  const double c = scale_ * m;
  const double total = weights_.sum();
  double p_block = values_[0];
  if (c > 0.0 && weights_[0] > 1e-30 * total) {
    double lo = values_[0];
    double hi = std::min(values_.size() > 1 ? values_[1] : values_[0] + c * total, values_[0] + c * total);
    auto secular = [&](double mu) { return 1.0 + c * (weights_.array() / (values_.array() - mu)).sum(); };
    for (int it = 0; it < 200 && hi - lo > 4e-16 * std::max(1.0, std::abs(hi)); ++it) {
      const double mid = 0.5 * (lo + hi);
      (secular(mid) < 0.0 ? lo : hi) = mid;
    }
    p_block = 0.5 * (lo + hi);
  }
  return std::min(p_block, q_block_);
}

Calibration calibrate_M(const SecondVariation& sv, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("calibrate_M: delta must be positive");
  const PenaltyCurve curve(sv);
  Calibration cal;
  cal.target = 0.5 * delta;
  if (curve.q_block() < cal.target)
    throw std::domain_error("calibrate_M: target unreachable (Q block bound " +
                            std::to_string(curve.q_block()) + " < delta/2)");
  double hi = 1.0;
  if (curve(hi) >= cal.target) {
    while (hi > 1e-12 && curve(0.5 * hi) >= cal.target) hi *= 0.5;
  } else {
    while (curve(hi) < cal.target) {
      hi *= 2.0;
      if (hi > 1e12) throw std::domain_error("calibrate_M: target unreachable for M <= 1e12");
    }
  }
  double lo = 0.5 * hi;
  while (hi - lo > 1e-3 * hi) {
    const double mid = 0.5 * (lo + hi);
    (curve(mid) >= cal.target ? hi : lo) = mid;
  }
  cal.penalty = hi;
  cal.lambda_min = curve(hi);
  cal.lambda_check = subspace_bound(sv, symmetry_constraints(sv.wave), hi).lambda_min;
  return cal;
}

double penalty_sample_min(const SecondVariation& sv, double penalty, int n_samples, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> cutoff(0.5, 4.0), width(3.0, 15.0);
  const auto& phi = sv.wave.samples;
  const auto& dphi = sv.wave.derivative;
  const auto H2 = InnerProductKind::H2;
  const auto L2 = InnerProductKind::L2;
  double worst = std::numeric_limits<double>::infinity();
  for (int s = 0; s < n_samples; ++s) {
    RealField p = random_smooth_field(phi.grid, cutoff(gen), width(gen), gen);
    RealField q = random_smooth_field(phi.grid, cutoff(gen), width(gen), gen);
    p -= dphi * (inner(p, dphi, H2) / inner(dphi, dphi, H2));
    q -= phi * (inner(q, phi, H2) / inner(phi, phi, H2));
    const double mass = inner(phi, p, L2);
    const double form = inner(sv.l1.apply(p), p, L2) + inner(sv.l2.apply(q), q, L2) + 2.0 * penalty * mass * mass;
    worst = std::min(worst, form / (inner(p, p, H2) + inner(q, q, H2)));
  }
  return worst;
}

}  // namespace f4nls
