#include "f4nls/orbit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

namespace f4nls {

OrbitFitter::OrbitFitter(const WaveProfile& wave) : wave_(wave) {
  const auto c = spectrum(wave.samples);
  const auto xi = wave.grid()->frequencies();
  weighted_conj_.resize(c.size());
  for (std::size_t k = 0; k < c.size(); ++k) weighted_conj_[k] = h2_weight(xi[k]) * std::conj(c[k]);
}

ComplexField OrbitFitter::orbit_point(double theta, double shift) const {
  return rotate(translate(wave_.pair(), shift), theta);
}

OrbitFit OrbitFitter::fit(const ComplexField& v) const {
  const Grid& g = *v.grid;
  require_same_grid(g, *wave_.grid());
  const int n = g.size();
  const double half = g.half_length();
  const auto xi = g.frequencies();

  // c(r) = (v, phi(. - r))_H2 as a complex pairing, up to the factor h / N:
  // sum_k w_k v^_k conj(phi^_k) e^{i xi_k r}.
  std::vector<cplx> prod = spectrum(v);
  for (int k = 0; k < n; ++k) prod[k] *= weighted_conj_[k];
  std::vector<cplx> scan(n);
  g.inverse(prod, scan);
  int best = 0;
  for (int m = 1; m < n; ++m)
    if (std::norm(scan[m]) > std::norm(scan[best])) best = m;
  double r = (best < n / 2 ? best : best - n) * g.spacing();

  auto sums = [&](double at, cplx& s0, cplx& s1, cplx& s2) {
    s0 = s1 = s2 = 0.0;
    for (int k = 0; k < n; ++k) {
      const cplx t = prod[k] * std::polar(1.0, xi[k] * at);
      s0 += t;
      s1 += cplx(0.0, xi[k]) * t;
      s2 -= xi[k] * xi[k] * t;
    }
  };

  OrbitFit fit;
  fit.converged = false;
  cplx s0, s1, s2;
  for (int it = 0; it < 50; ++it) {
    sums(r, s0, s1, s2);
    fit.iterations = it + 1;
    const double d1 = 2.0 * std::real(std::conj(s0) * s1);
    const double d2 = 2.0 * (std::norm(s1) + std::real(std::conj(s0) * s2));
    if (std::norm(s0) == 0.0) break;  // v orthogonal to the whole orbit
    if (!(d2 < 0.0)) break;           // not at a local maximum of |c|^2
    const double delta = std::clamp(-d1 / d2, -g.spacing(), g.spacing());
    r += delta;
    if (std::abs(delta) < 1e-13 * std::max(1.0, std::abs(r))) {
      fit.converged = true;
      sums(r, s0, s1, s2);
      break;
    }
  }
  r = std::remainder(r, 2.0 * half);
  if (r >= half) r -= 2.0 * half;
  fit.shift = r;
  fit.theta = std::atan2(-s0.imag(), s0.real());

  const ComplexField point = orbit_point(fit.theta, fit.shift);
  const ComplexField residual = v - point;
  fit.distance = norm(residual, InnerProductKind::H2);
  fit.orth_rotation = inner(residual, point * cplx(0.0, 1.0), InnerProductKind::H2);
  fit.orth_translation = inner(residual, derivative(point, 1), InnerProductKind::H2);
  return fit;
}

LyapunovFunctional::LyapunovFunctional(const WaveProfile& wave, double penalty) : m_(penalty) {
  if (!(penalty > 0.0)) throw std::invalid_argument("lyapunov: M must be positive");
  const auto f = functionals(wave.pair(), wave.frequency);
  q1_ = f.g;
  q2_ = f.mass;
}

LyapunovValue LyapunovFunctional::operator()(const ComplexField& v) const {
  const auto f = functionals(v);
  LyapunovValue out;
  out.penalty = m_;
  out.g_excess = f.g - q1_;
  out.mass_term = m_ * (f.mass - q2_) * (f.mass - q2_);
  out.value = out.g_excess + out.mass_term;
  return out;
}

ComplexField LyapunovFunctional::gradient(const ComplexField& v) const {
  ComplexField g = gradient_G(v);
  const double s = 2.0 * m_ * (functionals(v).mass - q2_);
  for (std::size_t j = 0; j < g.size(); ++j) g[j] += s * v[j];
  return g;
}

namespace {

ComplexField unit_h2(ComplexField z) {
  const double nz = norm(z, InnerProductKind::H2);
  if (!(nz > 0.0)) throw std::invalid_argument("zero perturbation direction");
  z *= cplx(1.0 / nz);
  return z;
}

ComplexField random_pair(const GridPtr& grid, double cutoff, double width, std::mt19937_64& gen) {
  RealField p = random_smooth_field(grid, cutoff, width, gen);
  RealField q = random_smooth_field(grid, cutoff, width, gen);
  return from_pair(p, q);
}

}  // namespace

QuadraticCheck lyapunov_quadratic_check(const WaveProfile& wave, double penalty, double rho, int n_samples,
                                        std::uint64_t seed, const std::vector<ComplexField>& extra) {
  const OrbitFitter fitter(wave);
  const LyapunovFunctional lyap(wave, penalty);
  const ComplexField base = wave.pair();
  QuadraticCheck rep;
  rep.rho = rho;
  rep.orbit_radius = 0.5 * inner(wave.samples, wave.samples, InnerProductKind::H2);
  rep.c = std::numeric_limits<double>::infinity();

  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> cutoff(0.5, 4.0), width(3.0, 15.0), scale(0.2, 1.0);
  std::vector<std::pair<ComplexField, double>> samples;
  for (int s = 0; s < n_samples; ++s) {
    ComplexField z = unit_h2(random_pair(wave.grid(), cutoff(gen), width(gen), gen));
    samples.emplace_back(std::move(z), rho * scale(gen));
  }
  for (const auto& e : extra) {
    samples.emplace_back(unit_h2(e), 0.25 * rho);
    samples.emplace_back(unit_h2(e), 0.5 * rho);
  }

  for (std::size_t i = 0; i < samples.size(); ++i) {
    const ComplexField v = base + samples[i].first * cplx(samples[i].second);
    ++rep.samples;
    const double d = fitter.distance(v);
    const double value = lyap(v).value;
    const ComplexField grad = lyap.gradient(v);
    rep.max_symmetry_pairing = std::max({rep.max_symmetry_pairing,
                                         std::abs(inner(grad, v * cplx(0.0, 1.0), InnerProductKind::L2)),
                                         std::abs(inner(grad, derivative(v, 1), InnerProductKind::L2))});
    if (d < 1e-12) {
      ++rep.excluded;
      continue;
    }
    if (!(value > 0.0)) {
      ++rep.violations;
      if (rep.first_violation < 0) rep.first_violation = static_cast<int>(i);
    }
    rep.c = std::min(rep.c, value / (d * d));
  }
  return rep;
}

PerturbationFamily parse_family(const std::string& name) {
  if (name == "even") return PerturbationFamily::Even;
  if (name == "odd") return PerturbationFamily::Odd;
  if (name == "random" || name == "random-bandlimited") return PerturbationFamily::RandomBandlimited;
  if (name == "mass" || name == "mass-preserving") return PerturbationFamily::MassPreserving;
  throw std::invalid_argument("unknown perturbation family '" + name + "'");
}

std::string family_name(PerturbationFamily f) {
  switch (f) {
    case PerturbationFamily::Even: return "even";
    case PerturbationFamily::Odd: return "odd";
    case PerturbationFamily::RandomBandlimited: return "random-bandlimited";
    case PerturbationFamily::MassPreserving: return "mass-preserving";
  }
  return "unknown";
}

ComplexField perturbation(PerturbationFamily family, const GridPtr& grid, std::uint64_t seed) {
  const RealField zero(grid);
  switch (family) {
    case PerturbationFamily::Even:
      return unit_h2(to_complex(sample_with(grid, [](double x) { return std::exp(-x * x / 18.0); })));
    case PerturbationFamily::Odd:
      return unit_h2(to_complex(sample_with(grid, [](double x) { return x / 3.0 * std::exp(-x * x / 18.0); })));
    case PerturbationFamily::RandomBandlimited:
    case PerturbationFamily::MassPreserving: {
      std::mt19937_64 gen(seed);
      return unit_h2(random_pair(grid, 1.5, 8.0, gen));
    }
  }
  throw std::logic_error("unhandled perturbation family");
}

ComplexField perturbed_wave(const WaveProfile& wave, PerturbationFamily family, double delta, std::uint64_t seed) {
  ComplexField u = wave.pair() + perturbation(family, wave.grid(), seed) * cplx(delta);
  if (family == PerturbationFamily::MassPreserving) {
    const double target = functionals(wave.pair()).mass;
    u *= cplx(std::sqrt(target / functionals(u).mass));
  }
  return u;
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("spearman: need >= 2 paired values");
  auto ranks = [](const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < idx.size();) {
      std::size_t j = i;
      while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
      for (std::size_t k = i; k <= j; ++k) r[idx[k]] = 0.5 * (i + j) + 1.0;  // average rank of ties
      i = j + 1;
    }
    return r;
  };
  const auto rx = ranks(x), ry = ranks(y);
  const double n = static_cast<double>(x.size());
  const double mean = (n + 1.0) / 2.0;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (rx[i] - mean) * (ry[i] - mean);
    sxx += (rx[i] - mean) * (rx[i] - mean);
    syy += (ry[i] - mean) * (ry[i] - mean);
  }
  return sxy / std::sqrt(sxx * syy);
}

StabilitySweep stability_experiment(const WaveProfile& wave, PerturbationFamily family,
                                    const std::vector<double>& amplitudes, const StabilityConfig& cfg) {
  for (std::size_t i = 0; i < amplitudes.size(); ++i)
    if (!(amplitudes[i] > 0.0) || amplitudes[i] > 0.1 || (i > 0 && !(amplitudes[i] > amplitudes[i - 1])))
      throw std::invalid_argument("stability: amplitudes must be ascending in (0, 0.1]");
  cfg.integrator.validate();
  const OrbitFitter fitter(wave);
  const LyapunovFunctional lyap(wave, cfg.penalty);
  const double record_interval = cfg.integrator.dt * cfg.integrator.record_every;

  StabilitySweep sweep;
  sweep.family = family_name(family);
  std::vector<double> sup_d;
  for (double delta : amplitudes) {
    StabilityRun run;
    run.delta = delta;
    run.dt = std::min(cfg.integrator.dt, cfg.dt_ref * std::sqrt(delta / cfg.delta_ref));
    IntegratorConfig ic = cfg.integrator;
    ic.dt = run.dt;
    ic.record_every = std::max(1, static_cast<int>(std::lround(record_interval / run.dt)));
    const ComplexField u0 = perturbed_wave(wave, family, delta, cfg.seed);
    run.v0 = lyap(u0).value;
    auto observer = [&](double t, const ComplexField& u, TrajectoryDiagnostics& diag) {
      const OrbitFit f = fitter.fit(u);
      const double v = lyap(u).value;
      diag.distance.push_back(f.distance);
      diag.lyapunov.push_back(v);
      diag.theta.push_back(f.theta);
      diag.shift.push_back(f.shift);
      run.sup_distance = std::max(run.sup_distance, f.distance);
      run.v_drift = std::max(run.v_drift, std::abs(v - run.v0) / std::abs(run.v0));
      const double chain = cfg.c * f.distance * f.distance;
      run.worst_chain = std::max(run.worst_chain, chain / run.v0);
      if (!(chain <= run.v0)) run.c_bound_ok = false;
      (void)t;
    };
    const auto diag = evolve(u0, ic, observer);
    run.energy_drift = diag.max_relative_energy_drift();
    run.mass_drift = diag.max_relative_mass_drift();
    run.times = diag.times;
    run.distances = diag.distance;
    sup_d.push_back(run.sup_distance);
    sweep.runs.push_back(std::move(run));
  }
  if (amplitudes.size() >= 2) sweep.spearman = spearman(amplitudes, sup_d);
  return sweep;
}

}  // namespace f4nls
