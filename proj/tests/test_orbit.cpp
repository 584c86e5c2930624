#include <doctest.h>

#include <cmath>
#include <numbers>

#include "f4nls/orbit.hpp"
#include "support.hpp"

using namespace f4nls;

namespace {

const WaveProfile& wave() {
  static const WaveProfile w = profile(f4nls::testing::small_grid(256));
  return w;
}

}  // namespace

TEST_SUITE("orbit") {

TEST_CASE("fit recovers points on the orbit") {
  const OrbitFitter fitter(wave());
  CHECK(fitter.fit(wave().pair()).distance < 1e-10);
  const auto f = fitter.fit(fitter.orbit_point(0.7, 3.3));
  CHECK(f.distance < 1e-9);
  CHECK(f.theta == doctest::Approx(0.7).epsilon(1e-9));
  CHECK(f.shift == doctest::Approx(3.3).epsilon(1e-9));
  CHECK(f.converged);
}

TEST_CASE("property: the fit is orthogonal to the symmetry directions") {
  const OrbitFitter fitter(wave());
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const ComplexField v = wave().pair() + f4nls::testing::random_pair(wave().grid(), seed) * cplx(0.05);
    const auto f = fitter.fit(v);
    const double scale = f.distance * norm(wave().samples, InnerProductKind::H2);
    CHECK(std::abs(f.orth_rotation) < 1e-8 * scale);
    CHECK(std::abs(f.orth_translation) < 1e-8 * scale);
  }
}

TEST_CASE("property: distance is invariant under the symmetries") {
  const OrbitFitter fitter(wave());
  const ComplexField v = wave().pair() + f4nls::testing::random_pair(wave().grid(), 21) * cplx(0.05);
  const double d = fitter.distance(v);
  CHECK(fitter.distance(rotate(translate(v, -4.1), 2.0)) == doctest::Approx(d).epsilon(1e-9));
}

TEST_CASE("fit matches a dense brute-force scan") {
  const OrbitFitter fitter(wave());
  const ComplexField v = wave().pair() + f4nls::testing::random_pair(wave().grid(), 31) * cplx(0.1);
  const double d = fitter.distance(v);
  double best = 1e300;
  for (double r = -3.0; r <= 3.0; r += 0.02)
    for (double th = -std::numbers::pi; th < std::numbers::pi; th += 0.01)
      best = std::min(best, norm(v - fitter.orbit_point(th, r), InnerProductKind::H2));
  CHECK(d <= best + 1e-12);
  CHECK(d >= best - 1e-3);
}

TEST_CASE("Lyapunov functional: zero on the orbit, gradient by finite differences") {
  const LyapunovFunctional lyap(wave(), 0.3);
  CHECK(std::abs(lyap(wave().pair()).value) < 1e-12);
  CHECK(std::abs(lyap(OrbitFitter(wave()).orbit_point(1.1, -2.0)).value) < 1e-12);
  const ComplexField v = wave().pair() + f4nls::testing::random_pair(wave().grid(), 41) * cplx(0.05);
  const ComplexField dir = f4nls::testing::random_pair(wave().grid(), 42);
  const double h = 1e-5;
  const double fd = (lyap(v + dir * cplx(h)).value - lyap(v - dir * cplx(h)).value) / (2 * h);
  CHECK(fd == doctest::Approx(inner(lyap.gradient(v), dir, InnerProductKind::L2)).epsilon(1e-7));
  CHECK_THROWS(LyapunovFunctional(wave(), 0.0));
}

TEST_CASE("Spearman rank correlation") {
  CHECK(spearman({1, 2, 3, 4}, {10, 20, 30, 40}) == doctest::Approx(1.0));
  CHECK(spearman({1, 2, 3, 4}, {4, 3, 2, 1}) == doctest::Approx(-1.0));
  CHECK(spearman({1, 2, 3}, {1, 1, 2}) == doctest::Approx(std::sqrt(0.75)));
  CHECK_THROWS(spearman({1.0}, {1.0}));
}

TEST_CASE("perturbation families") {
  for (const auto* name : {"even", "odd", "random-bandlimited", "mass-preserving"}) {
    const auto fam = parse_family(name);
    CHECK(family_name(fam) == name);
    CHECK(norm(perturbation(fam, wave().grid(), 3), InnerProductKind::H2) == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK_THROWS(parse_family("sideways"));
  const auto u = perturbed_wave(wave(), PerturbationFamily::MassPreserving, 0.05, 3);
  CHECK(functionals(u).mass == doctest::Approx(functionals(wave().pair()).mass).epsilon(1e-13));
}

TEST_CASE("short stability sweep: bounded, correlated, Lyapunov chain holds") {
  StabilityConfig cfg;
  cfg.integrator = IntegratorConfig{1e-3, 2.0, 50};
  cfg.penalty = 0.2;
  cfg.c = 0.01;
  cfg.seed = 7;
  cfg.dt_ref = 1e-3;
  const auto sweep = stability_experiment(wave(), PerturbationFamily::Odd, {1e-3, 1e-2, 3e-2}, cfg);
  REQUIRE(sweep.runs.size() == 3);
  CHECK(sweep.spearman == doctest::Approx(1.0));
  for (const auto& r : sweep.runs) {
    CHECK(r.sup_distance < 10.0 * r.delta);
    CHECK(r.c_bound_ok);
    CHECK(r.mass_drift < 1e-12);
  }
  CHECK_THROWS(stability_experiment(wave(), PerturbationFamily::Odd, {1e-2, 1e-3}, cfg));
  CHECK_THROWS(stability_experiment(wave(), PerturbationFamily::Odd, {0.5}, cfg));
}

}
