#include <doctest.h>

#include <cmath>

#include "f4nls/wave.hpp"
#include "support.hpp"

using namespace f4nls;
using f4nls::testing::small_grid;

TEST_SUITE("wave") {

TEST_CASE("profile values and shape") {
  const WaveProfile w = profile(small_grid());
  CHECK(w(0.0) == doctest::Approx(0.5477225575051661).epsilon(1e-15));
  CHECK(w(10.0) == doctest::Approx(std::sqrt(0.3) / std::pow(std::cosh(10.0 * std::sqrt(0.05)), 2)).epsilon(1e-14));
  const auto x = w.grid()->nodes();
  const int n = w.grid()->size();
  for (int j = 1; j < n; ++j) CHECK(w.samples[j] == doctest::Approx(w.samples[n - j]).epsilon(1e-15));
  for (int j = n / 2 + 1; j < n; ++j) CHECK(w.samples[j] < w.samples[j - 1]);
  CHECK(x[n / 2] == 0.0);
}

TEST_CASE("closed-form derivative matches the spectral one") {
  const WaveProfile w = profile(small_grid());
  CHECK(max_abs(derivative(w.samples, 1) - w.derivative) < 1e-11);
}

TEST_CASE("ODE residual") {
  const WaveProfile w = profile(small_grid());
  CHECK(ode_residual(w) < 1e-9);
  CHECK(ode_residual(w.samples, 0.17) > 1e-3);
  CHECK(ode_residual(RealField(w.grid()), 0.16) == 0.0);
}

TEST_CASE("conserved functionals of the wave match closed forms") {
  const WaveProfile w = profile(small_grid());
  const auto f = functionals(w.pair());
  CHECK(f.mass == doctest::Approx(2.0 * std::sqrt(5.0) / 5.0).epsilon(1e-12));
  CHECK(f.energy == doctest::Approx(-0.0511101252).epsilon(1e-9));
  CHECK(f.g == doctest::Approx(f.energy + 0.16 * f.mass).epsilon(1e-15));
  const auto zero = functionals(ComplexField(w.grid()));
  CHECK(zero.mass == 0.0);
  CHECK(zero.energy == 0.0);
  CHECK_THROWS(functionals(RealField(w.grid()), RealField(make_grid(96.0, 256))));
}

TEST_CASE("the wave is a critical point of G") {
  const WaveProfile w = profile(small_grid());
  CHECK(max_abs(gradient_G(w.pair())) < 1e-9);
  const auto [gp, gq] = gradient_G(w.samples, RealField(w.grid()));
  CHECK(max_abs(gp) < 1e-9);
  CHECK(max_abs(gq) < 1e-12);
}

TEST_CASE("property: gradient_G is the L2 gradient of G (directional derivatives)") {
  const auto g = small_grid(256);
  const WaveProfile w = profile(g);
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const ComplexField u = w.pair() + f4nls::testing::random_pair(g, seed) * cplx(0.1);
    const ComplexField dir = f4nls::testing::random_pair(g, seed + 50);
    const double h = 1e-5;
    const double fd = (functionals(u + dir * cplx(h)).g - functionals(u - dir * cplx(h)).g) / (2 * h);
    const double an = inner(gradient_G(u), dir, InnerProductKind::L2);
    CHECK(fd == doctest::Approx(an).epsilon(1e-7));
  }
}

TEST_CASE("property: functionals are invariant under the symmetries") {
  const auto g = small_grid(256);
  const ComplexField u = profile(g).pair() + f4nls::testing::random_pair(g, 9) * cplx(0.05);
  const auto base = functionals(u);
  const auto moved = functionals(rotate(translate(u, 1.7), 0.9));
  CHECK(moved.mass == doctest::Approx(base.mass).epsilon(1e-13));
  CHECK(moved.energy == doctest::Approx(base.energy).epsilon(1e-12));
}

}
