#include <doctest.h>

#include <cmath>
#include <numbers>

#include "f4nls/grid.hpp"
#include "support.hpp"

using namespace f4nls;
using f4nls::testing::random_field;
using f4nls::testing::small_grid;

TEST_SUITE("grid") {

TEST_CASE("grid construction and frequencies") {
  CHECK_THROWS(make_grid(-1.0, 64));
  CHECK_THROWS(make_grid(10.0, 63));
  const auto g = make_grid(10.0, 64);
  CHECK(g->spacing() == doctest::Approx(20.0 / 64));
  CHECK(g->nodes()[0] == doctest::Approx(-10.0));
  const auto xi = g->frequencies();
  CHECK(xi[1] == doctest::Approx(std::numbers::pi / 10.0));
  CHECK(xi[32] == doctest::Approx(-32 * std::numbers::pi / 10.0));
  CHECK(xi[63] == doctest::Approx(-std::numbers::pi / 10.0));
}

TEST_CASE("spectral derivatives of a resolved trigonometric field are exact") {
  const auto g = make_grid(std::numbers::pi, 64);
  const RealField f = sample_with(g, [](double x) { return std::sin(3 * x) + 0.5 * std::cos(5 * x); });
  const RealField d1 = derivative(f, 1);
  const RealField d4 = derivative(f, 4);
  const auto x = g->nodes();
  // Roundoff in the unused modes is amplified by xi_max^4 ~ 1e6.
  for (int j = 0; j < g->size(); ++j) {
    CHECK(std::abs(d1[j] - (3 * std::cos(3 * x[j]) - 2.5 * std::sin(5 * x[j]))) < 1e-12);
    CHECK(std::abs(d4[j] - (81 * std::sin(3 * x[j]) + 312.5 * std::cos(5 * x[j]))) < 2e-9);
  }
  CHECK_THROWS(derivative(f, 5));
}

TEST_CASE("H2 norm of a single mode carries the Sobolev weight") {
  const auto g = make_grid(std::numbers::pi, 64);
  const RealField f = sample_with(g, [](double x) { return std::cos(2 * x); });
  const double l2 = inner(f, f, InnerProductKind::L2);
  CHECK(l2 == doctest::Approx(std::numbers::pi).epsilon(1e-13));
  CHECK(inner(f, f, InnerProductKind::H2) == doctest::Approx(h2_weight(2.0) * l2).epsilon(1e-13));
}

TEST_CASE("property: quadrature and spectral L2 norms agree (Parseval)") {
  const auto g = small_grid(256);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const RealField f = random_field(g, seed);
    double direct = 0.0;
    for (double v : f.values) direct += v * v;
    direct *= g->spacing();
    CHECK(inner(f, f, InnerProductKind::L2) == doctest::Approx(direct).epsilon(1e-12));
  }
}

TEST_CASE("property: translation is an isometry and composes additively") {
  const auto g = small_grid(256);
  const ComplexField u = f4nls::testing::random_pair(g, 7);
  for (double r : {0.3, -2.7, 11.0}) {
    const ComplexField t = translate(u, r);
    CHECK(norm(t, InnerProductKind::H2) == doctest::Approx(norm(u, InnerProductKind::H2)).epsilon(1e-12));
    const ComplexField back = translate(t, -r);
    CHECK(max_abs(back - u) < 1e-12);
  }
  // A whole number of grid cells is a plain index shift.
  const ComplexField s = translate(u, 3 * g->spacing());
  CHECK(std::abs(s[10] - u[7]) < 1e-12);
}

TEST_CASE("rotation acts as e^{-i theta}") {
  const auto g = small_grid(64);
  const ComplexField u = to_complex(random_field(g, 3));
  const ComplexField r = rotate(u, 0.4);
  for (std::size_t j = 0; j < u.size(); ++j) CHECK(std::abs(r[j] - std::polar(1.0, -0.4) * u[j]) < 1e-15);
}

TEST_CASE("random smooth field is real, seeded and band-limited") {
  const auto g = small_grid(256);
  const RealField a = random_field(g, 42, 1.5, 8.0);
  const RealField b = random_field(g, 42, 1.5, 8.0);
  CHECK(a.values == b.values);
  CHECK(random_field(g, 43, 1.5, 8.0).values != a.values);
  CHECK(max_abs(a) > 0.0);
}

TEST_CASE("grid mismatch is rejected") {
  const RealField a(make_grid(10.0, 64)), b(make_grid(10.0, 128));
  CHECK_THROWS(inner(a, b, InnerProductKind::L2));
  CHECK_THROWS(RealField(make_grid(10.0, 64), std::vector<double>(10)));
}

}
