#include <doctest.h>

#include <cmath>

#include "f4nls/linops.hpp"
#include "support.hpp"

using namespace f4nls;
using f4nls::testing::random_field;
using f4nls::testing::small_grid;

namespace {

struct Ops {
  WaveProfile wave;
  OperatorDisc l1, l2;
  explicit Ops(int n = 512)
      : wave(profile(small_grid(n))),
        l1(build_operator(OperatorKind::L1, wave)),
        l2(build_operator(OperatorKind::L2, wave)) {}
};

const Ops& ops() {
  static const Ops o;
  return o;
}

}  // namespace

TEST_SUITE("linops") {

TEST_CASE("operator matrix is symmetric and agrees with the FFT action") {
  const auto& o = ops();
  CHECK((o.l1.matrix - o.l1.matrix.transpose()).cwiseAbs().maxCoeff() < 1e-12 * o.l1.matrix.cwiseAbs().maxCoeff());
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const RealField f = random_field(o.wave.grid(), seed);
    CHECK(max_abs(o.l1.apply(f) - o.l1.apply_matrix(f)) < 1e-10);
    CHECK(max_abs(o.l2.apply(f) - o.l2.apply_matrix(f)) < 1e-10);
  }
}

TEST_CASE("potential range and symbol bounds") {
  const auto& o = ops();
  const double top = 3.0 * o.wave.amplitude * o.wave.amplitude;
  for (double v : o.l1.potential.values) {
    CHECK(v >= 0.0);
    CHECK(v <= top + 1e-15);
  }
  for (double xi = 1.0; xi < 50.0; xi *= 1.3) {
    const double m = dispersion_symbol(xi);
    CHECK(std::pow(xi, 4) <= m);
    CHECK(m <= 2.0 * std::pow(xi, 4));
  }
}

TEST_CASE("kernel residuals") {
  const auto& o = ops();
  CHECK(max_abs(o.l1.apply(o.wave.derivative)) < 1e-9);
  CHECK(max_abs(o.l2.apply(o.wave.samples)) < 1e-9);
}

TEST_CASE("spectrum counts and zero modes") {
  const auto& o = ops();
  const auto s1 = spectrum(o.l1, 6);
  const auto s2 = spectrum(o.l2, 6);
  CHECK(s1.n_negative == 1);
  CHECK(s1.n_zero == 1);
  CHECK(s2.n_negative == 0);
  CHECK(s2.n_zero == 1);
  CHECK(s1.eigenvalues[0] == doctest::Approx(-0.453516).epsilon(1e-5));
  CHECK(std::abs(s1.eigenvalues[2]) > 1e-2);
  CHECK(std::abs(s2.eigenvalues[1]) > 1e-2);
  for (double r : s1.residuals) CHECK(r < 1e-8);
  CHECK(s1.essential_edge == doctest::Approx(0.16));
  // the kernel vector is phi' up to sign
  const double overlap = inner(s1.eigenvectors[1], o.wave.derivative, InnerProductKind::L2) /
                         norm(o.wave.derivative, InnerProductKind::L2);
  CHECK(std::abs(overlap) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("free operator is bounded below by alpha") {
  const auto g = small_grid(256);
  const auto free = build_operator(RealField(g), 0.16);
  CHECK(spectrum(free, 1).eigenvalues[0] >= 0.16 - 1e-12);
}

TEST_CASE("property: discrete eigenfunctions are even or odd") {
  const auto& o = ops();
  const auto s = spectrum(o.l1, 2);
  bool even = false;
  CHECK(parity_defect(s.eigenvectors[0], &even) < 1e-8);
  CHECK(even);
  CHECK(parity_defect(s.eigenvectors[1], &even) < 1e-8);
  CHECK_FALSE(even);
}

TEST_CASE("property: low eigenvalues are stable under refinement") {
  const auto coarse = spectrum(ops().l1, 1).eigenvalues[0];
  const Ops fine(1024);
  CHECK(std::abs(spectrum(fine.l1, 1).eigenvalues[0] - coarse) < 1e-6);
}

TEST_CASE("constrained minima") {
  const auto& o = ops();
  const double gamma = constrained_min(o.l1, {o.wave.samples}).value;
  const double d1 = constrained_min(o.l1, {o.wave.samples, o.wave.derivative}).value;
  const double d2 = constrained_min(o.l2, {o.wave.samples}).value;
  CHECK(std::abs(gamma) < 5e-6);
  CHECK(d1 > 10.0 * std::abs(gamma));
  CHECK(d1 > 0.0);
  CHECK(d2 > 0.0);
  // the minimizer satisfies the constraints and is unit length
  const auto m = constrained_min(o.l1, {o.wave.samples, o.wave.derivative});
  CHECK(std::abs(inner(m.minimizer, o.wave.samples, InnerProductKind::L2)) < 1e-10);
  CHECK(norm(m.minimizer, InnerProductKind::L2) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK_THROWS_AS(constrained_min(o.l1, {o.wave.samples, o.wave.samples * 2.0}), NumericalError);
}

TEST_CASE("block operator minimum equals min(delta1, delta2)") {
  const Ops o(256);
  const RealField zero(o.wave.grid());
  const double d1 = constrained_min(o.l1, {o.wave.samples, o.wave.derivative}).value;
  const double d2 = constrained_min(o.l2, {o.wave.samples}).value;
  const std::vector<ComplexField> cons{from_pair(zero, o.wave.samples), from_pair(o.wave.samples, zero),
                                       from_pair(o.wave.derivative, zero)};
  CHECK(matrix_operator_min(o.l1, o.l2, cons) == doctest::Approx(std::min(d1, d2)).epsilon(1e-8));
  CHECK(matrix_operator_min(o.l1, o.l2, {}) == doctest::Approx(spectrum(o.l1, 1).eigenvalues[0]).epsilon(1e-8));
}

TEST_CASE("H2 pencil agrees with an explicit generalized problem") {
  const Ops o(128);
  const auto p = pencil_min(o.l1, {{o.wave.derivative, InnerProductKind::H2}});
  // Rayleigh quotient of the returned minimizer reproduces the value.
  const RealField& v = p.minimizer;
  const double num = inner(o.l1.apply(v), v, InnerProductKind::L2);
  CHECK(num / inner(v, v, InnerProductKind::H2) == doctest::Approx(p.value).epsilon(1e-9));
  CHECK(std::abs(inner(v, o.wave.derivative, InnerProductKind::H2)) < 1e-10);
}

TEST_CASE("Garding certificate") {
  const auto& o = ops();
  const auto c = garding_certify(o.l1, 0.5);
  CHECK(c.valid);
  CHECK(c.constant <= 0.5 - 0.16 + 0.9 + 1e-12);
  CHECK(c.min_eig >= -1e-10);
  const auto free = garding_certify(build_operator(RealField(o.wave.grid()), 0.16), 0.5);
  CHECK(free.valid);
  CHECK(free.constant <= 0.5 - 0.16 + 1e-10);
  CHECK_THROWS(garding_certify(o.l1, 1.5));
  CHECK_THROWS(garding_certify(o.l1, 0.0));
}

}
