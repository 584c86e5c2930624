#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "f4nls/coercivity.hpp"
#include "f4nls/totalpos.hpp"
#include "support.hpp"

using namespace f4nls;

namespace {

const SecondVariation& sv() {
  static const SecondVariation s(f4nls::testing::small_grid(256));
  return s;
}

}  // namespace

TEST_SUITE("coercivity") {

TEST_CASE("I is negative and chi solves L1 chi = phi") {
  const auto r = weinstein_direct(sv().l1, sv().wave);
  CHECK(r.value == doctest::Approx(-3.2207784).epsilon(1e-6));
  CHECK(r.n_zero == 1);
  CHECK(r.solve_residual < 1e-8);
  CHECK(std::abs(r.kernel_overlap) < 1e-10);
  // Adding a kernel component to chi does not change (chi, phi).
  const RealField shifted = r.chi + sv().wave.derivative * 0.7;
  CHECK(inner(shifted, sv().wave.samples, InnerProductKind::L2) == doctest::Approx(r.value).epsilon(1e-12));
}

TEST_CASE("series prefactor, sign and argument checks") {
  const FrequencyGrid g{40.0, 1200};
  const auto lam = even_eigenvalues(potential_kernel(OperatorKind::L1, sv().wave, g), g, 16);
  const auto s = weinstein_series(lam, 15, sv().wave.width);
  CHECK(s.prefactor == doctest::Approx(std::pow(8.0 / std::numbers::pi, 2)).epsilon(1e-14));
  CHECK(s.normalization == doctest::Approx(std::numbers::pi * std::numbers::pi / (3.0 * sv().wave.width)));
  CHECK(s.estimate < 0.0);
  CHECK(s.estimate == doctest::Approx(-3.2207784).epsilon(1e-3));
  CHECK_THROWS_AS(weinstein_series(lam, 9, sv().wave.width), std::invalid_argument);
  CHECK_THROWS_AS(weinstein_series(std::vector<double>(5, 0.5), 15, sv().wave.width), std::invalid_argument);
  std::vector<double> degenerate(16, 0.5);
  degenerate[3] = 1.0;
  CHECK_THROWS_AS(weinstein_series(degenerate, 15, sv().wave.width), NumericalError);
}

TEST_CASE("orthogonality subspace bound is positive") {
  const auto r = subspace_bound(sv(), orthogonality_constraints(sv().wave));
  CHECK(r.lambda_min > 0.0);
  CHECK(r.decoupled);
  CHECK(r.lambda_min == doctest::Approx(std::min(r.p_block, r.q_block)));
  CHECK(norm(r.p_minimizer, InnerProductKind::H2) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("property: pair-space and decoupled paths agree") {
  const SecondVariation small(make_grid(96.0, 128));
  const auto cons = z_constraints(small.wave);
  const auto a = subspace_bound(small, cons);
  const auto b = subspace_bound(small, cons, std::nullopt, {}, true);
  CHECK_FALSE(b.decoupled);
  CHECK(a.lambda_min == doctest::Approx(b.lambda_min).epsilon(1e-8));
  const auto pa = subspace_bound(small, symmetry_constraints(small.wave), 0.3);
  const auto pb = subspace_bound(small, symmetry_constraints(small.wave), 0.3, {}, true);
  CHECK(pa.lambda_min == doctest::Approx(pb.lambda_min).epsilon(1e-8));
  CHECK_THROWS(subspace_bound(small, cons, -1.0));
}

TEST_CASE("property: the penalized bound increases with M and matches direct solves") {
  const PenaltyCurve curve(sv());
  double prev = curve(0.0);
  CHECK(prev <= 0.0);
  for (double m : {0.05, 0.1, 0.2, 0.4, 0.8}) {
    const double v = curve(m);
    CHECK(v >= prev - 1e-12);
    prev = v;
  }
  const auto direct = subspace_bound(sv(), symmetry_constraints(sv().wave), 0.2);
  CHECK(curve(0.2) == doctest::Approx(direct.lambda_min).epsilon(1e-7));
}

TEST_CASE("penalty calibration") {
  const double z = subspace_bound(sv(), z_constraints(sv().wave)).lambda_min;
  const Calibration cal = calibrate_M(sv(), z);
  CHECK(cal.lambda_min >= z / 2 - 1e-12);
  CHECK(cal.lambda_check == doctest::Approx(cal.lambda_min).epsilon(1e-6));
  const PenaltyCurve curve(sv());
  CHECK(curve(cal.penalty * 0.99) < z / 2);
  CHECK(penalty_sample_min(sv(), cal.penalty, 20, 5) >= cal.lambda_min - 1e-10);
  CHECK_THROWS_AS(calibrate_M(sv(), 10.0), std::domain_error);
  CHECK_THROWS_AS(calibrate_M(sv(), 0.0), std::invalid_argument);
}

}
