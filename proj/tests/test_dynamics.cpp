#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "f4nls/dynamics.hpp"
#include "f4nls/linalg.hpp"
#include "support.hpp"

using namespace f4nls;
using f4nls::testing::small_grid;

namespace {

double max_diff(const ComplexField& a, const ComplexField& b) { return max_abs(a - b); }

}  // namespace

TEST_SUITE("dynamics") {

TEST_CASE("zero stays zero") {
  const ComplexField z(small_grid(128));
  const auto d = evolve(z, {1e-2, 0.5, 10});
  CHECK(max_abs(d.terminal) == 0.0);
}

TEST_CASE("a plane wave picks up the exact phase") {
  // u = A e^{i k x}: u_t = i (|A|^2 - k^2 - k^4) u
  const double L = std::numbers::pi * 4;
  const auto g = make_grid(L, 64);
  const double k = 2.0 * std::numbers::pi / (2 * L) * 3, A = 0.4;
  ComplexField u(g);
  for (int j = 0; j < g->size(); ++j) u[j] = A * std::polar(1.0, k * g->nodes()[j]);
  const double t = 0.5;
  const auto d = evolve(u, {1e-3, t, 100});
  const cplx factor = std::polar(1.0, (A * A - k * k - k * k * k * k) * t);
  CHECK(max_diff(d.terminal, u * factor) < 1e-11);
}

TEST_CASE("the standing wave rotates at the wave frequency") {
  const WaveProfile w = profile(small_grid(256));
  const auto d = evolve(w.pair(), {1e-3, 1.0, 100});
  const cplx factor = std::polar(1.0, w.frequency * 1.0);
  CHECK(max_diff(d.terminal, w.pair() * factor) < 1e-5);
  CHECK(d.max_relative_mass_drift() < 1e-12);
  CHECK(d.max_relative_energy_drift() < 1e-9);
  CHECK(d.times.front() == 0.0);
  CHECK(d.times.back() == doctest::Approx(1.0));
}

TEST_CASE("property: Strang splitting is second order") {
  const auto g = small_grid(256);
  const ComplexField u0 = profile(g).pair() + f4nls::testing::random_pair(g, 11) * cplx(0.2);
  const auto ref = evolve(u0, {1e-4, 0.5, 1000}).terminal;
  const double e1 = norm(evolve(u0, {1e-2, 0.5, 100}).terminal - ref, InnerProductKind::L2);
  const double e2 = norm(evolve(u0, {5e-3, 0.5, 100}).terminal - ref, InnerProductKind::L2);
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("property: forward then backward returns the initial datum") {
  const auto g = small_grid(256);
  const ComplexField u0 = profile(g).pair() + f4nls::testing::random_pair(g, 12) * cplx(0.1);
  const auto fwd = evolve(u0, {1e-3, 0.5, 100});
  IntegratorConfig back{1e-3, 0.5, 100, true};
  CHECK(max_diff(evolve(fwd.terminal, back).terminal, u0) < 1e-11);
}

TEST_CASE("property: the flow commutes with translation and rotation") {
  const auto g = small_grid(256);
  const ComplexField u0 = profile(g).pair() + f4nls::testing::random_pair(g, 13) * cplx(0.1);
  const IntegratorConfig cfg{1e-3, 0.3, 100};
  const auto a = evolve(rotate(translate(u0, 2.5), 0.7), cfg).terminal;
  const auto b = rotate(translate(evolve(u0, cfg).terminal, 2.5), 0.7);
  // Sub-cell shifts commute with the pointwise nonlinearity only up to aliasing.
  CHECK(max_diff(a, b) < 1e-8);
  const double cell = g->spacing();
  const auto c = evolve(translate(u0, 7 * cell), cfg).terminal;
  CHECK(max_diff(c, translate(evolve(u0, cfg).terminal, 7 * cell)) < 1e-11);
}

TEST_CASE("a slightly heavier wave stays close and conserves mass") {
  const WaveProfile w = profile(small_grid(256));
  const auto d = evolve(w.pair() * cplx(1.01), {1e-3, 2.0, 100});
  CHECK(d.max_relative_mass_drift() < 1e-12);
  CHECK(d.max_relative_energy_drift() < 1e-8);
  CHECK(max_abs(d.terminal) < 0.6);
}

TEST_CASE("blow-up guard and configuration checks") {
  const auto g = make_grid(10.0, 64);
  const ComplexField big = to_complex(sample_with(g, [](double x) { return 2e6 * std::exp(-x * x); }));
  CHECK_THROWS_AS(evolve(big, {1e-3, 1e-2, 1}), NumericalError);
  CHECK_THROWS_AS(IntegratorConfig({0.0, 1.0, 1}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(IntegratorConfig({1e-2, 1e-3, 1}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(IntegratorConfig({1e-3, 1.0, 0}).validate(), std::invalid_argument);
  CHECK_THROWS(SplitStepIntegrator(g, 0.0));
}

TEST_CASE("phase rate: synthetic data, wrapping and unwrap failure") {
  std::vector<double> t, th;
  for (int i = 0; i <= 200; ++i) {
    t.push_back(0.1 * i);
    th.push_back(std::remainder(-0.16 * t.back() + 0.3, 2.0 * std::numbers::pi));
  }
  CHECK(phase_rate(t, th) == doctest::Approx(0.16).epsilon(1e-12));
  CHECK_THROWS_AS(phase_rate({0.0, 1.0}, {0.0, 3.0}), NumericalError);
  CHECK_THROWS_AS(phase_rate({0.0}, {0.0}), std::invalid_argument);
}

TEST_CASE("field dump round trip and header layout") {
  const auto g = make_grid(12.5, 32);
  const ComplexField u = f4nls::testing::random_pair(g, 5);
  const auto path = (std::filesystem::temp_directory_path() / "f4nls_test_field.f4f").string();
  write_field(path, u);
  CHECK(std::filesystem::file_size(path) == 20 + 32 * 16);
  const ComplexField v = read_field(path);
  CHECK(v.grid->size() == 32);
  CHECK(v.grid->half_length() == 12.5);
  CHECK(v.values == u.values);
  {
    std::ofstream os(path, std::ios::binary);
    os << "NOTAFIELD";
  }
  CHECK_THROWS(read_field(path));
  std::filesystem::remove(path);
}

TEST_CASE("trajectory CSV has one row per record and leaves missing series empty") {
  const WaveProfile w = profile(small_grid(128));
  const auto d = evolve(w.pair(), {1e-2, 0.1, 5});
  std::ostringstream os;
  write_trajectory_csv(os, d);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "t,E,F,V,d,theta,r");
  int rows = 0;
  while (std::getline(is, line)) {
    ++rows;
    CHECK(line.substr(line.size() - 4) == ",,,,");
  }
  CHECK(rows == static_cast<int>(d.times.size()));
  CHECK(rows == 3);
}

}
