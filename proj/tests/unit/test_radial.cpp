#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qtube/radial.hpp"

using namespace qtube;

// First zeros: cos (k=1), J0 (k=2), sin(t)/t (k=3).
constexpr double kJ0Zero = 2.4048255576957728;

TEST_CASE("radial thresholds match the Bessel zeros") {
  CHECK(std::abs(solve_radial_mode(1, 1).rho - std::numbers::pi / 2) < 1e-10);
  CHECK(std::abs(solve_radial_mode(2, 1).rho - kJ0Zero) < 1e-9);
  CHECK(std::abs(solve_radial_mode(3, 1).rho - std::numbers::pi) < 1e-10);
}

TEST_CASE("profile is normalized, positive and vanishes at the boundary") {
  for (int k = 1; k <= 3; ++k) {
    const RadialMode m = solve_radial_mode(k, 2);
    CHECK(m.chi(0.0) > 0.0);
    CHECK(std::abs(m.chi(1.0)) < 1e-8);
    CHECK(std::abs(m.dchi(0.0)) < 1e-8);
    for (double t = 0.05; t < 1.0; t += 0.05) CHECK(m.chi(t) > 0.0);
    CHECK(ode_residual(m) < 1e-6);
  }
}

TEST_CASE("shooting residual changes sign across the threshold") {
  CHECK(shoot(2, kJ0Zero - 1e-3) * shoot(2, kJ0Zero + 1e-3) < 0.0);
}

TEST_CASE("mu_2 for k = 1 is one half") {
  const RadialMode m = solve_radial_mode(1, 2);
  CHECK(std::abs(m.mu2p(1) - 0.5) < 1e-10);
  // mu_4 = 6 int t^2 cos^2(pi t/2) dt
  CHECK(m.mu2p(2) == doctest::Approx(1.0 - 6.0 / (std::numbers::pi * std::numbers::pi)).epsilon(1e-9));
}

TEST_CASE("rigidity integral equals mu and vanishes at p = 0") {
  for (int k = 1; k <= 3; ++k) {
    const RadialMode m = solve_radial_mode(k, 2);
    CHECK(std::abs(rigidity_integral(m, 0)) < 1e-8);
    for (int p = 1; p <= 2; ++p) CHECK(std::abs(rigidity_integral(m, p) - m.mu2p(p)) < 1e-8);
  }
}

TEST_CASE("rho for k = 2 is stable under shooting tolerances") {
  ShootingOptions loose;
  loose.ode_rtol = 1e-11;
  loose.ode_atol = 1e-13;
  loose.series_start = 1e-2;
  CHECK(std::abs(solve_radial_mode(2, 1, loose).rho - solve_radial_mode(2, 1).rho) < 1e-9);
}
