#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qtube/base.hpp"
#include "qtube/error.hpp"
#include "qtube/parabolic.hpp"

using namespace qtube;

namespace {

BaseManifold family(const std::string& name, double T) {
  FamilySpec f;
  f.name = name;
  return make_base(f, 1, T);
}

}  // namespace

TEST_CASE("flat capacity energy is 2 pi / log(R/s)") {
  const BaseManifold plane = family("plane", 64);
  const double s = 2.0, R = 16.0;
  const double exact = 2.0 * std::numbers::pi / std::log(R / s);
  CHECK(capacity_potential(plane, s, R).energy == doctest::Approx(exact).epsilon(1e-8));
  CapacityOptions grid;
  grid.force_grid = true;
  grid.grid_resolution = 400;
  const CapacityPotential g = capacity_potential(plane, s, R, grid);
  CHECK(g.grid);
  CHECK(std::abs(g.energy / exact - 1.0) < 1e-2);
  CHECK(g.psi_min >= -1e-12);
  CHECK(g.psi_max <= 1.0 + 1e-12);
}

TEST_CASE("radial capacity potential is 1 inside, 0 outside and monotone") {
  const BaseManifold cat = family("catenoid", 256);
  const RadialCapacity cap(cat.radial, 2.0, 64.0);
  CHECK(cap.value(1.0) == 1.0);
  CHECK(cap.value(2.0) == doctest::Approx(1.0));
  CHECK(cap.value(64.0) == doctest::Approx(0.0).epsilon(1e-14));
  double prev = 1.0;
  for (double t = 3.0; t < 64.0; t *= 1.3) {
    CHECK(cap.value(t) < prev);
    prev = cap.value(t);
  }
}

TEST_CASE("catenoid capacity energies decrease strictly in R") {
  const BaseManifold cat = family("catenoid", 1024);
  const double s = 2.0;
  double prev = INFINITY;
  for (double f : {8.0, 32.0, 128.0}) {
    const double e = capacity_potential(cat, s, f * s).energy;
    CHECK(e < prev);
    prev = e;
  }
}

TEST_CASE("capacity rejects degenerate annuli") {
  const BaseManifold plane = family("plane", 64);
  try {
    (void)capacity_potential(plane, 4.0, 4.0);
    FAIL("expected NotAnnulus");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotAnnulus);
  }
  CHECK_THROWS_AS(capacity_potential(plane, 2.0, 128.0), Error);
}

TEST_CASE("catenoid ends are planar and the end condition holds") {
  const BaseManifold cat = family("catenoid", 256);
  const EndProfile ep = end_profile(cat);
  REQUIRE(ep.lambda.size() == 2);
  for (double l : ep.lambda) CHECK(std::abs(l - 1.0) < 0.02);
  CHECK(ep.euler == 0);
  CHECK(ep.condition_holds);
  CHECK(ep.cohn_vossen == doctest::Approx(-2.0).epsilon(1e-3));
}

TEST_CASE("truncated total curvature of the catenoid") {
  const BaseManifold cat = family("catenoid", 256);
  // |v| <= 4 corresponds to geodesic radius sinh 4.
  const double K = total_curvature(cat, std::sinh(4.0));
  CHECK(std::abs(K / (-4.0 * std::numbers::pi) - 1.0) < 0.05);
  CHECK(K == doctest::Approx(-4.0 * std::numbers::pi * std::tanh(4.0)).epsilon(1e-8));
  CHECK(std::abs(gauss_bonnet_defect(cat, 5.0)) < 1e-8);
}

TEST_CASE("quadratic volume growth on the plane and catenoid") {
  for (const char* name : {"plane", "catenoid"}) {
    const BaseManifold b = family(name, 256);
    std::vector<double> radii;
    for (int i = 0; i < 12; ++i) radii.push_back(256.0 * std::pow(0.5, 0.5 * (11 - i)));
    const VolumeGrowth vg = volume_growth_test(b, radii);
    CHECK(vg.verdict == GrowthVerdict::ParabolicConsistent);
    CHECK(vg.alpha == doctest::Approx(2.0).epsilon(0.02));
  }
  CHECK(ball_volume(family("plane", 64), 3.0) == doctest::Approx(9.0 * std::numbers::pi).epsilon(1e-8));
}

TEST_CASE("cone end has slope below one") {
  const BaseManifold cone = family("cone", 64);
  const EndProfile ep = end_profile(cone);
  REQUIRE(ep.lambda.size() == 1);
  CHECK(ep.lambda[0] < 0.95);
  CHECK_FALSE(ep.condition_holds);
}
