#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qtube/base.hpp"
#include "qtube/error.hpp"
#include "qtube/invariants.hpp"
#include "qtube/manifold.hpp"

using namespace qtube;

namespace {

BaseManifold catenoid(int k) {
  FamilySpec f;
  f.name = "catenoid";
  return make_base(f, k, 32);
}

}  // namespace

TEST_CASE("elementary symmetric functions and det expansion") {
  Mat H(3, 3);
  H << 1, 0.5, 0, 0.5, 2, 0.1, 0, 0.1, -1;
  CHECK(elementary_symmetric(H, 0) == 1.0);
  CHECK(elementary_symmetric(H, 1) == doctest::Approx(2.0));
  CHECK(elementary_symmetric(H, 3) == doctest::Approx(H.determinant()));
  CHECK(det_expansion(H, 0.3) == doctest::Approx((Mat::Identity(3, 3) - 0.3 * H).determinant()).epsilon(1e-13));
  CHECK_THROWS_AS(elementary_symmetric(H, 4), Error);
}

TEST_CASE("odd tube invariants vanish") {
  FamilySpec f;
  f.name = "graph";
  f.params = {{"seed", 2}};
  const BaseManifold g = make_base(f, 2, 2);
  const FramedPoint fp = frame_point(*g.chart, Vec{{0.2, 0.1}});
  CHECK(std::abs(tube_curvature_K(fp, 1)) < 1e-8);
  const BaseManifold cat = catenoid(1);
  const FramedPoint fc = frame_point(*cat.chart, Vec{{0.5, 0.0}});
  CHECK(std::abs(tube_curvature_K(fc, 1)) < 1e-8);
}

TEST_CASE("K_2 has the sign of the Gauss curvature") {
  FamilySpec f;
  f.name = "finger";  // both signs occur along the profile
  const BaseManifold fin = make_base(f, 1, 16);
  int positive = 0, negative = 0;
  for (double tau = 0.1; tau < 12.0; tau += 0.37) {
    const FramedPoint fp = frame_point(*fin.chart, fin.radial->chart_point(fin.radial->v_at(0, tau)));
    const double K = sectional_curvature(curvature_operator(fp), fp.g, 0, 1);
    const double K2 = tube_curvature_K(fp, 2);
    if (std::abs(K) < 1e-10) continue;
    CHECK(K * K2 > 0.0);
    (K > 0 ? positive : negative) += 1;
  }
  CHECK(positive > 0);
  CHECK(negative > 0);
}

TEST_CASE("Gray prefactor values") {
  CHECK(gray_prefactor(1, 1) == doctest::Approx(2.0));
  CHECK(gray_prefactor(1, 2) == doctest::Approx(std::numbers::pi));
  CHECK(gray_prefactor(1, 3) == doctest::Approx(4.0 * std::numbers::pi / 3.0));
}

TEST_CASE("K_2 is proportional to the scalar curvature trace on the catenoid") {
  for (int k : {1, 2}) {
    const BaseManifold cat = catenoid(k);
    std::vector<FramedPoint> pts;
    for (double v = -2.0; v <= 2.0; v += 0.25) pts.push_back(frame_point(*cat.chart, Vec{{v, 0.3}}));
    const GrayRatio g = gray_ratio(pts, 1);
    CHECK(g.cv < 1e-6);
    CHECK(g.mean == doctest::Approx(gray_prefactor(1, k)).epsilon(1e-8));
  }
}

TEST_CASE("total K_2 over the catenoid") {
  // K_2 = 2 K for k = 1, so the integral is -8 pi.
  const BaseManifold cat = catenoid(1);
  const auto I = curvature_integrals(cat);
  REQUIRE(I.size() == 1);
  CHECK(I[0] == doctest::Approx(-8.0 * std::numbers::pi * std::tanh(std::asinh(32.0))).epsilon(1e-6));
}
