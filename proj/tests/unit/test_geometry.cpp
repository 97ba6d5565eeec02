#include <doctest.h>

#include <cmath>

#include "qtube/base.hpp"
#include "qtube/error.hpp"
#include "qtube/fermi.hpp"
#include "qtube/identities.hpp"
#include "qtube/manifold.hpp"

using namespace qtube;

namespace {

BaseManifold family(const std::string& name, int k, double T, std::map<std::string, double> params = {}) {
  FamilySpec f;
  f.name = name;
  f.params = std::move(params);
  return make_base(f, k, T);
}

}  // namespace

TEST_CASE("catenoid second fundamental form has principal curvatures +-sech^2") {
  const BaseManifold cat = family("catenoid", 1, 16);
  for (double v : {0.0, 0.4, -1.3}) {
    const FramedPoint fp = frame_point(*cat.chart, Vec{{v, 0.7}});
    const double s2 = 1.0 / std::pow(std::cosh(v), 2);
    CHECK(fp.max_principal_curvature() == doctest::Approx(s2).epsilon(1e-9));
    const Riemann R = curvature_operator(fp);
    CHECK(sectional_curvature(R, fp.g, 0, 1) == doctest::Approx(-s2 * s2).epsilon(1e-9));
    CHECK(R.symmetry_defect() < 1e-12);
  }
}

TEST_CASE("Gauss equation matches the intrinsic curvature of the induced metric") {
  const BaseManifold g = family("graph", 2, 2, {{"seed", 5}});
  const Vec x{{0.3, -0.2}};
  const FramedPoint fp = frame_point(*g.chart, x);
  const Riemann ext = curvature_operator(fp);
  const Riemann intr = intrinsic_curvature_fd(*g.chart, x, 1e-3);
  CHECK(sectional_curvature(ext, fp.g, 0, 1) ==
        doctest::Approx(sectional_curvature(intr, fp.g, 0, 1)).epsilon(1e-4));
}

TEST_CASE("normal frame is orthonormal and normal") {
  const BaseManifold g = family("graph", 2, 2, {{"seed", 9}});
  const FramedPoint fp = frame_point(*g.chart, Vec{{-0.4, 0.5}});
  CHECK((fp.normals.transpose() * fp.normals - Mat::Identity(2, 2)).norm() < 1e-12);
  CHECK((fp.tangent * fp.normals).norm() < 1e-12);
}

TEST_CASE("flat tube metric is Euclidean") {
  const BaseManifold plane = family("plane", 1, 4);
  const FramedPoint fp = frame_point(*plane.chart, Vec{{0.5, 1.5}});
  const TubeMetric tm = assemble_metric(fp, Vec::Constant(1, 0.3), 0.5);
  CHECK((tm.G - Mat::Identity(3, 3)).norm() < 1e-14);
  CHECK(tm.det_density == doctest::Approx(1.0));
}

TEST_CASE("catenoid volume density is 1 - u kappa per principal direction") {
  const BaseManifold cat = family("catenoid", 1, 16);
  const FramedPoint fp = frame_point(*cat.chart, Vec{{0.0, 0.0}});
  const TubeMetric tm = assemble_metric(fp, Vec::Constant(1, 0.4), 0.5);
  // Principal curvatures +-1 at the neck.
  CHECK(tm.det_shape == doctest::Approx((1 - 0.4) * (1 + 0.4)).epsilon(1e-12));
}

TEST_CASE("admissible radius and tube errors") {
  CHECK(max_radius(2.0, 4) == doctest::Approx(0.25));
  CHECK_THROWS_AS(max_radius(0.0, 1), Error);
  CHECK_THROWS_AS(make_tube_spec(1, 0.6, 2.0), Error);
  const BaseManifold cat = family("catenoid", 1, 16);
  const FramedPoint fp = frame_point(*cat.chart, Vec{{0.1, 0.0}});
  try {
    (void)make_fermi_point(fp, Vec::Constant(1, 0.5), 0.5);
    FAIL("expected OutsideTube");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::OutsideTube);
  }
}

TEST_CASE("tube radius for k = 2 catenoid: 0.5 is on the boundary") {
  const BaseManifold cat = family("catenoid", 2, 64);
  CHECK_THROWS_AS(tube_for(cat, 0.5, 1.01), Error);
  // sup |A| = sqrt 2 at the neck.
  CHECK(tube_for(cat, 0.45, 1.01).eps0 == doctest::Approx(1.01 * std::sqrt(2.0)).epsilon(1e-6));
}

TEST_CASE("metric identities hold on every family") {
  struct Case {
    std::string name;
    int k;
    double T, r;
    std::map<std::string, double> params;
  };
  for (const Case& c : {Case{"plane", 1, 8, 0.5, {}}, Case{"cylinder", 1, 8, 0.5, {}},
                        Case{"catenoid", 1, 16, 0.5, {}}, Case{"catenoid", 2, 16, 0.45, {}},
                        Case{"graph", 2, 2, 0.3, {{"seed", 3}}}, Case{"finger", 1, 16, 0.5, {}}}) {
    CAPTURE(c.name);
    CAPTURE(c.k);
    const BaseManifold base = family(c.name, c.k, c.T, c.params);
    const TubeSpec tube = c.name == "plane" ? make_tube_spec(c.k, c.r, 0.0) : tube_for(base, c.r);
    const IdentityReport rep = verify_identities(base, tube, 100, 17);
    for (const auto& chk : rep.checks) {
      CAPTURE(chk.name);
      CHECK(chk.samples >= 100);
      CHECK(chk.passed);
    }
  }
}

TEST_CASE("identity sampling is deterministic in the seed") {
  const BaseManifold cat = family("catenoid", 1, 16);
  const TubeSpec tube = tube_for(cat, 0.5);
  const IdentityReport a = verify_identities(cat, tube, 20, 4), b = verify_identities(cat, tube, 20, 4);
  for (std::size_t i = 0; i < a.checks.size(); ++i) CHECK(a.checks[i].max_defect == b.checks[i].max_defect);
}
