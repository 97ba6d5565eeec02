#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qtube/base.hpp"
#include "qtube/certificate.hpp"
#include "qtube/error.hpp"
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

TEST_CASE("fiber integral equals the mu-weighted tube invariants") {
  const RadialMode m1 = solve_radial_mode(1, 1);
  const BaseManifold cat = family("catenoid", 1, 32);
  for (double v : {0.0, 0.5, 1.5}) {
    const FramedPoint fp = frame_point(*cat.chart, Vec{{v, 0.0}});
    CHECK(fiber_ball_integral(fp, m1) == doctest::Approx(fiber_identity_value(fp, m1)).epsilon(1e-10));
  }
  const RadialMode m2 = solve_radial_mode(2, 1);
  const BaseManifold cat2 = family("catenoid", 2, 32);
  const FramedPoint fp = frame_point(*cat2.chart, Vec{{0.3, 0.0}});
  CHECK(fiber_ball_integral(fp, m2) == doctest::Approx(fiber_identity_value(fp, m2)).epsilon(1e-10));
}

TEST_CASE("certificate integral on the catenoid is -4 pi") {
  const BaseManifold cat = family("catenoid", 1, 256);
  const TubeSpec tube = tube_for(cat, 0.5);
  const CertificateIntegral I = certificate_integral(cat, tube, solve_radial_mode(1, 1));
  CHECK(I.value == doctest::Approx(-4.0 * std::numbers::pi).epsilon(1e-4));
  CHECK(I.tail_bound < std::abs(I.value));
  CHECK(I.fiber_identity_error < 1e-8);
}

TEST_CASE("Q splits into fiber and horizontal parts with no cross term") {
  const BaseManifold cat = family("catenoid", 1, 256);
  const TubeSpec tube = tube_for(cat, 0.5);
  const QBreakdown q = evaluate_Q(cat, tube, solve_radial_mode(1, 1), 4.0, 64.0);
  CHECK(q.value == doctest::Approx(q.fiber + q.horizontal + q.cross).epsilon(1e-12));
  CHECK(std::abs(q.cross) < 1e-8 * std::abs(q.fiber));
  CHECK(q.fiber == doctest::Approx(q.fiber_formula).epsilon(1e-6));
  CHECK(q.value < 0.0);
}

TEST_CASE("Q is quadratic in the amplitude") {
  const BaseManifold cat = family("catenoid", 1, 256);
  const TubeSpec tube = tube_for(cat, 0.5);
  const RadialMode m = solve_radial_mode(1, 1);
  CertificateOptions o;
  const double q1 = evaluate_Q(cat, tube, m, 4.0, 64.0, o).value;
  o.amplitude = 3.0;
  CHECK(evaluate_Q(cat, tube, m, 4.0, 64.0, o).value == doctest::Approx(9.0 * q1).epsilon(1e-12));
}

TEST_CASE("Q is covariant under rescaling the tube") {
  // Scaling lengths by 2 multiplies Q by 2^{n+k-2} = 2.
  const RadialMode m = solve_radial_mode(1, 1);
  const BaseManifold a = family("catenoid", 1, 256, {{"c", 1.0}});
  const BaseManifold b = family("catenoid", 1, 512, {{"c", 2.0}});
  const TubeSpec ta = make_tube_spec(1, 0.5, 1.0), tb = make_tube_spec(1, 1.0, 0.5);
  const double qa = evaluate_Q(a, ta, m, 4.0, 64.0).value;
  const double qb = evaluate_Q(b, tb, m, 8.0, 128.0).value;
  CHECK(qb == doctest::Approx(2.0 * qa).epsilon(1e-8));
}

TEST_CASE("Q decreases as the outer capacity radius grows") {
  const BaseManifold cat = family("catenoid", 1, 512);
  const TubeSpec tube = tube_for(cat, 0.5);
  const RadialMode m = solve_radial_mode(1, 1);
  double prev = INFINITY;
  for (double R : {32.0, 64.0, 128.0, 256.0}) {
    const double q = evaluate_Q(cat, tube, m, 4.0, R).value;
    CHECK(q < prev);
    prev = q;
  }
}

TEST_CASE("essential floor rises with the compact radius and stays below threshold") {
  const BaseManifold cat = family("catenoid", 1, 256);
  const TubeSpec tube = tube_for(cat, 0.5);
  const RadialMode m = solve_radial_mode(1, 1);
  double prev = 0.0;
  for (double rc : {2.0, 4.0, 8.0, 16.0}) {
    const EssentialFloor f = essential_lower_bound(cat, tube, m, rc);
    CHECK(f.floor > prev);
    CHECK(f.floor < f.threshold);
    prev = f.floor;
  }
}

TEST_CASE("cylinder violates the decay assumption") {
  const BaseManifold cyl = family("cylinder", 1, 64);
  const TubeSpec tube = tube_for(cyl, 0.5);
  try {
    (void)essential_lower_bound(cyl, tube, solve_radial_mode(1, 1), 4.0);
    FAIL("expected A2Violated");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::A2Violated);
  }
}

TEST_CASE("verdicts on the control families") {
  CertificateOptions o;
  o.run_oracle = false;
  const BaseManifold plane = family("plane", 1, 64);
  CHECK(verdict(plane, make_tube_spec(1, 0.5, 0.0), o).verdict == Verdict::InapplicableTotallyGeodesic);
  const BaseManifold cone = family("cone", 1, 64);
  CHECK(verdict(cone, tube_for(cone, 0.5), o).verdict == Verdict::ConditionFailed);
  const BaseManifold cyl = family("cylinder", 1, 64);
  CHECK(verdict(cyl, tube_for(cyl, 0.5), o).verdict == Verdict::Inconclusive);
  CHECK(to_string(Verdict::DiscreteSpectrumCertified) == "DISCRETE_SPECTRUM_CERTIFIED");
}

TEST_CASE("equality branch couples through the volume density") {
  const BaseManifold fin = family("finger", 1, 256);
  const TubeSpec tube = tube_for(fin, 0.5);
  const RadialMode m = solve_radial_mode(1, 1);
  const PerturbationResult p = perturbative_certificate(fin, tube, m, 8.0, 256.0);
  CHECK(p.coupling_formula == doctest::Approx(p.coupling_quadrature).epsilon(1e-6));
  CHECK(p.linear_flip_defect < 1e-10);
  CHECK(p.q_perturbed < 0.0);
  CHECK(p.q_perturbed < p.base_q.value);
}
