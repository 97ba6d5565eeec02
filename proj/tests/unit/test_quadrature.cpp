#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qtube/quadrature.hpp"

using namespace qtube;

TEST_CASE("Gauss-Legendre integrates polynomials of degree 2n-1 exactly") {
  const QuadratureRule q = gauss_legendre(6, 0.0, 2.0);
  double s = 0.0;
  for (std::size_t i = 0; i < q.nodes.size(); ++i) s += q.weights[i] * std::pow(q.nodes[i], 11);
  CHECK(s == doctest::Approx(std::pow(2.0, 12) / 12.0).epsilon(1e-13));
}

TEST_CASE("composite rule on a smooth integrand") {
  const QuadratureRule q = composite_gauss_legendre(8, 10, 0.0, std::numbers::pi);
  double s = 0.0;
  for (std::size_t i = 0; i < q.nodes.size(); ++i) s += q.weights[i] * std::sin(q.nodes[i]);
  CHECK(s == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("adaptive quadrature handles an endpoint singularity") {
  const AdaptiveResult r = integrate_adaptive([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, 1e-12, 1e-10);
  CHECK(r.value == doctest::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("sphere rules reproduce sphere measures and second moments") {
  for (int k = 1; k <= 4; ++k) {
    const SphereRule s = sphere_rule(k, 12);
    double total = 0.0, second = 0.0;
    for (std::size_t i = 0; i < s.points.size(); ++i) {
      total += s.weights[i];
      second += s.weights[i] * s.points[i][0] * s.points[i][0];
    }
    CHECK(total == doctest::Approx(sphere_measure(k)).epsilon(1e-13));
    // int eta_1^2 = |S^{k-1}| / k
    CHECK(second == doctest::Approx(sphere_measure(k) / k).epsilon(1e-11));
  }
  CHECK(sphere_measure(2) == doctest::Approx(2.0 * std::numbers::pi));
  CHECK(unit_ball_volume(3) == doctest::Approx(4.0 * std::numbers::pi / 3.0));
}
