#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qtube/base.hpp"
#include "qtube/eigensolver.hpp"
#include "qtube/fermi.hpp"
#include "qtube/oracle.hpp"
#include "qtube/radial.hpp"

using namespace qtube;

namespace {

SparseMat laplacian_1d(int n, double h) {
  std::vector<Eigen::Triplet<double>> t;
  for (int i = 0; i < n; ++i) {
    t.emplace_back(i, i, 2.0 / (h * h));
    if (i + 1 < n) {
      t.emplace_back(i, i + 1, -1.0 / (h * h));
      t.emplace_back(i + 1, i, -1.0 / (h * h));
    }
  }
  SparseMat K(n, n);
  K.setFromTriplets(t.begin(), t.end());
  return K;
}

SparseMat identity(int n) {
  SparseMat M(n, n);
  M.setIdentity();
  return M;
}

BaseManifold family(const std::string& name, double T, std::map<std::string, double> params = {}) {
  FamilySpec f;
  f.name = name;
  f.params = std::move(params);
  return make_base(f, 1, T);
}

}  // namespace

TEST_CASE("eigensolver on a diagonal pencil") {
  SparseMat K(3, 3);
  K.insert(0, 0) = 1.0;
  K.insert(1, 1) = 2.0;
  K.insert(2, 2) = 3.0;
  const EigenResult r = lowest_eigenpairs(K, identity(3), 2);
  REQUIRE(r.values.size() == 2);
  CHECK(r.values[0] == doctest::Approx(1.0));
  CHECK(r.values[1] == doctest::Approx(2.0));
}

TEST_CASE("Lanczos path on a finite-difference Laplacian") {
  const int n = 400;
  const double h = 1.0 / (n + 1);
  const EigenResult r = lowest_eigenpairs(laplacian_1d(n, h), identity(n), 3);
  for (int j = 1; j <= 3; ++j) {
    const double exact = 4.0 / (h * h) * std::pow(std::sin(j * std::numbers::pi * h / 2), 2);
    CHECK(r.values[j - 1] == doctest::Approx(exact).epsilon(1e-10));
    CHECK(r.residuals[j - 1] < 1e-8);
  }
  CHECK(r.below_shift == 0);
  CHECK(count_below(laplacian_1d(n, h), identity(n), 100.0) == 3);
}

TEST_CASE("grid axes") {
  const GridAxis u = GridAxis::uniform(0.0, 2.0, 4);
  CHECK(u.elements() == 4);
  CHECK(u.nodes.back() == 2.0);
  CHECK(u.gauss_points().size() == 8);
  const GridAxis c = GridAxis::circle(1.0, 5);
  CHECK(c.periodic);
  CHECK(c.elements() == 5);
}

TEST_CASE("unit-ball Dirichlet eigenvalue converges to rho^2 at second order") {
  for (int k = 1; k <= 3; ++k) {
    const double rho = solve_radial_mode(k, 1).rho;
    const SpectrumEstimate est = ball_spectrum(k, 100, 3);
    CAPTURE(k);
    CHECK(est.extrapolated == doctest::Approx(rho * rho).epsilon(1e-7));
    CHECK(est.convergence_ratio > 3.0);
    CHECK(est.convergence_ratio < 5.0);
    CHECK(est.lambda0 > rho * rho);
  }
}

TEST_CASE("flat slab ground state is pi^2 / 4 r^2") {
  const BaseManifold plane = family("plane", 2);
  const double r = 0.5;
  const TubeSpec tube = make_tube_spec(1, r, 0.0);
  OracleOptions opt;
  opt.kind = TubeDiscretization::Full;
  opt.periodic = {true, true};
  opt.angular_elements = 2;
  opt.fiber_elements = 8;
  opt.levels = 3;
  const SpectrumEstimate est = tube_spectrum(plane, tube, opt);
  CHECK(est.extrapolated == doctest::Approx(std::numbers::pi * std::numbers::pi / (4 * r * r)).epsilon(1e-5));
  CHECK(est.convergence_ratio == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("reduced and full discretizations agree on the catenoid") {
  const BaseManifold cat = family("catenoid", 64);
  const TubeSpec tube = tube_for(cat, 0.5);
  OracleOptions opt;
  opt.truncation = 4.0;
  opt.base_elements = 16;
  opt.fiber_elements = 4;
  opt.levels = 1;
  const double reduced = tube_spectrum(cat, tube, opt).lambda0;
  opt.kind = TubeDiscretization::Full;
  opt.angular_elements = 1;
  const double full = tube_spectrum(cat, tube, opt).lambda0;
  CHECK(full == doctest::Approx(reduced).epsilon(1e-10));
}

TEST_CASE("ground state is one-signed and decreases with the domain") {
  const BaseManifold cat = family("catenoid", 64);
  const TubeSpec tube = tube_for(cat, 0.5);
  OracleOptions opt;
  opt.fiber_elements = 4;
  opt.levels = 1;
  double prev = INFINITY;
  for (double T : {2.0, 4.0, 8.0}) {
    opt.truncation = T;
    opt.base_elements = static_cast<int>(10 * T);  // fixed mesh width
    const SpectrumEstimate est = tube_spectrum(cat, tube, opt);
    CHECK(est.levels.front().sign_change_fraction == 0.0);
    CHECK(est.lambda0 < prev);
    prev = est.lambda0;
  }
}

TEST_CASE("exterior Rayleigh floor increases with the compact radius") {
  const BaseManifold cat = family("catenoid", 64);
  const TubeSpec tube = tube_for(cat, 0.5);
  OracleOptions opt;
  opt.truncation = 12.0;
  opt.base_elements = 60;
  opt.fiber_elements = 8;
  const double threshold = std::pow(std::numbers::pi / 2 / 0.5, 2);
  double prev = 0.0;
  for (double rc : {2.0, 4.0, 8.0}) {
    const double f = exterior_rayleigh_floor(cat, tube, rc, opt);
    CHECK(f >= prev);
    CHECK(f > threshold * 0.99);
    prev = f;
  }
}
