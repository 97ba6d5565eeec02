#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "qtube/kernels.hpp"

using namespace qtube::kernels;

namespace {

std::vector<double> random_vector(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

}  // namespace

TEST_CASE("avx2 kernels agree with the scalar reference") {
  if (!isa_supported(Isa::Avx2)) {
    MESSAGE("AVX2 unavailable; only the scalar path is exercised");
    return;
  }
  // Odd lengths hit the remainder loops.
  for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 8u, 33u, 1001u}) {
    const auto a = random_vector(n, 1 + n), b = random_vector(n, 2 + n), w = random_vector(n, 3 + n);
    const double scale = 1e-14 * (n + 1);
    CHECK(avx2::dot(a.data(), b.data(), n) == doctest::Approx(scalar::dot(a.data(), b.data(), n)).epsilon(scale));
    CHECK(std::abs(avx2::weighted_dot(w.data(), a.data(), b.data(), n) -
                   scalar::weighted_dot(w.data(), a.data(), b.data(), n)) <= scale);
    auto y1 = b, y2 = b;
    scalar::axpy(0.37, a.data(), y1.data(), n);
    avx2::axpy(0.37, a.data(), y2.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(y1[i] - y2[i]) <= 1e-15);
  }
}

TEST_CASE("sparse matrix-vector product agrees across instruction sets") {
  // Tridiagonal 50 x 50 plus a dense last row.
  const int n = 50;
  std::vector<int> outer{0}, inner;
  std::vector<double> values;
  for (int i = 0; i < n; ++i) {
    if (i == n - 1) {
      for (int j = 0; j < n; ++j) {
        inner.push_back(j);
        values.push_back(0.01 * (j + 1));
      }
    } else {
      for (int j = std::max(0, i - 1); j <= i + 1; ++j) {
        inner.push_back(j);
        values.push_back(j == i ? 2.0 : -1.0);
      }
    }
    outer.push_back(static_cast<int>(inner.size()));
  }
  const auto x = random_vector(n, 11);
  std::vector<double> y1(n), y2(n);
  scalar::spmv(n, outer.data(), inner.data(), values.data(), x.data(), y1.data());
  if (isa_supported(Isa::Avx2)) {
    avx2::spmv(n, outer.data(), inner.data(), values.data(), x.data(), y2.data());
    for (int i = 0; i < n; ++i) CHECK(std::abs(y1[i] - y2[i]) <= 1e-14);
  }
  CHECK(y1[0] == doctest::Approx(2.0 * x[0] - x[1]));
}

TEST_CASE("dispatch can be forced and restored") {
  const Isa original = active_isa();
  force_isa(Isa::Scalar);
  CHECK(active_isa() == Isa::Scalar);
  const std::vector<double> a{1, 2, 3}, b{4, 5, 6};
  CHECK(dot(a, b) == 32.0);
  if (isa_supported(Isa::Avx2)) {
    force_isa(Isa::Avx2);
    CHECK(dot(a, b) == 32.0);
  } else {
    CHECK_THROWS_AS(force_isa(Isa::Avx2), std::invalid_argument);
  }
  force_isa(original);
}
