#include "qtube/invariants.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "qtube/error.hpp"
#include "qtube/quadrature.hpp"

namespace qtube {

double elementary_symmetric(const Mat& H, int j) {
  const int n = static_cast<int>(H.rows());
  if (j < 0 || j > n) fail(ErrorKind::IndexError, "elementary symmetric index out of range");
  if (j == 0) return 1.0;
  std::vector<int> pick(j);
  std::iota(pick.begin(), pick.end(), 0);
  double sum = 0.0;
  Mat minor(j, j);
  while (true) {
    for (int a = 0; a < j; ++a)
      for (int b = 0; b < j; ++b) minor(a, b) = H(pick[a], pick[b]);
    sum += minor.determinant();
    int pos = j - 1;
    while (pos >= 0 && pick[pos] == n - j + pos) --pos;
    if (pos < 0) break;
    ++pick[pos];
    for (int q = pos + 1; q < j; ++q) pick[q] = pick[q - 1] + 1;
  }
  return sum;
}

double det_expansion(const Mat& H, double t) {
  double sum = 0.0, tj = 1.0;
  for (int j = 0; j <= H.rows(); ++j) {
    sum += (j % 2 == 0 ? 1.0 : -1.0) * tj * elementary_symmetric(H, j);
    tj *= t;
  }
  return sum;
}

namespace {

double sphere_integral_of_Cj(const FramedPoint& fp, int j, int order) {
  const SphereRule rule = sphere_rule(fp.k(), order);
  double sum = 0.0;
  for (std::size_t q = 0; q < rule.points.size(); ++q)
    sum += rule.weights[q] * elementary_symmetric(fp.shape(rule.points[q]), j);
  return sum;
}

}  // namespace

double tube_curvature_K(const FramedPoint& fp, int j, int quad_order) {
  const int n = fp.n();
  if (j < 0 || j > n) fail(ErrorKind::IndexError, "tube curvature index out of range");
  if (j == 0) return sphere_measure(fp.k());
  const double coarse = sphere_integral_of_Cj(fp, j, quad_order);
  if (fp.k() == 1) return coarse;
  const double fine = sphere_integral_of_Cj(fp, j, 2 * quad_order);
  const double scale = sphere_measure(fp.k()) * std::pow(std::max(fp.A_norm, 1e-300), j);
  if (std::abs(fine - coarse) > 1e-6 * std::max(std::abs(fine), scale))
    fail(ErrorKind::QuadratureNotConverged, "normal-sphere quadrature did not converge");
  return fine;
}

double gray_prefactor(int p, int k) {
  return std::tgamma(2.0 * p + 1.0) * std::pow(std::numbers::pi, 0.5 * k) /
         (std::pow(2.0, 2 * p - 1) * std::tgamma(p + 1.0) * std::tgamma(p + 0.5 * k));
}

double trace_power(const Riemann& R, int p) {
  const int n = R.n;
  const int m = 2 * p;
  if (p < 1 || m > n) fail(ErrorKind::DimensionError, "trace power needs 1 <= 2p <= n");
  // All permutations of {0..m-1} with their signs.
  std::vector<std::vector<int>> perms;
  std::vector<int> sign;
  std::vector<int> perm(m);
  std::iota(perm.begin(), perm.end(), 0);
  do {
    perms.push_back(perm);
    int inversions = 0;
    for (int a = 0; a < m; ++a)
      for (int b = a + 1; b < m; ++b) inversions += perm[a] > perm[b];
    sign.push_back(inversions % 2 == 0 ? 1 : -1);
  } while (std::next_permutation(perm.begin(), perm.end()));

  // Ordered tuples of distinct indices.
  std::vector<int> idx(m, 0);
  double total = 0.0;
  auto distinct = [&]() {
    for (int a = 0; a < m; ++a)
      for (int b = a + 1; b < m; ++b)
        if (idx[a] == idx[b]) return false;
    return true;
  };
  while (true) {
    if (distinct()) {
      for (std::size_t s = 0; s < perms.size(); ++s)
        for (std::size_t t = 0; t < perms.size(); ++t) {
          double prod = sign[s] * sign[t];
          for (int q = 0; q < p && prod != 0.0; ++q)
            prod *= R(idx[perms[s][2 * q]], idx[perms[s][2 * q + 1]], idx[perms[t][2 * q]], idx[perms[t][2 * q + 1]]);
          total += prod;
        }
    }
    int d = 0;
    while (d < m && ++idx[d] == n) idx[d++] = 0;
    if (d == m) break;
  }
  const double fact = std::tgamma(m + 1.0);
  return total / (std::pow(2.0, p) * fact * fact);
}

GrayRatio gray_ratio(const std::vector<FramedPoint>& samples, int p, int quad_order) {
  GrayRatio out;
  for (const auto& fp : samples) {
    const double tr = trace_power(orthonormal_curvature(fp), p);
    if (std::abs(tr) < 1e-9) continue;
    out.ratios.push_back(tube_curvature_K(fp, 2 * p, quad_order) / tr);
  }
  if (out.ratios.empty()) fail(ErrorKind::DegenerateSample, "all samples have vanishing tr(R^p)");
  out.used = static_cast<int>(out.ratios.size());
  double sum = 0.0;
  for (double r : out.ratios) sum += r;
  out.mean = sum / out.used;
  double var = 0.0;
  for (double r : out.ratios) var += (r - out.mean) * (r - out.mean);
  var /= out.used;
  out.cv = std::sqrt(var) / std::abs(out.mean);
  return out;
}

InvariantRow invariant_row(const FramedPoint& fp, int quad_order) {
  InvariantRow row;
  for (int j = 0; j <= fp.n(); ++j) row.K.push_back(tube_curvature_K(fp, j, quad_order));
  const Riemann R = orthonormal_curvature(fp);
  for (int p = 1; 2 * p <= fp.n(); ++p) row.trR.push_back(trace_power(R, p));
  return row;
}

double base_integral(const BaseManifold& base, const std::function<double(const FramedPoint&)>& f,
                     double tau_limit, double rel_tol) {
  const double T = tau_limit > 0.0 ? tau_limit : base.truncation;
  FrameOptions opt;
  opt.compute_omega = false;
  if (base.radial) {
    const auto& rad = *base.radial;
    double total = 0.0;
    for (int e = 0; e < rad.ends(); ++e) {
      auto integrand = [&](double tau) {
        const double v = rad.v_at(e, tau);
        const FramedPoint fp = frame_point(*base.chart, rad.chart_point(v), opt);
        return f(fp) * rad.shell_measure(e, tau);
      };
      // Geometric panels so that features near the centre are resolved on long truncations.
      double lo = 0.0, hi = std::min(T, 1.0);
      while (lo < T) {
        total += integrate_adaptive(integrand, lo, hi, 1e-14, rel_tol, 4000).value;
        lo = hi;
        hi = std::min(T, 2.0 * hi);
      }
    }
    return total;
  }
  // Tensor Gauss-Legendre over the chart box clipped to [-T, T]^n.
  const int n = base.n();
  const ChartBox& box = base.chart->domain();
  std::vector<QuadratureRule> rules;
  for (int d = 0; d < n; ++d)
    rules.push_back(composite_gauss_legendre(8, 32, std::max(box.lo[d], -T), std::min(box.hi[d], T)));
  std::vector<std::size_t> idx(n, 0);
  double total = 0.0;
  while (true) {
    Vec x(n);
    double w = 1.0;
    for (int d = 0; d < n; ++d) {
      x[d] = rules[d].nodes[idx[d]];
      w *= rules[d].weights[idx[d]];
    }
    const FramedPoint fp = frame_point(*base.chart, x, opt);
    total += w * f(fp) * fp.sqrt_det_g;
    int d = 0;
    while (d < n && ++idx[d] == rules[d].nodes.size()) idx[d++] = 0;
    if (d == n) break;
  }
  return total;
}

std::vector<double> curvature_integrals(const BaseManifold& base, double tau_limit, int quad_order) {
  std::vector<double> out;
  for (int p = 1; 2 * p <= base.n(); ++p)
    out.push_back(base_integral(
        base, [&](const FramedPoint& fp) { return tube_curvature_K(fp, 2 * p, quad_order); }, tau_limit, 1e-9));
  return out;
}

}  // namespace qtube
