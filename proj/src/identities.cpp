#include "qtube/identities.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "qtube/error.hpp"
#include "qtube/invariants.hpp"
#include "qtube/manifold.hpp"
#include "qtube/quadrature.hpp"

namespace qtube {

bool IdentityReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const IdentityCheck& c) { return c.passed; });
}

namespace {

Vec random_chart_point(const BaseManifold& base, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double reach = std::min(base.truncation, 8.0);
  if (base.radial) {
    const auto& rad = *base.radial;
    const int end = rad.ends() == 2 && unit(rng) < 0.5 ? 1 : 0;
    const double tau = std::max(1e-3, reach * unit(rng));
    Vec x = rad.chart_point(rad.v_at(end, tau));
    if (base.profile) x[1] = 2.0 * std::numbers::pi * unit(rng);
    return x;
  }
  const ChartBox& box = base.chart->domain();
  Vec x(base.n());
  for (int d = 0; d < base.n(); ++d) {
    const double lo = std::max(box.lo[d], -reach), hi = std::min(box.hi[d], reach);
    x[d] = lo + (hi - lo) * unit(rng);
  }
  return x;
}

Vec random_ball_point(int k, double radius, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Vec u(k);
  for (int a = 0; a < k; ++a) u[a] = normal(rng);
  return u.normalized() * radius * std::pow(unit(rng), 1.0 / k);
}

Mat random_orthogonal(int k, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Mat A(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) A(i, j) = normal(rng);
  Eigen::HouseholderQR<Mat> qr(A);
  return qr.householderQ();
}

}  // namespace

IdentityReport verify_identities(const BaseManifold& base, const TubeSpec& tube, int samples, std::uint64_t seed) {
  IdentityReport rep;
  rep.family = base.spec.name;
  rep.samples = samples;
  std::vector<IdentityCheck> c = {
      {"det_G_equals_det_G_tilde", 0.0, 1e-10},
      {"connection_orthogonal_to_u", 0.0, 1e-12},
      {"normal_connection_equals_CCt", 0.0, 1e-12},
      {"expanded_block_matches_G", 0.0, 1e-10},
      {"horizontal_inverse_psd", 0.0, 1e-10},
      {"inverse_times_G_is_identity", 0.0, 1e-10},
      {"full_form_dominates_fiber_form", 0.0, 1e-10},
      {"volume_sandwich", 0.0, 0.0},
      {"det_expansion_matches", 0.0, 1e-10},
      {"G_positive_definite", 0.0, 0.0},
      {"frame_invariance", 0.0, 1e-8},
  };
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  const int n = base.n(), k = base.k();
  auto bump = [&](int i, double defect) {
    c[i].max_defect = std::max(c[i].max_defect, defect);
    c[i].samples += 1;
  };
  for (int s = 0; s < samples; ++s) {
    const FramedPoint fp = frame_point(*base.chart, random_chart_point(base, rng));
    const Vec u = random_ball_point(k, 0.999 * tube.r, rng);
    const TubeMetric tm = assemble_metric(fp, u, tube.r);
    const Mat Gi = metric_inverse(tm);

    const double dG = tm.G.determinant(), dGt = tm.G_tilde.determinant();
    bump(0, std::abs(dG - dGt) / std::abs(dGt));
    bump(1, (tm.C * u).cwiseAbs().maxCoeff());
    bump(2, (normal_connection_term(fp, u) - tm.C * tm.C.transpose()).cwiseAbs().maxCoeff());
    const Mat Gh = tm.G.topLeftCorner(n, n);
    bump(3, (expanded_horizontal_block(fp, u) - Gh).cwiseAbs().maxCoeff() / std::max(1.0, Gh.cwiseAbs().maxCoeff()));
    Eigen::SelfAdjointEigenSolver<Mat> hp(metric_inverse_horizontal_part(tm));
    bump(4, std::max(0.0, -hp.eigenvalues().minCoeff()));
    bump(5, (tm.G * Gi - Mat::Identity(n + k, n + k)).cwiseAbs().maxCoeff());
    double dom = 0.0;
    for (int trial = 0; trial < 8; ++trial) {
      Vec w(n + k);
      for (int i = 0; i < n + k; ++i) w[i] = normal(rng);
      const double full = w.dot(Gi * w), fib = w.tail(k).squaredNorm();
      dom = std::max(dom, std::max(0.0, fib - full) / std::max(1.0, full));
    }
    bump(6, dom);
    const double t = u.norm();
    const double eps = std::sqrt(static_cast<double>(k)) * t * fp.A_norm;
    const double lower = std::pow(1.0 - eps, n), upper = std::pow(1.0 + eps, n);
    bump(7, eps < 1.0 ? std::max({0.0, lower - tm.det_shape, tm.det_shape - upper}) : 0.0);
    const double expansion = t > 0.0 ? det_expansion(fp.shape(Vec(u / t)), t) : 1.0;
    bump(8, std::abs(expansion - tm.det_shape));
    Eigen::SelfAdjointEigenSolver<Mat> ge(tm.G);
    bump(9, ge.eigenvalues().minCoeff() > 0.0 ? 0.0 : -ge.eigenvalues().minCoeff() + 1e-300);

    // Same point with a rotated normal frame (fiber coordinates rotate with it).
    const Mat Q = random_orthogonal(k, rng);
    const FramedPoint rot = rotate_frame(fp, Q);
    const TubeMetric tr = assemble_metric(rot, Vec(Q.transpose() * u), tube.r);
    double change = std::abs(tr.det_density - tm.det_density);
    for (int j = 0; j <= n; ++j)
      change = std::max(change, std::abs(tube_curvature_K(rot, j) - tube_curvature_K(fp, j)));
    bump(10, change);
  }
  for (auto& chk : c) chk.passed = chk.max_defect <= chk.tolerance;
  rep.checks = std::move(c);
  return rep;
}

}  // namespace qtube
