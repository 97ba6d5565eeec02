#include "qtube/fermi.hpp"

#include <cmath>

#include "qtube/error.hpp"

namespace qtube {

double max_radius(double eps0, int k) {
  if (!(eps0 > 0.0)) fail(ErrorKind::NonPositive, "eps0 must be positive");
  if (k < 1) fail(ErrorKind::DimensionError, "fiber dimension must be at least 1");
  return 1.0 / (std::sqrt(static_cast<double>(k)) * eps0);
}

TubeSpec make_tube_spec(int k, double r, double eps0, double sampled_sup) {
  if (!(r > 0.0)) fail(ErrorKind::NonPositive, "tube radius must be positive");
  if (eps0 < sampled_sup) fail(ErrorKind::Inadmissible, "eps0 is below the sampled curvature sup");
  if (eps0 > 0.0 && r > max_radius(eps0, k) * (1.0 + 1e-12))
    fail(ErrorKind::Inadmissible, "tube radius exceeds 1/(sqrt(k) eps0)");
  return TubeSpec{k, r, eps0, sampled_sup};
}

double sampled_curvature_sup(const BaseManifold& base, int samples) {
  double sup = 0.0;
  if (base.radial) {
    // Geometric tau grid refined near the centre, on every end.
    const auto& rad = *base.radial;
    for (int e = 0; e < rad.ends(); ++e)
      for (int i = 0; i <= samples; ++i) {
        const double frac = static_cast<double>(i) / samples;
        double tau = rad.tau_max() * (std::expm1(6.0 * frac) / std::expm1(6.0));
        if (rad.ends() == 1 && rad.dim() == 2 && tau == 0.0) tau = 1e-6 * rad.tau_max();
        const Vec x = rad.chart_point(rad.v_at(e, tau));
        FrameOptions opt;
        opt.compute_omega = false;
        sup = std::max(sup, frame_point(*base.chart, x, opt).A_norm);
      }
    return sup;
  }
  const ChartBox& box = base.chart->domain();
  const int n = base.n();
  const int per_axis = std::max(3, static_cast<int>(std::lround(std::pow(samples, 1.0 / n))));
  std::vector<int> idx(n, 0);
  while (true) {
    Vec x(n);
    for (int d = 0; d < n; ++d) x[d] = box.lo[d] + (box.hi[d] - box.lo[d]) * idx[d] / (per_axis - 1);
    FrameOptions opt;
    opt.compute_omega = false;
    sup = std::max(sup, frame_point(*base.chart, x, opt).A_norm);
    int d = 0;
    while (d < n && ++idx[d] == per_axis) idx[d++] = 0;
    if (d == n) break;
  }
  return sup;
}

TubeSpec tube_for(const BaseManifold& base, double r, double safety, int samples) {
  const double sup = sampled_curvature_sup(base, samples);
  const double eps0 = safety * sup;
  return make_tube_spec(base.k(), r, eps0, sup);
}

FermiPoint make_fermi_point(const FramedPoint& fp, const Vec& u, double r) {
  if (u.size() != fp.k()) fail(ErrorKind::DimensionError, "fiber coordinate has the wrong dimension");
  FermiPoint p;
  p.base = &fp;
  p.u = u;
  p.t = u.norm();
  if (!(p.t < r)) fail(ErrorKind::OutsideTube, "fiber point outside the tube");
  p.eta = p.t > 0.0 ? Vec(u / p.t) : Vec(Vec::Zero(u.size()));
  return p;
}

double shape_norm(const FramedPoint& fp, const Vec& u) {
  Eigen::SelfAdjointEigenSolver<Mat> es(fp.orthonormal_form(u));
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

TubeMetric assemble_metric(const FramedPoint& fp, const Vec& u) {
  const int n = fp.n();
  const int k = fp.k();
  if (u.size() != k) fail(ErrorKind::DimensionError, "fiber coordinate has the wrong dimension");
  if (shape_norm(fp, u) >= 1.0) fail(ErrorKind::Inadmissible, "|u.H| >= 1: point beyond the focal set");
  TubeMetric tm;
  tm.n = n;
  tm.k = k;
  tm.I_minus_uH = Mat::Identity(n, n) - fp.shape(u);
  const Mat g_minus_uB = fp.g - fp.second_form(u);
  tm.G_tilde = g_minus_uB * fp.g_inv * g_minus_uB;
  tm.G_tilde = 0.5 * (tm.G_tilde + tm.G_tilde.transpose());
  tm.C = Mat::Zero(n, k);
  for (int i = 0; i < n; ++i) tm.C.row(i) = (fp.omega[i].transpose() * u).transpose();
  tm.G = Mat::Zero(n + k, n + k);
  tm.G.topLeftCorner(n, n) = tm.G_tilde + tm.C * tm.C.transpose();
  tm.G.topRightCorner(n, k) = tm.C;
  tm.G.bottomLeftCorner(k, n) = tm.C.transpose();
  tm.G.bottomRightCorner(k, k).setIdentity();
  tm.sqrt_det_g = fp.sqrt_det_g;
  tm.det_shape = tm.I_minus_uH.determinant();
  tm.det_density = tm.det_shape * fp.sqrt_det_g;
  return tm;
}

TubeMetric assemble_metric(const FramedPoint& fp, const Vec& u, double r) {
  if (!(u.norm() < r)) fail(ErrorKind::OutsideTube, "fiber point outside the tube");
  return assemble_metric(fp, u);
}

Mat metric_inverse_horizontal_part(const TubeMetric& tm) {
  const int n = tm.n, k = tm.k;
  Eigen::LDLT<Mat> ldlt(tm.G_tilde);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
      ldlt.vectorD().cwiseAbs().minCoeff() <= 1e-14 * ldlt.vectorD().cwiseAbs().maxCoeff())
    fail(ErrorKind::Singular, "reduced metric is not invertible");
  const Mat Gi = ldlt.solve(Mat::Identity(n, n));
  const Mat GiC = Gi * tm.C;
  Mat P(n + k, n + k);
  P.topLeftCorner(n, n) = Gi;
  P.topRightCorner(n, k) = -GiC;
  P.bottomLeftCorner(k, n) = -GiC.transpose();
  P.bottomRightCorner(k, k) = tm.C.transpose() * GiC;
  return P;
}

Mat metric_inverse(const TubeMetric& tm) {
  Mat P = metric_inverse_horizontal_part(tm);
  P.bottomRightCorner(tm.k, tm.k) += Mat::Identity(tm.k, tm.k);
  return P;
}

double volume_density(const TubeMetric& tm) { return tm.det_density; }

Mat normal_connection_term(const FramedPoint& fp, const Vec& u) {
  const int n = fp.n(), k = fp.k();
  Mat T = Mat::Zero(n, n);
  // <grad_i eta_a, grad_j eta_b>^perp = sum_c omega_iac omega_jbc
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b)
          for (int c = 0; c < k; ++c) T(i, j) += u[a] * u[b] * fp.omega[i](a, c) * fp.omega[j](b, c);
  return T;
}

Mat expanded_horizontal_block(const FramedPoint& fp, const Vec& u) {
  const int k = fp.k();
  Mat G = fp.g - 2.0 * fp.second_form(u);
  // <S_a d_i, S_b d_j> = (B_a g^-1 B_b)_ij
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b) G += u[a] * u[b] * fp.B[a] * fp.g_inv * fp.B[b];
  return G + normal_connection_term(fp, u);
}

}  // namespace qtube
