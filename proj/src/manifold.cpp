#include "qtube/manifold.hpp"

#include <cmath>
#include <limits>

#include "qtube/error.hpp"
#include "qtube/quadrature.hpp"

namespace qtube {

namespace {

double omega_step(const ImmersionChart& chart, const Vec& x) {
  return (chart.has_analytic_derivatives() ? 1e-5 : 1e-4) * (1.0 + x.norm());
}

void align_signs(Mat& normals, const Mat& reference) {
  for (Eigen::Index a = 0; a < normals.cols() && a < reference.cols(); ++a)
    if (normals.col(a).dot(reference.col(a)) < 0.0) normals.col(a) *= -1.0;
}

}  // namespace

Mat FramedPoint::second_form(const Vec& e) const {
  Mat S = Mat::Zero(n(), n());
  for (int a = 0; a < k(); ++a) S += e[a] * B[a];
  return S;
}

Mat FramedPoint::shape(const Vec& e) const {
  Mat S = Mat::Zero(n(), n());
  for (int a = 0; a < k(); ++a) S += e[a] * H[a];
  return S;
}

Mat FramedPoint::orthonormal_form(const Vec& e) const {
  const auto L = g_chol.triangularView<Eigen::Lower>();
  Mat S = L.solve(second_form(e));
  return L.solve(S.transpose()).transpose();
}

double FramedPoint::max_principal_curvature() const {
  // Supremum over unit normals, sampled on a fine sphere rule.
  const SphereRule rule = sphere_rule(k(), 24);
  double best = 0.0;
  for (const Vec& e : rule.points) {
    Eigen::SelfAdjointEigenSolver<Mat> es(orthonormal_form(e));
    best = std::max(best, es.eigenvalues().cwiseAbs().maxCoeff());
  }
  return best;
}

Mat normal_frame(const ImmersionChart& chart, const Vec& x, const Mat& jacobian,
                 const std::vector<int>& pivots_in, std::vector<int>* pivots_out) {
  const int n = chart.dim_base();
  const int m = chart.dim_ambient();
  const int k = m - n;
  Eigen::HouseholderQR<Mat> qr(jacobian.transpose());
  const Mat T = qr.householderQ() * Mat::Identity(m, n);

  const auto hint = chart.normal_seed(x);
  const int hint_cols = hint ? static_cast<int>(hint->cols()) : 0;
  auto seed = [&](int idx) -> Vec {
    if (idx < hint_cols) return hint->col(idx);
    Vec e = Vec::Zero(m);
    e[idx - hint_cols] = 1.0;
    return e;
  };

  Mat N(m, k);
  int filled = 0;
  auto residual = [&](const Vec& v) {
    Vec w = v;
    for (int pass = 0; pass < 2; ++pass) {
      w -= T * (T.transpose() * w);
      for (int b = 0; b < filled; ++b) w -= N.col(b).dot(w) * N.col(b);
    }
    return w;
  };

  std::vector<int> used;
  if (!pivots_in.empty()) {
    for (int idx : pivots_in) {
      if (filled == k) break;
      Vec w = residual(seed(idx));
      const double len = w.norm();
      if (len < 1e-8) fail(ErrorKind::RankDeficient, "forced normal seed is degenerate at this point");
      N.col(filled++) = w / len;
      used.push_back(idx);
    }
  }
  for (int idx = 0; idx < hint_cols && filled < k; ++idx) {
    Vec w = residual(seed(idx));
    const double len = w.norm();
    if (len > 0.1 * seed(idx).norm()) {
      N.col(filled++) = w / len;
      used.push_back(idx);
    }
  }
  while (filled < k) {
    int best = -1;
    double best_len = 0.0;
    Vec best_w;
    for (int idx = hint_cols; idx < hint_cols + m; ++idx) {
      Vec w = residual(seed(idx));
      const double len = w.norm();
      if (len > best_len + 1e-12) {
        best = idx;
        best_len = len;
        best_w = std::move(w);
      }
    }
    if (best < 0 || best_len < 1e-8) fail(ErrorKind::RankDeficient, "normal space is degenerate");
    N.col(filled++) = best_w / best_len;
    used.push_back(best);
  }
  if (pivots_out) *pivots_out = std::move(used);
  return N;
}

FramedPoint frame_point(const ImmersionChart& chart, const Vec& x, const FrameOptions& options) {
  const int n = chart.dim_base();
  const int m = chart.dim_ambient();
  const int k = m - n;
  if (x.size() != n) fail(ErrorKind::DimensionError, "chart point has the wrong dimension");
  if (!chart.domain().contains(x)) fail(ErrorKind::DomainError, "point outside the chart domain");

  FramedPoint fp;
  fp.x = x;
  fp.position = chart.position(x);
  fp.tangent = chart.jacobian(x);
  Eigen::JacobiSVD<Mat> svd(fp.tangent);
  const auto sv = svd.singularValues();
  if (sv.size() < n || sv[n - 1] <= 1e-10 * std::max(1.0, sv[0]))
    fail(ErrorKind::RankDeficient, "jacobian is not of full rank");

  fp.g = fp.tangent * fp.tangent.transpose();
  Eigen::LLT<Mat> llt(fp.g);
  fp.g_chol = llt.matrixL();
  fp.g_inv = llt.solve(Mat::Identity(n, n));
  fp.sqrt_det_g = fp.g_chol.diagonal().prod();

  fp.normals = normal_frame(chart, x, fp.tangent, options.pivots, &fp.pivots);
  if (options.reference) align_signs(fp.normals, *options.reference);

  const Hessian hess = chart.hessian(x);
  fp.B.assign(k, Mat::Zero(n, n));
  for (int a = 0; a < k; ++a) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) fp.B[a](i, j) = hess(i, j).dot(fp.normals.col(a));
    fp.B[a] = 0.5 * (fp.B[a] + fp.B[a].transpose());
  }
  fp.H.resize(k);
  double norm2 = 0.0;
  const auto L = fp.g_chol.triangularView<Eigen::Lower>();
  for (int a = 0; a < k; ++a) {
    fp.H[a] = fp.g_inv * fp.B[a];
    Mat S = L.solve(fp.B[a]);
    S = L.solve(S.transpose()).transpose();
    norm2 += S.squaredNorm();
  }
  fp.A_norm = std::sqrt(norm2);

  fp.omega.assign(n, Mat::Zero(k, k));
  if (k > 1 && options.compute_omega) {
    const double h = omega_step(chart, x);
    for (int i = 0; i < n; ++i) {
      Vec xp = x, xm = x;
      xp[i] += h;
      xm[i] -= h;
      Mat Np = normal_frame(chart, xp, chart.jacobian(xp), fp.pivots, nullptr);
      Mat Nm = normal_frame(chart, xm, chart.jacobian(xm), fp.pivots, nullptr);
      align_signs(Np, fp.normals);
      align_signs(Nm, fp.normals);
      const Mat W = ((Np - Nm) / (2.0 * h)).transpose() * fp.normals;
      fp.omega[i] = 0.5 * (W - W.transpose());
    }
  }
  return fp;
}

FramedPoint rotate_frame(const FramedPoint& fp, const Mat& Q) {
  const int k = fp.k();
  if (Q.rows() != k || Q.cols() != k) fail(ErrorKind::DimensionError, "frame rotation has the wrong size");
  FramedPoint out = fp;
  out.normals = fp.normals * Q;
  for (int a = 0; a < k; ++a) {
    out.B[a].setZero();
    out.H[a].setZero();
    for (int b = 0; b < k; ++b) {
      out.B[a] += Q(b, a) * fp.B[b];
      out.H[a] += Q(b, a) * fp.H[b];
    }
  }
  for (std::size_t i = 0; i < fp.omega.size(); ++i) out.omega[i] = Q.transpose() * fp.omega[i] * Q;
  return out;
}

double Riemann::symmetry_defect() const {
  double worst = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          const double r = (*this)(i, j, k, l);
          worst = std::max(worst, std::abs(r + (*this)(j, i, k, l)));
          worst = std::max(worst, std::abs(r + (*this)(i, j, l, k)));
          worst = std::max(worst, std::abs(r - (*this)(k, l, i, j)));
          worst = std::max(worst, std::abs(r + (*this)(j, k, i, l) + (*this)(k, i, j, l)));
        }
  return worst;
}

namespace {

Riemann gauss_equation(const std::vector<Mat>& forms, int n) {
  Riemann R(n);
  for (const Mat& b : forms)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l) R(i, j, k, l) += b(i, k) * b(j, l) - b(i, l) * b(j, k);
  return R;
}

}  // namespace

Riemann curvature_operator(const FramedPoint& fp) { return gauss_equation(fp.B, fp.n()); }

Riemann orthonormal_curvature(const FramedPoint& fp) {
  std::vector<Mat> forms;
  for (int a = 0; a < fp.k(); ++a) {
    Vec e = Vec::Zero(fp.k());
    e[a] = 1.0;
    forms.push_back(fp.orthonormal_form(e));
  }
  return gauss_equation(forms, fp.n());
}

Riemann intrinsic_curvature_fd(const ImmersionChart& chart, const Vec& x, double h) {
  const int n = chart.dim_base();
  auto metric = [&](const Vec& y) {
    const Mat J = chart.jacobian(y);
    return Mat(J * J.transpose());
  };
  // Gamma^r_{ij} = 1/2 g^{rs}(d_i g_sj + d_j g_si - d_s g_ij)
  auto christoffel = [&](const Vec& y) {
    std::vector<Mat> dg(n);
    for (int i = 0; i < n; ++i) {
      Vec yp = y, ym = y;
      yp[i] += h;
      ym[i] -= h;
      dg[i] = (metric(yp) - metric(ym)) / (2.0 * h);
    }
    const Mat ginv = metric(y).inverse();
    std::vector<Mat> gamma(n, Mat::Zero(n, n));
    for (int r = 0; r < n; ++r)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          double sum = 0.0;
          for (int s = 0; s < n; ++s) sum += ginv(r, s) * (dg[i](s, j) + dg[j](s, i) - dg[s](i, j));
          gamma[r](i, j) = 0.5 * sum;
        }
    return gamma;
  };
  const auto gamma = christoffel(x);
  std::vector<std::vector<Mat>> dgamma(n);
  for (int m = 0; m < n; ++m) {
    Vec xp = x, xm = x;
    xp[m] += h;
    xm[m] -= h;
    const auto gp = christoffel(xp);
    const auto gm = christoffel(xm);
    dgamma[m].resize(n);
    for (int r = 0; r < n; ++r) dgamma[m][r] = (gp[r] - gm[r]) / (2.0 * h);
  }
  // R^r_{s m v} = d_m Gamma^r_{vs} - d_v Gamma^r_{ms} + Gamma^r_{ml} Gamma^l_{vs} - Gamma^r_{vl} Gamma^l_{ms}
  const Mat g = metric(x);
  Riemann up(n);
  for (int r = 0; r < n; ++r)
    for (int s = 0; s < n; ++s)
      for (int m = 0; m < n; ++m)
        for (int v = 0; v < n; ++v) {
          double val = dgamma[m][r](v, s) - dgamma[v][r](m, s);
          for (int l = 0; l < n; ++l) val += gamma[r](m, l) * gamma[l](v, s) - gamma[r](v, l) * gamma[l](m, s);
          up(r, s, m, v) = val;
        }
  Riemann R(n);
  for (int r = 0; r < n; ++r)
    for (int s = 0; s < n; ++s)
      for (int m = 0; m < n; ++m)
        for (int v = 0; v < n; ++v) {
          double val = 0.0;
          for (int a = 0; a < n; ++a) val += g(r, a) * up(a, s, m, v);
          R(r, s, m, v) = val;
        }
  return R;
}

double sectional_curvature(const Riemann& R, const Mat& g, int i, int j) {
  return R(i, j, i, j) / (g(i, i) * g(j, j) - g(i, j) * g(i, j));
}

std::size_t FrameField::index(const std::vector<int>& multi) const {
  std::size_t idx = 0;
  for (std::size_t d = 0; d < shape.size(); ++d) idx = idx * shape[d] + multi[d];
  return idx;
}

FrameField sample_frame_field(const ImmersionChart& chart, const Vec& lo, const Vec& hi,
                              const std::vector<int>& counts) {
  const int n = chart.dim_base();
  if (static_cast<int>(counts.size()) != n || lo.size() != n || hi.size() != n)
    fail(ErrorKind::DimensionError, "frame field grid has the wrong dimension");
  FrameField field;
  field.shape = counts;
  field.lo = lo;
  field.step = Vec(n);
  std::size_t total = 1;
  for (int d = 0; d < n; ++d) {
    if (counts[d] < 2) fail(ErrorKind::GridTooCoarse, "frame field needs two nodes per axis");
    field.step[d] = (hi[d] - lo[d]) / (counts[d] - 1);
    total *= counts[d];
  }
  field.points.reserve(total);
  std::vector<int> multi(n, 0);
  std::vector<int> pivots;
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rem = idx;
    for (int d = n - 1; d >= 0; --d) {
      multi[d] = static_cast<int>(rem % counts[d]);
      rem /= counts[d];
    }
    Vec x(n);
    for (int d = 0; d < n; ++d) x[d] = lo[d] + multi[d] * field.step[d];
    FrameOptions opt;
    opt.pivots = pivots;
    if (idx > 0) {
      // Align with the nearest earlier node: the predecessor along the
      // fastest axis, or the start of the previous row.
      std::vector<int> prev = multi;
      int d = n - 1;
      while (d >= 0 && prev[d] == 0) --d;
      if (d == n - 1) {
        prev[d] -= 1;
      } else {
        prev[d] -= 1;
        for (int e = d + 1; e < n; ++e) prev[e] = multi[e];
      }
      opt.reference = field.points[field.index(prev)].normals;
    }
    field.points.push_back(frame_point(chart, x, opt));
    if (idx == 0) pivots = field.points.front().pivots;
  }
  return field;
}

std::vector<double> normal_curvature(const FrameField& field) {
  const int n = static_cast<int>(field.shape.size());
  for (int d = 0; d < n; ++d)
    if (field.shape[d] < 3) fail(ErrorKind::GridTooCoarse, "finite-difference stencil leaves the grid");
  const std::size_t total = field.points.size();
  std::vector<double> out(total, std::numeric_limits<double>::quiet_NaN());
  std::vector<int> multi(n);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rem = idx;
    bool interior = true;
    for (int d = n - 1; d >= 0; --d) {
      multi[d] = static_cast<int>(rem % field.shape[d]);
      rem /= field.shape[d];
      if (multi[d] == 0 || multi[d] == field.shape[d] - 1) interior = false;
    }
    if (!interior) continue;
    const FramedPoint& fp = field.points[idx];
    const int k = fp.k();
    // dOmega[i][j] = d_i omega_j
    std::vector<std::vector<Mat>> dOmega(n, std::vector<Mat>(n));
    for (int i = 0; i < n; ++i) {
      std::vector<int> p = multi, m = multi;
      p[i] += 1;
      m[i] -= 1;
      const FramedPoint& fpp = field.points[field.index(p)];
      const FramedPoint& fpm = field.points[field.index(m)];
      for (int j = 0; j < n; ++j) dOmega[i][j] = (fpp.omega[j] - fpm.omega[j]) / (2.0 * field.step[i]);
    }
    // R_ij = d_i W_j - d_j W_i + W_j W_i - W_i W_j, |R|^2 = 1/2 g^ik g^jl <R_ij, R_kl>
    std::vector<std::vector<Mat>> Rij(n, std::vector<Mat>(n, Mat::Zero(k, k)));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        Rij[i][j] = dOmega[i][j] - dOmega[j][i] + fp.omega[j] * fp.omega[i] - fp.omega[i] * fp.omega[j];
    double norm2 = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b)
            norm2 += 0.5 * fp.g_inv(i, a) * fp.g_inv(j, b) * (Rij[i][j].cwiseProduct(Rij[a][b])).sum();
    out[idx] = std::sqrt(std::max(norm2, 0.0));
  }
  return out;
}

}  // namespace qtube
