#include "qtube/chart.hpp"

#include <cmath>

namespace qtube {

bool ChartBox::contains(const Vec& x) const {
  if (x.size() != lo.size()) return false;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i])) return false;
    const bool wraps = static_cast<std::size_t>(i) < periodic.size() && periodic[i];
    if (wraps) continue;
    if (x[i] < lo[i] || x[i] > hi[i]) return false;
  }
  return true;
}

Mat ImmersionChart::jacobian(const Vec& x) const { return fd_jacobian(*this, x); }

Hessian ImmersionChart::hessian(const Vec& x) const { return fd_hessian(*this, x); }

Mat fd_jacobian(const ImmersionChart& chart, const Vec& x, double base_step) {
  const int n = chart.dim_base();
  const int m = chart.dim_ambient();
  const double h = base_step * (1.0 + x.norm());
  Mat J(n, m);
  for (int i = 0; i < n; ++i) {
    Vec xp = x;
    Vec xm = x;
    xp[i] += h;
    xm[i] -= h;
    J.row(i) = ((chart.position(xp) - chart.position(xm)) / (2.0 * h)).transpose();
  }
  return J;
}

Hessian fd_hessian(const ImmersionChart& chart, const Vec& x) {
  const int n = chart.dim_base();
  const int m = chart.dim_ambient();
  Hessian H(n, m);
  if (chart.has_analytic_derivatives()) {
    const double h = 1e-5 * (1.0 + x.norm());
    for (int i = 0; i < n; ++i) {
      Vec xp = x;
      Vec xm = x;
      xp[i] += h;
      xm[i] -= h;
      const Mat dJ = (chart.jacobian(xp) - chart.jacobian(xm)) / (2.0 * h);
      for (int j = 0; j < n; ++j) H(i, j) = dJ.row(j).transpose();
    }
    // Symmetrize: mixed partials agree analytically.
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        const Vec avg = 0.5 * (H(i, j) + H(j, i));
        H(i, j) = avg;
        H(j, i) = avg;
      }
    return H;
  }
  const double h = 1e-4 * (1.0 + x.norm());
  const Vec f0 = chart.position(x);
  for (int i = 0; i < n; ++i) {
    Vec xp = x;
    Vec xm = x;
    xp[i] += h;
    xm[i] -= h;
    H(i, i) = (chart.position(xp) - 2.0 * f0 + chart.position(xm)) / (h * h);
    for (int j = i + 1; j < n; ++j) {
      Vec pp = x, pm = x, mp = x, mm = x;
      pp[i] += h; pp[j] += h;
      pm[i] += h; pm[j] -= h;
      mp[i] -= h; mp[j] += h;
      mm[i] -= h; mm[j] -= h;
      H(i, j) = (chart.position(pp) - chart.position(pm) - chart.position(mp) + chart.position(mm)) /
                (4.0 * h * h);
      H(j, i) = H(i, j);
    }
  }
  return H;
}

FunctionChart::FunctionChart(std::string name, int n, int m, ChartBox box, PositionFn position,
                             JacobianFn jacobian, HessianFn hessian)
    : name_(std::move(name)),
      n_(n),
      m_(m),
      position_(std::move(position)),
      jacobian_(std::move(jacobian)),
      hessian_(std::move(hessian)) {
  set_domain(std::move(box));
}

Mat FunctionChart::jacobian(const Vec& x) const {
  return jacobian_ ? jacobian_(x) : fd_jacobian(*this, x);
}

Hessian FunctionChart::hessian(const Vec& x) const {
  return hessian_ ? hessian_(x) : fd_hessian(*this, x);
}

}  // namespace qtube
