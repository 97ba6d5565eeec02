#include "qtube/radial.hpp"

#include <array>
#include <cmath>

#include "qtube/error.hpp"
#include "qtube/quadrature.hpp"

namespace qtube {

namespace {

using State = std::array<double, 2>;

struct Ode {
  int k;
  double rho;
  State operator()(double t, const State& y) const {
    return {y[1], -rho * rho * y[0] - (k - 1) * y[1] / t};
  }
};

State series_start(int k, double rho, double t) {
  const double r2 = rho * rho;
  const double t2 = t * t;
  return {1.0 - r2 * t2 / (2.0 * k) + r2 * r2 * t2 * t2 / (8.0 * k * (k + 2)),
          -r2 * t / k + r2 * r2 * t2 * t / (2.0 * k * (k + 2))};
}

// Dormand-Prince 5(4) from t0 to t1.
State integrate(const Ode& f, double t0, double t1, State y, double rtol, double atol) {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                          b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                          e6 = 22.0 / 525, e7 = -1.0 / 40;
  double t = t0;
  double h = std::min(1e-3, t1 - t0);
  int steps = 0;
  while (t < t1) {
    if (++steps > 2000000) fail(ErrorKind::NoConvergence, "radial ODE step budget exhausted");
    h = std::min(h, t1 - t);
    auto add = [&](std::initializer_list<std::pair<double, const State*>> terms) {
      State out = y;
      for (const auto& [c, s] : terms) {
        out[0] += h * c * (*s)[0];
        out[1] += h * c * (*s)[1];
      }
      return out;
    };
    const State k1 = f(t, y);
    const State k2 = f(t + c2 * h, add({{a21, &k1}}));
    const State k3 = f(t + c3 * h, add({{a31, &k1}, {a32, &k2}}));
    const State k4 = f(t + c4 * h, add({{a41, &k1}, {a42, &k2}, {a43, &k3}}));
    const State k5 = f(t + c5 * h, add({{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
    const State k6 = f(t + h, add({{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
    const State y5 = add({{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
    const State k7 = f(t + h, y5);
    double err = 0.0;
    for (int i = 0; i < 2; ++i) {
      const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      const double sc = atol + rtol * std::max(std::abs(y[i]), std::abs(y5[i]));
      err = std::max(err, std::abs(e) / sc);
    }
    if (err <= 1.0) {
      t += h;
      y = y5;
    }
    const double factor = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
    h *= factor;
  }
  return y;
}

// Quintic Hermite basis on [0,1]: coefficients of s^0..s^5.
constexpr double kBasis[6][6] = {
    {1, 0, 0, -10, 15, -6},       // f0
    {0, 1, 0, -6, 8, -3},         // h f0'
    {0, 0, 0.5, -1.5, 1.5, -0.5}, // h^2 f0''
    {0, 0, 0, 0.5, -1, 0.5},      // h^2 f1''
    {0, 0, 0, -4, 7, -3},         // h f1'
    {0, 0, 0, 10, -15, 6},        // f1
};

double basis_derivative(int b, int order, double s) {
  double sum = 0.0;
  for (int p = order; p < 6; ++p) {
    double c = kBasis[b][p];
    for (int q = 0; q < order; ++q) c *= (p - q);
    sum += c * std::pow(s, p - order);
  }
  return sum;
}

}  // namespace

double RadialMode::chi(double t) const {
  const int n = static_cast<int>(chi_nodes.size()) - 1;
  const double h = 1.0 / n;
  const double pos = std::clamp(t, 0.0, 1.0) * n;
  const int i = std::min(static_cast<int>(pos), n - 1);
  const double s = pos - i;
  const double v[6] = {chi_nodes[i], h * dchi_nodes[i], h * h * ddchi_nodes[i],
                       h * h * ddchi_nodes[i + 1], h * dchi_nodes[i + 1], chi_nodes[i + 1]};
  double sum = 0.0;
  for (int b = 0; b < 6; ++b) sum += v[b] * basis_derivative(b, 0, s);
  return sum;
}

double RadialMode::dchi(double t) const {
  const int n = static_cast<int>(chi_nodes.size()) - 1;
  const double h = 1.0 / n;
  const double pos = std::clamp(t, 0.0, 1.0) * n;
  const int i = std::min(static_cast<int>(pos), n - 1);
  const double s = pos - i;
  const double v[6] = {chi_nodes[i], h * dchi_nodes[i], h * h * ddchi_nodes[i],
                       h * h * ddchi_nodes[i + 1], h * dchi_nodes[i + 1], chi_nodes[i + 1]};
  double sum = 0.0;
  for (int b = 0; b < 6; ++b) sum += v[b] * basis_derivative(b, 1, s);
  return sum / h;
}

double RadialMode::ddchi(double t) const {
  const int n = static_cast<int>(chi_nodes.size()) - 1;
  const double h = 1.0 / n;
  const double pos = std::clamp(t, 0.0, 1.0) * n;
  const int i = std::min(static_cast<int>(pos), n - 1);
  const double s = pos - i;
  const double v[6] = {chi_nodes[i], h * dchi_nodes[i], h * h * ddchi_nodes[i],
                       h * h * ddchi_nodes[i + 1], h * dchi_nodes[i + 1], chi_nodes[i + 1]};
  double sum = 0.0;
  for (int b = 0; b < 6; ++b) sum += v[b] * basis_derivative(b, 2, s);
  return sum / (h * h);
}

double RadialMode::mu2p(int p) const {
  if (p < 1 || p > static_cast<int>(mu.size())) fail(ErrorKind::IndexError, "mu index out of range");
  return mu[p - 1];
}

double shoot(int k, double rho, const ShootingOptions& options) {
  if (k < 1) fail(ErrorKind::DimensionError, "ball dimension must be at least 1");
  const double t0 = options.series_start;
  const State y0 = series_start(k, rho, t0);
  return integrate(Ode{k, rho}, t0, 1.0, y0, options.ode_rtol, options.ode_atol)[0];
}

RadialMode solve_radial_mode(int k, int p_max, const ShootingOptions& options) {
  if (k < 1) fail(ErrorKind::DimensionError, "ball dimension must be at least 1");
  if (p_max < 1) fail(ErrorKind::IndexError, "need at least one mu coefficient");
  double lo = 1.0;
  double hi = lo;
  double f_lo = shoot(k, lo, options);
  if (!(f_lo > 0.0)) fail(ErrorKind::NoConvergence, "radial shooting: chi(1) not positive at the lower bracket");
  double f_hi = f_lo;
  while (f_hi > 0.0) {
    lo = hi;
    hi += 0.5;
    if (hi > 10.0 * k + 10.0) fail(ErrorKind::NoConvergence, "radial shooting: no sign change found");
    f_hi = shoot(k, hi, options);
  }
  while (hi - lo > options.rho_tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (shoot(k, mid, options) > 0.0) lo = mid; else hi = mid;
  }
  RadialMode mode;
  mode.k = k;
  mode.rho = 0.5 * (lo + hi);

  const int n = options.table_intervals;
  const Ode f{k, mode.rho};
  mode.chi_nodes.resize(n + 1);
  mode.dchi_nodes.resize(n + 1);
  mode.ddchi_nodes.resize(n + 1);
  State y{};
  double t_prev = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double t = static_cast<double>(i) / n;
    if (t <= options.series_start) {
      y = series_start(k, mode.rho, t);
    } else {
      if (t_prev < options.series_start) {
        y = series_start(k, mode.rho, options.series_start);
        t_prev = options.series_start;
      }
      y = integrate(f, t_prev, t, y, options.ode_rtol, options.ode_atol);
    }
    t_prev = t;
    mode.chi_nodes[i] = y[0];
    mode.dchi_nodes[i] = y[1];
    mode.ddchi_nodes[i] = t == 0.0 ? -mode.rho * mode.rho / k : f(t, y)[1];
  }
  mode.mu = mu_coefficients(mode, p_max);
  return mode;
}

std::vector<double> mu_coefficients(const RadialMode& mode, int p_max) {
  std::vector<double> mu;
  const int k = mode.k;
  for (int p = 1; p <= p_max; ++p) {
    const int power = 2 * p + k - 3;
    auto integrand = [&](double t) {
      const double c = mode.chi(t);
      return std::pow(t, power) * c * c;
    };
    const double integral = integrate_adaptive(integrand, 0.0, 1.0, 1e-15, 1e-13).value;
    mu.push_back(p * (2.0 * p + k - 2.0) * integral);
  }
  return mu;
}

double rigidity_integral(const RadialMode& mode, int p) {
  const int power = 2 * p + mode.k - 1;
  auto integrand = [&](double t) {
    const double c = mode.chi(t);
    const double d = mode.dchi(t);
    return std::pow(t, power) * (d * d - mode.rho * mode.rho * c * c);
  };
  return integrate_adaptive(integrand, 0.0, 1.0, 1e-15, 1e-13).value;
}

double ode_residual(const RadialMode& mode) {
  const int n = static_cast<int>(mode.chi_nodes.size()) - 1;
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    const double t = (i + 0.5) / n;
    const double r = mode.ddchi(t) + (mode.k - 1) * mode.dchi(t) / t + mode.rho * mode.rho * mode.chi(t);
    worst = std::max(worst, std::abs(r));
  }
  return worst;
}

GradientIdentity chi_gradient_identity_check(const RadialMode& mode, const TubeMetric& tm, const Vec& u,
                                             double r, const Vec& horizontal) {
  const int n = tm.n, k = tm.k;
  const double t = u.norm();
  if (!(t > 0.0)) fail(ErrorKind::DomainError, "gradient identity needs t > 0");
  const Mat Ginv = metric_inverse(tm);
  const double d = mode.dchi(t / r) / r;
  Vec dchi = Vec::Zero(n + k);
  dchi.tail(k) = d * u / t;
  Vec dpsi = Vec::Zero(n + k);
  dpsi.head(n) = horizontal;
  GradientIdentity out;
  out.fiber_error = std::abs(dchi.dot(Ginv * dchi) - d * d);
  out.cross_error = std::abs(dpsi.dot(Ginv * dchi));
  return out;
}

}  // namespace qtube
