#include "qtube/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <queue>
#include <stdexcept>

namespace qtube {

QuadratureRule gauss_legendre(int n, double a, double b) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Tricomi initial guess, then Newton on P_n.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int j = 2; j <= n; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged node.
    double p0 = 1.0;
    double p1 = x;
    for (int j = 2; j <= n; ++j) {
      const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
      p0 = p1;
      p1 = p2;
    }
    dp = n == 1 ? 1.0 : n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = mid - half * x;
    rule.nodes[n - 1 - i] = mid + half * x;
    rule.weights[i] = half * w;
    rule.weights[n - 1 - i] = half * w;
  }
  return rule;
}

QuadratureRule composite_gauss_legendre(int order, int panels, double a, double b) {
  QuadratureRule out;
  out.nodes.reserve(static_cast<std::size_t>(order) * panels);
  out.weights.reserve(out.nodes.capacity());
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const QuadratureRule r = gauss_legendre(order, a + p * h, a + (p + 1) * h);
    out.nodes.insert(out.nodes.end(), r.nodes.begin(), r.nodes.end());
    out.weights.insert(out.weights.end(), r.weights.begin(), r.weights.end());
  }
  return out;
}

namespace {

constexpr std::array<double, 8> kXgk{
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk{
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg{
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

Segment gk15(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double kron = fc * kWgk[7];
  double gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[j];
    const double f1 = f(c - dx);
    const double f2 = f(c + dx);
    kron += kWgk[j] * (f1 + f2);
    if (j % 2 == 1) gauss += kWg[j / 2] * (f1 + f2);
  }
  kron *= h;
  gauss *= h;
  return {a, b, kron, std::abs(kron - gauss)};
}

}  // namespace

AdaptiveResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                  double abs_tol, double rel_tol, int max_intervals) {
  AdaptiveResult res;
  if (a == b) return res;
  std::priority_queue<Segment> heap;
  Segment first = gk15(f, a, b);
  res.evaluations = 15;
  double total = first.value;
  double err = first.error;
  heap.push(first);
  int intervals = 1;
  while (err > std::max(abs_tol, rel_tol * std::abs(total)) && intervals < max_intervals) {
    const Segment worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    const Segment left = gk15(f, worst.a, mid);
    const Segment right = gk15(f, mid, worst.b);
    res.evaluations += 30;
    total += left.value + right.value - worst.value;
    err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++intervals;
  }
  // Re-sum to avoid drift from the incremental updates.
  double value = 0.0;
  double error = 0.0;
  std::vector<Segment> segs;
  segs.reserve(heap.size());
  while (!heap.empty()) {
    segs.push_back(heap.top());
    heap.pop();
  }
  std::sort(segs.begin(), segs.end(), [](const Segment& x, const Segment& y) { return x.a < y.a; });
  for (const Segment& s : segs) {
    value += s.value;
    error += s.error;
  }
  res.value = value;
  res.error = error;
  return res;
}

double sphere_measure(int k) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * k) / std::tgamma(0.5 * k);
}

double unit_ball_volume(int k) {
  return std::pow(std::numbers::pi, 0.5 * k) / std::tgamma(0.5 * k + 1.0);
}

SphereRule sphere_rule(int k, int order) {
  if (k < 1) throw std::invalid_argument("sphere_rule: k must be >= 1");
  SphereRule rule;
  rule.k = k;
  if (k == 1) {
    rule.points = {Eigen::VectorXd::Constant(1, 1.0), Eigen::VectorXd::Constant(1, -1.0)};
    rule.weights = {1.0, 1.0};
    return rule;
  }
  if (order < 1) throw std::invalid_argument("sphere_rule: order must be >= 1");
  const int naz = k == 2 ? order : 2 * order;
  const double daz = 2.0 * std::numbers::pi / naz;
  // Polar angles phi_1..phi_{k-2} on [0, pi] by Gauss-Legendre; weight sin^{k-1-m}.
  const QuadratureRule polar = gauss_legendre(order, 0.0, std::numbers::pi);
  const int npolar = k - 2;
  std::vector<int> idx(npolar, 0);
  while (true) {
    double w_polar = 1.0;
    double sin_prod = 1.0;
    Eigen::VectorXd x(k);
    for (int m = 0; m < npolar; ++m) {
      const double phi = polar.nodes[idx[m]];
      w_polar *= polar.weights[idx[m]] * std::pow(std::sin(phi), k - 2 - m);
      x[m] = sin_prod * std::cos(phi);
      sin_prod *= std::sin(phi);
    }
    for (int a = 0; a < naz; ++a) {
      const double th = (a + 0.5) * daz;
      Eigen::VectorXd p = x;
      p[k - 2] = sin_prod * std::cos(th);
      p[k - 1] = sin_prod * std::sin(th);
      rule.points.push_back(p);
      rule.weights.push_back(w_polar * daz);
    }
    int m = npolar - 1;
    while (m >= 0 && ++idx[m] == order) idx[m--] = 0;
    if (m < 0) break;
  }
  return rule;
}

}  // namespace qtube
