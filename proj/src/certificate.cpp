#include "qtube/certificate.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "parallel.hpp"
#include "qtube/error.hpp"
#include "qtube/invariants.hpp"
#include "qtube/manifold.hpp"
#include "qtube/quadrature.hpp"

namespace qtube {

namespace {

// A quadrature node on the base carrying everything the fiber sum needs.
struct BaseNode {
  FramedPoint fp;
  double weight = 0.0;  // includes sqrt(det g) and, on rotational bases, the parallel length
  double psi = 0.0;
  Vec dpsi;             // chart covector
};

struct FiberNode {
  Vec u;
  double weight = 0.0;
  double chi = 0.0;
  Vec dchi;  // d chi(|u|/r) / du
};

std::vector<FiberNode> fiber_rule(const RadialMode& mode, double r, int order, int sphere_order) {
  const int k = mode.k;
  std::vector<FiberNode> out;
  auto push = [&](const Vec& u, double w) {
    FiberNode node;
    node.u = u;
    node.weight = w;
    const double t = u.norm() / r;
    node.chi = mode.chi(t);
    node.dchi = t > 0.0 ? Vec(mode.dchi(t) / (r * r * t) * u) : Vec(Vec::Zero(k));
    out.push_back(std::move(node));
  };
  if (k == 1) {
    const QuadratureRule gl = gauss_legendre(order, -r, r);
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) push(Vec::Constant(1, gl.nodes[i]), gl.weights[i]);
    return out;
  }
  const QuadratureRule gl = gauss_legendre(order, 0.0, 1.0);
  const SphereRule sphere = sphere_rule(k, sphere_order);
  for (std::size_t i = 0; i < gl.nodes.size(); ++i)
    for (std::size_t q = 0; q < sphere.points.size(); ++q) {
      const double t = gl.nodes[i];
      push(Vec(r * t * sphere.points[q]), gl.weights[i] * sphere.weights[q] * std::pow(r, k) * std::pow(t, k - 1));
    }
  return out;
}

Vec pad(const Vec& horizontal, const Vec& fiber) {
  Vec out(horizontal.size() + fiber.size());
  out << horizontal, fiber;
  return out;
}

double fiber_formula_density(const FramedPoint& fp, const RadialMode& mode, double r) {
  const int k = fp.k();
  double sum = 0.0;
  for (int p = 1; 2 * p <= fp.n() && p <= static_cast<int>(mode.mu.size()); ++p)
    sum += std::pow(r, k - 2 + 2 * p) * mode.mu2p(p) * tube_curvature_K(fp, 2 * p);
  return sum;
}

// Accumulates the pieces of Q at one base node.
void accumulate(QBreakdown& q, const BaseNode& node, const std::vector<FiberNode>& fiber, const RadialMode& mode,
                double r, double amp) {
  const int n = node.fp.n(), k = node.fp.k();
  const double lam = mode.rho * mode.rho / (r * r);
  const Vec zero_f = Vec::Zero(k);
  const Vec a = pad(node.dpsi, zero_f);
  const bool moving = node.dpsi.squaredNorm() > 0.0;
  double fib = 0.0, hor = 0.0, crs = 0.0, mass = 0.0;
  for (const auto& f : fiber) {
    const TubeMetric tm = assemble_metric(node.fp, f.u);
    const Mat Gi = metric_inverse(tm);
    const double w = f.weight * tm.det_shape;
    const Vec b = pad(Vec::Zero(n), f.dchi);
    const double bb = b.dot(Gi * b);
    fib += w * node.psi * node.psi * (bb - lam * f.chi * f.chi);
    if (moving) {
      hor += w * f.chi * f.chi * a.dot(Gi * a);
      crs += w * 2.0 * f.chi * node.psi * a.dot(Gi * b);
    }
    mass += w * f.chi * f.chi * node.psi * node.psi;
  }
  const double a2 = amp * amp;
  q.fiber += a2 * node.weight * fib;
  q.horizontal += a2 * node.weight * hor;
  q.cross += a2 * node.weight * crs;
  q.mass += a2 * node.weight * mass;
  q.fiber_formula += a2 * node.weight * node.psi * node.psi * fiber_formula_density(node.fp, mode, r);
  if (moving) q.base_energy += node.weight * node.dpsi.dot(node.fp.g_inv * node.dpsi);
}

// Composite Gauss-Legendre nodes on [0, s] (panels of width <= 0.5) and
// log-spaced panels on [s, R].
QuadratureRule tau_rule(double s, double R, int order) {
  QuadratureRule out;
  auto append = [&](double a, double b) {
    const QuadratureRule gl = gauss_legendre(order, a, b);
    out.nodes.insert(out.nodes.end(), gl.nodes.begin(), gl.nodes.end());
    out.weights.insert(out.weights.end(), gl.weights.begin(), gl.weights.end());
  };
  const int inner = std::max(2, static_cast<int>(std::ceil(s / 0.5)));
  for (int i = 0; i < inner; ++i) append(s * i / inner, s * (i + 1) / inner);
  const int outer = std::max(2, static_cast<int>(std::ceil(4.0 * std::log2(R / s))));
  for (int i = 0; i < outer; ++i)
    append(s * std::pow(R / s, static_cast<double>(i) / outer), s * std::pow(R / s, static_cast<double>(i + 1) / outer));
  return out;
}

std::vector<BaseNode> radial_nodes(const BaseManifold& base, double s, double R, int order, int threads) {
  const auto& rad = *base.radial;
  const RadialCapacity cap(base.radial, s, R);
  const QuadratureRule rule = tau_rule(s, R, order);
  const int ends = rad.ends();
  const std::size_t per_end = rule.nodes.size();
  std::vector<BaseNode> nodes(per_end * ends);
  detail::parallel_for(nodes.size(), threads, [&](std::size_t i) {
    const int e = static_cast<int>(i / per_end);
    const double tau = rule.nodes[i % per_end];
    const double v = rad.v_at(e, tau);
    BaseNode& node = nodes[i];
    node.fp = frame_point(*base.chart, rad.chart_point(v));
    node.weight = rule.weights[i % per_end] * rad.shell_measure(e, tau);
    node.psi = tau <= s ? 1.0 : cap.value(tau);
    node.dpsi = tau <= s ? Vec(Vec::Zero(rad.dim())) : Vec(cap.derivative(tau) * rad.radial_covector(v));
  });
  return nodes;
}

// Bilinear interpolation of the grid capacity potential on [-R, R]^2.
std::vector<BaseNode> grid_nodes(const BaseManifold& base, const CapacityPotential& cap, int threads) {
  const int N = cap.resolution;
  const int M = N + 1;
  const double L = cap.grid_half_width;
  const double h = 2.0 * L / N;
  const QuadratureRule gl = gauss_legendre(2, 0.0, 1.0);
  std::vector<std::array<int, 2>> cells;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      const double m = std::max({cap.psi[i * M + j], cap.psi[(i + 1) * M + j], cap.psi[i * M + j + 1],
                                 cap.psi[(i + 1) * M + j + 1]});
      if (m > 0.0) cells.push_back({i, j});
    }
  std::vector<BaseNode> nodes(cells.size() * 4);
  detail::parallel_for(cells.size(), threads, [&](std::size_t c) {
    const int i = cells[c][0], j = cells[c][1];
    const double p00 = cap.psi[i * M + j], p10 = cap.psi[(i + 1) * M + j];
    const double p01 = cap.psi[i * M + j + 1], p11 = cap.psi[(i + 1) * M + j + 1];
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        const double xi = gl.nodes[a], eta = gl.nodes[b];
        BaseNode& node = nodes[c * 4 + a * 2 + b];
        node.fp = frame_point(*base.chart, Vec{{-L + (i + xi) * h, -L + (j + eta) * h}});
        node.weight = gl.weights[a] * gl.weights[b] * h * h * node.fp.sqrt_det_g;
        node.psi = (1 - xi) * (1 - eta) * p00 + xi * (1 - eta) * p10 + (1 - xi) * eta * p01 + xi * eta * p11;
        node.dpsi = Vec{{((1 - eta) * (p10 - p00) + eta * (p11 - p01)) / h,
                         ((1 - xi) * (p01 - p00) + xi * (p11 - p10)) / h}};
      }
  });
  return nodes;
}

double bump(double z) {
  if (std::abs(z) >= 1.0) return 0.0;
  const double c = std::cos(0.5 * std::numbers::pi * z);
  return c * c;
}

double dbump(double z) {
  if (std::abs(z) >= 1.0) return 0.0;
  return -0.5 * std::numbers::pi * std::sin(std::numbers::pi * z);
}

// Product bump supported on the cube centre +- width in the fiber.
struct FiberBump {
  Vec centre;
  double width = 0.0;
  double value(const Vec& u) const {
    double p = 1.0;
    for (Eigen::Index a = 0; a < u.size(); ++a) p *= bump((u[a] - centre[a]) / width);
    return p;
  }
  Vec gradient(const Vec& u) const {
    Vec g(u.size());
    for (Eigen::Index a = 0; a < u.size(); ++a) {
      double p = dbump((u[a] - centre[a]) / width) / width;
      for (Eigen::Index b = 0; b < u.size(); ++b)
        if (b != a) p *= bump((u[b] - centre[b]) / width);
      g[a] = p;
    }
    return g;
  }
  // Tensor Gauss-Legendre nodes on the support cube.
  std::vector<std::pair<Vec, double>> rule(int order) const {
    const int k = static_cast<int>(centre.size());
    std::vector<QuadratureRule> axes;
    for (int a = 0; a < k; ++a) axes.push_back(gauss_legendre(order, centre[a] - width, centre[a] + width));
    std::vector<std::pair<Vec, double>> out;
    std::vector<int> idx(k, 0);
    while (true) {
      Vec u(k);
      double w = 1.0;
      for (int a = 0; a < k; ++a) {
        u[a] = axes[a].nodes[idx[a]];
        w *= axes[a].weights[idx[a]];
      }
      out.emplace_back(u, w);
      int a = 0;
      while (a < k && ++idx[a] == order) idx[a++] = 0;
      if (a == k) break;
    }
    return out;
  }
};

// Euclidean gradient of det(I - u H) in the fiber.
Vec det_gradient(const FramedPoint& fp, const TubeMetric& tm) {
  const Mat inv = tm.I_minus_uH.inverse();
  Vec g(fp.k());
  for (int a = 0; a < fp.k(); ++a) g[a] = -tm.det_shape * (inv * fp.H[a]).trace();
  return g;
}

Vec chi_gradient(const RadialMode& mode, const Vec& u, double r) {
  const double t = u.norm() / r;
  if (t == 0.0) return Vec::Zero(u.size());
  return mode.dchi(t) / (r * r * t) * u;
}

std::string describe(const Error& e) { return e.what(); }

}  // namespace

// ---------------------------------------------------------------------------

EssentialFloor essential_lower_bound(const BaseManifold& base, const TubeSpec& tube, const RadialMode& mode,
                                     double compact_radius, int samples) {
  const double T = base.truncation;
  if (!(compact_radius > 0.0 && compact_radius < T))
    fail(ErrorKind::DomainError, "compact radius must lie inside the truncation");
  EssentialFloor out;
  out.compact_radius = compact_radius;
  out.threshold = mode.rho * mode.rho / (tube.r * tube.r);
  FrameOptions opt;
  opt.compute_omega = false;
  auto sample = [&](const Vec& x, double tau) {
    const double a = frame_point(*base.chart, x, opt).A_norm;
    out.exterior_sup = std::max(out.exterior_sup, a);
    if (tau >= 0.9 * T) out.outer_sup = std::max(out.outer_sup, a);
  };
  if (base.radial) {
    const auto& rad = *base.radial;
    for (int e = 0; e < rad.ends(); ++e)
      for (int i = 0; i <= samples; ++i) {
        const double tau = compact_radius * std::pow(T / compact_radius, static_cast<double>(i) / samples);
        sample(rad.chart_point(rad.v_at(e, tau)), tau);
      }
  } else {
    const int n = base.n();
    const int per_axis = std::max(8, static_cast<int>(std::lround(std::pow(samples * 8.0, 1.0 / n))));
    std::vector<int> idx(n, 0);
    while (true) {
      Vec x(n);
      for (int d = 0; d < n; ++d) x[d] = -T + 2.0 * T * idx[d] / (per_axis - 1);
      const double tau = x.norm();
      if (tau > compact_radius && tau <= T) sample(x, tau);
      int d = 0;
      while (d < n && ++idx[d] == per_axis) idx[d++] = 0;
      if (d == n) break;
    }
  }
  out.epsilon = std::sqrt(static_cast<double>(tube.k)) * tube.r * out.exterior_sup;
  const double global = std::max(tube.sampled_sup, out.exterior_sup);
  if (out.epsilon >= 1.0)
    fail(ErrorKind::A2Violated, "exterior curvature sup " + std::to_string(out.exterior_sup) + " is not below 1/(sqrt(k) r)");
  if (out.outer_sup > 0.1 * global)
    fail(ErrorKind::A2Violated, "curvature does not decay towards the truncation (outer sup " +
                                    std::to_string(out.outer_sup) + ")");
  // det(I - uH) is n x n, so the density sandwich carries the exponent n.
  out.floor = std::pow((1.0 - out.epsilon) / (1.0 + out.epsilon), base.n()) * out.threshold;
  return out;
}

double fiber_identity_value(const FramedPoint& fp, const RadialMode& mode) {
  double sum = 0.0;
  for (int p = 1; 2 * p <= fp.n() && p <= static_cast<int>(mode.mu.size()); ++p)
    sum += mode.mu2p(p) * tube_curvature_K(fp, 2 * p);
  return sum;
}

double fiber_ball_integral(const FramedPoint& fp, const RadialMode& mode, int radial_order, int sphere_order) {
  const int k = fp.k();
  const QuadratureRule gl = gauss_legendre(radial_order, 0.0, 1.0);
  const SphereRule sphere = sphere_rule(k, sphere_order);
  const double rho2 = mode.rho * mode.rho;
  double total = 0.0;
  for (std::size_t q = 0; q < sphere.points.size(); ++q) {
    const Mat S = fp.shape(sphere.points[q]);
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
      const double t = gl.nodes[i];
      const double c = mode.chi(t), dc = mode.dchi(t);
      const Mat M = Mat::Identity(fp.n(), fp.n()) - t * S;
      total += sphere.weights[q] * gl.weights[i] * std::pow(t, k - 1) * (dc * dc - rho2 * c * c) * M.determinant();
    }
  }
  return total;
}

CertificateIntegral certificate_integral(const BaseManifold& base, const TubeSpec& tube, const RadialMode& mode,
                                         const CertificateOptions& options) {
  (void)tube;
  CertificateIntegral out;
  const double T = base.truncation;
  const std::vector<double> full = curvature_integrals(base, T);
  const std::vector<double> half = curvature_integrals(base, 0.5 * T);
  for (std::size_t p = 1; p <= full.size() && p <= mode.mu.size(); ++p) {
    out.per_p.push_back(mode.mu2p(static_cast<int>(p)) * full[p - 1]);
    out.value += out.per_p.back();
    out.half_value += mode.mu2p(static_cast<int>(p)) * half[p - 1];
  }
  out.tail_bound = std::abs(out.value - out.half_value);

  // Fiber identity at a few base points.
  std::vector<Vec> pts;
  if (base.radial) {
    for (double tau : {0.3, 1.0, 2.5})
      pts.push_back(base.radial->chart_point(base.radial->v_at(0, std::min(tau, 0.5 * T))));
  } else {
    for (double c : {0.1, 0.4, -0.7}) pts.push_back(Vec::Constant(base.n(), c * std::min(1.0, T)));
  }
  for (const Vec& x : pts) {
    const FramedPoint fp = frame_point(*base.chart, x);
    out.fiber_identity_error =
        std::max(out.fiber_identity_error, std::abs(fiber_ball_integral(fp, mode) - fiber_identity_value(fp, mode)));
  }
  if (std::abs(out.value) > options.zero_tolerance && out.tail_bound > std::abs(out.value))
    fail(ErrorKind::TailDominates, "tail bound " + std::to_string(out.tail_bound) + " exceeds the truncated integral");
  return out;
}

QBreakdown evaluate_Q(const BaseManifold& base, const TubeSpec& tube, const RadialMode& mode, double s, double R,
                      const CertificateOptions& options) {
  if (mode.k != tube.k || base.k() != tube.k) fail(ErrorKind::DimensionError, "codimension mismatch");
  QBreakdown q;
  q.s = s;
  q.R = R;
  std::vector<BaseNode> nodes;
  if (base.radial) {
    if (!(R > s)) fail(ErrorKind::NotAnnulus, "capacity potential needs R > s");
    if (base.truncation < R * (1.0 - 1e-12)) fail(ErrorKind::DomainError, "base truncation is below R");
    q.capacity_energy = RadialCapacity(base.radial, s, R).energy();
    nodes = radial_nodes(base, s, R, options.base_order, options.threads);
  } else {
    CapacityOptions copt;
    copt.grid_resolution = options.capacity_resolution;
    const CapacityPotential cap = capacity_potential(base, s, R, copt);
    q.capacity_energy = cap.energy;
    nodes = grid_nodes(base, cap, options.threads);
  }
  const std::vector<FiberNode> fiber = fiber_rule(mode, tube.r, options.fiber_order, options.sphere_order);
  std::vector<QBreakdown> parts(nodes.size());
  detail::parallel_for(nodes.size(), options.threads,
                       [&](std::size_t i) { accumulate(parts[i], nodes[i], fiber, mode, tube.r, options.amplitude); });
  for (const auto& p : parts) {
    q.fiber += p.fiber;
    q.horizontal += p.horizontal;
    q.cross += p.cross;
    q.mass += p.mass;
    q.fiber_formula += p.fiber_formula;
    q.base_energy += p.base_energy;
  }
  q.value = q.fiber + q.horizontal + q.cross;
  q.c1_ratio = q.base_energy > 0.0 ? q.horizontal / (options.amplitude * options.amplitude * q.base_energy) : 0.0;
  return q;
}

std::vector<QBreakdown> search_Q(const BaseManifold& base, const TubeSpec& tube, const RadialMode& mode,
                                 const CertificateOptions& options) {
  std::vector<std::pair<double, double>> pairs;
  for (double s : options.s_grid)
    for (double f : options.R_factors) {
      const double R = std::min(f * s, base.truncation);
      if (R > s && std::none_of(pairs.begin(), pairs.end(), [&](auto& p) { return p.first == s && p.second == R; }))
        pairs.emplace_back(s, R);
    }
  if (pairs.empty()) fail(ErrorKind::DomainError, "no admissible (s, R) pair below the truncation");
  std::vector<QBreakdown> out(pairs.size());
  CertificateOptions inner = options;
  inner.threads = 1;
  detail::parallel_for(pairs.size(), options.threads, [&](std::size_t i) {
    out[i] = evaluate_Q(base, tube, mode, pairs[i].first, pairs[i].second, inner);
  });
  return out;
}

QBreakdown strict_certificate(const BaseManifold& base, const TubeSpec& tube, const RadialMode& mode,
                              const CertificateOptions& options) {
  const std::vector<QBreakdown> grid = search_Q(base, tube, mode, options);
  const auto best = std::min_element(grid.begin(), grid.end(),
                                     [](const QBreakdown& a, const QBreakdown& b) { return a.value < b.value; });
  if (!(best->value < 0.0))
    fail(ErrorKind::NoNegativeQ, "smallest Q over the grid is " + std::to_string(best->value) + " at s = " +
                                     std::to_string(best->s) + ", R = " + std::to_string(best->R));
  return *best;
}

PerturbationResult perturbative_certificate(const BaseManifold& base, const TubeSpec& tube, const RadialMode& mode,
                                            double s, double R, const CertificateOptions& options) {
  if (!base.radial) fail(ErrorKind::DomainError, "the perturbation branch needs a rotationally symmetric base");
  const double sup = tube.sampled_sup > 0.0 ? tube.sampled_sup : sampled_curvature_sup(base);
  if (!(sup > 1e-8)) fail(ErrorKind::DomainError, "base is totally geodesic");
  const auto& rad = *base.radial;
  const int k = tube.k;
  const double r = tube.r;
  const double lam = mode.rho * mode.rho / (r * r);
  const double amp = options.amplitude, bamp = options.bump_amplitude;
  const double ramp = std::min(0.5, s / 8.0);

  PerturbationResult out;
  out.base_q = evaluate_Q(base, tube, mode, s, R, options);

  // Gauss nodes on [0, s], panel edges on the ramp grid so j is smooth on each panel.
  const int panels = static_cast<int>(std::floor(s / (0.5 * ramp) + 1e-9));
  const QuadratureRule gl = gauss_legendre(8, 0.0, 1.0);
  std::vector<double> taus, weights;
  for (int p = 0; p < panels; ++p)
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
      taus.push_back(0.5 * ramp * (p + gl.nodes[i]));
      weights.push_back(0.5 * ramp * gl.weights[i]);
    }

  struct FiberChoice {
    int direction, orientation;
    double t0;
    FiberBump bump;
  };
  std::vector<FiberChoice> choices;
  for (double t0 : {0.3, 0.5, 0.7})
    for (int a = 0; a < k; ++a)
      for (int o : {1, -1}) {
        FiberBump fb;
        fb.centre = Vec::Zero(k);
        fb.centre[a] = o * t0 * r;
        fb.width = 0.9 * std::min(t0, (1.0 - t0) / std::sqrt(static_cast<double>(k))) * r;
        choices.push_back({a, o, t0, fb});
      }

  // Frames along one end, sign-aligned to their predecessor.
  const int ends = rad.ends();
  std::vector<std::vector<FramedPoint>> frames(ends);
  for (int e = 0; e < ends; ++e) {
    FrameOptions opt;
    for (double tau : taus) {
      frames[e].push_back(frame_point(*base.chart, rad.chart_point(rad.v_at(e, tau)), opt));
      opt.reference = frames[e].back().normals;
    }
  }

  // Per node and fiber choice: pieces of Q(phi, j chi_1) and Q(j chi_1, j chi_1)
  // as coefficients of j, j' and their products.
  struct Pieces {
    double formula = 0.0;  // int chi_1 <d chi, d det>
    double cj = 0.0, cdj = 0.0;
    double ejj = 0.0, edd = 0.0, ejd = 0.0;
  };
  const std::size_t nt = taus.size(), nc = choices.size();
  std::vector<Pieces> pieces(static_cast<std::size_t>(ends) * nt * nc);
  detail::parallel_for(pieces.size(), options.threads, [&](std::size_t idx) {
    const std::size_t c = idx % nc, m = (idx / nc) % nt;
    const int e = static_cast<int>(idx / (nc * nt));
    const FramedPoint& fp = frames[e][m];
    const FiberBump& fb = choices[c].bump;
    const double v = rad.v_at(e, taus[m]);
    const Vec dtau = pad(rad.radial_covector(v), Vec::Zero(k));
    Pieces& pc = pieces[idx];
    for (const auto& [u, wu] : fb.rule(10)) {
      const TubeMetric tm = assemble_metric(fp, u);
      const Mat Gi = metric_inverse(tm);
      const double w = wu * tm.det_shape;
      const double chi = mode.chi(u.norm() / r), c1 = fb.value(u);
      const Vec gchi = chi_gradient(mode, u, r);
      const Vec dphi = pad(Vec::Zero(fp.n()), gchi);
      const Vec dc1 = pad(Vec::Zero(fp.n()), fb.gradient(u));
      pc.formula += wu * c1 * gchi.dot(det_gradient(fp, tm));
      pc.cj += w * (dphi.dot(Gi * dc1) - lam * chi * c1);
      pc.cdj += w * c1 * dphi.dot(Gi * dtau);
      pc.ejj += w * (dc1.dot(Gi * dc1) - lam * c1 * c1);
      pc.edd += w * c1 * c1 * dtau.dot(Gi * dtau);
      pc.ejd += w * 2.0 * c1 * dc1.dot(Gi * dtau);
    }
  });

  // Plateau windows [lo, hi] with cos^2 ramps of width `ramp`.
  auto window = [&](double lo, double hi, double tau, double& j, double& dj) {
    j = dj = 0.0;
    if (tau >= lo && tau <= hi) {
      j = 1.0;
    } else if (tau < lo && lo > 0.0 && tau > lo - ramp) {
      j = bump((tau - lo) / ramp);
      dj = dbump((tau - lo) / ramp) / ramp;
    } else if (tau > hi && tau < hi + ramp) {
      j = bump((tau - hi) / ramp);
      dj = dbump((tau - hi) / ramp) / ramp;
    }
  };
  std::vector<double> mags;
  for (int i = 0; i < options.epsilon_count; ++i)
    mags.push_back(std::pow(10.0, -6.0 + 5.0 * i / std::max(1, options.epsilon_count - 1)));
  const double q0 = out.base_q.value;
  auto best_over_eps = [&](double c, double b) {
    double best = q0;
    for (double mg : mags)
      for (double eps : {mg, -mg}) best = std::min(best, q0 + 2.0 * eps * c + eps * eps * b);
    return best;
  };

  bool coupled = false;
  double best_q = std::numeric_limits<double>::infinity();
  const bool two_ended = ends == 2;
  for (int e = 0; e < ends; ++e)
    for (std::size_t c = 0; c < nc; ++c)
      for (double lo = two_ended ? ramp : 0.0; lo + ramp <= s + 1e-12; lo += ramp)
        for (double hi = lo; hi + ramp <= s + 1e-12; hi += ramp) {
          double formula = 0.0, cross = 0.0, energy = 0.0;
          for (std::size_t m = 0; m < nt; ++m) {
            double j, dj;
            window(lo, hi, taus[m], j, dj);
            if (j == 0.0 && dj == 0.0) continue;
            const Pieces& pc = pieces[(static_cast<std::size_t>(e) * nt + m) * nc + c];
            const double w = weights[m] * rad.shell_measure(e, taus[m]);
            formula -= w * j * pc.formula;
            cross += w * (j * pc.cj + dj * pc.cdj);
            energy += w * (j * j * pc.ejj + dj * dj * pc.edd + j * dj * pc.ejd);
          }
          formula *= amp * bamp;
          cross *= amp * bamp;
          energy *= bamp * bamp;
          if (std::abs(formula) < 1e-12) continue;
          coupled = true;
          const double q = best_over_eps(cross, energy);
          if (q < best_q) {
            best_q = q;
            out.end = e;
            out.plateau_lo = lo;
            out.plateau_hi = hi;
            out.t0 = choices[c].t0;
            out.direction = choices[c].direction;
            out.orientation = choices[c].orientation;
            out.coupling_formula = formula;
            out.coupling_quadrature = cross;
            out.bump_energy = energy;
          }
        }
  if (!coupled) fail(ErrorKind::DegenerateCoupling, "no band and fiber bump couples to the ground state");
  out.ramp = ramp;

  const double c = out.coupling_quadrature, b = out.bump_energy;
  out.q_perturbed = q0;
  for (double mg : mags) {
    const double qp = q0 + 2.0 * mg * c + mg * mg * b;
    const double qm = q0 - 2.0 * mg * c + mg * mg * b;
    for (auto [eps, val] : {std::pair{mg, qp}, std::pair{-mg, qm}}) {
      out.epsilons.push_back(eps);
      out.values.push_back(val);
      if (val < out.q_perturbed) {
        out.q_perturbed = val;
        out.best_epsilon = eps;
      }
    }
    const double lin = 2.0 * mg * c;
    out.linear_flip_defect =
        std::max(out.linear_flip_defect, std::abs(0.5 * (qp - qm) - lin) / std::max(std::abs(lin), std::abs(q0)));
  }
  return out;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::DiscreteSpectrumCertified: return "DISCRETE_SPECTRUM_CERTIFIED";
    case Verdict::InapplicableTotallyGeodesic: return "INAPPLICABLE_TOTALLY_GEODESIC";
    case Verdict::ConditionFailed: return "CONDITION_FAILED";
    case Verdict::Inconclusive: return "INCONCLUSIVE";
  }
  return "INCONCLUSIVE";
}

CertificateReport verdict(const BaseManifold& base, const TubeSpec& tube, const CertificateOptions& options) {
  CertificateReport rep;
  rep.family = base.spec.name;
  rep.tube = tube;
  const int n = base.n();
  const RadialMode mode = solve_radial_mode(tube.k, std::max(1, n / 2));
  rep.rho = mode.rho;
  rep.threshold = mode.rho * mode.rho / (tube.r * tube.r);
  auto audit = [&](const std::string& name, double value, double tol) {
    rep.audit.push_back({name, value, tol, std::abs(value) <= tol});
  };
  auto attempt = [&](auto&& body) {
    try {
      body();
      return true;
    } catch (const Error& e) {
      rep.errors.push_back(describe(e));
      return false;
    }
  };

  attempt([&] { rep.sup_shape = tube.sampled_sup > 0.0 ? tube.sampled_sup : sampled_curvature_sup(base); });
  rep.totally_geodesic = rep.sup_shape <= 1e-8;

  // Essential floor at each compact radius.
  bool a2 = true;
  for (double rc : options.compact_radii) {
    if (!(rc < base.truncation)) continue;
    a2 = attempt([&] {
           rep.floors.push_back(essential_lower_bound(base, tube, mode, rc));
           rep.ess_floor = rep.floors.back().floor;
         }) && a2;
  }
  if (!rep.floors.empty()) audit("ess_floor_not_above_threshold", std::max(0.0, rep.ess_floor - rep.threshold), 0.0);

  // Oracle cross-check.
  if (options.run_oracle && base.radial) {
    attempt([&] {
      rep.oracle = tube_spectrum(base, tube, options.oracle);
      rep.oracle_gap = 1.0 - rep.oracle->extrapolated / rep.threshold;
    });
  }

  auto finish = [&](Verdict v, std::string why) {
    rep.verdict = v;
    rep.reason = std::move(why);
    if (v == Verdict::DiscreteSpectrumCertified && rep.oracle && !rep.floors.empty())
      audit("oracle_below_ess_floor", std::max(0.0, rep.oracle->extrapolated - rep.ess_floor), 0.0);
    return rep;
  };

  if (rep.totally_geodesic) return finish(Verdict::InapplicableTotallyGeodesic, "sampled shape operator vanishes");

  // Parabolicity.
  attempt([&] {
    std::vector<double> radii;
    for (int i = 0; i < 16; ++i) radii.push_back(base.truncation * std::pow(0.5, 0.5 * (15 - i)));
    rep.growth = volume_growth_test(base, radii);
    rep.parabolic = to_string(rep.growth->verdict);
    if (rep.growth->verdict == GrowthVerdict::ParabolicConsistent) rep.parabolic_basis = "quadratic volume growth";
  });
  if (n == 2 && rep.parabolic != to_string(GrowthVerdict::ParabolicConsistent)) {
    // Surfaces with integrable Gauss curvature are parabolic.
    attempt([&] {
      auto abs_k = [](const FramedPoint& fp) { return std::abs(sectional_curvature(curvature_operator(fp), fp.g, 0, 1)); };
      const double full = base_integral(base, abs_k, base.truncation, 1e-10);
      const double half = base_integral(base, abs_k, 0.5 * base.truncation, 1e-10);
      rep.abs_curvature = full;
      if (full - half <= 1e-3 * std::max(1.0, full)) {
        rep.parabolic = to_string(GrowthVerdict::ParabolicConsistent);
        rep.parabolic_basis = "integrable Gauss curvature";
      }
    });
  }
  if (n == 2 && base.radial) {
    attempt([&] { rep.ends = end_profile(base); });
    if (rep.ends && !rep.ends->condition_holds)
      return finish(Verdict::ConditionFailed, "end condition e - sum lambda_i = " + std::to_string(rep.ends->condition) +
                                                  " is positive");
  }

  bool have_integral = attempt([&] { rep.integral = certificate_integral(base, tube, mode, options); });
  if (rep.integral) audit("fiber_identity", rep.integral->fiber_identity_error, 1e-8);
  if (!have_integral) return finish(Verdict::Inconclusive, "certificate integral unavailable");
  if (!a2) return finish(Verdict::Inconclusive, "essential spectrum floor not established");
  const double value = rep.integral->value;
  const bool zero = std::abs(value) <= std::max(options.zero_tolerance, rep.integral->tail_bound);
  if (!zero && value > 0.0) return finish(Verdict::ConditionFailed, "certificate integral is positive");
  const bool parabolic = rep.parabolic == to_string(GrowthVerdict::ParabolicConsistent);

  if (!zero) {
    attempt([&] { rep.q_grid = search_Q(base, tube, mode, options); });
    for (const auto& q : rep.q_grid) {
      audit("cross_term_vanishes[s=" + std::to_string(q.s) + ",R=" + std::to_string(q.R) + "]", q.cross,
            1e-8 * std::max(1.0, std::abs(q.value)));
      if (!rep.q || q.value < rep.q->value) rep.q = q;
    }
    if (rep.q) audit("fiber_term_matches_formula", rep.q->fiber - rep.q->fiber_formula, 1e-6 * std::max(1.0, std::abs(rep.q->fiber)));
    if (!rep.q || !(rep.q->value < 0.0)) {
      if (rep.q)
        rep.errors.push_back(std::string(to_string(ErrorKind::NoNegativeQ)) + ": smallest Q over the grid is " +
                             std::to_string(rep.q->value));
      return finish(Verdict::Inconclusive, "no negative Q on the (s, R) grid");
    }
  } else {
    // Equality branch: the widest plateau, then the largest R on the grid.
    double s = 0.0, R = 0.0;
    for (double si : options.s_grid)
      for (double f : options.R_factors) {
        const double Ri = std::min(f * si, base.truncation);
        if (Ri > si && (si > s || (si == s && Ri > R))) {
          s = si;
          R = Ri;
        }
      }
    attempt([&] {
      rep.perturbation = perturbative_certificate(base, tube, mode, s, R, options);
      rep.q = rep.perturbation->base_q;
    });
    if (rep.perturbation) {
      audit("coupling_formula_matches_quadrature",
            rep.perturbation->coupling_formula - rep.perturbation->coupling_quadrature,
            1e-6 * std::max(1e-12, std::abs(rep.perturbation->coupling_quadrature)));
      audit("linear_term_antisymmetric", rep.perturbation->linear_flip_defect, 1e-10);
    }
    if (!rep.perturbation || !(rep.perturbation->q_perturbed < 0.0))
      return finish(Verdict::Inconclusive, "perturbed test function does not lower Q below zero");
  }
  if (!parabolic) return finish(Verdict::Inconclusive, "volume growth is not quadratic");
  return finish(Verdict::DiscreteSpectrumCertified, zero ? "negative Q after perturbation" : "negative Q");
}

}  // namespace qtube
