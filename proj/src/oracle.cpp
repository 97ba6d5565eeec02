#include "qtube/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qtube/error.hpp"
#include "qtube/manifold.hpp"
#include "qtube/quadrature.hpp"
#include "parallel.hpp"

namespace qtube {

namespace {

constexpr double kGaussOffset = 0.21132486540518711775;  // (1 - 1/sqrt(3)) / 2

std::size_t nearest(const std::vector<double>& sorted, double x) {
  auto it = std::lower_bound(sorted.begin(), sorted.end(), x);
  if (it == sorted.end()) return sorted.size() - 1;
  const std::size_t i = static_cast<std::size_t>(it - sorted.begin());
  if (i > 0 && std::abs(sorted[i - 1] - x) < std::abs(sorted[i] - x)) return i - 1;
  return i;
}

}  // namespace

GridAxis GridAxis::uniform(double a, double b, int elements, AxisBoundary lo, AxisBoundary hi) {
  if (!(b > a) || elements < 1) fail(ErrorKind::DomainError, "grid axis needs b > a and at least one element");
  GridAxis axis;
  axis.lo = lo;
  axis.hi = hi;
  for (int i = 0; i <= elements; ++i) axis.nodes.push_back(a + (b - a) * i / elements);
  return axis;
}

GridAxis GridAxis::circle(double period, int elements) {
  GridAxis axis = uniform(0.0, period, elements, AxisBoundary::Natural, AxisBoundary::Natural);
  axis.periodic = true;
  return axis;
}

std::vector<double> GridAxis::gauss_points() const {
  std::vector<double> pts;
  for (int e = 0; e < elements(); ++e) {
    const double a = nodes[e], h = nodes[e + 1] - nodes[e];
    pts.push_back(a + kGaussOffset * h);
    pts.push_back(a + (1.0 - kGaussOffset) * h);
  }
  return pts;
}

Assembled assemble_laplacian(const DiscretizationGrid& grid, const CoefficientFn& coefficient, int threads) {
  const int d = static_cast<int>(grid.axes.size());
  if (d < 1 || d > 3) fail(ErrorKind::DimensionError, "assembly supports one to three axes");
  std::vector<int> shape(d), elems(d);
  std::size_t nodes = 1, elements = 1;
  for (int a = 0; a < d; ++a) {
    const auto& ax = grid.axes[a];
    elems[a] = ax.elements();
    if (elems[a] < 1) fail(ErrorKind::GridTooCoarse, "axis without elements");
    shape[a] = ax.periodic ? elems[a] : elems[a] + 1;
    nodes *= shape[a];
    elements *= elems[a];
  }
  if (nodes > grid.node_cap) fail(ErrorKind::OutOfBudget, "node count " + std::to_string(nodes) + " exceeds the cap");

  const int corners = 1 << d;
  const int gps = 1 << d;
  // Coefficients at every Gauss point, element-major.
  std::vector<double> Acoef(elements * gps * d * d), Wcoef(elements * gps);
  auto element_index = [&](std::size_t e, std::vector<int>& idx) {
    for (int a = d - 1; a >= 0; --a) {
      idx[a] = static_cast<int>(e % elems[a]);
      e /= elems[a];
    }
  };
  detail::parallel_for(elements, threads, [&](std::size_t e) {
    std::vector<int> idx(d);
    element_index(e, idx);
    double x[3];
    for (int g = 0; g < gps; ++g) {
      for (int a = 0; a < d; ++a) {
        const auto& ax = grid.axes[a];
        const double lo = ax.nodes[idx[a]], h = ax.nodes[idx[a] + 1] - lo;
        x[a] = lo + (((g >> a) & 1) ? 1.0 - kGaussOffset : kGaussOffset) * h;
      }
      coefficient(x, &Acoef[(e * gps + g) * d * d], Wcoef[e * gps + g]);
    }
  });

  auto node_of = [&](const std::vector<int>& idx) {
    std::size_t n = 0;
    for (int a = 0; a < d; ++a) n = n * shape[a] + idx[a];
    return n;
  };
  std::vector<int> free_index(nodes, -1);
  std::vector<int> free_nodes;
  {
    std::vector<int> idx(d);
    for (std::size_t n = 0; n < nodes; ++n) {
      std::size_t rem = n;
      for (int a = d - 1; a >= 0; --a) {
        idx[a] = static_cast<int>(rem % shape[a]);
        rem /= shape[a];
      }
      bool fixed = false;
      for (int a = 0; a < d; ++a) {
        const auto& ax = grid.axes[a];
        if (ax.periodic) continue;
        if (idx[a] == 0 && ax.lo == AxisBoundary::Dirichlet) fixed = true;
        if (idx[a] == shape[a] - 1 && ax.hi == AxisBoundary::Dirichlet) fixed = true;
      }
      if (!fixed) {
        free_index[n] = static_cast<int>(free_nodes.size());
        free_nodes.push_back(static_cast<int>(n));
      }
    }
  }

  using Triplet = Eigen::Triplet<double>;
  std::vector<Triplet> kt, mt;
  kt.reserve(elements * corners * corners);
  mt.reserve(elements * corners * corners);
  std::vector<int> idx(d), cn(d);
  std::vector<double> Ke(corners * corners), Me(corners * corners);
  std::vector<double> N(corners), dN(corners * d);
  std::vector<int> local(corners);
  for (std::size_t e = 0; e < elements; ++e) {
    element_index(e, idx);
    double h[3];
    for (int a = 0; a < d; ++a) h[a] = grid.axes[a].nodes[idx[a] + 1] - grid.axes[a].nodes[idx[a]];
    for (int c = 0; c < corners; ++c) {
      for (int a = 0; a < d; ++a) {
        cn[a] = idx[a] + ((c >> a) & 1);
        if (grid.axes[a].periodic) cn[a] %= shape[a];
      }
      local[c] = free_index[node_of(cn)];
    }
    std::fill(Ke.begin(), Ke.end(), 0.0);
    std::fill(Me.begin(), Me.end(), 0.0);
    for (int g = 0; g < gps; ++g) {
      double xi[3], weight = 1.0;
      for (int a = 0; a < d; ++a) {
        xi[a] = ((g >> a) & 1) ? 1.0 - kGaussOffset : kGaussOffset;
        weight *= 0.5 * h[a];
      }
      for (int c = 0; c < corners; ++c) {
        double prod = 1.0;
        for (int a = 0; a < d; ++a) prod *= ((c >> a) & 1) ? xi[a] : 1.0 - xi[a];
        N[c] = prod;
        for (int a = 0; a < d; ++a) {
          double p = (((c >> a) & 1) ? 1.0 : -1.0) / h[a];
          for (int b = 0; b < d; ++b)
            if (b != a) p *= ((c >> b) & 1) ? xi[b] : 1.0 - xi[b];
          dN[c * d + a] = p;
        }
      }
      const double* A = &Acoef[(e * gps + g) * d * d];
      const double w = Wcoef[e * gps + g];
      for (int p = 0; p < corners; ++p)
        for (int q = 0; q < corners; ++q) {
          double s = 0.0;
          for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b) s += dN[p * d + a] * A[a * d + b] * dN[q * d + b];
          Ke[p * corners + q] += weight * s;
          Me[p * corners + q] += weight * w * N[p] * N[q];
        }
    }
    for (int p = 0; p < corners; ++p) {
      if (local[p] < 0) continue;
      for (int q = 0; q < corners; ++q) {
        if (local[q] < 0) continue;
        kt.emplace_back(local[p], local[q], Ke[p * corners + q]);
        mt.emplace_back(local[p], local[q], Me[p * corners + q]);
      }
    }
  }
  const int nf = static_cast<int>(free_nodes.size());
  if (nf == 0) fail(ErrorKind::GridTooCoarse, "no free nodes");
  Assembled out;
  out.shape = shape;
  for (int a = 0; a < d; ++a)
    out.coordinates.emplace_back(grid.axes[a].nodes.begin(), grid.axes[a].nodes.begin() + shape[a]);
  out.free_nodes = std::move(free_nodes);
  SparseMat K(nf, nf), M(nf, nf);
  K.setFromTriplets(kt.begin(), kt.end());
  M.setFromTriplets(mt.begin(), mt.end());
  const SparseMat Kt = K.transpose();
  out.symmetry_defect = (K - Kt).norm() / std::max(K.norm(), 1e-300);
  out.K = 0.5 * (K + Kt);
  out.M = 0.5 * (M + SparseMat(M.transpose()));
  out.K.makeCompressed();
  out.M.makeCompressed();
  return out;
}

void richardson(SpectrumEstimate& est) {
  const std::size_t L = est.levels.size();
  est.lambda0 = est.levels.back().values.front();
  est.extrapolated = est.lambda0;
  est.observed_order = std::numeric_limits<double>::quiet_NaN();
  est.convergence_ratio = std::numeric_limits<double>::quiet_NaN();
  if (L < 3) return;
  const double l1 = est.levels[L - 3].values.front();
  const double l2 = est.levels[L - 2].values.front();
  const double l3 = est.levels[L - 1].values.front();
  const double d1 = l1 - l2, d2 = l2 - l3;
  if (d2 == 0.0) return;
  const double ratio = d1 / d2;
  est.convergence_ratio = ratio;
  if (ratio > 1.0 && std::isfinite(ratio)) {
    est.observed_order = std::log2(ratio);
    est.extrapolated = l3 - d2 / (ratio - 1.0);
  } else {
    est.extrapolated = l3 - d2 / 3.0;
  }
}

namespace {

struct RadialAxisRange {
  double lo, hi;
  AxisBoundary blo, bhi;
};

RadialAxisRange radial_range(const RadialStructure& rad, double T, double compact, int end, bool neumann_outer) {
  const AxisBoundary outer = neumann_outer ? AxisBoundary::Natural : AxisBoundary::Dirichlet;
  if (compact > 0.0) {
    const double a = rad.v_at(end, compact), b = rad.v_at(end, T);
    if (a < b) return {a, b, AxisBoundary::Dirichlet, outer};
    return {b, a, outer, AxisBoundary::Dirichlet};
  }
  if (rad.ends() == 2) return {rad.v_at(1, T), rad.v_at(0, T), outer, outer};
  return {rad.v_reference(), rad.v_at(0, T), AxisBoundary::Natural, outer};
}

std::vector<FramedPoint> frames_at(const ImmersionChart& chart, const std::vector<Vec>& points, int threads) {
  std::vector<FramedPoint> frames(points.size());
  detail::parallel_for(points.size(), threads, [&](std::size_t i) { frames[i] = frame_point(chart, points[i]); });
  return frames;
}

}  // namespace

Assembled assemble_tube(const BaseManifold& base, const TubeSpec& tube, const OracleOptions& options, int level,
                        double compact_radius, int end) {
  const double T = options.truncation > 0.0 ? options.truncation : base.truncation;
  const int scale = 1 << level;
  const int k = base.k();
  const int n = base.n();
  const double r = tube.r;
  if (k != tube.k) fail(ErrorKind::DimensionError, "tube and base codimension disagree");

  if (options.kind == TubeDiscretization::Reduced) {
    if (!base.radial) fail(ErrorKind::DomainError, "reduced discretization needs a rotationally symmetric base");
    const auto& rad = *base.radial;
    const auto range = radial_range(rad, T, compact_radius, std::max(end, 0), options.neumann_outer);
    DiscretizationGrid grid;
    grid.node_cap = options.node_cap;
    grid.axes.push_back(GridAxis::uniform(range.lo, range.hi, options.base_elements * scale, range.blo, range.bhi));
    if (k == 1)
      grid.axes.push_back(GridAxis::uniform(-r, r, options.fiber_elements * scale));
    else
      grid.axes.push_back(
          GridAxis::uniform(0.0, r, options.fiber_elements * scale, AxisBoundary::Natural, AxisBoundary::Dirichlet));
    const std::vector<double> vg = grid.axes[0].gauss_points();
    std::vector<Vec> pts;
    for (double v : vg) pts.push_back(rad.chart_point(v));
    const std::vector<FramedPoint> frames = frames_at(*base.chart, pts, options.threads);
    std::vector<double> shell(vg.size());
    for (std::size_t i = 0; i < vg.size(); ++i) shell[i] = rad.shell_density(vg[i]);
    const SphereRule sphere = sphere_rule(k, 16);

    CoefficientFn coef = [&](const double* x, double* A, double& w) {
      const std::size_t i = nearest(vg, x[0]);
      const FramedPoint& fp = frames[i];
      if (k == 1) {
        const TubeMetric tm = assemble_metric(fp, Vec::Constant(1, x[1]));
        const Mat Gi = metric_inverse(tm);
        w = tm.det_shape * shell[i];
        A[0] = Gi(0, 0) * w;
        A[1] = Gi(0, n) * w;
        A[2] = Gi(n, 0) * w;
        A[3] = Gi(n, n) * w;
        return;
      }
      const double t = x[1];
      double mass = 0.0, avv = 0.0, avt = 0.0, att = 0.0;
      for (std::size_t q = 0; q < sphere.points.size(); ++q) {
        const Vec& eta = sphere.points[q];
        const TubeMetric tm = assemble_metric(fp, Vec(t * eta));
        const Mat Gi = metric_inverse(tm);
        const double dw = sphere.weights[q] * tm.det_shape;
        mass += dw;
        avv += dw * Gi(0, 0);
        avt += dw * Gi.row(0).tail(k).dot(eta);
        att += dw * eta.dot(Gi.bottomRightCorner(k, k) * eta);
      }
      const double radial = shell[i] * std::pow(t, k - 1);
      w = mass * radial;
      A[0] = avv * radial;
      A[1] = A[2] = avt * radial;
      A[3] = att * radial;
    };
    return assemble_laplacian(grid, coef, options.threads);
  }

  // Full discretization over every chart coordinate plus the fiber.
  if (k != 1) fail(ErrorKind::DimensionError, "full discretization is implemented for k = 1");
  if (n + 1 > 3) fail(ErrorKind::DimensionError, "full discretization supports surfaces only");
  const ImmersionChart& chart = *base.chart;
  const ChartBox& box = chart.domain();
  DiscretizationGrid grid;
  grid.node_cap = options.node_cap;
  for (int a = 0; a < n; ++a) {
    const bool periodic = a < static_cast<int>(options.periodic.size())
                              ? options.periodic[a]
                              : (a < static_cast<int>(box.periodic.size()) && box.periodic[a]);
    if (periodic) {
      double lo = box.lo[a], hi = box.hi[a];
      if (!(a < static_cast<int>(box.periodic.size()) && box.periodic[a])) {
        lo = std::max(lo, -T);
        hi = std::min(hi, T);
      }
      GridAxis ax = GridAxis::circle(hi - lo, options.angular_elements * scale);
      for (double& v : ax.nodes) v += lo;
      grid.axes.push_back(ax);
    } else if (a == 0 && base.radial) {
      const auto range = radial_range(*base.radial, T, compact_radius, std::max(end, 0), options.neumann_outer);
      grid.axes.push_back(GridAxis::uniform(range.lo, range.hi, options.base_elements * scale, range.blo, range.bhi));
    } else {
      grid.axes.push_back(
          GridAxis::uniform(std::max(box.lo[a], -T), std::min(box.hi[a], T), options.base_elements * scale));
    }
  }
  grid.axes.push_back(GridAxis::uniform(-r, r, options.fiber_elements * scale));

  std::vector<std::vector<double>> g(n);
  for (int a = 0; a < n; ++a) g[a] = grid.axes[a].gauss_points();
  std::vector<Vec> pts;
  if (n == 1) {
    for (double x0 : g[0]) pts.push_back(Vec::Constant(1, x0));
  } else {
    for (double x0 : g[0])
      for (double x1 : g[1]) pts.push_back(Vec{{x0, x1}});
  }
  const std::vector<FramedPoint> frames = frames_at(chart, pts, options.threads);
  CoefficientFn coef = [&](const double* x, double* A, double& w) {
    std::size_t i = nearest(g[0], x[0]);
    if (n == 2) i = i * g[1].size() + nearest(g[1], x[1]);
    const FramedPoint& fp = frames[i];
    const TubeMetric tm = assemble_metric(fp, Vec::Constant(1, x[n]));
    const Mat Gi = metric_inverse(tm);
    w = tm.det_density;
    for (int a = 0; a <= n; ++a)
      for (int b = 0; b <= n; ++b) A[a * (n + 1) + b] = Gi(a, b) * w;
  };
  return assemble_laplacian(grid, coef, options.threads);
}

namespace {

SpectrumLevel solve_level(const Assembled& asmb, int m, const std::vector<int>& elements) {
  const EigenResult res = lowest_eigenpairs(asmb.K, asmb.M, m);
  SpectrumLevel lvl;
  lvl.elements = elements;
  lvl.values = res.values;
  lvl.residuals = res.residuals;
  const Eigen::VectorXd& v = res.vectors.front();
  const double vmax = v.cwiseAbs().maxCoeff();
  int pos = 0, neg = 0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) <= 1e-10 * vmax) continue;
    (v[i] > 0 ? pos : neg) += 1;
  }
  lvl.sign_change_fraction = static_cast<double>(std::min(pos, neg)) / std::max(1, pos + neg);
  return lvl;
}

}  // namespace

SpectrumEstimate tube_spectrum(const BaseManifold& base, const TubeSpec& tube, const OracleOptions& options) {
  SpectrumEstimate est;
  for (int level = 0; level < options.levels; ++level) {
    const Assembled asmb = assemble_tube(base, tube, options, level);
    const int s = 1 << level;
    est.levels.push_back(solve_level(asmb, options.eigen_count, {options.base_elements * s, options.fiber_elements * s}));
  }
  richardson(est);
  return est;
}

SpectrumEstimate ball_spectrum(int k, int elements, int levels) {
  if (k < 1) fail(ErrorKind::DimensionError, "ball dimension must be at least 1");
  SpectrumEstimate est;
  const double area = sphere_measure(k);
  for (int level = 0; level < levels; ++level) {
    DiscretizationGrid grid;
    grid.axes.push_back(GridAxis::uniform(0.0, 1.0, elements << level, AxisBoundary::Natural, AxisBoundary::Dirichlet));
    CoefficientFn coef = [&](const double* x, double* A, double& w) {
      w = area * std::pow(x[0], k - 1);
      A[0] = w;
    };
    const Assembled asmb = assemble_laplacian(grid, coef, 1);
    est.levels.push_back(solve_level(asmb, 1, {elements << level}));
  }
  richardson(est);
  return est;
}

double exterior_rayleigh_floor(const BaseManifold& base, const TubeSpec& tube, double compact_radius,
                               const OracleOptions& options) {
  if (!base.radial) fail(ErrorKind::DomainError, "exterior floor needs a rotationally symmetric base");
  OracleOptions opt = options;
  opt.kind = TubeDiscretization::Reduced;
  const int level = std::max(0, options.levels - 1);
  double floor = std::numeric_limits<double>::infinity();
  for (int e = 0; e < base.radial->ends(); ++e) {
    const Assembled asmb = assemble_tube(base, tube, opt, level, compact_radius, e);
    floor = std::min(floor, lowest_eigenpairs(asmb.K, asmb.M, 1).values.front());
  }
  return floor;
}

}  // namespace qtube
