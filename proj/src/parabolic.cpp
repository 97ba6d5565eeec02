#include "qtube/parabolic.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Sparse>

#include "qtube/error.hpp"
#include "qtube/manifold.hpp"
#include "qtube/invariants.hpp"
#include "qtube/quadrature.hpp"

namespace qtube {

RadialCapacity::RadialCapacity(RadialPtr radial, double s, double R) : radial_(std::move(radial)), s_(s), R_(R) {
  if (!(R > s)) fail(ErrorKind::NotAnnulus, "capacity potential needs R > s");
  if (!(s > 0.0)) fail(ErrorKind::NonPositive, "inner radius must be positive");
  total_ = tail(s);
}

double RadialCapacity::tail(double tau) const {
  if (tau >= R_) return 0.0;
  // Substitute tau = e^x: the integrand L^{-1} tau is slowly varying.
  auto f = [this](double x) {
    const double t = std::exp(x);
    return t / radial_->shell_measure(t);
  };
  return integrate_adaptive(f, std::log(tau), std::log(R_), 1e-15, 1e-13).value;
}

double RadialCapacity::value(double tau) const {
  if (tau <= s_) return 1.0;
  if (tau >= R_) return 0.0;
  return tail(tau) / total_;
}

double RadialCapacity::derivative(double tau) const {
  if (tau <= s_ || tau >= R_) return 0.0;
  return -1.0 / (radial_->shell_measure(tau) * total_);
}

CapacityPotential capacity_potential(const BaseManifold& base, double s, double R,
                                     const CapacityOptions& options) {
  if (!(R > s)) fail(ErrorKind::NotAnnulus, "capacity potential needs R > s");
  if (base.truncation < R * (1.0 - 1e-12)) fail(ErrorKind::DomainError, "base truncation is below R");
  if (base.radial && !options.force_grid) {
    RadialCapacity cap(base.radial, s, R);
    CapacityPotential out;
    out.s = s;
    out.R = R;
    out.energy = cap.energy();
    for (int i = 0; i <= options.samples; ++i) {
      const double tau = s * std::pow(R / s, static_cast<double>(i) / options.samples);
      out.tau.push_back(tau);
      out.psi.push_back(cap.value(tau));
    }
    out.psi_min = *std::min_element(out.psi.begin(), out.psi.end());
    out.psi_max = *std::max_element(out.psi.begin(), out.psi.end());
    return out;
  }
  if (base.n() != 2) fail(ErrorKind::DimensionError, "grid capacity solve is two-dimensional");
  return grid_capacity(*base.chart, s, R, options.grid_resolution);
}

CapacityPotential grid_capacity(const ImmersionChart& chart, double s, double R, int N) {
  if (!(R > s)) fail(ErrorKind::NotAnnulus, "capacity potential needs R > s");
  if (chart.dim_base() != 2) fail(ErrorKind::DimensionError, "grid capacity solve is two-dimensional");
  const ChartBox& box = chart.domain();
  for (int d = 0; d < 2; ++d)
    if (box.lo[d] > -R || box.hi[d] < R) fail(ErrorKind::DomainError, "chart does not contain the ball B(R)");
  const double L = R;
  const double h = 2.0 * L / N;
  const int M = N + 1;
  auto id = [M](int i, int j) { return i * M + j; };
  auto coord = [&](int i) { return -L + i * h; };

  std::vector<double> dist(M * M), value(M * M, 0.0);
  std::vector<char> fixed(M * M, 0);
  for (int i = 0; i < M; ++i)
    for (int j = 0; j < M; ++j) {
      const double d = std::hypot(coord(i), coord(j));
      dist[id(i, j)] = d;
      if (d <= s) {
        fixed[id(i, j)] = 1;
        value[id(i, j)] = 1.0;
      } else if (d >= R) {
        fixed[id(i, j)] = 1;
      }
    }

  // Coefficient matrix A = sqrt(g) g^{-1} at a chart point.
  auto coefficient = [&](double x, double y) {
    const Mat J = chart.jacobian(Vec{{x, y}});
    const Mat g = J * J.transpose();
    return Mat(std::sqrt(g.determinant()) * g.inverse());
  };

  using Triplet = Eigen::Triplet<double>;
  std::vector<Triplet> triplets;
  triplets.reserve(static_cast<std::size_t>(M) * M * 13);
  auto add_pair = [&](int a, int b, double c) {
    triplets.emplace_back(a, a, c);
    triplets.emplace_back(b, b, c);
    triplets.emplace_back(a, b, -c);
    triplets.emplace_back(b, a, -c);
  };
  // Edge conductances. An edge crossing a boundary circle is shortened to the
  // crossing point: its conductance becomes c / theta, theta the fraction of
  // the edge between the free node and the circle.
  for (int dir = 0; dir < 2; ++dir)
    for (int i = 0; i + (dir == 0) < M; ++i)
      for (int j = 0; j + (dir == 1) < M; ++j) {
        const int a = id(i, j);
        const int b = dir == 0 ? id(i + 1, j) : id(i, j + 1);
        if (fixed[a] && fixed[b]) continue;
        const double xm = coord(i) + (dir == 0 ? 0.5 * h : 0.0);
        const double ym = coord(j) + (dir == 1 ? 0.5 * h : 0.0);
        double c = coefficient(xm, ym)(dir, dir);
        for (double bound : {s, R}) {
          const double da = dist[a] - bound, db = dist[b] - bound;
          if (da * db < 0.0) {
            const double theta = std::abs(fixed[a] ? db : da) / std::abs(da - db);
            c /= std::max(theta, 1e-3);
          }
        }
        add_pair(a, b, c);
      }
  // Off-diagonal metric: 2 A01 dx psi dy psi over each cell, differences
  // averaged over the cell's edges.
  for (int i = 0; i + 1 < M; ++i)
    for (int j = 0; j + 1 < M; ++j) {
      const double a01 = coefficient(coord(i) + 0.5 * h, coord(j) + 0.5 * h)(0, 1);
      if (std::abs(a01) < 1e-15) continue;
      const int n00 = id(i, j), n10 = id(i + 1, j), n01 = id(i, j + 1), n11 = id(i + 1, j + 1);
      // dx = (-n00 + n10 - n01 + n11)/2h, dy = (-n00 - n10 + n01 + n11)/2h
      const int nodes[4] = {n00, n10, n01, n11};
      const double gx[4] = {-0.5, 0.5, -0.5, 0.5};
      const double gy[4] = {-0.5, -0.5, 0.5, 0.5};
      for (int p = 0; p < 4; ++p)
        for (int q = 0; q < 4; ++q)
          triplets.emplace_back(nodes[p], nodes[q], a01 * (gx[p] * gy[q] + gy[p] * gx[q]));
    }
  Eigen::SparseMatrix<double> K(M * M, M * M);
  K.setFromTriplets(triplets.begin(), triplets.end());

  std::vector<int> free_index(M * M, -1);
  int nfree = 0;
  for (int a = 0; a < M * M; ++a)
    if (!fixed[a]) free_index[a] = nfree++;
  std::vector<Triplet> ff;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nfree);
  for (int col = 0; col < K.outerSize(); ++col)
    for (Eigen::SparseMatrix<double>::InnerIterator it(K, col); it; ++it) {
      const int r = static_cast<int>(it.row()), c = static_cast<int>(it.col());
      if (free_index[r] < 0) continue;
      if (free_index[c] >= 0) ff.emplace_back(free_index[r], free_index[c], it.value());
      else rhs[free_index[r]] -= it.value() * value[c];
    }
  Eigen::SparseMatrix<double> Kff(nfree, nfree);
  Kff.setFromTriplets(ff.begin(), ff.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(Kff);
  if (solver.info() != Eigen::Success) fail(ErrorKind::Singular, "capacity system factorization failed");
  const Eigen::VectorXd sol = solver.solve(rhs);
  for (int a = 0; a < M * M; ++a)
    if (free_index[a] >= 0) value[a] = sol[free_index[a]];

  Eigen::Map<const Eigen::VectorXd> psi(value.data(), M * M);
  CapacityPotential out;
  out.s = s;
  out.R = R;
  out.grid = true;
  out.resolution = M;
  out.grid_half_width = L;
  out.energy = psi.dot(K * psi);
  out.psi = value;
  out.psi_min = psi.minCoeff();
  out.psi_max = psi.maxCoeff();
  return out;
}

std::string to_string(GrowthVerdict v) {
  return v == GrowthVerdict::ParabolicConsistent ? "PARABOLIC-CONSISTENT" : "INCONCLUSIVE";
}

double ball_volume(const BaseManifold& base, double t) {
  if (base.radial) {
    const auto& rad = *base.radial;
    double total = 0.0;
    for (int e = 0; e < rad.ends(); ++e)
      total += integrate_adaptive([&](double tau) { return rad.shell_measure(e, tau); }, 0.0, t, 1e-14, 1e-12)
                   .value;
    return total;
  }
  // Chart-distance ball: polar quadrature of sqrt(det g) (two-dimensional charts).
  if (base.n() != 2) fail(ErrorKind::DimensionError, "chart-ball volume is implemented for surfaces");
  const QuadratureRule radial = composite_gauss_legendre(8, 16, 0.0, t);
  const int na = 128;
  double total = 0.0;
  for (std::size_t q = 0; q < radial.nodes.size(); ++q)
    for (int a = 0; a < na; ++a) {
      const double th = 2.0 * std::numbers::pi * (a + 0.5) / na;
      const double rr = radial.nodes[q];
      const Mat J = base.chart->jacobian(Vec{{rr * std::cos(th), rr * std::sin(th)}});
      total += radial.weights[q] * rr * (2.0 * std::numbers::pi / na) * std::sqrt((J * J.transpose()).determinant());
    }
  return total;
}

VolumeGrowth volume_growth_test(const BaseManifold& base, const std::vector<double>& r_grid) {
  if (r_grid.size() < 2) fail(ErrorKind::DomainError, "volume growth needs at least two radii");
  VolumeGrowth out;
  out.radius = r_grid;
  for (std::size_t i = 0; i < r_grid.size(); ++i) {
    if (i > 0 && !(r_grid[i] > r_grid[i - 1])) fail(ErrorKind::DomainError, "radius grid must increase");
    out.volume.push_back(ball_volume(base, r_grid[i]));
  }
  // Least-squares slope of log V against log t over the outer half.
  const std::size_t first = r_grid.size() / 2 == r_grid.size() - 1 ? 0 : r_grid.size() / 2;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (std::size_t i = first; i < r_grid.size(); ++i) {
    const double x = std::log(r_grid[i]), y = std::log(out.volume[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  out.alpha = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  out.coefficient = std::exp((sy - out.alpha * sx) / m);
  for (std::size_t i = 1; i < r_grid.size(); ++i)
    out.partial_integral += r_grid[i] * (r_grid[i] - r_grid[i - 1]) / out.volume[i];
  out.verdict = out.alpha <= 2.0 + 0.05 ? GrowthVerdict::ParabolicConsistent : GrowthVerdict::Inconclusive;
  return out;
}

double total_curvature(const BaseManifold& base, double tau) {
  if (base.n() != 2) fail(ErrorKind::DimensionError, "total curvature is defined for surfaces");
  // Gauss curvature from the Gauss equation: sectional curvature of the coordinate plane.
  return base_integral(
      base,
      [](const FramedPoint& fp) { return sectional_curvature(curvature_operator(fp), fp.g, 0, 1); },
      tau, 1e-11);
}

double gauss_bonnet_defect(const BaseManifold& base, double tau) {
  if (!base.profile || !base.radial) fail(ErrorKind::DomainError, "Gauss-Bonnet check needs a surface of revolution");
  const auto& prof = *base.profile;
  const auto& rad = *base.radial;
  double boundary = 0.0;
  for (int e = 0; e < rad.ends(); ++e) {
    const double v = rad.v_at(e, tau);
    const double sign = e == 0 ? 1.0 : -1.0;
    boundary += sign * 2.0 * std::numbers::pi * prof.da(v) / prof.speed(v);
  }
  return total_curvature(base, tau) + boundary - 2.0 * std::numbers::pi * base.euler_characteristic;
}

EndProfile end_profile(const BaseManifold& base, int levels) {
  if (base.n() != 2) fail(ErrorKind::DimensionError, "end profile is defined for surfaces");
  if (!base.radial) fail(ErrorKind::DomainError, "end profile needs declared ends (rotational families)");
  const auto& rad = *base.radial;
  EndProfile out;
  out.euler = base.euler_characteristic;
  const double top = base.truncation;
  for (int j = 0; j < levels; ++j) out.radius.push_back(top * std::pow(0.5, levels - 1 - j));
  out.area.assign(rad.ends(), {});
  for (int e = 0; e < rad.ends(); ++e) {
    double acc = 0.0, prev = 0.0;
    for (double r : out.radius) {
      acc += integrate_adaptive([&](double t) { return rad.shell_measure(e, t); }, prev, r, 1e-14, 1e-12).value;
      prev = r;
      out.area[e].push_back(acc);
    }
    // Richardson on q_j = A(r_j)/(pi r_j^2) with the observed geometric rate.
    std::vector<double> q;
    for (std::size_t j = 0; j < out.radius.size(); ++j)
      q.push_back(out.area[e][j] / (std::numbers::pi * out.radius[j] * out.radius[j]));
    auto extrapolate = [&](std::size_t j) {
      const double d1 = q[j - 1] - q[j - 2], d2 = q[j] - q[j - 1];
      if (std::abs(d2) < 1e-15 || std::abs(d1) < 1e-15) return q[j];
      const double ratio = d1 / d2;
      if (ratio <= 1.0) return q[j];
      return q[j] + d2 / (ratio - 1.0);
    };
    const std::size_t last = q.size() - 1;
    const double est = extrapolate(last);
    const double prev_est = extrapolate(last - 1);
    if (std::abs(est - prev_est) > 1e-2)
      fail(ErrorKind::ExtrapolationUnstable, "area-ratio extrapolation did not settle");
    out.lambda.push_back(est);
  }
  out.total_curvature = total_curvature(base, top);
  double sum = 0.0;
  for (double l : out.lambda) sum += l;
  out.condition = out.euler - sum;
  out.condition_holds = out.condition <= 1e-2;
  out.cohn_vossen = out.total_curvature / (2.0 * std::numbers::pi);
  return out;
}

}  // namespace qtube
