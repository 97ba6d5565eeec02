#include "qtube/families.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/tools/roots.hpp>

#include "qtube/error.hpp"
#include "qtube/quadrature.hpp"

namespace qtube {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

ChartBox make_box(std::vector<double> lo, std::vector<double> hi, std::vector<bool> periodic) {
  ChartBox box;
  box.lo = Eigen::Map<Vec>(lo.data(), static_cast<Eigen::Index>(lo.size()));
  box.hi = Eigen::Map<Vec>(hi.data(), static_cast<Eigen::Index>(hi.size()));
  box.periodic = std::move(periodic);
  return box;
}

// log(cosh(x)) without overflow.
double log_cosh(double x) {
  const double ax = std::abs(x);
  return ax + std::log1p(std::exp(-2.0 * ax)) - std::numbers::ln2;
}

}  // namespace

double RevolutionProfile::speed(double v) const { return std::hypot(da(v), db(v)); }

double RevolutionProfile::meridian_curvature(double v) const {
  const double l = speed(v);
  return (dda(v) * db(v) - ddb(v) * da(v)) / (l * l * l);
}

double RevolutionProfile::parallel_curvature(double v) const { return -db(v) / (a(v) * speed(v)); }

double RevolutionProfile::arclength(double v) const {
  const double ref = v_reference();
  if (v == ref) return 0.0;
  const auto result = integrate_adaptive([this](double x) { return speed(x); }, std::min(v, ref),
                                         std::max(v, ref), 1e-14, 1e-13);
  return v > ref ? result.value : -result.value;
}

double RevolutionProfile::arclength_inverse(double s) const {
  // Newton on arclength(v) = s from a bracket grown outward from the reference.
  const double ref = v_reference();
  double lo = ref, hi = ref;
  double step = std::max(1.0, std::abs(s));
  if (s > 0.0) {
    while (arclength(hi) < s) {
      lo = hi;
      hi += step;
      step *= 2.0;
    }
  } else if (s < 0.0) {
    while (arclength(lo) > s) {
      hi = lo;
      lo -= step;
      step *= 2.0;
    }
  } else {
    return ref;
  }
  double v = 0.5 * (lo + hi);
  for (int it = 0; it < 100; ++it) {
    const double f = arclength(v) - s;
    if (f > 0.0) hi = v; else lo = v;
    double next = v - f / speed(v);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - v) <= 1e-14 * (1.0 + std::abs(v))) return next;
    v = next;
  }
  return v;
}

CatenoidProfile::CatenoidProfile(double c) : c_(c) {
  if (!(c > 0.0)) fail(ErrorKind::NonPositive, "catenoid waist radius must be positive");
}

CylinderProfile::CylinderProfile(double radius) : radius_(radius) {
  if (!(radius > 0.0)) fail(ErrorKind::NonPositive, "cylinder radius must be positive");
}

SphereProfile::SphereProfile(double radius) : radius_(radius) {
  if (!(radius > 0.0)) fail(ErrorKind::NonPositive, "sphere radius must be positive");
}

GraphProfile::GraphProfile(std::string name, Fn f, Fn df, Fn ddf)
    : name_(std::move(name)), f_(std::move(f)), df_(std::move(df)), ddf_(std::move(ddf)) {}

std::shared_ptr<GraphProfile> GraphProfile::polynomial(std::vector<double> coeffs) {
  // Horner on sum_{i>=d} i!/(i-d)! c_i x^{i-d}
  auto eval = [coeffs](double x, int derivative) {
    double sum = 0.0;
    for (std::size_t i = coeffs.size(); i-- > static_cast<std::size_t>(derivative);) {
      double factor = 1.0;
      for (int d = 0; d < derivative; ++d) factor *= static_cast<double>(i - d);
      sum = sum * x + factor * coeffs[i];
    }
    return sum;
  };
  auto f = [eval](double x) { return eval(x, 0); };
  auto df = [eval](double x) { return eval(x, 1); };
  auto ddf = [eval](double x) { return eval(x, 2); };
  return std::make_shared<GraphProfile>("revolution", f, df, ddf);
}

// ---------------------------------------------------------------------------

TurningProfile::TurningProfile(std::string name, std::vector<Box> boxes, double smoothing,
                               double table_end)
    : name_(std::move(name)), boxes_(std::move(boxes)), smoothing_(smoothing) {
  if (!(smoothing > 0.0)) fail(ErrorKind::NonPositive, "turning profile smoothing must be positive");
  if (boxes_.empty()) fail(ErrorKind::DomainError, "turning profile needs at least one box");
  angle_at_zero_ = raw_angle(0.0);
  double last = 0.0;
  for (const auto& b : boxes_) last = std::max(last, b.s1);
  end_ = std::max(table_end, last + 40.0 * smoothing_);
  const int intervals = std::max(2000, static_cast<int>(std::ceil(end_ / 5e-4)));
  step_ = end_ / intervals;
  a_table_.assign(intervals + 1, 0.0);
  b_table_.assign(intervals + 1, 0.0);
  da_table_.assign(intervals + 1, 0.0);
  db_table_.assign(intervals + 1, 0.0);
  const QuadratureRule gl = gauss_legendre(6);
  for (int i = 0; i <= intervals; ++i) {
    const double s = i * step_;
    da_table_[i] = std::cos(angle(s));
    db_table_[i] = std::sin(angle(s));
    if (i == 0) continue;
    double ca = 0.0, cb = 0.0;
    for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
      const double x = s - step_ + 0.5 * step_ * (gl.nodes[q] + 1.0);
      ca += gl.weights[q] * std::cos(angle(x));
      cb += gl.weights[q] * std::sin(angle(x));
    }
    a_table_[i] = a_table_[i - 1] + 0.5 * step_ * ca;
    b_table_[i] = b_table_[i - 1] + 0.5 * step_ * cb;
  }
}

double TurningProfile::raw_angle(double s) const {
  double th = 0.0;
  for (const auto& b : boxes_)
    th += 0.5 * b.amplitude * smoothing_ *
          (log_cosh((s - b.s0) / smoothing_) - log_cosh((s - b.s1) / smoothing_));
  return th;
}

double TurningProfile::angle(double s) const { return raw_angle(s) - angle_at_zero_; }

double TurningProfile::turning_rate(double s) const {
  double rate = 0.0;
  for (const auto& b : boxes_)
    rate += 0.5 * b.amplitude *
            (std::tanh((s - b.s0) / smoothing_) - std::tanh((s - b.s1) / smoothing_));
  return rate;
}

double TurningProfile::limit_angle() const {
  double th = 0.0;
  for (const auto& b : boxes_) th += 0.5 * b.amplitude * (b.s1 - b.s0);
  return th - angle_at_zero_;
}

double TurningProfile::interpolate(const std::vector<double>& f, const std::vector<double>& df,
                                   double s) const {
  const int last = static_cast<int>(f.size()) - 1;
  if (s >= end_) return f[last] + (s - end_) * df[last];
  const double pos = std::max(s, 0.0) / step_;
  const int i = std::min(static_cast<int>(pos), last - 1);
  const double t = pos - i;
  const double h00 = (1 + 2 * t) * (1 - t) * (1 - t);
  const double h10 = t * (1 - t) * (1 - t);
  const double h01 = t * t * (3 - 2 * t);
  const double h11 = t * t * (t - 1);
  return h00 * f[i] + h10 * step_ * df[i] + h01 * f[i + 1] + h11 * step_ * df[i + 1];
}

double TurningProfile::a(double v) const { return interpolate(a_table_, da_table_, v); }

double TurningProfile::b(double v) const { return interpolate(b_table_, db_table_, v); }

std::shared_ptr<TurningProfile> TurningProfile::with_limit_angle(std::string name, std::vector<Box> boxes,
                                                                 double smoothing, double target) {
  if (boxes.empty()) fail(ErrorKind::DomainError, "turning profile needs at least one box");
  // Only the limiting angle matters here, so probe without building tables.
  auto limit_for = [&](double amplitude) {
    std::vector<Box> trial = boxes;
    trial.back().amplitude = amplitude;
    double th = 0.0, at_zero = 0.0;
    for (const auto& b : trial) {
      th += 0.5 * b.amplitude * (b.s1 - b.s0);
      at_zero += 0.5 * b.amplitude * smoothing *
                 (log_cosh(-b.s0 / smoothing) - log_cosh(-b.s1 / smoothing));
    }
    return th - at_zero - target;
  };
  double lo = -1.0, hi = 1.0;
  while (limit_for(lo) * limit_for(hi) > 0.0) {
    lo *= 2.0;
    hi *= 2.0;
    if (hi > 1e6) fail(ErrorKind::NoConvergence, "cannot bracket turning amplitude");
  }
  boost::uintmax_t iterations = 200;
  const auto root = boost::math::tools::toms748_solve(
      limit_for, lo, hi, boost::math::tools::eps_tolerance<double>(52), iterations);
  boxes.back().amplitude = 0.5 * (root.first + root.second);
  return std::make_shared<TurningProfile>(std::move(name), std::move(boxes), smoothing);
}

std::shared_ptr<TurningProfile> TurningProfile::finger(double w, double len, double c, double smoothing) {
  if (!(w > 0.0 && len >= 0.0 && c > 0.0)) fail(ErrorKind::NonPositive, "finger parameters must be positive");
  const double s1 = 0.5 * std::numbers::pi * w;
  const double s2 = s1 + len;
  const double s3 = s2 + 0.5 * std::numbers::pi * c;
  std::vector<Box> boxes{{-s1, s1, -1.0 / w}, {s2, s3, 1.0 / c}};
  return with_limit_angle("finger", std::move(boxes), smoothing, 0.0);
}

std::shared_ptr<TurningProfile> TurningProfile::cone(double alpha, double cap_length, double smoothing) {
  if (!(alpha > 0.0 && alpha < 0.5 * std::numbers::pi))
    fail(ErrorKind::DomainError, "cone turning angle must lie in (0, pi/2)");
  if (!(cap_length > 0.0)) fail(ErrorKind::NonPositive, "cone cap length must be positive");
  std::vector<Box> boxes{{-cap_length, cap_length, -alpha / cap_length}};
  return with_limit_angle("cone", std::move(boxes), smoothing, -alpha);
}

// ---------------------------------------------------------------------------

SurfaceOfRevolution::SurfaceOfRevolution(ProfilePtr profile, double v_lo, double v_hi)
    : profile_(std::move(profile)) {
  set_domain(make_box({v_lo, 0.0}, {v_hi, kTwoPi}, {false, true}));
}

Vec SurfaceOfRevolution::position(const Vec& x) const {
  const double a = profile_->a(x[0]);
  return Vec{{a * std::cos(x[1]), a * std::sin(x[1]), profile_->b(x[0])}};
}

Mat SurfaceOfRevolution::jacobian(const Vec& x) const {
  const double c = std::cos(x[1]), s = std::sin(x[1]);
  const double a = profile_->a(x[0]), da = profile_->da(x[0]);
  Mat J(2, 3);
  J << da * c, da * s, profile_->db(x[0]), -a * s, a * c, 0.0;
  return J;
}

Hessian SurfaceOfRevolution::hessian(const Vec& x) const {
  const double c = std::cos(x[1]), s = std::sin(x[1]);
  const double v = x[0];
  const double a = profile_->a(v), da = profile_->da(v), dda = profile_->dda(v);
  Hessian H(2, 3);
  H(0, 0) = Vec{{dda * c, dda * s, profile_->ddb(v)}};
  H(0, 1) = Vec{{-da * s, da * c, 0.0}};
  H(1, 0) = H(0, 1);
  H(1, 1) = Vec{{-a * c, -a * s, 0.0}};
  return H;
}

std::optional<Mat> SurfaceOfRevolution::normal_seed(const Vec& x) const {
  const double c = std::cos(x[1]), s = std::sin(x[1]);
  const double da = profile_->da(x[0]), db = profile_->db(x[0]);
  Mat seed(3, 1);
  seed << db * c, db * s, -da;
  return seed;
}

// ---------------------------------------------------------------------------

FlatPlane::FlatPlane(int n, int k, double half_width) : n_(n), k_(k) {
  if (n < 2 || k < 1) fail(ErrorKind::DimensionError, "plane needs n >= 2 and k >= 1");
  set_domain(make_box(std::vector<double>(n, -half_width), std::vector<double>(n, half_width),
                      std::vector<bool>(n, false)));
}

Vec FlatPlane::position(const Vec& x) const {
  Vec p = Vec::Zero(n_ + k_);
  p.head(n_) = x;
  return p;
}

Mat FlatPlane::jacobian(const Vec&) const {
  Mat J = Mat::Zero(n_, n_ + k_);
  J.leftCols(n_).setIdentity();
  return J;
}

Hessian FlatPlane::hessian(const Vec&) const { return Hessian(n_, n_ + k_); }

// ---------------------------------------------------------------------------

GraphImmersion::GraphImmersion(int n, int k, std::vector<Bump> bumps, double half_width)
    : n_(n), k_(k), bumps_(std::move(bumps)) {
  if (n < 2 || k < 1) fail(ErrorKind::DimensionError, "graph immersion needs n >= 2 and k >= 1");
  set_domain(make_box(std::vector<double>(n, -half_width), std::vector<double>(n, half_width),
                      std::vector<bool>(n, false)));
}

std::shared_ptr<GraphImmersion> GraphImmersion::random(int n, int k, std::uint64_t seed, int bump_count,
                                                       double amplitude, double half_width) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> centre(-0.6 * half_width, 0.6 * half_width);
  std::uniform_real_distribution<double> width(0.6, 1.4);
  std::uniform_real_distribution<double> amp(-amplitude, amplitude);
  std::vector<Bump> bumps;
  for (int b = 0; b < bump_count; ++b) {
    Bump bump;
    bump.center = Vec(n);
    for (int i = 0; i < n; ++i) bump.center[i] = centre(rng);
    bump.width = width(rng);
    bump.amplitude = Vec(k);
    for (int a = 0; a < k; ++a) bump.amplitude[a] = amp(rng);
    bumps.push_back(std::move(bump));
  }
  return std::make_shared<GraphImmersion>(n, k, std::move(bumps), half_width);
}

Vec GraphImmersion::position(const Vec& x) const {
  Vec p = Vec::Zero(n_ + k_);
  p.head(n_) = x;
  for (const auto& b : bumps_) {
    const double e = std::exp(-(x - b.center).squaredNorm() / (2.0 * b.width * b.width));
    p.tail(k_) += e * b.amplitude;
  }
  return p;
}

Mat GraphImmersion::jacobian(const Vec& x) const {
  Mat J = Mat::Zero(n_, n_ + k_);
  J.leftCols(n_).setIdentity();
  for (const auto& b : bumps_) {
    const double w2 = b.width * b.width;
    const Vec d = x - b.center;
    const double e = std::exp(-d.squaredNorm() / (2.0 * w2));
    for (int i = 0; i < n_; ++i) J.row(i).tail(k_) += (-d[i] / w2 * e) * b.amplitude.transpose();
  }
  return J;
}

Hessian GraphImmersion::hessian(const Vec& x) const {
  Hessian H(n_, n_ + k_);
  for (const auto& b : bumps_) {
    const double w2 = b.width * b.width;
    const Vec d = x - b.center;
    const double e = std::exp(-d.squaredNorm() / (2.0 * w2));
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) {
        const double f = (d[i] * d[j] / (w2 * w2) - (i == j ? 1.0 / w2 : 0.0)) * e;
        H(i, j).tail(k_) += f * b.amplitude;
      }
  }
  return H;
}

// ---------------------------------------------------------------------------

Suspension::Suspension(ChartPtr inner, int extra, Mat rotation)
    : inner_(std::move(inner)), extra_(extra), rotation_(std::move(rotation)) {
  if (extra < 0) fail(ErrorKind::DimensionError, "negative padding");
  const int m = inner_->dim_ambient() + extra_;
  if (rotation_.size() == 0) rotation_ = Mat::Identity(m, m);
  if (rotation_.rows() != m || rotation_.cols() != m)
    fail(ErrorKind::DimensionError, "suspension rotation has the wrong size");
  if ((rotation_.transpose() * rotation_ - Mat::Identity(m, m)).norm() > 1e-12)
    fail(ErrorKind::DomainError, "suspension rotation is not orthogonal");
  set_domain(inner_->domain());
}

Vec Suspension::position(const Vec& x) const {
  Vec p = Vec::Zero(dim_ambient());
  p.head(inner_->dim_ambient()) = inner_->position(x);
  return rotation_ * p;
}

Mat Suspension::jacobian(const Vec& x) const {
  Mat J = Mat::Zero(dim_base(), dim_ambient());
  J.leftCols(inner_->dim_ambient()) = inner_->jacobian(x);
  return J * rotation_.transpose();
}

Hessian Suspension::hessian(const Vec& x) const {
  const Hessian inner = inner_->hessian(x);
  Hessian H(dim_base(), dim_ambient());
  for (int i = 0; i < dim_base(); ++i)
    for (int j = 0; j < dim_base(); ++j) {
      Vec p = Vec::Zero(dim_ambient());
      p.head(inner_->dim_ambient()) = inner(i, j);
      H(i, j) = rotation_ * p;
    }
  return H;
}

std::optional<Mat> Suspension::normal_seed(const Vec& x) const {
  const int m0 = inner_->dim_ambient();
  const auto inner = inner_->normal_seed(x);
  const int cols = (inner ? static_cast<int>(inner->cols()) : 0) + extra_;
  Mat seed = Mat::Zero(dim_ambient(), cols);
  int c = 0;
  if (inner) {
    seed.block(0, 0, m0, inner->cols()) = *inner;
    c = static_cast<int>(inner->cols());
  }
  for (int e = 0; e < extra_; ++e) seed(m0 + e, c + e) = 1.0;
  return rotation_ * seed;
}

ChartPtr lift_to_codim(ChartPtr chart, int k, const Mat& rotation) {
  const int extra = k - chart->codim();
  if (extra < 0) fail(ErrorKind::DimensionError, "cannot lower the codimension of a chart");
  if (extra == 0 && rotation.size() == 0) return chart;
  return std::make_shared<Suspension>(std::move(chart), extra, rotation);
}

}  // namespace qtube
