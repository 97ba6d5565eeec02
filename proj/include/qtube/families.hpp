#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "qtube/chart.hpp"

namespace qtube {

/// Meridian (a(v), b(v)) of a surface of revolution (a cos th, a sin th, b).
class RevolutionProfile {
 public:
  virtual ~RevolutionProfile() = default;
  virtual double a(double v) const = 0;
  virtual double da(double v) const = 0;
  virtual double dda(double v) const = 0;
  virtual double b(double v) const = 0;
  virtual double db(double v) const = 0;
  virtual double ddb(double v) const = 0;

  /// Lower end of the parameter range. With meets_axis() the meridian
  /// starts on the rotation axis there (a = 0); otherwise the surface is
  /// two-ended and v runs over the whole line.
  virtual double v_lower() const { return -std::numeric_limits<double>::infinity(); }
  virtual bool meets_axis() const { return false; }
  /// Parameter of the reference parallel that geodesic radii are measured from.
  virtual double v_reference() const { return meets_axis() ? v_lower() : 0.0; }
  virtual std::string name() const = 0;

  /// Signed meridian arclength from the reference parallel, and its inverse.
  /// The defaults integrate the speed numerically.
  virtual double arclength(double v) const;
  virtual double arclength_inverse(double s) const;

  double speed(double v) const;
  /// Principal curvature along the meridian, for the outward normal.
  double meridian_curvature(double v) const;
  /// Principal curvature along the parallel, for the outward normal.
  double parallel_curvature(double v) const;
  double gauss_curvature(double v) const { return meridian_curvature(v) * parallel_curvature(v); }
};

using ProfilePtr = std::shared_ptr<const RevolutionProfile>;

class CatenoidProfile final : public RevolutionProfile {
 public:
  explicit CatenoidProfile(double c = 1.0);
  double a(double v) const override { return c_ * std::cosh(v / c_); }
  double da(double v) const override { return std::sinh(v / c_); }
  double dda(double v) const override { return std::cosh(v / c_) / c_; }
  double b(double v) const override { return v; }
  double db(double) const override { return 1.0; }
  double ddb(double) const override { return 0.0; }
  std::string name() const override { return "catenoid"; }
  double arclength(double v) const override { return c_ * std::sinh(v / c_); }
  double arclength_inverse(double s) const override { return c_ * std::asinh(s / c_); }

 private:
  double c_;
};

class CylinderProfile final : public RevolutionProfile {
 public:
  explicit CylinderProfile(double radius = 1.0);
  double a(double) const override { return radius_; }
  double da(double) const override { return 0.0; }
  double dda(double) const override { return 0.0; }
  double b(double v) const override { return v; }
  double db(double) const override { return 1.0; }
  double ddb(double) const override { return 0.0; }
  std::string name() const override { return "cylinder"; }
  double arclength(double v) const override { return v; }
  double arclength_inverse(double s) const override { return s; }

 private:
  double radius_;
};

/// Round sphere of radius R, v = arclength from the south pole.
class SphereProfile final : public RevolutionProfile {
 public:
  explicit SphereProfile(double radius = 1.0);
  double a(double v) const override { return radius_ * std::sin(v / radius_); }
  double da(double v) const override { return std::cos(v / radius_); }
  double dda(double v) const override { return -std::sin(v / radius_) / radius_; }
  double b(double v) const override { return -radius_ * std::cos(v / radius_); }
  double db(double v) const override { return std::sin(v / radius_); }
  double ddb(double v) const override { return std::cos(v / radius_) / radius_; }
  double v_lower() const override { return 0.0; }
  bool meets_axis() const override { return true; }
  std::string name() const override { return "sphere"; }
  double arclength(double v) const override { return v; }
  double arclength_inverse(double s) const override { return s; }

 private:
  double radius_;
};

/// Graph of revolution z = f(rho), parametrized by rho = v >= 0.
class GraphProfile final : public RevolutionProfile {
 public:
  using Fn = std::function<double(double)>;
  GraphProfile(std::string name, Fn f, Fn df, Fn ddf);
  /// z = sum_i c_i rho^i
  static std::shared_ptr<GraphProfile> polynomial(std::vector<double> coeffs);

  double a(double v) const override { return v; }
  double da(double) const override { return 1.0; }
  double dda(double) const override { return 0.0; }
  double b(double v) const override { return f_(v); }
  double db(double v) const override { return df_(v); }
  double ddb(double v) const override { return ddf_(v); }
  double v_lower() const override { return 0.0; }
  bool meets_axis() const override { return true; }
  std::string name() const override { return name_; }

 private:
  std::string name_;
  Fn f_, df_, ddf_;
};

/// Arclength-parametrized meridian leaving the axis horizontally, with
/// turning angle th(s) built from smoothed boxes:
///   th'(s) = sum_i A_i * (tanh((s - s0_i)/d) - tanh((s - s1_i)/d)) / 2.
/// a' = cos th, b' = sin th. Beyond the tabulated range the meridian is
/// extended along its final direction.
class TurningProfile final : public RevolutionProfile {
 public:
  struct Box {
    double s0;
    double s1;
    double amplitude;
  };

  TurningProfile(std::string name, std::vector<Box> boxes, double smoothing, double table_end = 0.0);

  /// Replaces the last box amplitude so that the limiting angle equals target.
  static std::shared_ptr<TurningProfile> with_limit_angle(std::string name, std::vector<Box> boxes,
                                                          double smoothing, double target);
  /// Round-tipped finger: a cap of radius w turning the meridian straight
  /// down, a straight cylindrical segment of length len, then a flare of
  /// radius about c turning it back to horizontal. Total curvature zero.
  static std::shared_ptr<TurningProfile> finger(double w, double len, double c, double smoothing);
  /// Cap that turns the meridian by alpha and then runs straight: a
  /// positively curved surface asymptotic to a cone.
  static std::shared_ptr<TurningProfile> cone(double alpha, double cap_length, double smoothing);

  double a(double v) const override;
  double da(double v) const override { return std::cos(angle(v)); }
  double dda(double v) const override { return -std::sin(angle(v)) * turning_rate(v); }
  double b(double v) const override;
  double db(double v) const override { return std::sin(angle(v)); }
  double ddb(double v) const override { return std::cos(angle(v)) * turning_rate(v); }
  double v_lower() const override { return 0.0; }
  bool meets_axis() const override { return true; }
  std::string name() const override { return name_; }
  double arclength(double v) const override { return v; }
  double arclength_inverse(double s) const override { return s; }

  double angle(double s) const;
  double turning_rate(double s) const;
  double limit_angle() const;
  const std::vector<Box>& boxes() const { return boxes_; }

 private:
  double raw_angle(double s) const;
  double interpolate(const std::vector<double>& f, const std::vector<double>& df, double s) const;

  std::string name_;
  std::vector<Box> boxes_;
  double smoothing_;
  double angle_at_zero_ = 0.0;
  double step_ = 0.0;
  double end_ = 0.0;
  std::vector<double> a_table_, b_table_, da_table_, db_table_;
};

/// (v, th) chart of a surface of revolution in R^3, th periodic.
class SurfaceOfRevolution final : public ImmersionChart {
 public:
  SurfaceOfRevolution(ProfilePtr profile, double v_lo, double v_hi);

  int dim_base() const override { return 2; }
  int dim_ambient() const override { return 3; }
  Vec position(const Vec& x) const override;
  Mat jacobian(const Vec& x) const override;
  Hessian hessian(const Vec& x) const override;
  bool has_analytic_derivatives() const override { return true; }
  std::optional<Mat> normal_seed(const Vec& x) const override;
  std::string name() const override { return profile_->name(); }
  const RevolutionProfile& profile() const { return *profile_; }

 private:
  ProfilePtr profile_;
};

/// x -> (x, 0) in R^{n+k}.
class FlatPlane final : public ImmersionChart {
 public:
  FlatPlane(int n, int k, double half_width);

  int dim_base() const override { return n_; }
  int dim_ambient() const override { return n_ + k_; }
  Vec position(const Vec& x) const override;
  Mat jacobian(const Vec& x) const override;
  Hessian hessian(const Vec& x) const override;
  bool has_analytic_derivatives() const override { return true; }
  std::string name() const override { return "plane"; }

 private:
  int n_, k_;
};

/// x -> (x, h(x)) in R^{n+k} where each h_alpha is a sum of Gaussian bumps.
class GraphImmersion final : public ImmersionChart {
 public:
  struct Bump {
    Vec center;
    double width;
    Vec amplitude;  // one entry per normal component
  };

  GraphImmersion(int n, int k, std::vector<Bump> bumps, double half_width);
  /// Deterministic random bump field.
  static std::shared_ptr<GraphImmersion> random(int n, int k, std::uint64_t seed, int bump_count = 4,
                                                double amplitude = 0.3, double half_width = 2.0);

  int dim_base() const override { return n_; }
  int dim_ambient() const override { return n_ + k_; }
  Vec position(const Vec& x) const override;
  Mat jacobian(const Vec& x) const override;
  Hessian hessian(const Vec& x) const override;
  bool has_analytic_derivatives() const override { return true; }
  std::string name() const override { return "graph"; }

 private:
  int n_, k_;
  std::vector<Bump> bumps_;
};

/// Pads an immersion into R^{n+k} with extra zero coordinates, then applies a
/// fixed orthogonal map of the larger space.
class Suspension final : public ImmersionChart {
 public:
  Suspension(ChartPtr inner, int extra, Mat rotation = Mat());

  int dim_base() const override { return inner_->dim_base(); }
  int dim_ambient() const override { return inner_->dim_ambient() + extra_; }
  Vec position(const Vec& x) const override;
  Mat jacobian(const Vec& x) const override;
  Hessian hessian(const Vec& x) const override;
  bool has_analytic_derivatives() const override { return inner_->has_analytic_derivatives(); }
  std::optional<Mat> normal_seed(const Vec& x) const override;
  std::string name() const override { return inner_->name(); }
  const ImmersionChart& inner() const { return *inner_; }

 private:
  ChartPtr inner_;
  int extra_;
  Mat rotation_;
};

/// Lifts a chart into codimension k (k >= its own codimension).
ChartPtr lift_to_codim(ChartPtr chart, int k, const Mat& rotation = Mat());

}  // namespace qtube
