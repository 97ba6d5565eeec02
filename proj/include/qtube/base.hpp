#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "qtube/chart.hpp"
#include "qtube/families.hpp"

namespace qtube {

/// Rotational symmetry of a base manifold: its geometry depends on one chart
/// coordinate v, level sets of v are geodesic spheres about a centre (a
/// point, or a reference parallel for two-ended surfaces), and chart_point(v)
/// picks one representative of each level set.
class RadialStructure {
 public:
  virtual ~RadialStructure() = default;

  virtual int dim() const = 0;
  /// 1 for a centre point, 2 when the surface is two-ended about a parallel.
  virtual int ends() const = 0;
  virtual double v_reference() const = 0;
  /// Geodesic radius of the level set through v.
  virtual double tau(double v) const = 0;
  /// d tau / dv, signed (negative on end 1 of a two-ended surface).
  virtual double dtau_dv(double v) const = 0;
  /// Chart coordinate at radius tau on the given end.
  virtual double v_at(int end, double tau) const = 0;
  /// Integral of sqrt(det g) over the level set, per unit dv.
  virtual double shell_density(double v) const = 0;
  virtual Vec chart_point(double v) const = 0;

  double tau_max() const { return tau_max_; }
  /// Measure of the geodesic sphere of radius tau on one end.
  double shell_measure(int end, double tau) const;
  /// Same, summed over ends.
  double shell_measure(double tau) const;
  /// Chart covector d tau at chart_point(v).
  Vec radial_covector(double v) const;

 protected:
  double tau_max_ = 0.0;
};

using RadialPtr = std::shared_ptr<const RadialStructure>;

class RevolutionStructure final : public RadialStructure {
 public:
  RevolutionStructure(ProfilePtr profile, double tau_max);
  int dim() const override { return 2; }
  int ends() const override { return profile_->meets_axis() ? 1 : 2; }
  double v_reference() const override { return profile_->v_reference(); }
  double tau(double v) const override { return std::abs(profile_->arclength(v)); }
  double dtau_dv(double v) const override;
  double v_at(int end, double tau) const override;
  double shell_density(double v) const override;
  Vec chart_point(double v) const override { return Vec{{v, 0.0}}; }
  const RevolutionProfile& profile() const { return *profile_; }

 private:
  ProfilePtr profile_;
};

/// Flat R^n about the origin of a Cartesian chart; v is the distance.
class EuclideanStructure final : public RadialStructure {
 public:
  EuclideanStructure(int n, double tau_max);
  int dim() const override { return n_; }
  int ends() const override { return 1; }
  double v_reference() const override { return 0.0; }
  double tau(double v) const override { return std::abs(v); }
  double dtau_dv(double) const override { return 1.0; }
  double v_at(int, double tau) const override { return tau; }
  double shell_density(double v) const override;
  Vec chart_point(double v) const override;

 private:
  int n_;
};

/// Named family with numeric parameters (and a coefficient list for
/// polynomial meridians).
struct FamilySpec {
  std::string name = "catenoid";
  std::map<std::string, double> params;
  std::vector<double> coeffs;

  double param(const std::string& key, double fallback) const;
};

/// A base manifold ready for the tube constructions: a chart immersed in
/// codimension k, with optional rotational symmetry and the topological data
/// used by the surface-case end test.
struct BaseManifold {
  FamilySpec spec;
  ChartPtr chart;
  RadialPtr radial;        // null without rotational symmetry
  ProfilePtr profile;      // surfaces of revolution only
  int euler_characteristic = 1;
  int end_count = 1;
  double truncation = 0.0; // geodesic radius of the truncated base
  bool flat = false;       // totally geodesic by construction

  int n() const { return chart->dim_base(); }
  int k() const { return chart->codim(); }
};

/// Builds a family immersed in codimension k and truncated at the given
/// geodesic radius. Known names: plane, catenoid, cylinder, revolution,
/// finger, cone, graph.
BaseManifold make_base(const FamilySpec& spec, int k, double truncation);
std::vector<std::string> family_names();

}  // namespace qtube
