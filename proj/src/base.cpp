#include "qtube/base.hpp"

#include <cmath>
#include <numbers>

#include "qtube/error.hpp"
#include "qtube/quadrature.hpp"

namespace qtube {

double RadialStructure::shell_measure(int end, double tau) const {
  const double v = v_at(end, tau);
  return shell_density(v) / std::abs(dtau_dv(v));
}

double RadialStructure::shell_measure(double tau) const {
  double sum = 0.0;
  for (int e = 0; e < ends(); ++e) sum += shell_measure(e, tau);
  return sum;
}

Vec RadialStructure::radial_covector(double v) const {
  Vec d = Vec::Zero(dim());
  d[0] = dtau_dv(v);
  return d;
}

RevolutionStructure::RevolutionStructure(ProfilePtr profile, double tau_max) : profile_(std::move(profile)) {
  if (!(tau_max > 0.0)) fail(ErrorKind::NonPositive, "truncation radius must be positive");
  tau_max_ = tau_max;
}

double RevolutionStructure::dtau_dv(double v) const {
  const double sign = v >= profile_->v_reference() ? 1.0 : -1.0;
  return sign * profile_->speed(v);
}

double RevolutionStructure::v_at(int end, double tau) const {
  if (end < 0 || end >= ends()) fail(ErrorKind::IndexError, "end index out of range");
  return profile_->arclength_inverse(end == 0 ? tau : -tau);
}

double RevolutionStructure::shell_density(double v) const {
  return 2.0 * std::numbers::pi * profile_->a(v) * profile_->speed(v);
}

EuclideanStructure::EuclideanStructure(int n, double tau_max) : n_(n) {
  if (!(tau_max > 0.0)) fail(ErrorKind::NonPositive, "truncation radius must be positive");
  tau_max_ = tau_max;
}

double EuclideanStructure::shell_density(double v) const {
  return sphere_measure(n_) * std::pow(std::abs(v), n_ - 1);
}

Vec EuclideanStructure::chart_point(double v) const {
  Vec x = Vec::Zero(n_);
  x[0] = v;
  return x;
}

double FamilySpec::param(const std::string& key, double fallback) const {
  const auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

std::vector<std::string> family_names() {
  return {"plane", "catenoid", "cylinder", "revolution", "finger", "cone", "graph"};
}

namespace {

BaseManifold revolution_base(const FamilySpec& spec, ProfilePtr profile, int k, double truncation) {
  BaseManifold base;
  base.spec = spec;
  base.profile = profile;
  auto radial = std::make_shared<RevolutionStructure>(profile, truncation);
  base.radial = radial;
  base.truncation = truncation;
  // Slightly past the truncation so stencils and quadrature near the edge stay inside.
  const double margin = 1.05 * truncation + 1.0;
  const double v_hi = profile->arclength_inverse(margin);
  const double v_lo = profile->meets_axis() ? profile->v_lower() : profile->arclength_inverse(-margin);
  auto surface = std::make_shared<SurfaceOfRevolution>(profile, v_lo, v_hi);
  base.chart = lift_to_codim(surface, k);
  base.end_count = radial->ends();
  base.euler_characteristic = profile->meets_axis() ? 1 : 0;
  return base;
}

}  // namespace

BaseManifold make_base(const FamilySpec& spec, int k, double truncation) {
  if (k < 1) fail(ErrorKind::DimensionError, "fiber dimension must be at least 1");
  if (!(truncation > 0.0)) fail(ErrorKind::NonPositive, "truncation radius must be positive");
  const std::string& name = spec.name;
  if (name == "plane") {
    const int n = static_cast<int>(spec.param("n", 2));
    BaseManifold base;
    base.spec = spec;
    base.chart = std::make_shared<FlatPlane>(n, k, 1.05 * truncation + 1.0);
    base.radial = std::make_shared<EuclideanStructure>(n, truncation);
    base.truncation = truncation;
    base.flat = true;
    return base;
  }
  if (name == "catenoid")
    return revolution_base(spec, std::make_shared<CatenoidProfile>(spec.param("c", 1.0)), k, truncation);
  if (name == "cylinder")
    return revolution_base(spec, std::make_shared<CylinderProfile>(spec.param("radius", 1.0)), k, truncation);
  if (name == "revolution") {
    if (spec.coeffs.empty()) fail(ErrorKind::ConfigError, "revolution family needs coeffs");
    return revolution_base(spec, GraphProfile::polynomial(spec.coeffs), k, truncation);
  }
  if (name == "finger") {
    auto profile = TurningProfile::finger(spec.param("w", 0.8), spec.param("length", 4.0),
                                          spec.param("flare", 0.8), spec.param("smoothing", 0.15));
    return revolution_base(spec, profile, k, truncation);
  }
  if (name == "cone") {
    auto profile = TurningProfile::cone(spec.param("alpha", 0.6), spec.param("cap", 1.0),
                                        spec.param("smoothing", 0.15));
    return revolution_base(spec, profile, k, truncation);
  }
  if (name == "graph") {
    const int n = static_cast<int>(spec.param("n", 2));
    const double half = spec.param("half_width", truncation);
    BaseManifold base;
    base.spec = spec;
    base.chart = GraphImmersion::random(n, k, static_cast<std::uint64_t>(spec.param("seed", 7)),
                                        static_cast<int>(spec.param("bumps", 4)), spec.param("amplitude", 0.3),
                                        half);
    base.truncation = truncation;
    return base;
  }
  fail(ErrorKind::ConfigError, "unknown base family '" + name + "'");
}

}  // namespace qtube
