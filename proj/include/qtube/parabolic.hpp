#pragma once

#include <string>
#include <vector>

#include "qtube/base.hpp"

namespace qtube {

/// Harmonic capacity potential of the annulus B(R) \ B(s): 1 on B(s), 0
/// outside B(R).
struct CapacityPotential {
  double s = 0.0;
  double R = 0.0;
  double energy = 0.0;
  bool grid = false;      // grid solve (true) or reduced radial solve
  int resolution = 0;     // grid nodes per axis
  std::vector<double> tau;  // sample radii (radial) or empty
  std::vector<double> psi;  // samples; grid values row-major when grid
  double psi_min = 0.0;
  double psi_max = 1.0;
  double grid_half_width = 0.0;
};

struct CapacityOptions {
  int grid_resolution = 400;  // cells per axis
  bool force_grid = false;    // ignore rotational symmetry
  int samples = 200;
};

/// Radial capacity potential psi(tau) = I(tau)/I(s), I(tau) = int_tau^R dsigma / L(sigma),
/// with L the total measure of the geodesic sphere.
class RadialCapacity {
 public:
  RadialCapacity(RadialPtr radial, double s, double R);
  double value(double tau) const;
  double derivative(double tau) const;
  double energy() const { return 1.0 / total_; }
  double s() const { return s_; }
  double R() const { return R_; }

 private:
  double tail(double tau) const;
  RadialPtr radial_;
  double s_, R_, total_;
};

/// NotAnnulus if R <= s; DomainError if the base truncation is below R.
CapacityPotential capacity_potential(const BaseManifold& base, double s, double R,
                                     const CapacityOptions& options = {});

/// Grid capacity solve on a two-dimensional chart, balls measured in chart
/// distance from the origin.
CapacityPotential grid_capacity(const ImmersionChart& chart, double s, double R, int resolution);

enum class GrowthVerdict { ParabolicConsistent, Inconclusive };
std::string to_string(GrowthVerdict v);

struct VolumeGrowth {
  GrowthVerdict verdict = GrowthVerdict::Inconclusive;
  double alpha = 0.0;
  double coefficient = 0.0;
  std::vector<double> radius;
  std::vector<double> volume;
  double partial_integral = 0.0;  // sum t dt / V(t)
};

/// Volume of the geodesic ball of radius t about the centre.
double ball_volume(const BaseManifold& base, double t);
VolumeGrowth volume_growth_test(const BaseManifold& base, const std::vector<double>& r_grid);

struct EndProfile {
  std::vector<double> radius;
  std::vector<std::vector<double>> area;  // per end
  std::vector<double> lambda;
  double total_curvature = 0.0;
  int euler = 0;
  double condition = 0.0;          // e - sum lambda
  bool condition_holds = false;    // condition <= extrapolation tolerance 1e-2
  double cohn_vossen = 0.0;        // int K / 2 pi
};

/// Ends and total curvature of a surface of revolution. ExtrapolationUnstable
/// if consecutive area-ratio extrapolants differ by more than 1e-2.
EndProfile end_profile(const BaseManifold& base, int levels = 10);

/// int_{B(tau)} K dA over the truncation (or tau when positive).
double total_curvature(const BaseManifold& base, double tau = 0.0);
/// int K dA + boundary geodesic curvature - 2 pi chi of the truncated piece.
double gauss_bonnet_defect(const BaseManifold& base, double tau);

}  // namespace qtube
