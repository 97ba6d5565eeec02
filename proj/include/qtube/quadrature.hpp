#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace qtube {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [a, b].
QuadratureRule gauss_legendre(int n, double a = -1.0, double b = 1.0);

/// Composite Gauss-Legendre: `panels` equal panels of `order` points each.
QuadratureRule composite_gauss_legendre(int order, int panels, double a, double b);

struct AdaptiveResult {
  double value = 0.0;
  double error = 0.0;
  int evaluations = 0;
};

/// Globally adaptive Gauss-Kronrod (7/15) quadrature. Stops when the summed
/// error estimate is below max(abs_tol, rel_tol*|value|) or `max_intervals`
/// bisections have been spent.
AdaptiveResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                  double abs_tol = 1e-13, double rel_tol = 1e-12,
                                  int max_intervals = 2000);

/// Quadrature on the unit sphere S^{k-1} in R^k with the round measure.
/// k = 1: the two points {+1, -1} with counting measure.
/// k = 2: `order`-point trapezoid on the circle.
/// k >= 3: Gauss-Legendre in each polar angle (with the sine Jacobian) times a
///         2*`order`-point trapezoid in the azimuth.
struct SphereRule {
  int k = 0;
  std::vector<Eigen::VectorXd> points;
  std::vector<double> weights;
};

SphereRule sphere_rule(int k, int order);

/// Surface measure of S^{k-1}.
double sphere_measure(int k);
/// Volume of the unit ball in R^k.
double unit_ball_volume(int k);

}  // namespace qtube
