#pragma once

#include <vector>

#include "qtube/fermi.hpp"

namespace qtube {

struct ShootingOptions {
  double rho_tol = 1e-13;    // bisection bracket width
  double ode_rtol = 1e-13;
  double ode_atol = 1e-15;
  double series_start = 1e-3;  // two-term Frobenius start
  int table_intervals = 2000;
};

/// Radial ground state of the Dirichlet Laplacian on the unit k-ball:
///   chi'' + ((k-1)/t) chi' + rho^2 chi = 0, chi(0) = 1, chi'(0) = 0, chi(1) = 0.
/// chi is tabulated at equally spaced nodes with value, first and second
/// derivative and evaluated by quintic Hermite interpolation.
struct RadialMode {
  int k = 1;
  double rho = 0.0;
  std::vector<double> mu;  // mu[p-1] = mu_{2p}
  std::vector<double> chi_nodes, dchi_nodes, ddchi_nodes;

  double chi(double t) const;
  double dchi(double t) const;
  double ddchi(double t) const;
  /// mu_{2p} for p >= 1.
  double mu2p(int p) const;
};

/// chi(1) for the regular solution at the given rho.
double shoot(int k, double rho, const ShootingOptions& options = {});

/// NoConvergence if no sign change of chi(1) is found.
RadialMode solve_radial_mode(int k, int p_max, const ShootingOptions& options = {});

/// mu_{2p} = p (2p + k - 2) int_0^1 t^{2p+k-3} chi^2 dt, p = 1..p_max.
std::vector<double> mu_coefficients(const RadialMode& mode, int p_max);

/// int_0^1 t^{2p+k-1} (chi'^2 - rho^2 chi^2) dt; equals mu_{2p} for p >= 1
/// and vanishes for p = 0.
double rigidity_integral(const RadialMode& mode, int p);

/// Largest |chi'' + ((k-1)/t) chi' + rho^2 chi| over interval midpoints.
double ode_residual(const RadialMode& mode);

struct GradientIdentity {
  double fiber_error = 0.0;  // | <d chi, d chi>_G - chi'(t/r)^2 / r^2 |
  double cross_error = 0.0;  // | <d psi, d chi>_G | for a horizontal covector d psi
};

/// Contracts the full inverse tube metric with d(chi(|u|/r)) and with a
/// horizontal covector.
GradientIdentity chi_gradient_identity_check(const RadialMode& mode, const TubeMetric& tm, const Vec& u,
                                             double r, const Vec& horizontal);

}  // namespace qtube
