#pragma once

#include <functional>
#include <vector>

#include "qtube/base.hpp"
#include "qtube/manifold.hpp"

namespace qtube {

/// j-th elementary symmetric function of the eigenvalues of H (sum of the
/// j x j principal minors). IndexError unless 0 <= j <= n.
double elementary_symmetric(const Mat& H, int j);

/// sum_j (-1)^j t^j C_j(H), which equals det(I - tH).
double det_expansion(const Mat& H, double t);

/// K_j = integral over the unit normal sphere of C_j(S_eta). The rule is
/// refined once (order, 2 order); QuadratureNotConverged when the two differ
/// by more than 1e-6 relative to the natural scale.
double tube_curvature_K(const FramedPoint& fp, int j, int quad_order = 16);

/// (2p)! pi^{k/2} / (2^{2p-1} p! Gamma(p + k/2)).
double gray_prefactor(int p, int k);

/// Double-alternating trace over ordered 2p-tuples of distinct indices,
/// divided by 2^p ((2p)!)^2. R must be given in an orthonormal basis.
/// DimensionError if 2p > n.
double trace_power(const Riemann& R, int p);

struct GrayRatio {
  double mean = 0.0;
  double cv = 0.0;  // coefficient of variation
  int used = 0;
  std::vector<double> ratios;
};

/// K_{2p} / tr(R^p) over samples with |tr(R^p)| >= 1e-9.
GrayRatio gray_ratio(const std::vector<FramedPoint>& samples, int p, int quad_order = 16);

struct InvariantRow {
  std::vector<double> K;    // j = 0..n
  std::vector<double> trR;  // p = 1..n/2, index p-1
};

InvariantRow invariant_row(const FramedPoint& fp, int quad_order = 16);

/// Integral over the truncated base (geodesic radius tau_limit, or the base
/// truncation when tau_limit <= 0) of a pointwise quantity.
double base_integral(const BaseManifold& base, const std::function<double(const FramedPoint&)>& f,
                     double tau_limit = 0.0, double rel_tol = 1e-10);

/// Integrals of K_{2p} over the truncated base for p = 1..n/2.
std::vector<double> curvature_integrals(const BaseManifold& base, double tau_limit = 0.0, int quad_order = 16);

}  // namespace qtube
