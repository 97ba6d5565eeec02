#pragma once

#include <vector>

#include "qtube/base.hpp"
#include "qtube/manifold.hpp"

namespace qtube {

/// Tube of radius r around a base immersed in codimension k, under the
/// curvature bound |A| <= eps0.
struct TubeSpec {
  int k = 1;
  double r = 0.5;
  double eps0 = 0.0;
  double sampled_sup = 0.0;  // sup of |A| over the base sample, when known
};

/// 1 / (sqrt(k) eps0).
double max_radius(double eps0, int k);
/// Validates admissibility r <= 1/(sqrt(k) eps0) and eps0 >= sampled_sup.
TubeSpec make_tube_spec(int k, double r, double eps0, double sampled_sup = 0.0);

/// Sampled sup of |A| over the truncated base.
double sampled_curvature_sup(const BaseManifold& base, int samples = 400);
/// Tube spec with eps0 = safety * sampled sup.
TubeSpec tube_for(const BaseManifold& base, double r, double safety = 1.01, int samples = 400);

struct FermiPoint {
  const FramedPoint* base = nullptr;
  Vec u;
  double t = 0.0;
  Vec eta;  // u / t, zero at the centre
};

FermiPoint make_fermi_point(const FramedPoint& fp, const Vec& u, double r);

/// Tube metric in Fermi coordinates (x, u), blocks [[Gt + C C^T, C], [C^T, I]].
struct TubeMetric {
  int n = 0;
  int k = 0;
  Mat G_tilde;
  Mat C;
  Mat G;
  Mat I_minus_uH;  // I - sum u_a H_a
  double sqrt_det_g = 0.0;
  double det_shape = 0.0;  // det(I - sum u_a H_a)
  double det_density = 0.0;
};

/// Errors: OutsideTube if |u| >= r, Inadmissible if |u_a H_a| >= 1 in the
/// g-orthonormal spectral norm.
TubeMetric assemble_metric(const FramedPoint& fp, const Vec& u, double r);
/// Same without the radius check (used where u is already known inside).
TubeMetric assemble_metric(const FramedPoint& fp, const Vec& u);

/// Block inverse [[Gt^-1, -Gt^-1 C], [-C^T Gt^-1, C^T Gt^-1 C + I]].
Mat metric_inverse(const TubeMetric& tm);
/// The first summand of the inverse, [[Gt^-1, -Gt^-1 C], [-C^T Gt^-1, C^T Gt^-1 C]].
Mat metric_inverse_horizontal_part(const TubeMetric& tm);
double volume_density(const TubeMetric& tm);

/// G_ij built term by term: g - 2 u.B + u_a u_b <S_a d_i, S_b d_j> + (normal
/// connection term).
Mat expanded_horizontal_block(const FramedPoint& fp, const Vec& u);
/// u_a u_b <grad^perp_i eta_a, grad^perp_j eta_b> evaluated from omega directly.
Mat normal_connection_term(const FramedPoint& fp, const Vec& u);

/// Spectral norm of sum u_a H_a in a g-orthonormal basis.
double shape_norm(const FramedPoint& fp, const Vec& u);

}  // namespace qtube
