#pragma once

#include <optional>
#include <vector>

#include "qtube/chart.hpp"

namespace qtube {

/// Geometry of the immersion at one chart point. All bilinear forms carry
/// lowered indices; H[a] = g^{-1} B[a] is the shape operator of the a-th
/// normal acting on coordinate vectors, so g H[a] = B[a] is symmetric.
struct FramedPoint {
  Vec x;
  Vec position;
  Mat tangent;  // n x m, rows d_i X
  Mat g;
  Mat g_inv;
  Mat g_chol;   // lower factor, g = L L^T
  double sqrt_det_g = 0.0;
  Mat normals;  // m x k, orthonormal columns
  std::vector<Mat> B;
  std::vector<Mat> H;
  std::vector<Mat> omega;  // per coordinate direction: omega[i](a, b) = <d_i eta_a, eta_b>
  double A_norm = 0.0;
  std::vector<int> pivots;  // seed indices used to build the normal frame

  int n() const { return static_cast<int>(g.rows()); }
  int k() const { return static_cast<int>(normals.cols()); }
  /// sum_a e_a B[a] for a normal given in frame components.
  Mat second_form(const Vec& e) const;
  /// sum_a e_a H[a].
  Mat shape(const Vec& e) const;
  /// L^{-1} B L^{-T}: second fundamental form in a g-orthonormal basis.
  Mat orthonormal_form(const Vec& e) const;
  /// Largest |eigenvalue| of any unit-normal shape operator.
  double max_principal_curvature() const;
};

struct FrameOptions {
  /// Frame columns to sign-align with (a neighbouring grid point).
  std::optional<Mat> reference;
  /// Force the seed order instead of pivoting.
  std::vector<int> pivots;
  bool compute_omega = true;
};

FramedPoint frame_point(const ImmersionChart& chart, const Vec& x, const FrameOptions& options = {});

/// Orthonormal basis of the normal space (m x k) by modified Gram-Schmidt on
/// projected seed vectors. Seeds are the chart's hint columns followed by the
/// ambient basis; pivots_out receives the seed indices that were used.
Mat normal_frame(const ImmersionChart& chart, const Vec& x, const Mat& jacobian,
                 const std::vector<int>& pivots_in, std::vector<int>* pivots_out);

/// Same point with the normal frame replaced by normals * Q for a constant
/// orthogonal k x k matrix Q.
FramedPoint rotate_frame(const FramedPoint& fp, const Mat& Q);

/// Four-index array with R(i,j,k,l) storage.
struct Riemann {
  int n = 0;
  std::vector<double> data;

  Riemann() = default;
  explicit Riemann(int n) : n(n), data(static_cast<std::size_t>(n) * n * n * n, 0.0) {}
  double& operator()(int i, int j, int k, int l) { return data[((static_cast<std::size_t>(i) * n + j) * n + k) * n + l]; }
  double operator()(int i, int j, int k, int l) const {
    return data[((static_cast<std::size_t>(i) * n + j) * n + k) * n + l];
  }
  /// Largest deviation from the pair symmetries and the first Bianchi identity.
  double symmetry_defect() const;
};

/// R_ijkl = sum_a (B_ik B_jl - B_il B_jk) in chart coordinates.
Riemann curvature_operator(const FramedPoint& fp);
/// Same tensor in a g-orthonormal basis.
Riemann orthonormal_curvature(const FramedPoint& fp);
/// Intrinsic Riemann tensor of the induced metric from finite differences of
/// g alone (Christoffel symbols differenced with step h).
Riemann intrinsic_curvature_fd(const ImmersionChart& chart, const Vec& x, double h);
/// Sectional curvature of the coordinate plane (i, j).
double sectional_curvature(const Riemann& R, const Mat& g, int i, int j);

/// Frames sampled on a regular chart grid, each aligned with its predecessor
/// so that the field has no sign flips.
struct FrameField {
  std::vector<int> shape;
  Vec lo;
  Vec step;
  std::vector<FramedPoint> points;  // row-major, last axis fastest

  std::size_t index(const std::vector<int>& multi) const;
};

FrameField sample_frame_field(const ImmersionChart& chart, const Vec& lo, const Vec& hi,
                              const std::vector<int>& counts);

/// Norm of the normal curvature R^perp at every interior node, computed from
/// central differences of omega across the grid (NaN on boundary nodes).
std::vector<double> normal_curvature(const FrameField& field);

}  // namespace qtube
