#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "qtube/base.hpp"
#include "qtube/eigensolver.hpp"
#include "qtube/fermi.hpp"

namespace qtube {

enum class AxisBoundary { Dirichlet, Natural };

struct GridAxis {
  std::vector<double> nodes;  // increasing; for a periodic axis the last node is the period end
  AxisBoundary lo = AxisBoundary::Dirichlet;
  AxisBoundary hi = AxisBoundary::Dirichlet;
  bool periodic = false;

  static GridAxis uniform(double a, double b, int elements, AxisBoundary lo = AxisBoundary::Dirichlet,
                          AxisBoundary hi = AxisBoundary::Dirichlet);
  static GridAxis circle(double period, int elements);
  int elements() const { return static_cast<int>(nodes.size()) - 1; }
  /// Two Gauss points per element, in element order.
  std::vector<double> gauss_points() const;
};

/// Tensor-product grid with up to three axes.
struct DiscretizationGrid {
  std::vector<GridAxis> axes;
  std::size_t node_cap = 4'000'000;
};

/// Weak-form coefficients at a point: stiffness matrix A (d x d, row-major,
/// already including the volume density) and mass density w.
using CoefficientFn = std::function<void(const double* x, double* A, double& w)>;

struct Assembled {
  SparseMat K;
  SparseMat M;
  std::vector<int> free_nodes;  // free index -> grid node
  std::vector<int> shape;       // nodes per axis (periodic axes without the duplicate)
  std::vector<std::vector<double>> coordinates;  // node coordinates per axis
  double symmetry_defect = 0.0;
};

/// Q1 Galerkin assembly with 2^d Gauss points per element. Coefficients are
/// evaluated in parallel and accumulated in element order, so the result does
/// not depend on scheduling. OutOfBudget above the node cap.
Assembled assemble_laplacian(const DiscretizationGrid& grid, const CoefficientFn& coefficient, int threads = 0);

struct SpectrumLevel {
  std::vector<int> elements;
  std::vector<double> values;
  std::vector<double> residuals;
  double sign_change_fraction = 0.0;  // ground-state nodes against the majority sign
};

struct SpectrumEstimate {
  std::vector<SpectrumLevel> levels;
  double lambda0 = 0.0;            // finest level
  double extrapolated = 0.0;       // Richardson over the last three levels
  double observed_order = 0.0;
  double convergence_ratio = 0.0;  // (l1 - l2)/(l2 - l3)
};

/// Richardson extrapolation from three levels with halving mesh width.
void richardson(SpectrumEstimate& est);

enum class TubeDiscretization {
  Reduced,  // rotational base, functions of (v, fiber radius or u)
  Full,     // all chart coordinates plus the fiber (k = 1)
};

struct OracleOptions {
  TubeDiscretization kind = TubeDiscretization::Reduced;
  int base_elements = 80;     // along the radial chart coordinate (or per chart axis for Full)
  int fiber_elements = 16;
  int angular_elements = 4;   // periodic chart axes in Full mode
  int levels = 3;             // refinements, each halving the mesh width
  double truncation = 0.0;    // geodesic radius; 0 uses the base truncation
  int eigen_count = 1;
  bool neumann_outer = false; // natural condition at the truncation instead of Dirichlet
  std::vector<bool> periodic; // Full mode: overrides the chart's periodic flags
  std::size_t node_cap = 4'000'000;
  int threads = 0;
};

/// Discretized Dirichlet Laplacian of the tube at one resolution level.
/// Reduced mode with k >= 2 restricts to fiber-radial functions, which gives
/// an upper bound on the bottom of the spectrum.
Assembled assemble_tube(const BaseManifold& base, const TubeSpec& tube, const OracleOptions& options, int level,
                        double compact_radius = 0.0, int end = -1);

SpectrumEstimate tube_spectrum(const BaseManifold& base, const TubeSpec& tube, const OracleOptions& options = {});

/// First Dirichlet eigenvalue of the unit k-ball restricted to radial functions.
SpectrumEstimate ball_spectrum(int k, int elements = 200, int levels = 3);

/// Lowest Rayleigh quotient over the tube outside the geodesic ball of the
/// given radius (each end separately, minimum reported).
double exterior_rayleigh_floor(const BaseManifold& base, const TubeSpec& tube, double compact_radius,
                               const OracleOptions& options = {});

}  // namespace qtube
