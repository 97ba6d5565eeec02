#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qtube/base.hpp"
#include "qtube/fermi.hpp"
#include "qtube/oracle.hpp"
#include "qtube/parabolic.hpp"
#include "qtube/radial.hpp"

namespace qtube {

struct CertificateOptions {
  std::vector<double> s_grid{2.0, 4.0, 8.0};
  std::vector<double> R_factors{8.0, 16.0, 32.0};  // R = factor * s, capped by the truncation
  int base_order = 8;          // Gauss points per base panel
  int fiber_order = 16;        // radial Gauss points in the fiber
  int sphere_order = 12;
  int capacity_resolution = 96;  // chart grid for bases without rotational symmetry
  double amplitude = 1.0;      // phi = amplitude * chi * psi
  double zero_tolerance = 1e-8;
  // Perturbation search.
  double bump_amplitude = 1.0;
  int epsilon_count = 26;      // per sign, log-spaced in [1e-6, 1e-1]
  // Essential floor and oracle.
  std::vector<double> compact_radii{2.0, 4.0, 8.0, 16.0, 32.0};
  bool run_oracle = true;
  OracleOptions oracle;
  int threads = 0;
};

struct EssentialFloor {
  double compact_radius = 0.0;
  double exterior_sup = 0.0;  // sup of |A| outside the compact ball
  double outer_sup = 0.0;     // sup over the outermost tenth of the truncation
  double epsilon = 0.0;       // sqrt(k) r sup
  double floor = 0.0;
  double threshold = 0.0;     // rho^2 / r^2
};

/// ((1 - eps)/(1 + eps))^n rho^2 / r^2 with eps realized outside the geodesic
/// ball of the given radius. A2Violated unless eps < 1 and the curvature near
/// the truncation has decayed below a tenth of its global sup.
EssentialFloor essential_lower_bound(const BaseManifold& base, const TubeSpec& tube, const RadialMode& mode,
                                     double compact_radius, int samples = 200);

struct CertificateIntegral {
  double value = 0.0;          // int sum_p mu_2p K_2p over the truncation
  double half_value = 0.0;     // same over half the truncation
  double tail_bound = 0.0;     // |value - half_value|
  std::vector<double> per_p;   // mu_2p int K_2p
  double fiber_identity_error = 0.0;
};

/// Fiber integral int_{B(0,1)} (chi'^2 - rho^2 chi^2) det(I - u H) du at one
/// base point, by direct ball quadrature.
double fiber_ball_integral(const FramedPoint& fp, const RadialMode& mode, int radial_order = 24,
                           int sphere_order = 24);
/// sum_p mu_2p K_2p at one base point.
double fiber_identity_value(const FramedPoint& fp, const RadialMode& mode);

/// TailDominates if the tail bound exceeds the magnitude of the integral
/// (and the integral is not numerically zero).
CertificateIntegral certificate_integral(const BaseManifold& base, const TubeSpec& tube, const RadialMode& mode,
                                         const CertificateOptions& options = {});

/// Q(phi, phi) for phi = chi(|u|/r) psi(x) split into its pieces.
struct QBreakdown {
  double s = 0.0;
  double R = 0.0;
  double value = 0.0;
  double fiber = 0.0;          // int psi^2 (|d chi|^2 - rho^2/r^2 chi^2)
  double horizontal = 0.0;     // int chi^2 |d psi|^2_G
  double cross = 0.0;          // 2 int chi psi <d chi, d psi>_G
  double fiber_formula = 0.0;  // int psi^2 sum_p r^{k-2+2p} mu_2p K_2p
  double base_energy = 0.0;    // int |d psi|^2 over the base
  double capacity_energy = 0.0;
  double c1_ratio = 0.0;       // horizontal / base_energy
  double mass = 0.0;           // int phi^2
};

QBreakdown evaluate_Q(const BaseManifold& base, const TubeSpec& tube, const RadialMode& mode, double s, double R,
                      const CertificateOptions& options = {});

/// Q over the (s, R) search grid; pairs run concurrently.
std::vector<QBreakdown> search_Q(const BaseManifold& base, const TubeSpec& tube, const RadialMode& mode,
                                 const CertificateOptions& options = {});

/// Most negative Q over the grid; NoNegativeQ if none is negative.
QBreakdown strict_certificate(const BaseManifold& base, const TubeSpec& tube, const RadialMode& mode,
                              const CertificateOptions& options = {});

struct PerturbationResult {
  QBreakdown base_q;             // Q(phi, phi)
  int end = 0;
  double plateau_lo = 0.0;       // j = 1 on [plateau_lo, plateau_hi] of one end
  double plateau_hi = 0.0;
  double ramp = 0.0;             // width of the cos^2 ramps
  double t0 = 0.0;               // fiber bump centre radius (units of r)
  int direction = 0;             // normal frame axis of the bump centre
  int orientation = 1;           // sign of that axis
  double coupling_formula = 0.0;     // -int j chi_1 <d chi, d det>
  double coupling_quadrature = 0.0;  // Q(phi, j chi_1) by full quadrature
  double bump_energy = 0.0;          // Q(j chi_1, j chi_1)
  std::vector<double> epsilons;
  std::vector<double> values;
  double best_epsilon = 0.0;
  double q_perturbed = 0.0;
  double linear_flip_defect = 0.0;   // relative asymmetry of the linear term under eps -> -eps
};

/// Equality branch: phi + eps j chi_1 with j a plateau band inside the region
/// where psi = 1 and chi_1 a fiber bump away from the centre. The band and
/// bump are chosen to minimise Q over the eps range. Needs a rotationally
/// symmetric base. DegenerateCoupling if no candidate couples.
PerturbationResult perturbative_certificate(const BaseManifold& base, const TubeSpec& tube, const RadialMode& mode,
                                            double s, double R, const CertificateOptions& options = {});

enum class Verdict { DiscreteSpectrumCertified, InapplicableTotallyGeodesic, ConditionFailed, Inconclusive };
std::string to_string(Verdict v);

struct AuditCheck {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

struct CertificateReport {
  std::string family;
  TubeSpec tube;
  double rho = 0.0;
  double threshold = 0.0;  // rho^2 / r^2
  Verdict verdict = Verdict::Inconclusive;
  std::string reason;
  double sup_shape = 0.0;
  bool totally_geodesic = false;

  std::vector<EssentialFloor> floors;
  double ess_floor = 0.0;  // at the largest compact radius that passed

  std::optional<VolumeGrowth> growth;
  std::optional<EndProfile> ends;
  std::string parabolic = "INCONCLUSIVE";
  std::string parabolic_basis;  // which sufficient condition was met
  double abs_curvature = 0.0;   // int |K| over the truncation, surfaces only

  std::optional<CertificateIntegral> integral;
  std::vector<QBreakdown> q_grid;
  std::optional<QBreakdown> q;
  std::optional<PerturbationResult> perturbation;

  std::optional<SpectrumEstimate> oracle;
  double oracle_gap = 0.0;  // 1 - lambda0 / threshold

  std::vector<AuditCheck> audit;
  std::vector<std::string> errors;  // "Kind: message" per failed stage
};

/// Full pipeline; every error is recorded and mapped to a verdict.
CertificateReport verdict(const BaseManifold& base, const TubeSpec& tube, const CertificateOptions& options = {});

}  // namespace qtube
