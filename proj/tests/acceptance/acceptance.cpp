// Acceptance suite: one PASS/FAIL line per criterion. Tolerances are fixed here.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "qtube/base.hpp"
#include "qtube/certificate.hpp"
#include "qtube/config.hpp"
#include "qtube/error.hpp"
#include "qtube/fermi.hpp"
#include "qtube/identities.hpp"
#include "qtube/invariants.hpp"
#include "qtube/manifold.hpp"
#include "qtube/oracle.hpp"
#include "qtube/parabolic.hpp"
#include "qtube/quadrature.hpp"
#include "qtube/radial.hpp"

using namespace qtube;

namespace {

constexpr double kPi = std::numbers::pi;

// Criterion 1
constexpr double kRhoTol = 1e-10;
constexpr double kRho2Stability = 1e-9;
constexpr double kRadialSeconds = 1.0;
// Criterion 2
constexpr double kRigidityTol = 1e-8;
constexpr double kMu2Tol = 1e-10;
// Criterion 3
constexpr int kIdentitySamples = 100;
constexpr double kIdentitySeconds = 10.0;
// Criterion 4
constexpr double kOddTol = 1e-8;
constexpr double kGrayDispersion = 1e-6;
// Criterion 5
constexpr double kFlatCapacityTol = 1e-2;
constexpr int kCapacityResolution = 400;
constexpr double kEndSlopeTol = 0.02;
constexpr double kTotalCurvatureTol = 0.05;
// Criterion 6
constexpr double kCatenoidGap = 0.02;
constexpr double kCertificateSeconds = 300.0;
// Criterion 7
constexpr double kCodimRatioTol = 1e-3;
// Criterion 8
constexpr double kPlaneDiscretization = 1e-2;
// Criterion 9
constexpr double kFingerGap = 0.005;
// Criterion 10
constexpr double kFloorSlack = 1e-2;

struct Line {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

RunConfig config(const std::string& name) { return load_config(std::string(QTUBE_CONFIG_DIR) + "/" + name + ".json"); }

BaseManifold family(const std::string& name, int k, double T, std::map<std::string, double> params = {}) {
  FamilySpec f;
  f.name = name;
  f.params = std::move(params);
  return make_base(f, k, T);
}

double gap(double lambda, double threshold) { return 1.0 - lambda / threshold; }

void criterion1(Line& L) {
  const auto t0 = std::chrono::steady_clock::now();
  const double r1 = solve_radial_mode(1, 1).rho;
  const double r3 = solve_radial_mode(3, 1).rho;
  const double r2 = solve_radial_mode(2, 1).rho;
  ShootingOptions loose;
  loose.ode_rtol = 1e-11;
  loose.ode_atol = 1e-13;
  loose.rho_tol = 1e-12;
  loose.series_start = 1e-2;
  const double r2b = solve_radial_mode(2, 1, loose).rho;
  const double dt = seconds_since(t0);
  L.detail << "rho(1)-pi/2=" << r1 - kPi / 2 << " rho(3)-pi=" << r3 - kPi << " |drho(2)|=" << std::abs(r2 - r2b)
           << " time=" << dt << "s";
  L.require(std::abs(r1 - kPi / 2) < kRhoTol, "rho(1)");
  L.require(std::abs(r3 - kPi) < kRhoTol, "rho(3)");
  L.require(std::abs(r2 - r2b) < kRho2Stability, "rho(2) stability");
  L.require(dt < kRadialSeconds, "runtime");
}

void criterion2(Line& L) {
  double worst = 0.0;
  for (int k = 1; k <= 3; ++k) {
    const RadialMode m = solve_radial_mode(k, 2);
    for (int p = 1; p <= 2; ++p) {
      const QuadratureRule q = composite_gauss_legendre(12, 64, 0.0, 1.0);
      double lhs = 0.0, rhs = 0.0;
      for (std::size_t i = 0; i < q.nodes.size(); ++i) {
        const double t = q.nodes[i], c = m.chi(t), dc = m.dchi(t);
        lhs += q.weights[i] * std::pow(t, 2 * p + k - 1) * (dc * dc - m.rho * m.rho * c * c);
        rhs += q.weights[i] * std::pow(t, 2 * p + k - 3) * c * c;
      }
      rhs *= p * (2 * p + k - 2);
      worst = std::max(worst, std::abs(lhs - rhs));
    }
  }
  const double mu2 = solve_radial_mode(1, 1).mu2p(1);
  L.detail << "max identity defect=" << worst << " mu2(k=1)-1/2=" << mu2 - 0.5;
  L.require(worst < kRigidityTol, "rigidity identity");
  L.require(std::abs(mu2 - 0.5) < kMu2Tol, "mu2 closed form");
}

void criterion3(Line& L) {
  const auto t0 = std::chrono::steady_clock::now();
  struct Case {
    const char* label;
    BaseManifold base;
    double r;
  };
  std::vector<Case> cases;
  cases.push_back({"plane", family("plane", 1, 8), 0.5});
  cases.push_back({"cylinder", family("cylinder", 1, 8), 0.5});
  cases.push_back({"catenoid_k1", family("catenoid", 1, 16), 0.5});
  cases.push_back({"catenoid_k2", family("catenoid", 2, 16), 0.45});
  cases.push_back({"graph_k2", family("graph", 2, 2, {{"seed", 3}}), 0.3});
  int failures = 0;
  double worst = 0.0;
  for (const Case& c : cases) {
    const TubeSpec tube = c.base.flat ? make_tube_spec(c.base.k(), c.r, 0.0) : tube_for(c.base, c.r);
    const IdentityReport rep = verify_identities(c.base, tube, kIdentitySamples, 1);
    for (const auto& chk : rep.checks) {
      if (!chk.passed || chk.samples < kIdentitySamples) {
        ++failures;
        L.detail << " " << c.label << ":" << chk.name << "=" << chk.max_defect;
      }
      if (chk.tolerance > 0.0) worst = std::max(worst, chk.max_defect / chk.tolerance);
    }
  }
  const double dt = seconds_since(t0);
  L.detail << "families=5 samples=" << kIdentitySamples << " worst defect/tolerance=" << worst << " time=" << dt << "s";
  L.require(failures == 0, "identity checks");
  L.require(dt < kIdentitySeconds, "runtime");
}

void criterion4(Line& L) {
  double odd = 0.0, worst_cv = 0.0;
  int sign_mismatch = 0, sign_samples = 0;
  for (int k : {1, 2}) {
    const BaseManifold cat = family("catenoid", k, 32);
    std::vector<FramedPoint> pts;
    for (double v = -3.0; v <= 3.0; v += 0.25) pts.push_back(frame_point(*cat.chart, Vec{{v, 0.4}}));
    for (const auto& fp : pts) odd = std::max(odd, std::abs(tube_curvature_K(fp, 1)));
    worst_cv = std::max(worst_cv, gray_ratio(pts, 1).cv);
  }
  const BaseManifold g = family("graph", 2, 2, {{"seed", 3}});
  for (double x = -0.9; x <= 0.9; x += 0.3)
    odd = std::max(odd, std::abs(tube_curvature_K(frame_point(*g.chart, Vec{{x, 0.5 * x}}), 1)));
  // Pointwise sign of K_2 against the Gauss curvature, on surfaces with both signs.
  for (const char* name : {"catenoid", "finger", "cone"}) {
    const BaseManifold b = family(name, 1, 16);
    for (double tau = 0.05; tau < 12.0; tau += 0.23) {
      const FramedPoint fp = frame_point(*b.chart, b.radial->chart_point(b.radial->v_at(0, tau)));
      const double K = sectional_curvature(curvature_operator(fp), fp.g, 0, 1);
      if (std::abs(K) < 1e-12) continue;
      ++sign_samples;
      if (K * tube_curvature_K(fp, 2) <= 0.0) ++sign_mismatch;
    }
  }
  L.detail << "max|K_1|=" << odd << " Gray cv=" << worst_cv << " sign mismatches=" << sign_mismatch << "/"
           << sign_samples;
  L.require(odd < kOddTol, "odd invariants");
  L.require(worst_cv < kGrayDispersion, "Gray dispersion");
  L.require(sign_mismatch == 0 && sign_samples > 0, "K_2 sign");
}

void criterion5(Line& L) {
  const BaseManifold plane = family("plane", 1, 64);
  CapacityOptions grid;
  grid.force_grid = true;
  grid.grid_resolution = kCapacityResolution;
  const double s = 2.0, R = 16.0;
  const double flat = 2.0 * kPi / std::log(R / s);
  const double e_grid = capacity_potential(plane, s, R, grid).energy;
  const BaseManifold cat = family("catenoid", 1, 1024);
  std::vector<double> energies;
  for (double f : {8.0, 32.0, 128.0}) energies.push_back(capacity_potential(cat, s, f * s).energy);
  const bool decreasing = energies[0] > energies[1] && energies[1] > energies[2];
  const EndProfile ep = end_profile(family("catenoid", 1, 256));
  double slope_err = 0.0;
  for (double l : ep.lambda) slope_err = std::max(slope_err, std::abs(l - 1.0));
  const double K = total_curvature(cat, std::sinh(4.0));
  const double k_err = std::abs(K / (-4.0 * kPi) - 1.0);
  L.detail << "flat grid rel err=" << std::abs(e_grid / flat - 1.0) << " catenoid energies=" << energies[0] << ","
           << energies[1] << "," << energies[2] << " max|lambda-1|=" << slope_err << " int K(|v|<=4)=" << K;
  L.require(std::abs(e_grid / flat - 1.0) < kFlatCapacityTol, "flat capacity");
  L.require(decreasing, "capacity monotonicity");
  L.require(ep.lambda.size() == 2 && slope_err < kEndSlopeTol, "end slopes");
  L.require(k_err < kTotalCurvatureTol, "total curvature");
}

CertificateReport certify(const std::string& name) {
  const RunConfig c = config(name);
  const BaseManifold base = build_base(c);
  const TubeSpec tube = base.flat ? make_tube_spec(c.tube.k, c.tube.r, 0.0) : tube_for(base, c.tube.r, c.tube.eps_safety);
  return verdict(base, tube, certificate_options(c));
}

double min_q(const CertificateReport& rep) {
  double q = INFINITY;
  for (const auto& b : rep.q_grid) q = std::min(q, b.value);
  return q;
}

void criterion6(Line& L, CertificateReport& rep) {
  const auto t0 = std::chrono::steady_clock::now();
  rep = certify("catenoid");
  const double dt = seconds_since(t0);
  const double q = min_q(rep);
  const double lambda = rep.oracle ? rep.oracle->extrapolated : NAN;
  L.detail << "verdict=" << to_string(rep.verdict) << " min Q=" << q << " lambda0=" << lambda
           << " threshold=" << rep.threshold << " gap=" << 100.0 * gap(lambda, rep.threshold) << "% time=" << dt << "s";
  L.require(rep.verdict == Verdict::DiscreteSpectrumCertified, "verdict");
  L.require(q < 0.0, "negative Q");
  L.require(gap(lambda, rep.threshold) >= kCatenoidGap, "oracle gap >= 2%");
  L.require(dt < kCertificateSeconds, "runtime");
}

void criterion7(Line& L, const CertificateReport& k1) {
  const CertificateReport k2 = certify("catenoid_k2");
  const double I1 = k1.integral ? k1.integral->value : NAN;
  const double I2 = k2.integral ? k2.integral->value : NAN;
  const double predicted = gray_prefactor(1, 2) * solve_radial_mode(2, 1).mu2p(1) /
                           (gray_prefactor(1, 1) * solve_radial_mode(1, 1).mu2p(1));
  const double lambda = k2.oracle ? k2.oracle->extrapolated : NAN;
  L.detail << "I(k=2)=" << I2 << " ratio=" << I2 / I1 << " predicted=" << predicted << " lambda0=" << lambda
           << " threshold=" << k2.threshold;
  L.require(I2 < 0.0, "negative integral");
  L.require(std::abs(I2 / I1 / predicted - 1.0) < kCodimRatioTol, "ratio");
  L.require(lambda < k2.threshold, "oracle below threshold");
}

void criterion8(Line& L) {
  const CertificateReport plane = certify("plane");
  const double lambda = plane.oracle ? plane.oracle->extrapolated : NAN;
  const CertificateReport cone = certify("cone");
  L.detail << "plane=" << to_string(plane.verdict) << " lambda0/threshold-1=" << lambda / plane.threshold - 1.0
           << " cone=" << to_string(cone.verdict) << " (" << cone.reason << ")";
  L.require(plane.verdict == Verdict::InapplicableTotallyGeodesic, "plane verdict");
  L.require(gap(lambda, plane.threshold) <= kPlaneDiscretization, "plane oracle");
  L.require(cone.verdict == Verdict::ConditionFailed, "cone verdict");
}

void criterion9(Line& L) {
  const CertificateReport rep = certify("finger");
  const double lambda = rep.oracle ? rep.oracle->extrapolated : NAN;
  const bool has = rep.perturbation.has_value();
  const double qp = has ? rep.perturbation->q_perturbed : NAN;
  const double eps = has ? rep.perturbation->best_epsilon : NAN;
  L.detail << "integral=" << (rep.integral ? rep.integral->value : NAN) << " Q_perturbed=" << qp << " eps=" << eps
           << " verdict=" << to_string(rep.verdict) << " oracle gap=" << 100.0 * gap(lambda, rep.threshold) << "%";
  L.require(has && qp < 0.0, "perturbed Q");
  L.require(gap(lambda, rep.threshold) >= kFingerGap, "oracle gap");
}

void criterion10(Line& L) {
  const RunConfig c = config("catenoid");
  const BaseManifold base = build_base(c);
  const TubeSpec tube = tube_for(base, c.tube.r, c.tube.eps_safety);
  const RadialMode mode = solve_radial_mode(1, 1);
  const OracleOptions opt = oracle_options(c);
  double prev = -INFINITY;
  bool monotone = true, above = true;
  for (double rc : {2.0, 4.0, 8.0}) {
    const double ext = exterior_rayleigh_floor(base, tube, rc, opt);
    const double ess = essential_lower_bound(base, tube, mode, rc).floor;
    L.detail << " rc=" << rc << ": " << ext << " vs " << ess;
    monotone = monotone && ext >= prev;
    above = above && ext >= ess * (1.0 - kFloorSlack);
    prev = ext;
  }
  L.require(monotone, "nondecreasing");
  L.require(above, "above analytic floor");
}

}  // namespace

int main() {
  int failed = 0;
  CertificateReport catenoid;
  const std::vector<std::pair<std::string, std::function<void(Line&)>>> criteria{
      {"radial thresholds", criterion1},
      {"rigidity identity", criterion2},
      {"metric identities", criterion3},
      {"tube invariants", criterion4},
      {"parabolicity", criterion5},
      {"catenoid certificate", [&](Line& L) { criterion6(L, catenoid); }},
      {"codimension consistency", [&](Line& L) { criterion7(L, catenoid); }},
      {"negative controls", criterion8},
      {"equality case", criterion9},
      {"essential floor", criterion10},
  };
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Line L;
    L.detail.precision(10);
    try {
      criteria[i].second(L);
    } catch (const std::exception& e) {
      L.pass = false;
      L.detail << " [exception: " << e.what() << "]";
    }
    if (!L.pass) ++failed;
    std::printf("%s criterion %zu (%s): %s\n", L.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                L.detail.str().c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
