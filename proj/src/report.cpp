#include "qtube/report.hpp"

namespace qtube {

using nlohmann::json;

json to_json(const TubeSpec& t) {
  return {{"k", t.k}, {"r", t.r}, {"eps0", t.eps0}, {"sampled_sup", t.sampled_sup}};
}

json to_json(const RadialMode& m) { return {{"k", m.k}, {"rho", m.rho}, {"mu", m.mu}}; }

json to_json(const SpectrumEstimate& s) {
  json levels = json::array();
  for (const auto& l : s.levels)
    levels.push_back({{"elements", l.elements},
                      {"values", l.values},
                      {"residuals", l.residuals},
                      {"sign_change_fraction", l.sign_change_fraction}});
  return {{"levels", levels},
          {"lambda0", s.lambda0},
          {"extrapolated", s.extrapolated},
          {"observed_order", s.observed_order},
          {"convergence_ratio", s.convergence_ratio}};
}

json to_json(const EssentialFloor& f) {
  return {{"compact_radius", f.compact_radius}, {"exterior_sup", f.exterior_sup}, {"outer_sup", f.outer_sup},
          {"epsilon", f.epsilon},               {"floor", f.floor},               {"threshold", f.threshold}};
}

json to_json(const CertificateIntegral& c) {
  return {{"value", c.value},
          {"half_value", c.half_value},
          {"tail_bound", c.tail_bound},
          {"per_p", c.per_p},
          {"fiber_identity_error", c.fiber_identity_error}};
}

json to_json(const QBreakdown& q) {
  return {{"s", q.s},
          {"R", q.R},
          {"value", q.value},
          {"fiber", q.fiber},
          {"horizontal", q.horizontal},
          {"cross", q.cross},
          {"fiber_formula", q.fiber_formula},
          {"base_energy", q.base_energy},
          {"capacity_energy", q.capacity_energy},
          {"c1_ratio", q.c1_ratio},
          {"mass", q.mass}};
}

json to_json(const PerturbationResult& p) {
  return {{"base_q", to_json(p.base_q)},
          {"end", p.end},
          {"plateau", {p.plateau_lo, p.plateau_hi}},
          {"ramp", p.ramp},
          {"t0", p.t0},
          {"direction", p.direction},
          {"orientation", p.orientation},
          {"coupling_formula", p.coupling_formula},
          {"coupling_quadrature", p.coupling_quadrature},
          {"bump_energy", p.bump_energy},
          {"epsilons", p.epsilons},
          {"values", p.values},
          {"best_epsilon", p.best_epsilon},
          {"q_perturbed", p.q_perturbed},
          {"linear_flip_defect", p.linear_flip_defect}};
}

json to_json(const VolumeGrowth& v) {
  return {{"verdict", to_string(v.verdict)},
          {"alpha", v.alpha},
          {"coefficient", v.coefficient},
          {"radius", v.radius},
          {"volume", v.volume},
          {"partial_integral", v.partial_integral}};
}

json to_json(const EndProfile& e) {
  return {{"radius", e.radius},
          {"area", e.area},
          {"lambda", e.lambda},
          {"total_curvature", e.total_curvature},
          {"euler", e.euler},
          {"condition", e.condition},
          {"condition_holds", e.condition_holds},
          {"cohn_vossen", e.cohn_vossen}};
}

json to_json(const CertificateReport& r) {
  json j;
  j["family"] = r.family;
  j["tube"] = to_json(r.tube);
  j["rho"] = r.rho;
  j["threshold"] = r.threshold;
  j["verdict"] = to_string(r.verdict);
  j["reason"] = r.reason;
  j["sup_shape"] = r.sup_shape;
  j["totally_geodesic"] = r.totally_geodesic;
  j["essential"] = {{"ess_floor", r.ess_floor}, {"floors", json::array()}};
  for (const auto& f : r.floors) j["essential"]["floors"].push_back(to_json(f));
  j["parabolicity"] = {{"verdict", r.parabolic}, {"basis", r.parabolic_basis}, {"abs_curvature", r.abs_curvature}};
  if (r.growth) j["parabolicity"]["volume_growth"] = to_json(*r.growth);
  if (r.ends) j["parabolicity"]["end_profile"] = to_json(*r.ends);
  if (r.integral) j["certificate_integral"] = to_json(*r.integral);
  j["q_grid"] = json::array();
  for (const auto& q : r.q_grid) j["q_grid"].push_back(to_json(q));
  if (r.q) j["q_value"] = to_json(*r.q);
  if (r.perturbation) j["perturbation"] = to_json(*r.perturbation);
  if (r.oracle) {
    j["oracle"] = to_json(*r.oracle);
    j["oracle"]["gap"] = r.oracle_gap;
  }
  j["audit"] = json::array();
  for (const auto& a : r.audit)
    j["audit"].push_back({{"check", a.name}, {"value", a.value}, {"tolerance", a.tolerance}, {"passed", a.passed}});
  j["errors"] = r.errors;
  return j;
}

}  // namespace qtube
