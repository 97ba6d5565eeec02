#include "qtube/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "qtube/error.hpp"

namespace qtube {

using nlohmann::json;

namespace {

// Reads j[key] into out when present; a type mismatch names the field.
template <class T>
void read(const json& j, const char* key, T& out, const std::string& path) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    fail(ErrorKind::ConfigError, "field '" + path + key + "' has the wrong type");
  }
}

void reject_unknown(const json& j, const std::vector<std::string>& keys, const std::string& path) {
  if (!j.is_object()) fail(ErrorKind::ConfigError, "field '" + (path.empty() ? std::string("<root>") : path) + "' must be an object");
  for (const auto& item : j.items())
    if (std::find(keys.begin(), keys.end(), item.key()) == keys.end())
      fail(ErrorKind::ConfigError, "unknown field '" + path + item.key() + "'");
}

void require(bool ok, const std::string& field, const std::string& rule) {
  if (!ok) fail(ErrorKind::ConfigError, "field '" + field + "' " + rule);
}

std::size_t line_of(const std::string& text, std::size_t byte) {
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + std::min(byte, text.size()), '\n'));
}

}  // namespace

json to_json(const RunConfig& c) {
  json family = {{"name", c.family.name}, {"params", c.family.params}};
  if (!c.family.coeffs.empty()) family["coeffs"] = c.family.coeffs;
  return {
      {"family", family},
      {"truncation", c.truncation},
      {"tube", {{"k", c.tube.k}, {"r", c.tube.r}, {"eps_safety", c.tube.eps_safety},
                {"curvature_samples", c.tube.curvature_samples}}},
      {"grids", {{"base_order", c.grids.base_order}, {"fiber_order", c.grids.fiber_order},
                 {"sphere_order", c.grids.sphere_order}, {"invariant_order", c.grids.invariant_order},
                 {"capacity_resolution", c.grids.capacity_resolution},
                 {"identity_samples", c.grids.identity_samples}}},
      {"search", {{"s_grid", c.search.s_grid}, {"R_factors", c.search.R_factors},
                  {"compact_radii", c.search.compact_radii}, {"zero_tolerance", c.search.zero_tolerance},
                  {"bump_amplitude", c.search.bump_amplitude}, {"epsilon_count", c.search.epsilon_count}}},
      {"oracle", {{"enabled", c.oracle.enabled}, {"base_elements", c.oracle.base_elements},
                  {"fiber_elements", c.oracle.fiber_elements}, {"angular_elements", c.oracle.angular_elements},
                  {"levels", c.oracle.levels}, {"truncation", c.oracle.truncation},
                  {"eigen_count", c.oracle.eigen_count}, {"neumann_outer", c.oracle.neumann_outer},
                  {"node_cap", c.oracle.node_cap}}},
      {"p_max", c.p_max},
      {"output_dir", c.output_dir},
      {"seed", c.seed},
      {"threads", c.threads},
  };
}

RunConfig config_from_json(const json& j) {
  RunConfig c;
  reject_unknown(j, {"family", "truncation", "tube", "grids", "search", "oracle", "p_max", "output_dir", "seed", "threads"},
                 "");
  if (j.contains("family")) {
    const json& f = j.at("family");
    reject_unknown(f, {"name", "params", "coeffs"}, "family.");
    read(f, "name", c.family.name, "family.");
    read(f, "params", c.family.params, "family.");
    read(f, "coeffs", c.family.coeffs, "family.");
  }
  read(j, "truncation", c.truncation, "");
  if (j.contains("tube")) {
    const json& t = j.at("tube");
    reject_unknown(t, {"k", "r", "eps_safety", "curvature_samples"}, "tube.");
    read(t, "k", c.tube.k, "tube.");
    read(t, "r", c.tube.r, "tube.");
    read(t, "eps_safety", c.tube.eps_safety, "tube.");
    read(t, "curvature_samples", c.tube.curvature_samples, "tube.");
  }
  if (j.contains("grids")) {
    const json& g = j.at("grids");
    reject_unknown(g, {"base_order", "fiber_order", "sphere_order", "invariant_order", "capacity_resolution",
                       "identity_samples"},
                   "grids.");
    read(g, "base_order", c.grids.base_order, "grids.");
    read(g, "fiber_order", c.grids.fiber_order, "grids.");
    read(g, "sphere_order", c.grids.sphere_order, "grids.");
    read(g, "invariant_order", c.grids.invariant_order, "grids.");
    read(g, "capacity_resolution", c.grids.capacity_resolution, "grids.");
    read(g, "identity_samples", c.grids.identity_samples, "grids.");
  }
  if (j.contains("search")) {
    const json& s = j.at("search");
    reject_unknown(s, {"s_grid", "R_factors", "compact_radii", "zero_tolerance", "bump_amplitude", "epsilon_count"},
                   "search.");
    read(s, "s_grid", c.search.s_grid, "search.");
    read(s, "R_factors", c.search.R_factors, "search.");
    read(s, "compact_radii", c.search.compact_radii, "search.");
    read(s, "zero_tolerance", c.search.zero_tolerance, "search.");
    read(s, "bump_amplitude", c.search.bump_amplitude, "search.");
    read(s, "epsilon_count", c.search.epsilon_count, "search.");
  }
  if (j.contains("oracle")) {
    const json& o = j.at("oracle");
    reject_unknown(o, {"enabled", "base_elements", "fiber_elements", "angular_elements", "levels", "truncation",
                       "eigen_count", "neumann_outer", "node_cap"},
                   "oracle.");
    read(o, "enabled", c.oracle.enabled, "oracle.");
    read(o, "base_elements", c.oracle.base_elements, "oracle.");
    read(o, "fiber_elements", c.oracle.fiber_elements, "oracle.");
    read(o, "angular_elements", c.oracle.angular_elements, "oracle.");
    read(o, "levels", c.oracle.levels, "oracle.");
    read(o, "truncation", c.oracle.truncation, "oracle.");
    read(o, "eigen_count", c.oracle.eigen_count, "oracle.");
    read(o, "neumann_outer", c.oracle.neumann_outer, "oracle.");
    read(o, "node_cap", c.oracle.node_cap, "oracle.");
  }
  read(j, "p_max", c.p_max, "");
  read(j, "output_dir", c.output_dir, "");
  read(j, "seed", c.seed, "");
  read(j, "threads", c.threads, "");
  return c;
}

RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text, nullptr, true, true);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::ConfigError, "syntax error at line " + std::to_string(line_of(text, e.byte)) + ": " + e.what());
  }
  RunConfig c = config_from_json(j);
  validate(c);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::ConfigError, "cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void validate(const RunConfig& c) {
  const auto names = family_names();
  require(std::find(names.begin(), names.end(), c.family.name) != names.end(), "family.name",
          "names an unknown family '" + c.family.name + "'");
  if (c.family.name == "revolution") require(c.family.coeffs.size() >= 2, "family.coeffs", "needs at least two coefficients");
  require(c.truncation > 0.0, "truncation", "must be positive");
  require(c.tube.k >= 1 && c.tube.k <= 4, "tube.k", "must lie in [1, 4]");
  require(c.tube.r > 0.0, "tube.r", "must be positive");
  require(c.tube.eps_safety >= 1.0, "tube.eps_safety", "must be at least 1");
  require(c.tube.curvature_samples >= 10, "tube.curvature_samples", "must be at least 10");
  require(c.grids.base_order >= 2 && c.grids.base_order <= 64, "grids.base_order", "must lie in [2, 64]");
  require(c.grids.fiber_order >= 2 && c.grids.fiber_order <= 64, "grids.fiber_order", "must lie in [2, 64]");
  require(c.grids.sphere_order >= 2 && c.grids.sphere_order <= 64, "grids.sphere_order", "must lie in [2, 64]");
  require(c.grids.invariant_order >= 2 && c.grids.invariant_order <= 64, "grids.invariant_order", "must lie in [2, 64]");
  require(c.grids.capacity_resolution >= 8 && c.grids.capacity_resolution <= 2000, "grids.capacity_resolution",
          "must lie in [8, 2000]");
  require(c.grids.identity_samples >= 1, "grids.identity_samples", "must be positive");
  require(!c.search.s_grid.empty(), "search.s_grid", "must not be empty");
  for (double s : c.search.s_grid) require(s > 0.0, "search.s_grid", "entries must be positive");
  require(!c.search.R_factors.empty(), "search.R_factors", "must not be empty");
  for (double f : c.search.R_factors) require(f > 1.0, "search.R_factors", "entries must exceed 1");
  for (double rc : c.search.compact_radii) require(rc > 0.0, "search.compact_radii", "entries must be positive");
  require(c.search.zero_tolerance >= 0.0, "search.zero_tolerance", "must be non-negative");
  require(c.search.bump_amplitude > 0.0, "search.bump_amplitude", "must be positive");
  require(c.search.epsilon_count >= 2, "search.epsilon_count", "must be at least 2");
  require(c.oracle.base_elements >= 2, "oracle.base_elements", "must be at least 2");
  require(c.oracle.fiber_elements >= 2, "oracle.fiber_elements", "must be at least 2");
  require(c.oracle.angular_elements >= 3, "oracle.angular_elements", "must be at least 3");
  require(c.oracle.levels >= 1 && c.oracle.levels <= 6, "oracle.levels", "must lie in [1, 6]");
  require(c.oracle.truncation >= 0.0, "oracle.truncation", "must be non-negative");
  require(c.oracle.eigen_count >= 1 && c.oracle.eigen_count <= 10, "oracle.eigen_count", "must lie in [1, 10]");
  require(c.oracle.node_cap >= 16, "oracle.node_cap", "must be at least 16");
  require(c.p_max >= 1 && c.p_max <= 4, "p_max", "must lie in [1, 4]");
  require(!c.output_dir.empty(), "output_dir", "must not be empty");
  require(c.threads >= 0, "threads", "must be non-negative");
}

BaseManifold build_base(const RunConfig& c) {
  FamilySpec spec = c.family;
  if (spec.name == "graph" && !spec.params.count("seed")) spec.params["seed"] = static_cast<double>(c.seed);
  return make_base(spec, c.tube.k, c.truncation);
}

OracleOptions oracle_options(const RunConfig& c) {
  OracleOptions o;
  o.base_elements = c.oracle.base_elements;
  o.fiber_elements = c.oracle.fiber_elements;
  o.angular_elements = c.oracle.angular_elements;
  o.levels = c.oracle.levels;
  o.truncation = c.oracle.truncation > 0.0 ? std::min(c.oracle.truncation, c.truncation) : 0.0;
  o.eigen_count = c.oracle.eigen_count;
  o.neumann_outer = c.oracle.neumann_outer;
  o.node_cap = c.oracle.node_cap;
  o.threads = c.threads;
  return o;
}

CertificateOptions certificate_options(const RunConfig& c) {
  CertificateOptions o;
  o.s_grid = c.search.s_grid;
  o.R_factors = c.search.R_factors;
  o.base_order = c.grids.base_order;
  o.fiber_order = c.grids.fiber_order;
  o.sphere_order = c.grids.sphere_order;
  o.zero_tolerance = c.search.zero_tolerance;
  o.bump_amplitude = c.search.bump_amplitude;
  o.epsilon_count = c.search.epsilon_count;
  o.compact_radii = c.search.compact_radii;
  o.run_oracle = c.oracle.enabled;
  o.oracle = oracle_options(c);
  o.threads = c.threads;
  return o;
}

}  // namespace qtube
