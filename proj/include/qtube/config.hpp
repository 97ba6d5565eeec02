#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "qtube/base.hpp"
#include "qtube/certificate.hpp"

namespace qtube {

struct TubeConfig {
  int k = 1;
  double r = 0.5;
  double eps_safety = 1.01;  // eps0 = safety * sampled sup |A|
  int curvature_samples = 400;
};

struct GridConfig {
  int base_order = 8;
  int fiber_order = 16;
  int sphere_order = 12;
  int invariant_order = 16;        // normal-sphere rule for K_j
  int capacity_resolution = 400;   // grid capacity cells per axis
  int identity_samples = 100;      // random Fermi points per identity check
};

struct SearchConfig {
  std::vector<double> s_grid{2.0, 4.0, 8.0};
  std::vector<double> R_factors{8.0, 16.0, 32.0};
  std::vector<double> compact_radii{2.0, 4.0, 8.0, 16.0, 32.0};
  double zero_tolerance = 1e-8;
  double bump_amplitude = 1.0;
  int epsilon_count = 26;
};

struct OracleConfig {
  bool enabled = true;
  int base_elements = 60;
  int fiber_elements = 8;
  int angular_elements = 4;
  int levels = 3;
  double truncation = 12.0;  // geodesic radius of the discretized tube; 0 uses the base truncation
  int eigen_count = 1;
  bool neumann_outer = false;
  std::uint64_t node_cap = 4'000'000;
};

struct RunConfig {
  FamilySpec family;
  double truncation = 64.0;
  TubeConfig tube;
  GridConfig grids;
  SearchConfig search;
  OracleConfig oracle;
  int p_max = 2;
  std::string output_dir = "out";
  std::uint64_t seed = 1;
  int threads = 0;
};

/// Parses a commented JSON document. ConfigError names the line (for syntax
/// errors) or the offending field.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
/// ConfigError on unknown families or out-of-range values.
void validate(const RunConfig& config);

nlohmann::json to_json(const RunConfig& config);
RunConfig config_from_json(const nlohmann::json& j);

BaseManifold build_base(const RunConfig& config);
CertificateOptions certificate_options(const RunConfig& config);
OracleOptions oracle_options(const RunConfig& config);

}  // namespace qtube
