// Command-line front end: qtube <subcommand> --config FILE [--out DIR] [--seed N] [--strict]

#include <cmath>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qtube/certificate.hpp"
#include "qtube/config.hpp"
#include "qtube/error.hpp"
#include "qtube/identities.hpp"
#include "qtube/invariants.hpp"
#include "qtube/manifold.hpp"
#include "qtube/oracle.hpp"
#include "qtube/parabolic.hpp"
#include "qtube/radial.hpp"
#include "qtube/report.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace qtube;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitStrict = 4;

class Csv {
 public:
  explicit Csv(std::vector<std::string> header) {
    out_ << std::setprecision(17);
    row_strings(header);
  }
  template <class... T>
  void row(const T&... values) {
    bool first = true;
    ((out_ << (first ? "" : ",") << values, first = false), ...);
    out_ << '\n';
  }
  void row_values(const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << values[i];
    out_ << '\n';
  }
  void write(const fs::path& path) const { std::ofstream(path) << out_.str(); }

 private:
  void row_strings(const std::vector<std::string>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << values[i];
    out_ << '\n';
  }
  std::ostringstream out_;
};

void write_json(const fs::path& path, const json& j) { std::ofstream(path) << j.dump(2) << '\n'; }

struct Context {
  RunConfig config;
  fs::path out;
  bool strict = false;
};

TubeSpec make_tube(const RunConfig& c, const BaseManifold& base) {
  return tube_for(base, c.tube.r, c.tube.eps_safety, c.tube.curvature_samples);
}

// Base points used for pointwise tables.
std::vector<std::pair<double, Vec>> sample_points(const BaseManifold& base, int count) {
  std::vector<std::pair<double, Vec>> pts;
  const double top = std::min(base.truncation, 16.0);
  for (int i = 0; i < count; ++i) {
    const double tau = 0.05 * std::pow(top / 0.05, static_cast<double>(i) / (count - 1));
    if (base.radial) {
      pts.emplace_back(tau, base.radial->chart_point(base.radial->v_at(0, tau)));
    } else {
      Vec x = Vec::Constant(base.n(), tau / std::sqrt(static_cast<double>(base.n())));
      pts.emplace_back(tau, x);
    }
  }
  return pts;
}

int run_identities(const Context& ctx) {
  const RunConfig& c = ctx.config;
  const BaseManifold base = build_base(c);
  const TubeSpec tube = make_tube(c, base);
  const IdentityReport rep = verify_identities(base, tube, c.grids.identity_samples, c.seed);
  Csv csv({"check", "max_defect", "tolerance", "samples", "passed"});
  json checks = json::array();
  for (const auto& chk : rep.checks) {
    csv.row(chk.name, chk.max_defect, chk.tolerance, chk.samples, chk.passed ? 1 : 0);
    checks.push_back({{"check", chk.name}, {"max_defect", chk.max_defect}, {"tolerance", chk.tolerance},
                      {"samples", chk.samples}, {"passed", chk.passed}});
  }
  csv.write(ctx.out / "identities.csv");
  write_json(ctx.out / "identities.json",
             {{"family", rep.family}, {"tube", to_json(tube)}, {"checks", checks}, {"all_passed", rep.all_passed()}});
  std::cout << "verify-identities: " << (rep.all_passed() ? "all checks passed" : "some checks FAILED") << '\n';
  return rep.all_passed() ? kExitOk : kExitNumerical;
}

int run_invariants(const Context& ctx) {
  const RunConfig& c = ctx.config;
  const BaseManifold base = build_base(c);
  const int n = base.n();
  std::vector<std::string> header{"tau"};
  for (int j = 0; j <= n; ++j) header.push_back("K" + std::to_string(j));
  for (int p = 1; 2 * p <= n; ++p) header.push_back("trR" + std::to_string(p));
  Csv csv(header);
  std::vector<FramedPoint> frames;
  for (const auto& [tau, x] : sample_points(base, 24)) {
    const FramedPoint fp = frame_point(*base.chart, x);
    const InvariantRow row = invariant_row(fp, c.grids.invariant_order);
    std::vector<double> values{tau};
    values.insert(values.end(), row.K.begin(), row.K.end());
    values.insert(values.end(), row.trR.begin(), row.trR.end());
    csv.row_values(values);
    frames.push_back(fp);
  }
  csv.write(ctx.out / "invariants.csv");
  json j{{"family", base.spec.name}, {"n", n}, {"k", base.k()}};
  j["curvature_integrals"] = curvature_integrals(base, 0.0, c.grids.invariant_order);
  j["gray"] = json::array();
  for (int p = 1; 2 * p <= n; ++p) {
    try {
      const GrayRatio g = gray_ratio(frames, p, c.grids.invariant_order);
      j["gray"].push_back({{"p", p}, {"mean", g.mean}, {"cv", g.cv}, {"used", g.used},
                           {"prefactor", gray_prefactor(p, base.k())}});
    } catch (const Error& e) {
      j["gray"].push_back({{"p", p}, {"error", e.what()}});
    }
  }
  write_json(ctx.out / "invariants.json", j);
  std::cout << "invariants: " << frames.size() << " sample points written\n";
  return kExitOk;
}

int run_radial(const Context& ctx, int k, int p_max) {
  const RadialMode mode = solve_radial_mode(k, p_max);
  Csv table({"k", "rho", "rho_squared", "p", "mu_2p", "rigidity_integral"});
  for (int p = 1; p <= p_max; ++p) table.row(k, mode.rho, mode.rho * mode.rho, p, mode.mu2p(p), rigidity_integral(mode, p));
  const std::string suffix = "_k" + std::to_string(k);
  table.write(ctx.out / ("radial" + suffix + ".csv"));
  Csv profile({"t", "chi", "dchi"});
  for (int i = 0; i <= 200; ++i) {
    const double t = i / 200.0;
    profile.row(t, mode.chi(t), mode.dchi(t));
  }
  profile.write(ctx.out / ("radial_profile" + suffix + ".csv"));
  std::ostringstream line;
  line << std::setprecision(17) << "radial k=" << k << ": rho = " << mode.rho << ", rho^2 = " << mode.rho * mode.rho;
  std::cout << line.str() << '\n';
  return kExitOk;
}

int run_parabolic(const Context& ctx) {
  const RunConfig& c = ctx.config;
  const BaseManifold base = build_base(c);
  json j{{"family", base.spec.name}};
  const double s = c.search.s_grid.front();
  Csv cap({"s", "R", "energy", "grid_energy", "flat_reference"});
  j["capacity"] = json::array();
  for (double f : {8.0, 32.0, 128.0}) {
    const double R = f * s;
    if (R > base.truncation) break;
    const CapacityPotential pot = capacity_potential(base, s, R);
    double grid = std::nan("");
    if (base.n() == 2 && (base.flat || !base.radial)) {
      CapacityOptions opt;
      opt.force_grid = true;
      opt.grid_resolution = c.grids.capacity_resolution;
      grid = capacity_potential(base, s, R, opt).energy;
    }
    // Flat reference per end: 2 pi / log(R/s).
    const double flat = (base.radial ? base.radial->ends() : 1) * 2.0 * std::numbers::pi / std::log(R / s);
    cap.row(s, R, pot.energy, grid, flat);
    j["capacity"].push_back({{"s", s}, {"R", R}, {"energy", pot.energy}, {"grid_energy", grid}, {"flat_reference", flat}});
  }
  cap.write(ctx.out / "capacity.csv");
  std::vector<double> radii;
  for (int i = 0; i < 16; ++i) radii.push_back(base.truncation * std::pow(0.5, 0.5 * (15 - i)));
  const VolumeGrowth growth = volume_growth_test(base, radii);
  Csv vol({"radius", "volume"});
  for (std::size_t i = 0; i < radii.size(); ++i) vol.row(growth.radius[i], growth.volume[i]);
  vol.write(ctx.out / "volume_growth.csv");
  j["volume_growth"] = to_json(growth);
  if (base.n() == 2 && base.radial) {
    const EndProfile ends = end_profile(base);
    Csv ep({"radius", "end", "area"});
    for (std::size_t e = 0; e < ends.area.size(); ++e)
      for (std::size_t i = 0; i < ends.radius.size(); ++i) ep.row(ends.radius[i], e, ends.area[e][i]);
    ep.write(ctx.out / "end_profile.csv");
    j["end_profile"] = to_json(ends);
  }
  write_json(ctx.out / "parabolic.json", j);
  std::cout << "parabolic: volume growth " << to_string(growth.verdict) << " (alpha = " << growth.alpha << ")\n";
  return kExitOk;
}

int run_certify(const Context& ctx) {
  const RunConfig& c = ctx.config;
  const BaseManifold base = build_base(c);
  const TubeSpec tube = make_tube(c, base);
  const CertificateReport rep = verdict(base, tube, certificate_options(c));
  write_json(ctx.out / "report.json", to_json(rep));
  Csv grid({"s", "R", "Q", "fiber", "horizontal", "cross", "fiber_formula", "capacity_energy", "c1_ratio"});
  for (const auto& q : rep.q_grid)
    grid.row(q.s, q.R, q.value, q.fiber, q.horizontal, q.cross, q.fiber_formula, q.capacity_energy, q.c1_ratio);
  grid.write(ctx.out / "q_grid.csv");
  std::cout << "certify: " << to_string(rep.verdict) << " (" << rep.reason << ")\n";
  if (ctx.strict && rep.verdict == Verdict::ConditionFailed) return kExitStrict;
  return kExitOk;
}

int run_spectrum(const Context& ctx) {
  const RunConfig& c = ctx.config;
  const BaseManifold base = build_base(c);
  const TubeSpec tube = make_tube(c, base);
  const OracleOptions opt = oracle_options(c);
  const SpectrumEstimate est = tube_spectrum(base, tube, opt);
  Csv table({"level", "base_elements", "fiber_elements", "index", "value", "residual"});
  for (std::size_t l = 0; l < est.levels.size(); ++l)
    for (std::size_t i = 0; i < est.levels[l].values.size(); ++i)
      table.row(l, est.levels[l].elements[0], est.levels[l].elements[1], i, est.levels[l].values[i],
                est.levels[l].residuals[i]);
  table.write(ctx.out / "spectrum.csv");

  // Ground state at the coarsest level, on its grid.
  const Assembled asmb = assemble_tube(base, tube, opt, 0);
  const EigenResult res = lowest_eigenpairs(asmb.K, asmb.M, 1);
  Eigen::VectorXd v = res.vectors.front();
  if (v.sum() < 0.0) v = -v;
  Csv ground({"x0", "x1", "value"});
  const int n1 = asmb.shape[1];
  for (std::size_t i = 0; i < asmb.free_nodes.size(); ++i) {
    const int node = asmb.free_nodes[i];
    ground.row(asmb.coordinates[0][node / n1], asmb.coordinates[1][node % n1], v[static_cast<Eigen::Index>(i)]);
  }
  ground.write(ctx.out / "ground_state.csv");

  const double threshold = std::pow(solve_radial_mode(tube.k, 1).rho / tube.r, 2);
  json j{{"family", base.spec.name}, {"tube", to_json(tube)}, {"threshold", threshold}, {"spectrum", to_json(est)},
         {"gap", 1.0 - est.extrapolated / threshold}};
  if (base.radial) {
    const RadialMode mode = solve_radial_mode(tube.k, std::max(1, base.n() / 2));
    Csv floors({"compact_radius", "exterior_rayleigh_floor", "ess_floor"});
    j["floors"] = json::array();
    for (double rc : c.search.compact_radii) {
      const double T = opt.truncation > 0.0 ? opt.truncation : base.truncation;
      if (!(rc < T)) continue;
      const double ext = exterior_rayleigh_floor(base, tube, rc, opt);
      double ess = std::nan("");
      try {
        ess = essential_lower_bound(base, tube, mode, rc).floor;
      } catch (const Error&) {
      }
      floors.row(rc, ext, ess);
      j["floors"].push_back({{"compact_radius", rc}, {"exterior_rayleigh_floor", ext}, {"ess_floor", ess}});
    }
    floors.write(ctx.out / "floors.csv");
  }
  write_json(ctx.out / "spectrum.json", j);
  std::ostringstream line;
  line << std::setprecision(10) << "spectrum: lambda0 = " << est.extrapolated << " (threshold " << threshold << ")";
  std::cout << line.str() << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral certificates for quantum tubes about immersed submanifolds"};
  app.require_subcommand(1);
  std::string config_path, out_dir;
  std::uint64_t seed = 0;
  bool strict = false;
  app.add_option("--config", config_path, "run configuration (commented JSON)");
  app.add_option("--out", out_dir, "output directory (overrides the config)");
  auto* seed_opt = app.add_option("--seed", seed, "random seed (overrides the config)");
  app.add_flag("--strict", strict, "exit with status 4 when a condition fails");
  app.fallthrough();

  int radial_k = 1, radial_p = 2;
  std::vector<std::string> names{"verify-identities", "invariants", "radial", "parabolic", "certify", "spectrum", "all"};
  const std::map<std::string, std::string> help{
      {"verify-identities", "check the tube-metric identities at random Fermi points"},
      {"invariants", "tube curvature invariants K_j along the base, and their integrals"},
      {"radial", "fiber threshold rho and the moments mu_2p"},
      {"parabolic", "capacity energies, volume growth and end profile"},
      {"certify", "run the certificate and write report.json"},
      {"spectrum", "finite-element ground state of the truncated tube"},
      {"all", "every subcommand in turn"}};
  for (const auto& name : names) {
    auto* sub = app.add_subcommand(name, help.at(name));
    if (name == "radial") {
      sub->add_option("--k", radial_k, "fiber dimension")->check(CLI::Range(1, 8));
      sub->add_option("--p-max", radial_p, "largest p for mu_2p")->check(CLI::Range(1, 4));
    }
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }
  const std::string cmd = app.get_subcommands().front()->get_name();

  Context ctx;
  try {
    if (!config_path.empty()) {
      ctx.config = load_config(config_path);
    } else if (cmd != "radial") {
      fail(ErrorKind::ConfigError, "--config is required for '" + cmd + "'");
    }
    if (*seed_opt) ctx.config.seed = seed;
    ctx.out = out_dir.empty() ? fs::path(ctx.config.output_dir) : fs::path(out_dir);
    ctx.strict = strict;
    fs::create_directories(ctx.out);
    if (!config_path.empty()) write_json(ctx.out / "config.json", to_json(ctx.config));
  } catch (const Error& e) {
    std::cerr << e.what() << '\n';
    return kExitConfig;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "ConfigError: " << e.what() << '\n';
    return kExitConfig;
  }

  auto guarded = [&](const std::string& name, auto&& body) {
    try {
      return body();
    } catch (const Error& e) {
      std::cerr << name << ": " << e.what() << '\n';
      write_json(ctx.out / (name + "_error.json"), {{"subcommand", name}, {"kind", to_string(e.kind())}, {"message", e.what()}});
      return e.kind() == ErrorKind::ConfigError ? kExitConfig : kExitNumerical;
    }
  };
  auto dispatch = [&](const std::string& name) {
    if (name == "verify-identities") return guarded(name, [&] { return run_identities(ctx); });
    if (name == "invariants") return guarded(name, [&] { return run_invariants(ctx); });
    if (name == "radial") {
      const int k = config_path.empty() || cmd == "radial" ? radial_k : ctx.config.tube.k;
      const int p = config_path.empty() || cmd == "radial" ? radial_p : ctx.config.p_max;
      return guarded(name, [&] { return run_radial(ctx, k, p); });
    }
    if (name == "parabolic") return guarded(name, [&] { return run_parabolic(ctx); });
    if (name == "certify") return guarded(name, [&] { return run_certify(ctx); });
    return guarded(name, [&] { return run_spectrum(ctx); });
  };
  if (cmd != "all") return dispatch(cmd);
  int worst = kExitOk;
  for (const auto& name : names) {
    if (name == "all") continue;
    if (name == "spectrum" && !ctx.config.oracle.enabled) {
      std::cout << "spectrum: skipped (oracle disabled in the config)\n";
      continue;
    }
    worst = std::max(worst, dispatch(name));
  }
  return worst;
}
