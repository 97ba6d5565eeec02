#include <doctest.h>

#include <string>

#include "qtube/config.hpp"
#include "qtube/error.hpp"

using namespace qtube;

namespace {

std::string config_error(const std::string& text) {
  try {
    (void)parse_config(text);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ConfigError);
    return e.what();
  }
  FAIL("expected ConfigError");
  return {};
}

}  // namespace

TEST_CASE("commented config parses") {
  const RunConfig c = parse_config(R"(
    // catenoid run
    {
      "family": { "name": "catenoid", "params": { "c": 2.0 } },
      "tube": { "k": 2, "r": 0.4 },   /* block comments too */
      "search": { "s_grid": [1, 2] },
      "seed": 9
    })");
  CHECK(c.family.name == "catenoid");
  CHECK(c.family.param("c", 0.0) == 2.0);
  CHECK(c.tube.k == 2);
  CHECK(c.tube.r == 0.4);
  CHECK(c.search.s_grid == std::vector<double>{1, 2});
  CHECK(c.seed == 9);
  CHECK(c.truncation == 64.0);  // default kept
}

TEST_CASE("config survives a JSON round trip") {
  RunConfig c;
  c.family.name = "graph";
  c.family.params = {{"seed", 4}, {"n", 2}};
  c.tube.k = 2;
  c.oracle.levels = 2;
  c.search.compact_radii = {1, 3};
  const RunConfig back = config_from_json(to_json(c));
  CHECK(to_json(back) == to_json(c));
}

TEST_CASE("config errors name the offending field or line") {
  CHECK(config_error(R"({"tube": {"radius": 0.5}})").find("tube.radius") != std::string::npos);
  CHECK(config_error(R"({"tube": {"k": "two"}})").find("tube.k") != std::string::npos);
  CHECK(config_error("{\n\"seed\": 1,\n\"truncation\": }").find("line 3") != std::string::npos);
  CHECK(config_error(R"({"tube": {"r": -1}})").find("tube.r") != std::string::npos);
  CHECK(config_error(R"({"oracle": {"levels": 0}})").find("oracle.levels") != std::string::npos);
  CHECK_THROWS_AS(load_config("/nonexistent/run.json"), Error);
}

TEST_CASE("options follow the config") {
  RunConfig c;
  c.search.s_grid = {3};
  c.oracle.truncation = 100.0;
  c.truncation = 20.0;
  const CertificateOptions o = certificate_options(c);
  CHECK(o.s_grid == std::vector<double>{3});
  CHECK(oracle_options(c).truncation == 20.0);
  c.family.name = "unknown";
  CHECK_THROWS_AS(build_base(c), Error);
}
