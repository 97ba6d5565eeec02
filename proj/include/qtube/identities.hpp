#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qtube/base.hpp"
#include "qtube/fermi.hpp"

namespace qtube {

struct IdentityCheck {
  std::string name;
  double max_defect = 0.0;
  double tolerance = 0.0;
  int samples = 0;
  bool passed = true;
};

struct IdentityReport {
  std::string family;
  int samples = 0;
  std::vector<IdentityCheck> checks;
  bool all_passed() const;
};

/// Metric identities at random admissible Fermi points (seeded, so repeat runs
/// draw the same points). Base points are drawn within geodesic radius
/// min(truncation, 8) of the centre, fiber points uniformly in the open ball of
/// radius r.
IdentityReport verify_identities(const BaseManifold& base, const TubeSpec& tube, int samples, std::uint64_t seed);

}  // namespace qtube
