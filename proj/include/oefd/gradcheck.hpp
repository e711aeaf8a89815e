#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "oefd/types.hpp"

namespace oefd {

struct GradCheckCase {
  std::string name;
  Real rel_error = 0.0;  // worst over parameter blocks
  bool passed = false;
};

struct GradCheckReport {
  Real tolerance = 1e-4;
  Real step = 1e-5;
  std::vector<GradCheckCase> cases;

  bool all_passed() const {
    for (const GradCheckCase& c : cases) {
      if (!c.passed) return false;
    }
    return true;
  }
};

// Checks every analytic gradient (identity, age, combined, and the
// end-to-end encoder composition) against the central-difference oracle on
// seeded random configurations spanning m in {1,2,4}, s in {1,32} and
// lambda in {0, 0.01, 1}. corrupt perturbs one analytic gradient and is the
// negative control for the harness itself.
GradCheckReport run_gradient_checks(std::uint64_t seed, bool corrupt = false);

}  // namespace oefd
