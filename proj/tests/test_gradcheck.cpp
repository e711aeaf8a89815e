#include <doctest.h>

#include "oefd/gradcheck.hpp"

using namespace oefd;

TEST_CASE("gradient check matrix passes on every configuration") {
  const GradCheckReport report = run_gradient_checks(2024);
  CHECK(report.cases.size() >= 20);
  CHECK(report.tolerance == 1e-4);
  CHECK(report.step == 1e-5);
  for (const GradCheckCase& c : report.cases) {
    INFO(c.name, " rel_error=", c.rel_error);
    CHECK(c.passed);
    CHECK(c.rel_error < 1e-4);
  }
  CHECK(report.all_passed());
}

TEST_CASE("a corrupted gradient is caught (negative control)") {
  const GradCheckReport report = run_gradient_checks(2024, /*corrupt=*/true);
  CHECK_FALSE(report.all_passed());
}

TEST_CASE("the matrix spans the required hyperparameters") {
  const GradCheckReport report = run_gradient_checks(7);
  int m1 = 0, m2 = 0, m4 = 0, s1 = 0, s32 = 0, l0 = 0, l001 = 0, l1 = 0, encoder = 0;
  for (const GradCheckCase& c : report.cases) {
    if (c.name.find("m=1") != std::string::npos) ++m1;
    if (c.name.find("m=2") != std::string::npos) ++m2;
    if (c.name.find("m=4") != std::string::npos) ++m4;
    if (c.name.find("s=1 ") != std::string::npos || c.name.ends_with("s=1")) ++s1;
    if (c.name.find("s=32") != std::string::npos) ++s32;
    if (c.name.find("lambda=0.01") != std::string::npos) ++l001;
    else if (c.name.find("lambda=0") != std::string::npos) ++l0;
    if (c.name.find("lambda=1") != std::string::npos) ++l1;
    if (c.name.find("encoder") != std::string::npos) ++encoder;
  }
  CHECK(m1 > 0);
  CHECK(m2 > 0);
  CHECK(m4 > 0);
  CHECK(s1 > 0);
  CHECK(s32 > 0);
  CHECK(l0 > 0);
  CHECK(l001 > 0);
  CHECK(l1 > 0);
  CHECK(encoder >= 4);
}
