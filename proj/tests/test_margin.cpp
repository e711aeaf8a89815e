#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oefd/margin.hpp"
#include "oefd/numerics.hpp"

using namespace oefd;
using std::numbers::pi;

TEST_CASE("segment_index examples and boundaries") {
  CHECK(segment_index(0.0, 4) == 0);
  CHECK(segment_index(pi, 4) == 3);  // clamped to m-1
  CHECK(segment_index(pi / 2, 4) == 2);
  CHECK(segment_index(pi / 8, 4) == 0);
  CHECK(segment_index(0.6, 1) == 0);

  CHECK_THROWS_AS(segment_index(-0.1, 4), DomainError);
  CHECK_THROWS_AS(segment_index(pi + 0.1, 4), DomainError);
  CHECK_THROWS_AS(segment_index(0.5, 0), DomainError);
}

TEST_CASE("psi at the reference points") {
  CHECK(psi(0.0, 4) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(psi(pi / 8, 4)) < 1e-12);          // cos(pi/2), k = 0
  CHECK(psi(pi / 2, 4) == doctest::Approx(-3.0).epsilon(1e-15));  // (-1)^2 cos(2pi) - 4
  CHECK(psi(pi, 4) == doctest::Approx(-7.0).epsilon(1e-15));      // 1 - 2m
}

TEST_CASE("psi equals cosine for m = 1") {
  for (int i = 0; i <= 1000; ++i) {
    const Real theta = pi * static_cast<Real>(i) / 1000.0;
    CHECK(psi(theta, 1) == doctest::Approx(std::cos(theta)).epsilon(1e-15));
  }
}

TEST_CASE("psi is continuous at interior segment boundaries") {
  for (const int m : {2, 3, 4, 8}) {
    for (int k = 1; k < m; ++k) {
      const Real theta = static_cast<Real>(k) * pi / static_cast<Real>(m);
      const Real expected = 1.0 - 2.0 * static_cast<Real>(k);
      const Real left = ((k - 1) % 2 == 0 ? 1.0 : -1.0) * std::cos(m * theta) - 2.0 * (k - 1);
      const Real right = (k % 2 == 0 ? 1.0 : -1.0) * std::cos(m * theta) - 2.0 * k;
      CHECK(std::abs(left - expected) < 1e-12);
      CHECK(std::abs(right - expected) < 1e-12);
      CHECK(std::abs(psi(theta, m) - expected) < 1e-12);
    }
  }
}

TEST_CASE("psi decreases strictly on a 10000-point grid") {
  for (const int m : {2, 4}) {
    Real prev = psi(0.0, m);
    for (int i = 1; i < 10000; ++i) {
      const Real theta = pi * static_cast<Real>(i) / 9999.0;
      const Real value = psi(theta, m);
      CHECK(value < prev);
      prev = value;
    }
  }
}

TEST_CASE("psi is bounded by cosine with equality only at zero") {
  for (const int m : {2, 4}) {
    CHECK(psi(0.0, m) == doctest::Approx(1.0).epsilon(1e-15));
    for (int i = 1; i < 5000; ++i) {
      const Real theta = pi * static_cast<Real>(i) / 4999.0;
      CHECK(psi(theta, m) < std::cos(theta));
    }
  }
}

TEST_CASE("psi_cos_slope matches finite differences of psi(acos(c))") {
  for (const int m : {1, 2, 4}) {
    for (const Real c : {-0.95, -0.4, 0.05, 0.3, 0.85}) {
      const auto f = [m](const Vector& v) { return psi(std::acos(v[0]), m); };
      Vector x(1);
      x << c;
      const Real numeric = finite_difference_gradient(f, x, 1e-6)[0];
      CHECK(psi_cos_slope(c, m) == doctest::Approx(numeric).epsilon(1e-5));
    }
  }
}

TEST_CASE("psi slope is nonnegative in cosine") {
  for (const int m : {1, 2, 4, 6}) {
    for (int i = 0; i <= 200; ++i) {
      const Real c = -0.999 + 1.998 * static_cast<Real>(i) / 200.0;
      CHECK(psi_cos_slope(c, m) >= 0.0);
    }
  }
}

TEST_CASE("angular margin config validation") {
  AngularMarginConfig cfg;
  cfg.validate();  // defaults m=4, s=32 are valid

  cfg.margin = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.margin = 4;
  cfg.scale = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.scale = 32.0;
  cfg.anneal_weight = -1.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.anneal_weight = 5.0;
  cfg.anneal_decay = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("auto anneal decay reaches a tenth of the start after 80 percent") {
  const std::int64_t total = 1000;
  const Real decay = auto_anneal_decay(total);
  CHECK(decay > 0.0);
  CHECK(decay < 1.0);
  const Real after = 5.0 * std::pow(decay, 0.8 * static_cast<Real>(total));
  CHECK(after == doctest::Approx(0.1).epsilon(1e-9));
}

TEST_CASE("psi works for float instantiations") {
  CHECK(psi(0.0f, 4) == doctest::Approx(1.0f));
  CHECK(segment_index(1.0f, 4) == segment_index(1.0, 4));
}
