#include <doctest.h>

#include "oefd/numerics.hpp"
#include "oefd/random.hpp"

using namespace oefd;

TEST_CASE("matmul basics") {
  Matrix a(2, 2), b(2, 2);
  a << 1, 0, 0, 1;
  b << 1, 2, 3, 4;
  CHECK(matmul(a, b) == b);

  Matrix s1(1, 1), s2(1, 1);
  s1 << 2;
  s2 << 3;
  CHECK(matmul(s1, s2)(0, 0) == 6.0);

  Matrix proj(2, 2), m(2, 2), expected(2, 2);
  proj << 1, 0, 0, 0;
  m << 5, 6, 7, 8;
  expected << 5, 6, 0, 0;
  CHECK(matmul(proj, m) == expected);
}

TEST_CASE("matmul shape error names both shapes") {
  const Matrix a = Matrix::Zero(2, 3);
  const Matrix b = Matrix::Zero(4, 5);
  CHECK_THROWS_WITH_AS(matmul(a, b), doctest::Contains("2x3"), ShapeError);
  try {
    matmul(a, b);
  } catch (const ShapeError& e) {
    CHECK(std::string(e.what()).find("4x5") != std::string::npos);
  }
}

TEST_CASE("row_norms examples") {
  Matrix m(1, 2);
  m << 3, 4;
  CHECK(row_norms(m)[0] == doctest::Approx(5.0).epsilon(1e-15));

  Matrix z(1, 2);
  z << 0, 0;
  CHECK(row_norms(z)[0] == 0.0);

  Matrix eye(2, 2);
  eye << 1, 0, 0, 1;
  const Vector n = row_norms(eye);
  CHECK(n[0] == 1.0);
  CHECK(n[1] == 1.0);
}

TEST_CASE("normalize_rows examples") {
  Matrix m(1, 2);
  m << 3, 4;
  const Matrix u = normalize_rows(m, 1e-12);
  CHECK(u(0, 0) == doctest::Approx(0.6).epsilon(1e-14));
  CHECK(u(0, 1) == doctest::Approx(0.8).epsilon(1e-14));

  Matrix unit(1, 2);
  unit << 1, 0;
  CHECK(normalize_rows(unit, 1e-12) == unit);

  Matrix z(1, 2);
  z << 0, 0;
  CHECK(normalize_rows(z, 1e-12) == z);

  CHECK_THROWS_AS(normalize_rows(m, 0.0), DomainError);
}

TEST_CASE("normalize_rows is idempotent and yields unit norms") {
  RandomSource rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix m = rng.gaussian_matrix(5, 6);
    const Matrix once = normalize_rows(m, 1e-12);
    const Matrix twice = normalize_rows(once, 1e-12);
    CHECK((once - twice).cwiseAbs().maxCoeff() < 1e-12);
    const Vector norms = row_norms(once);
    for (Index r = 0; r < norms.size(); ++r) CHECK(std::abs(norms[r] - 1.0) < 1e-12);
  }
}

TEST_CASE("matmul associativity on random chains") {
  RandomSource rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix a = rng.gaussian_matrix(4, 6);
    const Matrix b = rng.gaussian_matrix(6, 3);
    const Matrix c = rng.gaussian_matrix(3, 5);
    const Matrix left = matmul(matmul(a, b), c);
    const Matrix right = matmul(a, matmul(b, c));
    const Real rel = (left - right).norm() / std::max(left.norm(), 1e-30);
    CHECK(rel < 1e-9);
  }
}

TEST_CASE("finite differences on simple functions") {
  const auto square = [](const Vector& x) { return x[0] * x[0]; };
  Vector x(1);
  x << 3.0;
  CHECK(finite_difference_gradient(square, x, 1e-5)[0] == doctest::Approx(6.0).epsilon(1e-9));
  CHECK(finite_difference_gradient(square, x, 1e-3)[0] == doctest::Approx(6.0).epsilon(1e-9));

  const auto constant = [](const Vector&) { return 42.0; };
  Vector x3 = Vector::Zero(3);
  CHECK(finite_difference_gradient(constant, x3, 1e-5).cwiseAbs().maxCoeff() == 0.0);

  const auto total = [](const Vector& v) { return v.sum(); };
  const Vector g = finite_difference_gradient(total, x3, 1e-5);
  for (Index i = 0; i < g.size(); ++i) CHECK(g[i] == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("finite differences match analytic derivatives of quadratics") {
  RandomSource rng(13);
  for (int trial = 0; trial < 10; ++trial) {
    const Index n = 4;
    const Matrix a = rng.gaussian_matrix(n, n);
    const Vector b = rng.gaussian_vector(n);
    const Real c = rng.next_gaussian();
    const auto quad = [&](const Vector& v) {
      return (v.transpose() * a * v).value() + b.dot(v) + c;
    };
    const Vector x = rng.gaussian_vector(n);
    const Vector analytic = (a + a.transpose()) * x + b;
    const Vector numeric = finite_difference_gradient(quad, x, 1e-4);
    CHECK((analytic - numeric).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("finite differences reject non-finite evaluations") {
  const auto bad = [](const Vector& v) { return std::log(v[0]); };
  Vector x(1);
  x << 0.0;  // log evaluates to -inf at the negative probe
  CHECK_THROWS_AS(finite_difference_gradient(bad, x, 1e-5), NumericalError);
}

TEST_CASE("random source is reproducible and splittable") {
  RandomSource a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

  RandomSource c(42);
  RandomSource s0 = c.split(0), s1 = c.split(1);
  bool differ = false;
  for (int i = 0; i < 10; ++i) {
    if (s0.next_u64() != s1.next_u64()) differ = true;
  }
  CHECK(differ);

  RandomSource d(42);
  d.next_u64();
  d.next_u64();
  RandomSource resumed = RandomSource::restore(d.seed(), d.stream(), d.counter());
  CHECK(resumed.next_u64() == d.next_u64());
}

TEST_CASE("random doubles live in [0,1) and gaussians are centered") {
  RandomSource rng(3);
  Real sum = 0.0;
  for (int i = 0; i < 2000; ++i) {
    const Real u = rng.next_double();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    sum += rng.next_gaussian();
  }
  CHECK(std::abs(sum / 2000.0) < 0.1);
}

TEST_CASE("seeded shuffle is deterministic") {
  std::vector<int> v1{1, 2, 3, 4, 5, 6, 7, 8};
  std::vector<int> v2 = v1;
  RandomSource a(9), b(9);
  a.shuffle(v1);
  b.shuffle(v2);
  CHECK(v1 == v2);
}
