#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "shufflelab/linalg.hpp"
#include "shufflelab/rng.hpp"
#include "support/test_support.hpp"

using namespace shufflelab;
namespace ts = shufflelab::testsupport;

TEST_CASE("vector arithmetic") {
  const Vec a{1.0, -2.0, 3.0};
  const Vec b{0.5, 4.0, -1.0};
  CHECK(dot(a, b) == doctest::Approx(-10.5).epsilon(1e-15));
  CHECK(norm2(a) == doctest::Approx(std::sqrt(14.0)).epsilon(1e-15));
  const Vec s = sub(a, b);
  CHECK(s[0] == 0.5);
  CHECK(s[1] == -6.0);
  CHECK(s[2] == 4.0);
  const Vec t = add(a, b);
  CHECK(t[1] == 2.0);
  const Vec r = scale(a, -2.0);
  CHECK(r[2] == -6.0);
}

TEST_CASE("matrix application and combination") {
  Mat m(2, 3);
  m(0, 0) = 1.0;
  m(0, 2) = 2.0;
  m(1, 1) = -1.0;
  const Vec v{1.0, 2.0, 3.0};
  const Vec mv = matvec(m, v);
  REQUIRE(mv.size() == 2);
  CHECK(mv[0] == 7.0);
  CHECK(mv[1] == -2.0);

  const Mat id = Mat::identity(3);
  CHECK(id(0, 0) == 1.0);
  CHECK(id(0, 1) == 0.0);

  Mat a(2, 2), b(2, 2);
  a(0, 0) = 1.0;
  a(1, 1) = 2.0;
  b(0, 1) = 3.0;
  const Mat sum = matadd(a, b);
  CHECK(sum(0, 1) == 3.0);
  CHECK(sum(1, 1) == 2.0);
  const Mat sc = matscale(a, 0.5);
  CHECK(sc(1, 1) == 1.0);
  const Mat comp = matsub_from_identity(a);
  CHECK(comp(0, 0) == 0.0);
  CHECK(comp(1, 1) == -1.0);
  CHECK(max_abs_diff(a, a) == 0.0);
  CHECK(max_abs_diff(a, b) == 3.0);
}

TEST_CASE("rank-one update") {
  Mat m(2, 2);
  add_outer(m, Vec{1.0, -2.0}, 0.5);
  CHECK(m(0, 0) == 0.5);
  CHECK(m(0, 1) == -1.0);
  CHECK(m(1, 0) == -1.0);
  CHECK(m(1, 1) == 2.0);
}

TEST_CASE("orthonormal basis spans the input and drops dependent vectors") {
  const std::vector<Vec> input{{1.0, 1.0, 0.0},
                               {2.0, 2.0, 0.0},  // dependent
                               {1.0, 0.0, 1.0}};
  const std::vector<Vec> basis = orthonormal_basis(input);
  REQUIRE(basis.size() == 2);
  for (const Vec& q : basis) CHECK(norm2(q) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(dot(basis[0], basis[1])) < 1e-14);
  // Each input vector lies in the span.
  for (const Vec& v : input) {
    Vec residual = v;
    for (const Vec& q : basis) residual = sub(residual, scale(q, dot(q, v)));
    CHECK(norm2(residual) < 1e-12 * (1.0 + norm2(v)));
  }
}

TEST_CASE("projector onto a span is symmetric, idempotent, and correct") {
  RandomStream rng(20240817);
  for (int trial = 0; trial < 20; ++trial) {
    RandomStream r = rng.split(static_cast<std::uint64_t>(trial));
    const std::size_t dim = 4;
    std::vector<Vec> gen;
    const int n_gen = ts::uniform_int(r, 1, 3);
    for (int i = 0; i < n_gen; ++i) gen.push_back(ts::random_vec(r, dim));
    const std::vector<Vec> basis = orthonormal_basis(gen);
    const Mat p = projector_onto(basis, dim);

    CHECK(ts::max_abs(matadd(ts::matmul(p, p), matscale(p, -1.0))) < 1e-12);
    CHECK(ts::max_abs(matadd(p, matscale(ts::transpose(p), -1.0))) < 1e-14);
    for (const Vec& v : gen) {
      const Vec pv = matvec(p, v);
      CHECK(norm2(sub(pv, v)) < 1e-12 * (1.0 + norm2(v)));
    }
    // The complement annihilates the span.
    const Mat q = matsub_from_identity(p);
    for (const Vec& v : gen) CHECK(norm2(matvec(q, v)) < 1e-12 * (1.0 + norm2(v)));
  }
}
