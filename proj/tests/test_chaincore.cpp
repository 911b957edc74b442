#include <random>

#include "cubar/chaincore.hpp"
#include "doctest.h"

using namespace cubar;

namespace {

const RingSpec ZZ = RingSpec::integers();

CubeExpr random_base(std::mt19937_64& rng, int n, int d, long N) {
  std::uniform_int_distribution<int> val(-5, 5);
  std::size_t pts = 1;
  for (int k = 0; k < n; ++k) pts *= static_cast<std::size_t>(N + 1);
  std::vector<Rat> v;
  for (std::size_t i = 0; i < pts * d; ++i) v.push_back(rat(val(rng), 2));
  return CubeExpr::base(BaseTable(n, d, N, v));
}

WeightVector random_weight(std::mt19937_64& rng, int L) {
  std::vector<Rat> m;
  for (int i = 0; i <= L; ++i) m.push_back(static_cast<long>(rng() % 11) - 5);
  return WeightVector(ZZ, m);
}

}  // namespace

TEST_CASE("boundary of the identity square with four slices") {
  auto T = CubeExpr::identity(2);
  auto w = WeightVector::ints(ZZ, {9, 1, 4, -3});
  auto d = boundary(CubeChain::of(ZZ, T), w);
  CHECK(d.degree() == 1);
  CHECK(d.size() == 8);
  for (int i = 0; i <= 3; ++i) {
    CHECK(d.coeff(CubeExpr::face(T, 3, i, 1)) == w[i]);
    CHECK(d.coeff(CubeExpr::face(T, 3, i, 2)) == -w[i]);
  }
}

TEST_CASE("boundary of the unit interval with alternating weight") {
  auto T = CubeExpr::identity(1);
  auto d = boundary(CubeChain::of(ZZ, T), WeightVector::ints(ZZ, {1, -1}));
  CubeChain expect(ZZ, 0);
  expect.add(CubeExpr::face(T, 1, 0, 1), 1);
  expect.add(CubeExpr::face(T, 1, 1, 1), -1);
  CHECK(d == expect);
  CHECK(boundary(CubeChain(ZZ, 2), WeightVector::ints(ZZ, {1, -1})).is_zero());
  CHECK(boundary(CubeChain::of(ZZ, CubeExpr::constant(0, {rat(1, 2)})), WeightVector::ints(ZZ, {3, 4})).is_zero());
  CHECK_THROWS(boundary(CubeChain::of(ZZ, T), WeightVector::ints(RingSpec::mod(5), {1, 1})));
}

TEST_CASE("affine cells have 2n boundary terms before cancellation") {
  for (int n = 1; n <= 4; ++n) {
    std::vector<Rat> lo(n + 1, Rat(0)), hi(n + 1, Rat(1));
    hi[n] = 0;
    auto T = CubeExpr::affine_cell(lo, hi);
    CHECK(boundary_terms(T, WeightVector::ints(ZZ, {1, -1})).size() == static_cast<std::size_t>(2 * n));
  }
}

TEST_CASE("boundary squared certificate counts and pairs every term") {
  auto c = verify_dd_zero(CubeExpr::identity(3), WeightVector::ints(ZZ, {1, 1, 1}));
  CHECK(c.ok);
  CHECK(c.terms == 54);
  CHECK(c.structural == 54);
  auto v = verify_dd_zero(CubeExpr::identity(1), WeightVector::ints(ZZ, {2, 7}));
  CHECK(v.ok);
  CHECK(v.terms == 0);
  std::mt19937_64 rng(1);
  auto r = verify_dd_zero(random_base(rng, 3, 2, 2), WeightVector::ints(ZZ, {9, 1, 4, -3}));
  CHECK(r.ok);
  CHECK(r.terms == 3 * 2 * 16);
}

TEST_CASE("boundary squared vanishes on random generators") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 60; ++trial) {
    int n = 1 + static_cast<int>(rng() % 5);
    int L = 1 + static_cast<int>(rng() % 4);
    auto T = random_base(rng, n, 1 + static_cast<int>(rng() % 2), 1 + static_cast<long>(rng() % 2));
    auto w = random_weight(rng, L);
    auto c = verify_dd_zero(T, w, trial % 2 ? Exec::Serial : Exec::Parallel);
    CHECK(c.ok);
    CHECK(c.terms == static_cast<long>(n) * (n - 1) * (L + 1) * (L + 1));
    auto u = CubeChain::of(ZZ, T);
    CHECK(boundary(boundary(u, w), w).is_zero());
  }
}

TEST_CASE("parallel and serial boundary agree") {
  std::mt19937_64 rng(77);
  auto w = WeightVector::ints(ZZ, {2, -1, 3});
  CubeChain u(ZZ, 3);
  for (int t = 0; t < 12; ++t) u.add(random_base(rng, 3, 2, 1), static_cast<long>(rng() % 7) - 3);
  CHECK(boundary(u, w, Exec::Parallel) == boundary(u, w, Exec::Serial));
}

TEST_CASE("boundary is linear") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    auto w = random_weight(rng, 2);
    auto u = CubeChain::of(ZZ, random_base(rng, 2, 2, 1));
    auto v = CubeChain::of(ZZ, random_base(rng, 2, 2, 1));
    Rat r = static_cast<long>(rng() % 9) - 4, s = static_cast<long>(rng() % 9) - 4;
    auto lhs = boundary(u.scaled(r) + v.scaled(s), w);
    auto rhs = boundary(u, w).scaled(r) + boundary(v, w).scaled(s);
    CHECK(lhs == rhs);
  }
}

TEST_CASE("coefficients reduce in the ring and cancel to zero") {
  auto Z5 = RingSpec::mod(5);
  auto T = CubeExpr::identity(1);
  CubeChain u(Z5, 1);
  u.add(T, 7);
  CHECK(u.coeff(T).value() == 2);
  u.add(T, 3);
  CHECK(u.is_zero());
}

TEST_CASE("pushforward is functorial") {
  std::mt19937_64 rng(4);
  auto T = random_base(rng, 2, 2, 2);
  auto u = CubeChain::of(ZZ, T);
  CHECK(pushforward(AffineMap::identity(2), u) == u);
  auto c = pushforward(AffineMap::constant(2, {rat(1, 3), 2}), u);
  CHECK(c.size() == 1);
  CHECK(c.coeff(CubeExpr::constant(2, {rat(1, 3), 2})).value() == 1);
  RatMatrix A(2, 2), B(3, 2);
  A(0, 0) = 2; A(0, 1) = 1; A(1, 1) = -1;
  B(0, 0) = 1; B(1, 1) = 3; B(2, 0) = 1; B(2, 1) = 1;
  AffineMap g{A, {1, 0}}, f{B, {0, rat(1, 2), 0}};
  CHECK(pushforward(f.after(g), u) == pushforward(f, pushforward(g, u)));
  auto w = WeightVector::ints(ZZ, {9, 1, 4, -3});
  CHECK(pushforward(f, boundary(u, w)) == boundary(pushforward(f, u), w));
}

TEST_CASE("relative reduction respects the quotient") {
  auto T = CubeExpr::identity(1);
  auto S = CubeExpr::constant(1, {0});
  auto in_A = [&](const CubeExpr& g) { return g == canonical(S); };
  auto none = [](const CubeExpr&) { return false; };
  auto a = CubeChain::of(ZZ, S, 3);
  CHECK(relative_reduce<CubeExpr>(a, in_A).rep.is_zero());
  auto u = CubeChain::of(ZZ, T, 2);
  CHECK(relative_reduce<CubeExpr>(u, none).rep == u);
  CHECK(relative_reduce<CubeExpr>(u + a, in_A) == relative_reduce<CubeExpr>(u, in_A));
}

TEST_CASE("chain json lists generators with string coefficients") {
  auto u = CubeChain::of(ZZ, CubeExpr::identity(1), -4);
  auto j = u.to_json();
  CHECK(j["degree"] == 1);
  CHECK(j["terms"][0]["coeff"] == "-4");
  CHECK(j["terms"][0]["gen"]["node"] == "base");
}
