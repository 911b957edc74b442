#include <numeric>
#include <random>

#include "cubar/cwcalc.hpp"
#include "cubar/models.hpp"
#include "doctest.h"

using namespace cubar;

namespace {

const RingSpec ZZ = RingSpec::integers();

Presentation Zc(long d, int copies = 1) { return Presentation::from_cyclic(ZZ, std::vector<Int>(static_cast<std::size_t>(copies), Int(d))); }
Presentation Zfree(int r) { return Presentation{ZZ, r, {}}; }

CWHomologyInput homology_of(const char* name) {
  auto src = load_model_source(name);
  if (src.integral_homology) return CWHomologyInput{*src.integral_homology};
  return integral_homology(*src.model, 4);
}

// Sum of H_k over k ≤ n, recomputed by hand.
Presentation partial_sum(const CWHomologyInput& in, int n) {
  Presentation s = Presentation::zero(ZZ);
  for (int k = 0; k <= n; ++k) s = s + in.at(k);
  return s;
}

}  // namespace

TEST_CASE("prediction for the point") {
  CWHomologyInput pt{{Zfree(1)}};
  for (auto [a, b] : {std::pair{5L, 6L}, {2L, 9L}, {-3L, 14L}}) {
    for (int n = 0; n <= 6; ++n) CHECK(cw_predict(pt, a, b, n).group == (n % 2 == 0 ? Zc(11) : Presentation::zero(ZZ)));
  }
  for (int n = 0; n <= 6; ++n) CHECK(cw_predict(pt, 1, -1, n).group == Zfree(1));
}

TEST_CASE("prediction rejects non-coprime weights") {
  CWHomologyInput pt{{Zfree(1)}};
  CHECK_THROWS_AS(cw_predict(pt, 2, 4, 0), InputError);
  CHECK_THROWS_AS(cw_predict(pt, 0, 0, 0), InputError);
  CHECK_THROWS_AS(cw_predict(pt, 3, -3, 1), InputError);
}

TEST_CASE("unit index flags the zero answer") {
  CWHomologyInput s1{{Zfree(1), Zfree(1)}};
  for (auto [a, b] : {std::pair{2L, -1L}, {-3L, 2L}, {1L, 0L}}) {
    auto p = cw_predict(s1, a, b, 3);
    CHECK(p.unit_index);
    CHECK(p.group.is_zero());
  }
  CHECK_FALSE(cw_predict(s1, 1, 1, 3).unit_index);
}

TEST_CASE("integral homology of the built-in models") {
  auto s1 = homology_of("s1");
  CHECK(s1.at(0) == Zfree(1));
  CHECK(s1.at(1) == Zfree(1));
  CHECK(s1.at(2).is_zero());
  auto s2 = homology_of("s2");
  CHECK(s2.at(0) == Zfree(1));
  CHECK(s2.at(1).is_zero());
  CHECK(s2.at(2) == Zfree(1));
  auto d2 = homology_of("d2-pair");
  CHECK(d2.at(0).is_zero());
  CHECK(d2.at(1).is_zero());
  CHECK(d2.at(2) == Zfree(1));
  auto interval = homology_of("interval");
  CHECK(interval.at(0).is_zero());
  CHECK(interval.at(1) == Zfree(1));
}

TEST_CASE("circle with the classical weight") {
  auto s1 = homology_of("s1");
  CHECK(cw_predict(s1, 1, -1, 0).group == Zfree(1));
  for (int n = 1; n <= 5; ++n) CHECK(cw_predict(s1, 1, -1, n).group == Zfree(2));
  CHECK(cw_predict(s1, -1, 1, 3).group == Zfree(2));
}

TEST_CASE("two-sphere with weight (1,4)") {
  auto s2 = homology_of("s2");
  CHECK(cw_predict(s2, 1, 4, 0).group == Zc(5));
  for (int n : {2, 4, 6}) CHECK(cw_predict(s2, 1, 4, n).group == Zc(5, 2));
  for (int n : {1, 3, 5}) CHECK(cw_predict(s2, 1, 4, n).group.is_zero());
}

TEST_CASE("torus and Klein bottle regression fixtures") {
  auto t2 = homology_of("t2");
  REQUIRE(t2.at(1) == Zfree(2));
  CHECK(cw_predict(t2, 1, 2, 0).group == Zc(3));
  CHECK(cw_predict(t2, 1, 2, 1).group == Zc(3, 2));
  CHECK(cw_predict(t2, 1, 2, 2).group == Zc(3, 2));
  CHECK(cw_predict(t2, 1, 2, 3).group == Zc(3, 2));

  auto klein = homology_of("klein");
  // Torsion in H₁ contributes a Tor term to degree 2 with ℤ₂ coefficients.
  CHECK(cw_predict(klein, 1, 1, 1).group == Zc(2, 2));
  CHECK(cw_predict(klein, 1, 1, 2).group == Zc(2, 2));
  CHECK(cw_predict(klein, 1, 2, 2).group == Zc(3));
}

TEST_CASE("classical weight gives cumulative sums") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 40; ++trial) {
    CWHomologyInput in;
    int top = static_cast<int>(rng() % 5);
    for (int k = 0; k <= top; ++k) {
      std::vector<Int> orders;
      for (int i = static_cast<int>(rng() % 3); i > 0; --i) orders.push_back(Int(static_cast<long>(rng() % 7)));
      in.integral_H.push_back(Presentation::from_cyclic(ZZ, orders));
    }
    for (int n = 0; n <= 6; ++n) {
      auto here = cw_predict(in, 1, -1, n).group;
      CHECK(here == partial_sum(in, n));
      if (n >= 1) CHECK(here == cw_predict(in, 1, -1, n - 1).group + in.at(n));
    }
  }
}

TEST_CASE("predictions grow by direct summands two degrees up") {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 40; ++trial) {
    CWHomologyInput in;
    for (int k = 0; k <= 3; ++k) {
      std::vector<Int> orders;
      for (int i = static_cast<int>(rng() % 3); i > 0; --i) orders.push_back(Int(static_cast<long>(rng() % 9)));
      in.integral_H.push_back(Presentation::from_cyclic(ZZ, orders));
    }
    long a, b;
    do {
      a = static_cast<long>(rng() % 19) - 9;
      b = static_cast<long>(rng() % 19) - 9;
    } while (std::gcd(a, b) != 1 || a + b < 2);
    for (int n = 0; n <= 5; ++n) {
      auto lo = cw_predict(in, a, b, n).group, hi = cw_predict(in, a, b, n + 2).group;
      auto step = change_coefficients({in.at(0), in.at(1), in.at(2), in.at(3), in.at(4), in.at(5), in.at(6), in.at(7)},
                                      Int(a + b), n + 2);
      CHECK(hi == lo + step);
    }
  }
}

TEST_CASE("point model: prediction agrees with the raw pipeline") {
  auto point = load_grid_model("point");
  int checked = 0;
  for (long a = -9; a <= 9; ++a)
    for (long b = -9; b <= 9; ++b) {
      if (std::gcd(a, b) != 1) continue;
      auto r = consistency_check(point, a, b, 12);
      CHECK(r.point_model);
      CHECK(r.ok);
      for (const auto& d : r.degrees) CHECK(d.direct.has_value());
      ++checked;
    }
  CHECK(checked > 200);
}

TEST_CASE("consistency report on the circle") {
  auto r = consistency_check(load_grid_model("s1"), 1, -1, 3);
  CHECK_FALSE(r.point_model);
  CHECK(r.ok);
  CHECK(r.degrees[0].predicted == Zfree(1));
  CHECK(r.degrees[2].predicted == Zfree(2));
  CHECK_FALSE(r.degrees[2].direct.has_value());
  auto j = r.to_json();
  CHECK(j["degrees"].size() == 4);
  CHECK(j["degrees"][1]["predicted"]["rank"] == 2);
}

TEST_CASE("homology input parsing") {
  auto in = CWHomologyInput::from_json(nlohmann::ordered_json::parse(R"({"homology":[{"rank":1,"torsion":[]},{"rank":0,"torsion":[2]}]})"));
  CHECK(in.at(1) == Zc(2));
  CHECK(in.at(7).is_zero());
  CHECK_THROWS_AS(CWHomologyInput::from_json(nlohmann::ordered_json::parse(R"({"homology":[{"rank":-1}]})")), InputError);
  CHECK_THROWS_AS(CWHomologyInput::from_json(nlohmann::ordered_json::parse("3")), InputError);
}
