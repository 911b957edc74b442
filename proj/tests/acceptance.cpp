// Acceptance run: one line per criterion, with its wall-clock limit.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "cubar/cwcalc.hpp"
#include "cubar/gridmodel.hpp"
#include "cubar/homotopylab.hpp"
#include "cubar/models.hpp"
#include "cubar/reduce.hpp"
#include "cubar/suites.hpp"

using namespace cubar;

namespace {

const RingSpec ZZ = RingSpec::integers();

struct Outcome {
  bool ok = true;
  std::string detail;
};

Presentation quotient_by_sigma(const WeightVector& w) {
  return Presentation::from_cyclic(ZZ, {abs(index(w).value().get_num())});
}

// Weights hitting σ ∈ {0, ±1, 2, 5, 11} first, then random ones.
std::vector<WeightVector> point_weights() {
  std::vector<WeightVector> ws = {
      WeightVector::ints(ZZ, {1, -1}), WeightVector::ints(ZZ, {1, 0}),   WeightVector::ints(ZZ, {2, -3}),
      WeightVector::ints(ZZ, {1, 1}),  WeightVector::ints(ZZ, {1, 4}),   WeightVector::ints(ZZ, {5, 6}),
      WeightVector::ints(ZZ, {3, -7, 4}), WeightVector::ints(ZZ, {2, 2, 1, -4}),
  };
  std::mt19937_64 rng(2024);
  while (ws.size() < 30) {
    int L = 1 + static_cast<int>(rng() % 3);
    std::vector<Rat> m;
    for (int i = 0; i <= L; ++i) m.push_back(static_cast<long>(rng() % 15) - 7);
    ws.emplace_back(ZZ, m);
  }
  return ws;
}

Outcome point_raw() {
  for (const auto& w : point_weights()) {
    auto closed = point_theory_table(w, 12, PointVariant::raw());
    auto matrices = point_theory_matrices(w, 12, PointVariant::raw());
    for (int n = 0; n <= 12; ++n) {
      const bool zero_sigma = index(w).value() == 0;
      Presentation want = n % 2 == 0 ? quotient_by_sigma(w) : (zero_sigma ? Presentation{ZZ, 1, {}} : Presentation::zero(ZZ));
      if (closed[n] != want || matrices[n] != want)
        return {false, "weight " + w.str() + " degree " + std::to_string(n) + ": matrices " + matrices[n].str()};
    }
  }
  return {true, "30 weights, degrees 0..12"};
}

Outcome point_normalized() {
  for (const auto& w : point_weights()) {
    auto h = point_theory_matrices(w, 12, PointVariant::normalized());
    if (h[0] != quotient_by_sigma(w)) return {false, "weight " + w.str() + " degree 0: " + h[0].str()};
    for (int n = 1; n <= 12; ++n)
      if (!h[n].is_zero()) return {false, "weight " + w.str() + " degree " + std::to_string(n) + ": " + h[n].str()};
  }
  return {true, "30 weights, degrees 0..12"};
}

Outcome beta_tables() {
  const auto w = WeightVector::ints(ZZ, {1, 4});
  const Presentation z5 = Presentation::from_cyclic(ZZ, {Int(5)});
  for (int beta : {7, 8}) {
    auto h = point_theory_matrices(w, 15, PointVariant::truncated(beta));
    for (int n = 0; n <= 15; ++n) {
      Presentation want = Presentation::zero(ZZ);
      if (n == 0 || (n > beta && n % 2 == 0) || (n == beta && beta % 2 == 0)) want = z5;
      if (n == beta && beta % 2 == 1) want = Presentation{ZZ, 1, {}};
      if (h[n] != want)
        return {false, "beta " + std::to_string(beta) + " degree " + std::to_string(n) + ": " + h[n].str()};
    }
  }
  return {true, "beta 7 and 8, degrees 0..15"};
}

Outcome suite(const std::string& name, long min_cases) {
  SuiteReport r = run_suite(name, SuiteOptions{});
  std::string detail = std::to_string(r.passed) + "/" + std::to_string(r.cases) + " cases";
  return {r.ok && r.cases >= min_cases && r.passed == r.cases, detail};
}

Outcome identities_sd() {
  Outcome a = suite("lemma3", 50), b = suite("eq7", 20);
  return {a.ok && b.ok, "naturality " + a.detail + ", homotopy with mirror " + b.detail};
}

Outcome sd_expansions() {
  auto T1 = CubeExpr::identity(1);
  CubeChain one(ZZ, 1);
  one.add(CubeExpr::clamped(T1, rat(1, 3), {0}, {1}), -1);
  one.add(CubeExpr::clamped(T1, rat(1, 3), {2}, {-1}), 1);
  one.add(CubeExpr::clamped(T1, rat(1, 3), {2}, {1}), -1);

  auto T2 = CubeExpr::identity(2);
  struct Term {
    std::vector<Rat> e, v;
    long c;
  };
  const Term listed[] = {
      {{0, 0}, {1, 1}, -1},  {{2, 0}, {1, 1}, -1},  {{2, 0}, {-1, 1}, 1},
      {{0, 2}, {1, 1}, -1},  {{0, 2}, {1, -1}, 1},  {{2, 2}, {-1, 1}, 1},
      {{2, 2}, {1, 1}, -1},  {{2, 2}, {1, -1}, 1},  {{2, 2}, {-1, -1}, -1},
  };
  CubeChain two(ZZ, 2);
  for (const auto& t : listed) two.add(CubeExpr::clamped(T2, rat(1, 3), t.e, t.v), t.c);

  auto s1 = subdivide(ZZ, T1), s2 = subdivide(ZZ, T2);
  if (s1 != one) return {false, "interval expansion differs"};
  if (s2 != two) return {false, "square expansion differs"};
  return {true, "3 and 9 terms"};
}

Outcome les() {
  SuiteReport r = run_suite("les", SuiteOptions{});
  std::set<std::string> seen;
  for (const auto& run : r.details["runs"]) seen.insert(run["model"].get<std::string>() + " " + run["weight"].get<std::string>());
  bool covered = seen.count("interval (1,-1)") && seen.count("interval (2,3)") && seen.count("d2-pair (1,-1)") &&
                 seen.count("d2-pair (2,3)");
  return {r.ok && covered, std::to_string(r.passed) + "/" + std::to_string(r.cases) + " pairs exact"};
}

// ---------------------------------------------------------------- classical cubical oracle
// Elementary cubes are products of [k, k] and [k, k+1]; ∂ alternates over the nondegenerate factors.

struct Elementary {
  std::vector<long> lo;
  std::vector<bool> wide;
  int dim() const { return static_cast<int>(std::count(wide.begin(), wide.end(), true)); }
  auto key() const { return std::pair(lo, wide); }
  bool operator<(const Elementary& o) const { return key() < o.key(); }
};

std::vector<Presentation> classical_homology(const GridModel& K, int n_max) {
  std::vector<std::set<Elementary>> cubes(static_cast<std::size_t>(K.dim + 1));
  std::function<void(const Elementary&)> insert = [&](const Elementary& q) {
    if (!cubes[static_cast<std::size_t>(q.dim())].insert(q).second) return;
    for (std::size_t k = 0; k < q.wide.size(); ++k) {
      if (!q.wide[k]) continue;
      for (long shift : {0L, 1L}) {
        Elementary f = q;
        f.wide[k] = false;
        f.lo[k] += shift;
        insert(f);
      }
    }
  };
  for (const auto& c : K.top_cells) {
    Elementary q{c.base, {}};
    for (int e : c.extent) q.wide.push_back(e == 1);
    insert(q);
  }
  auto index_in = [&](int n) {
    std::map<Elementary, int> idx;
    if (n < 0 || n > K.dim) return idx;
    for (const auto& q : cubes[static_cast<std::size_t>(n)]) idx.emplace(q, static_cast<int>(idx.size()));
    return idx;
  };
  auto boundary = [&](int n) {
    auto rows = index_in(n - 1), cols = index_in(n);
    IntMatrix d(static_cast<int>(rows.size()), static_cast<int>(cols.size()));
    for (const auto& [q, j] : cols) {
      int sign = 1;
      for (std::size_t k = 0; k < q.wide.size(); ++k) {
        if (!q.wide[k]) continue;
        Elementary hi = q, lo = q;
        hi.wide[k] = lo.wide[k] = false;
        hi.lo[k] += 1;
        d(rows.at(hi), j) += sign;
        d(rows.at(lo), j) -= sign;
        sign = -sign;
      }
    }
    return d;
  };
  std::vector<Presentation> H;
  for (int n = 0; n <= n_max; ++n) H.push_back(homology_integral(boundary(n), boundary(n + 1)));
  return H;
}

Outcome classical_recovery() {
  const auto w = WeightVector::ints(ZZ, {1, -1});
  const Presentation Z1{ZZ, 1, {}}, Z2{ZZ, 2, {}}, zero = Presentation::zero(ZZ);
  const std::map<std::string, std::vector<Presentation>> known = {
      {"s1", {Z1, Z1, zero, zero}}, {"s2", {Z1, zero, Z1, zero}}, {"t2", {Z1, Z2, Z1, zero}}};
  std::string detail;
  for (const auto& [name, space] : known) {
    GridModel K = load_grid_model(name);
    auto ours = presented_homology(gamma_boundary_matrices(closure_generate(K, 1), w), 3);
    auto oracle = classical_homology(K, 3);
    for (int n = 0; n <= 3; ++n) {
      if (ours[n] != oracle[n] || oracle[n] != space[n])
        return {false, name + " degree " + std::to_string(n) + ": normalized " + ours[n].str() + ", oracle " + oracle[n].str()};
    }
    detail += (detail.empty() ? "" : ", ") + name;
  }
  return {true, detail + " in degrees 0..3"};
}

Outcome two_pipelines() {
  auto point = load_grid_model("point");
  int weights = 0;
  for (long a = -9; a <= 9; ++a)
    for (long b = -9; b <= 9; ++b) {
      if (std::gcd(a, b) != 1) continue;
      try {
        if (!consistency_check(point, a, b, 12).ok) return {false, "weight (" + std::to_string(a) + "," + std::to_string(b) + ")"};
      } catch (const std::logic_error& e) {
        return {false, e.what()};
      }
      ++weights;
    }
  return {true, std::to_string(weights) + " coprime weights, degrees 0..12"};
}

Outcome smith_forms() {
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<long> entry(-50, 50);
  for (int t = 0; t < 100; ++t) {
    int r = 1 + static_cast<int>(rng() % 30), c = 1 + static_cast<int>(rng() % 30);
    IntMatrix M(r, c);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) M(i, j) = entry(rng);
    SmithForm s = smith_normal_form(M);
    if (s.U * M * s.V != s.D) return {false, "U·M·V != D on trial " + std::to_string(t)};
    if (abs(determinant(s.U)) != 1 || abs(determinant(s.V)) != 1) return {false, "non-unimodular factor on trial " + std::to_string(t)};
    if (s.U * s.Uinv != IntMatrix::identity(r)) return {false, "U·Uinv != I on trial " + std::to_string(t)};
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) {
        if (i != j && s.D(i, j) != 0) return {false, "off-diagonal entry on trial " + std::to_string(t)};
      }
    for (std::size_t k = 0; k + 1 < s.diagonal.size(); ++k)
      if (!mpz_divisible_p(s.diagonal[k + 1].get_mpz_t(), s.diagonal[k].get_mpz_t()))
        return {false, "divisibility chain broken on trial " + std::to_string(t)};
  }
  return {true, "100 matrices up to 30x30"};
}

struct Criterion {
  int id;
  const char* name;
  double limit_s;  // ≤ 0: no limit
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "raw point tables", 1, point_raw},
      {2, "normalized point", 1, point_normalized},
      {3, "beta tables for (1,4)", 1, beta_tables},
      {4, "boundary squared vanishes", 10, [] { return suite("thm1", 200); }},
      {5, "prism homotopy identity", 30, [] { return suite("lemma2", 50); }},
      {6, "subdivision naturality and homotopy", 60, identities_sd},
      {7, "subdivision expansions", 0, sd_expansions},
      {8, "long exact sequence", 5, les},
      {9, "classical recovery", 0, classical_recovery},
      {10, "two-pipeline CW prediction", 0, two_pipelines},
      {11, "Smith normal form", 20, smith_forms},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool in_time = c.limit_s <= 0 || s < c.limit_s;
    bool pass = o.ok && in_time;
    failed += !pass;
    std::string limit = c.limit_s > 0 ? "limit " + std::to_string(static_cast<int>(c.limit_s)) + " s" : "no limit";
    std::printf("[%s] %2d %-38s %8.3f s (%s)  %s%s\n", pass ? "PASS" : "FAIL", c.id, c.name, s, limit.c_str(),
                o.detail.c_str(), in_time ? "" : "  over time");
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
