#include <random>

#include "cubar/gridmodel.hpp"
#include "cubar/homotopylab.hpp"
#include "cubar/models.hpp"
#include "doctest.h"

using namespace cubar;

namespace {

const RingSpec ZZ = RingSpec::integers();

GridModel interval() { return load_grid_model("interval"); }

IntMatrix product(const BoundaryMatrices& m, int n) { return to_int_matrix(m.matrix(n)) * to_int_matrix(m.matrix(n + 1)); }

}  // namespace

TEST_CASE("closure sizes for the vertex and the interval") {
  auto pt = closure_generate(load_grid_model("point"), 4);
  CHECK(pt.top() == 0);
  CHECK(pt.count(0) == 1);

  auto i1 = closure_generate(interval(), 1);
  CHECK(i1.count(1) == 1);
  CHECK(i1.count(0) == 2);

  auto i3 = closure_generate(interval(), 3);
  CHECK(i3.count(1) == 1);
  REQUIRE(i3.count(0) == 4);
  CHECK(i3.at(0)[1].axes()[0].offset == rat(1, 3));
  CHECK(i3.at(0)[2].axes()[0].offset == rat(2, 3));
}

TEST_CASE("closure is idempotent and independent of seed order") {
  auto m = load_grid_model("s2");
  auto g = closure_generate(m, 2, {3});
  std::vector<LCubicalGenerator> all;
  for (const auto& v : g.by_degree) all.insert(all.end(), v.begin(), v.end());
  CHECK(close_generators(all, 2, {3}).by_degree == g.by_degree);
  std::reverse(m.top_cells.begin(), m.top_cells.end());
  CHECK(closure_generate(m, 2, {3}).by_degree == g.by_degree);
}

TEST_CASE("point model matrices alternate between sigma and zero") {
  auto g = closure_generate(load_grid_model("point"), 1, {8});
  auto w = WeightVector::ints(ZZ, {3, 8});
  for (int n = 1; n <= 8; ++n) {
    auto M = boundary_matrix(g, n, w);
    REQUIRE(M.rows() == 1);
    REQUIRE(M.cols() == 1);
    CHECK(M(0, 0) == (n % 2 == 1 ? 11 : 0));
  }
}

TEST_CASE("interval boundary column with the classical weight") {
  auto g = closure_generate(interval(), 1);
  auto M = boundary_matrix(g, 1, WeightVector::ints(ZZ, {1, -1}));
  CHECK(M(0, 0) == 1);
  CHECK(M(1, 0) == -1);
}

TEST_CASE("square circle has four edges and zero column sums") {
  auto g = closure_generate(load_grid_model("s1"), 1);
  auto M = boundary_matrix(g, 1, WeightVector::ints(ZZ, {1, -1}));
  REQUIRE(M.rows() == 4);
  REQUIRE(M.cols() == 4);
  for (int c = 0; c < 4; ++c) {
    Rat s = 0;
    for (int r = 0; r < 4; ++r) s += M(r, c);
    CHECK(s == 0);
  }
}

TEST_CASE("matrix boundaries square to zero for random weights") {
  std::mt19937_64 rng(7);
  for (const char* name : {"point", "interval", "s1", "s2", "t2", "d2-pair"}) {
    auto model = load_grid_model(name);
    for (int trial = 0; trial < 3; ++trial) {
      int L = 1 + static_cast<int>(rng() % 2);
      std::vector<Rat> m;
      for (int i = 0; i <= L; ++i) m.push_back(static_cast<long>(rng() % 13) - 6);
      WeightVector w(ZZ, m);
      auto g = closure_generate(model, L, {3});
      auto mats = assemble(g, w);
      for (int n = 0; n <= g.top(); ++n) CHECK(product(mats, n).is_zero());
    }
  }
}

TEST_CASE("serial and parallel assembly agree") {
  auto g = closure_generate(load_grid_model("t2"), 2, {3});
  auto w = WeightVector::ints(ZZ, {2, -5, 4});
  for (int n = 0; n <= g.top(); ++n) CHECK(boundary_matrix(g, n, w, Exec::Serial) == boundary_matrix(g, n, w, Exec::Parallel));
}

TEST_CASE("missing faces raise a closure error") {
  GeneratorSet g;
  g.L = 1;
  g.by_degree = {{}, {LCubicalGenerator::from_cell(Cell{{0}, {1}})}};
  CHECK_THROWS_AS(boundary_matrix(g, 1, WeightVector::ints(ZZ, {1, -1})), ClosureError);
}

TEST_CASE("point homology from matrices matches the closed form") {
  auto g = closure_generate(load_grid_model("point"), 1, {9});
  for (long s : {0L, 1L, -1L, 2L, 5L, 11L, -6L}) {
    auto w = WeightVector::ints(ZZ, {3, s - 3});
    auto H = free_homology(assemble(g, w), 8);
    for (int n = 0; n <= 8; ++n) {
      Presentation want = Presentation::zero(ZZ);
      if (s == 0) want.free_rank = 1;
      else if (n % 2 == 0) want = Presentation::from_cyclic(ZZ, {Int(s < 0 ? -s : s)});
      CHECK(H[static_cast<std::size_t>(n)] == want);
    }
  }
}

TEST_CASE("pair complexes at the extremes") {
  auto X = closure_generate(load_grid_model("s1"), 1);
  auto w = WeightVector::ints(ZZ, {1, -1});
  auto same = pair_matrices(X, X, w);
  for (int n = 0; n <= X.top(); ++n) CHECK(same.rank(n) == 0);
  auto none = pair_matrices(X, GeneratorSet{}, w);
  auto full = assemble(X, w);
  for (int n = 0; n <= X.top(); ++n) CHECK(none.matrix(n) == full.matrix(n));
}

TEST_CASE("disk relative to its boundary has a degree-two class") {
  auto m = load_grid_model("d2-pair");
  auto X = closure_generate(m, 1);
  auto A = closure_generate(m.sub_model(), 1);
  auto rel = pair_matrices(X, A, WeightVector::ints(ZZ, {1, -1}));
  auto H = free_homology(rel, 2);
  CHECK(H[2].free_rank == 1);
  CHECK(H[1].is_zero());
  CHECK(H[0].is_zero());
}

TEST_CASE("a sub-model that is not closed is rejected") {
  auto X = closure_generate(load_grid_model("s1"), 1);
  GeneratorSet A;
  A.L = 1;
  A.by_degree = {{}, {X.at(1)[0]}};
  CHECK_THROWS_AS(pair_matrices(X, A, WeightVector::ints(ZZ, {1, -1})), InputError);
}

TEST_CASE("long exact sequences of the standard pairs") {
  for (auto w : {WeightVector::ints(ZZ, {1, -1}), WeightVector::ints(ZZ, {2, 3})}) {
    {
      auto X = closure_generate(load_grid_model("point"), 1);
      auto r = connecting_and_les_check(X, GeneratorSet{}, w);
      CHECK(r.exact);
      CHECK(r.euler == 0);
    }
    for (const char* name : {"interval", "d2-pair"}) {
      auto m = load_grid_model(name);
      auto X = closure_generate(m, 1);
      auto A = closure_generate(m.sub_model(), 1);
      auto r = connecting_and_les_check(X, A, w);
      CHECK(r.exact);
      CHECK(r.euler == 0);
      if (std::string(name) == "interval" && w[1].value() == -1) CHECK(r.connecting_nonzero[1]);
    }
  }
}

TEST_CASE("cover filter on the refined interval") {
  auto g = closure_generate(interval(), 3);
  std::vector<Box> cover = {{{0}, {rat(2, 3)}}, {{rat(1, 3)}, {1}}};
  auto f = u_small_filter(g, cover);
  CHECK(f.covered);
  CHECK(f.gens.count(1) == 0);
  CHECK(f.gens.count(0) == 4);

  auto whole = u_small_filter(g, {{{-1}, {2}}});
  CHECK(whole.gens.by_degree == g.by_degree);

  auto gap = u_small_filter(g, {{{0}, {rat(1, 3)}}, {{rat(1, 3)}, {1}}});
  CHECK_FALSE(gap.covered);
  REQUIRE(gap.witness);
  CHECK((*gap.witness)[0] == rat(1, 3));
}

TEST_CASE("iterated subdivision passes the cover filter at the mesh bound") {
  std::vector<Box> cover = {{{0}, {rat(2, 3)}}, {{rat(1, 3)}, {1}}};
  std::vector<std::pair<LCubicalGenerator, Rat>> chain = {{LCubicalGenerator::from_cell(Cell{{0}, {1}}), 1}};
  int k = 0;
  while (true) {
    bool all = true;
    for (const auto& [g, c] : chain) all = all && inside_some(g, cover);
    if (all) break;
    std::vector<std::pair<LCubicalGenerator, Rat>> next;
    for (const auto& [g, c] : chain)
      for (const auto& [h, s] : sd_generator(g)) next.emplace_back(h, c * s);
    chain = next;
    ++k;
  }
  CHECK(k >= 1);
  // A piece of extent 3^{-k} fits once it is below the overlap width 1/3.
  CHECK(k <= 2);
}

TEST_CASE("grid subdivision agrees with symbolic subdivision") {
  auto gens = closure_generate(load_grid_model("t2"), 1);
  for (const auto& g : gens.at(2)) {
    CubeChain grid(ZZ, 2);
    for (const auto& [h, s] : sd_generator(g)) grid.add(h.to_expr(), s);
    CHECK(grid == subdivide(ZZ, g.to_expr()));
  }
}

TEST_CASE("pushforward along a translation commutes with the boundary") {
  auto w = WeightVector::ints(ZZ, {2, -1, 4});
  AffineMap f{RatMatrix::identity(2), {3, -1}};
  AffineMap swap{RatMatrix::from_rows({{0, 1}, {1, 0}}), {0, 0}};
  for (const auto& map : {f, swap}) {
    auto g = closure_generate(load_grid_model("s1"), 2);
    for (const auto& e : g.at(1)) {
      auto img = e.pushed(map);
      REQUIRE(img);
      GridChain pushed_then_d = boundary(GridChain::of(ZZ, *img), w);
      GridChain d_then_pushed(ZZ, 0);
      GridChain de = boundary(GridChain::of(ZZ, e), w);
      for (const auto& [v, c] : de.terms()) d_then_pushed.add(*v.pushed(map), c);
      CHECK(pushed_then_d == d_then_pushed);
    }
  }
}

TEST_CASE("matrix-level subdivision identity on point and circle") {
  auto pt = subdivision_class_check(load_grid_model("point"), 2, 3, 6);
  CHECK(pt.ok);
  auto s1 = subdivision_class_check(load_grid_model("s1"), 2, 3, 1);
  CHECK(s1.ok);
  for (const auto& d : s1.degrees) {
    CHECK(d.forward);
    CHECK(d.mirror);
  }
}

TEST_CASE("model json round trip") {
  for (const auto& name : builtin_names()) {
    auto src = load_model_source(name);
    if (!src.model) {
      CHECK(name == "klein");
      continue;
    }
    auto again = GridModel::from_json(json::parse(src.model->to_json().dump()));
    CHECK(again.to_json() == src.model->to_json());
  }
  CHECK_THROWS_AS(GridModel::from_json(json::parse(R"({"dim":1,"top_cells":[{"base":[0],"extent":[2]}]})")), InputError);
  CHECK_THROWS_AS(load_grid_model("klein"), InputError);
}
