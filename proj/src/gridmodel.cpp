#include "cubar/gridmodel.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

#include "cubar/homotopylab.hpp"

namespace cubar {

// ---------------------------------------------------------------- generators

LCubicalGenerator::LCubicalGenerator(int arity, std::vector<Axis> axes) : arity_(arity), axes_(std::move(axes)) {
  if (arity_ < 0) throw std::invalid_argument("generator: negative arity");
  for (auto& a : axes_) {
    if (!a.free) {
      a.scale = 0;
      a.var = -1;
      continue;
    }
    if (a.var < 0 || a.var >= arity_) throw std::invalid_argument("generator: axis refers to a missing input");
    if (a.scale == 0) {
      a.free = false;
      a.var = -1;
    }
  }
}

LCubicalGenerator LCubicalGenerator::from_cell(const Cell& c) {
  std::vector<Axis> axes;
  int var = 0;
  for (std::size_t k = 0; k < c.base.size(); ++k) {
    Axis a;
    a.offset = c.base[k];
    if (c.extent[k] == 1) {
      a.free = true;
      a.scale = 1;
      a.var = var++;
    }
    axes.push_back(a);
  }
  return LCubicalGenerator(var, axes);
}

int LCubicalGenerator::used_vars() const {
  std::vector<bool> used(static_cast<std::size_t>(arity_), false);
  for (const auto& a : axes_)
    if (a.free) used[static_cast<std::size_t>(a.var)] = true;
  return static_cast<int>(std::count(used.begin(), used.end(), true));
}

bool LCubicalGenerator::is_degenerate() const { return used_vars() < arity_; }

LCubicalGenerator LCubicalGenerator::face(int L, int i, int j) const {
  if (j < 1 || j > arity_) throw std::invalid_argument("face: coordinate index out of range");
  if (i < 0 || i > L) throw std::invalid_argument("face: slice index out of range");
  const int u = j - 1;
  std::vector<Axis> axes = axes_;
  for (auto& a : axes) {
    if (!a.free) continue;
    if (a.var == u) {
      a.offset += a.scale * rat(i, L);
      a.free = false;
    } else if (a.var > u) {
      --a.var;
    }
  }
  return LCubicalGenerator(arity_ - 1, axes);
}

LCubicalGenerator LCubicalGenerator::placed(const std::vector<int>& slot, int arity) const {
  if (static_cast<int>(slot.size()) != arity_) throw std::invalid_argument("placed: slot map has the wrong length");
  std::vector<Axis> axes = axes_;
  for (auto& a : axes)
    if (a.free) a.var = slot[static_cast<std::size_t>(a.var)];
  return LCubicalGenerator(arity, axes);
}

LCubicalGenerator LCubicalGenerator::sd_piece(const std::vector<int>& e, const std::vector<int>& v) const {
  std::vector<Axis> axes = axes_;
  for (auto& a : axes) {
    if (!a.free) continue;
    auto u = static_cast<std::size_t>(a.var);
    a.offset += a.scale * rat(e[u], 3);
    a.scale *= rat(v[u], 3);
  }
  return LCubicalGenerator(arity_, axes);
}

std::optional<LCubicalGenerator> LCubicalGenerator::pushed(const AffineMap& f) const {
  if (f.in_dim() != dim()) throw std::invalid_argument("pushforward: map source dimension differs from the generator target");
  std::vector<Axis> axes;
  for (int r = 0; r < f.out_dim(); ++r) {
    Axis out;
    out.offset = f.b[static_cast<std::size_t>(r)];
    out.scale = 0;
    for (int l = 0; l < dim(); ++l) {
      const Rat& c = f.A(r, l);
      if (c == 0) continue;
      const Axis& a = axes_[static_cast<std::size_t>(l)];
      out.offset += c * a.offset;
      if (!a.free) continue;
      if (out.free && out.var != a.var) return std::nullopt;
      out.free = true;
      out.var = a.var;
      out.scale += c * a.scale;
    }
    axes.push_back(out);
  }
  return LCubicalGenerator(arity_, axes);
}

Point LCubicalGenerator::eval(const Point& x) const {
  if (static_cast<int>(x.size()) != arity_) throw std::invalid_argument("generator eval: arity mismatch");
  Point y;
  for (const auto& a : axes_) y.push_back(a.free ? a.offset + a.scale * x[static_cast<std::size_t>(a.var)] : a.offset);
  return y;
}

std::pair<Point, Point> LCubicalGenerator::carrier() const {
  Point lo, hi;
  for (const auto& a : axes_) {
    Rat p = a.offset, q = a.free ? a.offset + a.scale : a.offset;
    lo.push_back(std::min(p, q));
    hi.push_back(std::max(p, q));
  }
  return {lo, hi};
}

CubeExpr LCubicalGenerator::to_expr() const {
  if (dim() == 0) throw std::invalid_argument("to_expr: generators into ℝ^0 have no table form");
  std::vector<Rat> values;
  const std::size_t corners = std::size_t{1} << arity_;
  for (std::size_t p = 0; p < corners; ++p) {
    Point x(static_cast<std::size_t>(arity_));
    for (int k = 0; k < arity_; ++k) x[static_cast<std::size_t>(k)] = (p >> (arity_ - 1 - k)) & 1U;
    for (const auto& y : eval(x)) values.push_back(y);
  }
  return CubeExpr::base(BaseTable(arity_, dim(), 1, values));
}

std::string LCubicalGenerator::str() const {
  std::ostringstream os;
  os << arity_ << ":(";
  for (std::size_t k = 0; k < axes_.size(); ++k) {
    const Axis& a = axes_[k];
    if (k) os << ',';
    if (!a.free) {
      os << to_string(a.offset);
      continue;
    }
    if (a.offset != 0) os << to_string(a.offset) << (a.scale > 0 ? "+" : "");
    if (a.scale == -1) os << '-';
    else if (a.scale != 1) os << to_string(a.scale) << '*';
    os << 'x' << a.var + 1;
  }
  os << ')';
  return os.str();
}

bool operator<(const LCubicalGenerator& a, const LCubicalGenerator& b) {
  if (a.arity_ != b.arity_) return a.arity_ < b.arity_;
  if (a.axes_.size() != b.axes_.size()) return a.axes_.size() < b.axes_.size();
  for (std::size_t k = 0; k < a.axes_.size(); ++k) {
    const Axis& x = a.axes_[k];
    const Axis& y = b.axes_[k];
    if (x.free != y.free) return x.free < y.free;
    if (x.offset != y.offset) return x.offset < y.offset;
    if (x.scale != y.scale) return x.scale < y.scale;
    if (x.var != y.var) return x.var < y.var;
  }
  return false;
}

// ---------------------------------------------------------------- generator sets

int GeneratorSet::count(int n) const { return n < 0 || n > top() ? 0 : static_cast<int>(at(n).size()); }

const std::vector<LCubicalGenerator>& GeneratorSet::at(int n) const {
  static const std::vector<LCubicalGenerator> empty;
  return n < 0 || n > top() ? empty : by_degree[static_cast<std::size_t>(n)];
}

int GeneratorSet::index_of(int n, const LCubicalGenerator& g) const {
  const auto& v = at(n);
  auto it = std::lower_bound(v.begin(), v.end(), g);
  return it != v.end() && *it == g ? static_cast<int>(it - v.begin()) : -1;
}

long GeneratorSet::total() const {
  long t = 0;
  for (const auto& v : by_degree) t += static_cast<long>(v.size());
  return t;
}

namespace {

// Calls fn on every increasing k-subset of {0..n−1}.
void for_each_subset(int n, int k, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> s(static_cast<std::size_t>(k));
  std::iota(s.begin(), s.end(), 0);
  while (true) {
    fn(s);
    int i = k - 1;
    while (i >= 0 && s[static_cast<std::size_t>(i)] == n - k + i) --i;
    if (i < 0) return;
    ++s[static_cast<std::size_t>(i)];
    for (int t = i + 1; t < k; ++t) s[static_cast<std::size_t>(t)] = s[static_cast<std::size_t>(t - 1)] + 1;
  }
}

GeneratorSet from_sets(const std::vector<std::set<LCubicalGenerator>>& sets, int L) {
  GeneratorSet out;
  out.L = L;
  int top = -1;
  for (int n = 0; n < static_cast<int>(sets.size()); ++n)
    if (!sets[static_cast<std::size_t>(n)].empty()) top = n;
  for (int n = 0; n <= top; ++n)
    out.by_degree.emplace_back(sets[static_cast<std::size_t>(n)].begin(), sets[static_cast<std::size_t>(n)].end());
  return out;
}

}  // namespace

GeneratorSet close_generators(const std::vector<LCubicalGenerator>& seeds, int L, ClosureOptions opts) {
  if (L < 1) throw std::invalid_argument("closure: L must be positive");
  int top = opts.degenerate_up_to;
  for (const auto& g : seeds) top = std::max(top, g.degree());
  std::vector<std::set<LCubicalGenerator>> sets(static_cast<std::size_t>(top + 1));
  std::vector<LCubicalGenerator> work(seeds);
  while (!work.empty()) {
    LCubicalGenerator g = work.back();
    work.pop_back();
    if (!sets[static_cast<std::size_t>(g.degree())].insert(g).second) continue;
    for (int j = 1; j <= g.degree(); ++j)
      for (int i = 0; i <= L; ++i) work.push_back(g.face(L, i, j));
  }
  if (opts.degenerate_up_to >= 0) {
    std::vector<LCubicalGenerator> base;
    for (const auto& s : sets)
      for (const auto& g : s)
        if (!g.is_degenerate()) base.push_back(g);
    for (const auto& g : base)
      for (int n = g.degree() + 1; n <= opts.degenerate_up_to; ++n)
        for_each_subset(n, g.degree(), [&](const std::vector<int>& slot) {
          sets[static_cast<std::size_t>(n)].insert(g.placed(slot, n));
        });
  }
  return from_sets(sets, L);
}

GeneratorSet closure_generate(const GridModel& K, int L, ClosureOptions opts) {
  std::vector<LCubicalGenerator> seeds;
  for (const auto& c : K.top_cells) seeds.push_back(LCubicalGenerator::from_cell(c));
  return close_generators(seeds, L, opts);
}

GeneratorSet nondegenerate_part(const GeneratorSet& gens) {
  std::vector<std::set<LCubicalGenerator>> sets(gens.by_degree.size());
  for (std::size_t n = 0; n < gens.by_degree.size(); ++n)
    for (const auto& g : gens.by_degree[n])
      if (!g.is_degenerate()) sets[n].insert(g);
  return from_sets(sets, gens.L);
}

// ---------------------------------------------------------------- matrices

RatMatrix boundary_matrix(const GeneratorSet& gens, int n, const WeightVector& w, Exec mode) {
  if (w.L() != gens.L) throw std::invalid_argument("boundary_matrix: weight length does not match the model's L");
  const auto& cols = gens.at(n);
  RatMatrix M(gens.count(n - 1), static_cast<int>(cols.size()));
  if (n == 0) return M;
  using Column = std::vector<std::pair<int, Rat>>;
  auto parts = map_range<Column>(cols.size(), mode, [&](std::size_t c) {
    Column col;
    for (const auto& [f, coeff] : boundary_terms(cols[c], w)) {
      int r = gens.index_of(n - 1, f);
      if (r < 0) throw ClosureError("face " + f.str() + " of " + cols[c].str() + " is not in the generator list");
      col.emplace_back(r, coeff);
    }
    return col;
  });
  const RingSpec& R = w.ring();
  for (std::size_t c = 0; c < parts.size(); ++c) {
    for (const auto& [r, coeff] : parts[c]) M(r, static_cast<int>(c)) += coeff;
    for (int r = 0; r < M.rows(); ++r) M(r, static_cast<int>(c)) = R.normalize(M(r, static_cast<int>(c)));
  }
  return M;
}

RatMatrix BoundaryMatrices::matrix(int n) const {
  if (n >= 0 && n <= top()) return d[static_cast<std::size_t>(n)];
  return RatMatrix(rank(n - 1), rank(n));
}

BoundaryMatrices assemble(const GeneratorSet& gens, const WeightVector& w, Exec mode) {
  BoundaryMatrices m;
  m.ring = w.ring();
  for (int n = 0; n <= gens.top(); ++n) {
    m.ranks.push_back(gens.count(n));
    m.d.push_back(boundary_matrix(gens, n, w, mode));
  }
  return m;
}

std::vector<Presentation> free_homology(const BoundaryMatrices& m, int n_max) {
  std::vector<Presentation> out;
  for (int n = 0; n <= n_max; ++n) out.push_back(homology_from_matrices(m.ring, m.matrix(n), m.matrix(n + 1)));
  return out;
}

namespace {

struct PairIndex {
  std::vector<std::vector<int>> inA, outA;  // X-indices of A generators / of the complement
};

PairIndex index_pair(const GeneratorSet& X, const GeneratorSet& A) {
  if (A.L != X.L && A.total() > 0) throw InputError("pair: sub-model closure uses a different L");
  PairIndex p;
  for (int n = 0; n <= X.top(); ++n) {
    std::vector<bool> mark(static_cast<std::size_t>(X.count(n)), false);
    std::vector<int> in;
    for (const auto& g : A.at(n)) {
      int i = X.index_of(n, g);
      if (i < 0) throw InputError("pair: generator " + g.str() + " of the sub-model is not in the model");
      for (int j = 1; j <= g.degree(); ++j)
        for (int s = 0; s <= A.L; ++s)
          if (!A.contains(g.face(A.L, s, j)))
            throw InputError("pair: sub-model is not a subcomplex; a face of " + g.str() + " escapes it");
      mark[static_cast<std::size_t>(i)] = true;
      in.push_back(i);
    }
    std::vector<int> out;
    for (int i = 0; i < X.count(n); ++i)
      if (!mark[static_cast<std::size_t>(i)]) out.push_back(i);
    p.inA.push_back(in);
    p.outA.push_back(out);
  }
  if (A.top() > X.top()) throw InputError("pair: sub-model has generators above the model's top degree");
  return p;
}

template <class T>
Matrix<T> select(const Matrix<T>& M, const std::vector<int>& rows, const std::vector<int>& cols) {
  Matrix<T> S(static_cast<int>(rows.size()), static_cast<int>(cols.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j) S(static_cast<int>(i), static_cast<int>(j)) = M(rows[i], cols[j]);
  return S;
}

const std::vector<int>& idx(const std::vector<std::vector<int>>& v, int n) {
  static const std::vector<int> empty;
  return n < 0 || n >= static_cast<int>(v.size()) ? empty : v[static_cast<std::size_t>(n)];
}

}  // namespace

BoundaryMatrices pair_matrices(const GeneratorSet& X, const GeneratorSet& A, const WeightVector& w, Exec mode) {
  PairIndex p = index_pair(X, A);
  BoundaryMatrices full = assemble(X, w, mode);
  BoundaryMatrices rel;
  rel.ring = w.ring();
  for (int n = 0; n <= X.top(); ++n) {
    rel.ranks.push_back(static_cast<int>(idx(p.outA, n).size()));
    rel.d.push_back(select(full.matrix(n), idx(p.outA, n - 1), idx(p.outA, n)));
  }
  return rel;
}

// ---------------------------------------------------------------- long exact sequence

namespace {

// Cycles Z (basis columns), boundaries in ambient coordinates, and boundaries in Z-coordinates.
struct Cycles {
  IntMatrix Z, B, Bc;
};

Cycles cycles_of(const IntMatrix& dn, const IntMatrix& dnp1) {
  Cycles c;
  c.Z = kernel_basis(dn);
  c.B = dnp1;
  auto coords = lattice_coordinates(c.Z, dnp1);
  if (!coords) throw std::logic_error("les: boundaries are not cycles");
  c.Bc = *coords;
  return c;
}

bool same_lattice(const IntMatrix& P, const IntMatrix& Q) {
  if (P.cols() != Q.cols()) return false;
  return lattice_coordinates(P, Q).has_value() && lattice_coordinates(Q, P).has_value();
}

// Exactness at H = Z/B for  H_prev --G--> H --F--> H_next, in Z-coordinates of H.
bool exact_at(const Cycles& prev, const IntMatrix& G, const Cycles& here, const IntMatrix& F, const Cycles& next) {
  IntMatrix negB = next.B;
  for (int i = 0; i < negB.rows(); ++i)
    for (int j = 0; j < negB.cols(); ++j) negB(i, j) = -negB(i, j);
  IntMatrix K = kernel_basis(IntMatrix::hcat(F * here.Z, negB)).row_range(0, here.Z.cols());
  auto img = lattice_coordinates(here.Z, G * prev.Z);
  if (!img) return false;
  return same_lattice(lattice_basis(K), lattice_basis(IntMatrix::hcat(*img, here.Bc)));
}

IntMatrix inclusion(int rows, const std::vector<int>& pos) {
  IntMatrix M(rows, static_cast<int>(pos.size()));
  for (std::size_t a = 0; a < pos.size(); ++a) M(pos[a], static_cast<int>(a)) = 1;
  return M;
}

IntMatrix projection(int cols, const std::vector<int>& pos) { return inclusion(cols, pos).transpose(); }

}  // namespace

LesReport connecting_and_les_check(const GeneratorSet& X, const GeneratorSet& A, const WeightVector& w) {
  if (w.ring().kind() != RingKind::Integers) throw InputError("les: the exactness check runs over Z only");
  PairIndex p = index_pair(X, A);
  BoundaryMatrices full = assemble(X, w);
  const int D = X.top();
  auto dX = [&](int n) { return to_int_matrix(full.matrix(n)); };
  auto dA = [&](int n) { return select(dX(n), idx(p.inA, n - 1), idx(p.inA, n)); };
  auto dR = [&](int n) { return select(dX(n), idx(p.outA, n - 1), idx(p.outA, n)); };
  auto incl = [&](int n) { return inclusion(X.count(n), idx(p.inA, n)); };
  auto proj = [&](int n) { return projection(X.count(n), idx(p.outA, n)); };
  auto conn = [&](int n) { return select(dX(n), idx(p.inA, n - 1), idx(p.outA, n)); };

  std::vector<Cycles> cA, cX, cR;
  for (int n = -1; n <= D + 1; ++n) {
    cA.push_back(cycles_of(dA(n), dA(n + 1)));
    cX.push_back(cycles_of(dX(n), dX(n + 1)));
    cR.push_back(cycles_of(dR(n), dR(n + 1)));
  }
  auto at = [](const std::vector<Cycles>& v, int n) -> const Cycles& { return v[static_cast<std::size_t>(n + 1)]; };

  LesReport rep;
  for (int n = D; n >= 0; --n) {
    const std::string deg = std::to_string(n);
    bool a = exact_at(at(cR, n + 1), conn(n + 1), at(cA, n), incl(n), at(cX, n));
    bool x = exact_at(at(cA, n), incl(n), at(cX, n), proj(n), at(cR, n));
    bool r = exact_at(at(cX, n), proj(n), at(cR, n), conn(n), at(cA, n - 1));
    rep.slots.push_back({"H_" + deg + "(A)", a});
    rep.slots.push_back({"H_" + deg + "(X)", x});
    rep.slots.push_back({"H_" + deg + "(X,A)", r});
    rep.exact = rep.exact && a && x && r;
  }
  for (int n = 0; n <= D; ++n) {
    rep.H_A.push_back(homology_integral(dA(n), dA(n + 1)));
    rep.H_X.push_back(homology_integral(dX(n), dX(n + 1)));
    rep.H_XA.push_back(homology_integral(dR(n), dR(n + 1)));
    long term = rep.H_A.back().free_rank - rep.H_X.back().free_rank + rep.H_XA.back().free_rank;
    rep.euler += n % 2 == 0 ? term : -term;
    bool nonzero = false;
    if (n >= 1) {
      const Cycles& src = at(cR, n);
      const Cycles& dst = at(cA, n - 1);
      auto img = lattice_coordinates(dst.Z, conn(n) * src.Z);
      if (!img) throw std::logic_error("les: connecting map does not land in cycles");
      nonzero = !lattice_coordinates(lattice_basis(dst.Bc), *img).has_value();
    }
    rep.connecting_nonzero.push_back(nonzero);
  }
  return rep;
}

json LesReport::to_json() const {
  json s = json::array();
  for (const auto& sl : slots) s.push_back(json{{"slot", sl.slot}, {"exact", sl.exact}});
  auto list = [](const std::vector<Presentation>& v) {
    json a = json::array();
    for (const auto& p : v) a.push_back(cubar::to_json(p));
    return a;
  };
  return json{{"exact", exact},       {"slots", s},
              {"H_A", list(H_A)},     {"H_X", list(H_X)},
              {"H_XA", list(H_XA)},   {"connecting_nonzero", connecting_nonzero},
              {"euler", euler}};
}

// ---------------------------------------------------------------- cover filter

bool inside_some(const LCubicalGenerator& g, const std::vector<Box>& cover) {
  auto [lo, hi] = g.carrier();
  for (const auto& b : cover) {
    bool in = b.lo.size() == lo.size();
    for (std::size_t k = 0; in && k < lo.size(); ++k) in = b.lo[k] <= lo[k] && hi[k] <= b.hi[k];
    if (in) return true;
  }
  return false;
}

namespace {

Int denominators_lcm(const std::vector<Rat>& xs, Int acc) {
  for (const auto& x : xs) acc = lcm(acc, x.get_den());
  return acc;
}

}  // namespace

FilterResult u_small_filter(const GeneratorSet& gens, const std::vector<Box>& cover) {
  FilterResult res;
  res.gens.L = gens.L;
  std::vector<std::set<LCubicalGenerator>> sets(gens.by_degree.size());
  for (std::size_t n = 0; n < gens.by_degree.size(); ++n)
    for (const auto& g : gens.by_degree[n])
      if (inside_some(g, cover)) sets[n].insert(g);
  res.gens.by_degree.clear();
  for (auto& s : sets) res.gens.by_degree.emplace_back(s.begin(), s.end());

  // Coverage: sample each non-degenerate generator on a lattice fine enough to see every box side.
  std::vector<LCubicalGenerator> pieces;
  Int M = gens.L;
  std::optional<Point> bb_lo, bb_hi;
  for (const auto& v : gens.by_degree)
    for (const auto& g : v) {
      if (g.is_degenerate()) continue;
      pieces.push_back(g);
      auto [lo, hi] = g.carrier();
      if (!bb_lo) {
        bb_lo = lo;
        bb_hi = hi;
      }
      for (std::size_t k = 0; k < lo.size(); ++k) {
        (*bb_lo)[k] = std::min((*bb_lo)[k], lo[k]);
        (*bb_hi)[k] = std::max((*bb_hi)[k], hi[k]);
      }
      for (const auto& a : g.axes()) M = denominators_lcm({a.offset, a.scale}, M);
    }
  for (const auto& b : cover) M = denominators_lcm(b.hi, denominators_lcm(b.lo, M));
  M *= 2;
  const long steps = to_long(M);

  auto covered = [&](const Point& p) {
    for (const auto& b : cover) {
      if (b.lo.size() != p.size()) continue;
      bool ok = true;
      for (std::size_t k = 0; ok && k < p.size(); ++k) {
        bool lo_ok = b.lo[k] < p[k] || (b.lo[k] <= (*bb_lo)[k] && b.lo[k] <= p[k]);
        bool hi_ok = p[k] < b.hi[k] || (b.hi[k] >= (*bb_hi)[k] && p[k] <= b.hi[k]);
        ok = lo_ok && hi_ok;
      }
      if (ok) return true;
    }
    return false;
  };
  for (const auto& g : pieces) {
    bool done = false;
    for_each_lattice_point(g.degree(), steps, [&](const Point& x) {
      Point y = g.eval(x);
      if (covered(y)) return true;
      res.covered = false;
      res.witness = y;
      done = true;
      return false;
    });
    if (done) break;
  }
  return res;
}

// ---------------------------------------------------------------- subdivision on the grid

std::vector<std::pair<LCubicalGenerator, Rat>> sd_generator(const LCubicalGenerator& g) {
  const int n = g.degree();
  std::vector<std::pair<LCubicalGenerator, Rat>> out;
  long total = 1;
  for (int k = 0; k < n; ++k) total *= 3;
  static constexpr int E[3] = {0, 2, 2};
  static constexpr int V[3] = {1, -1, 1};
  for (long code = 0; code < total; ++code) {
    std::vector<int> e(static_cast<std::size_t>(n)), v(static_cast<std::size_t>(n));
    long c = code;
    int prod = 1;
    for (int k = n - 1; k >= 0; --k) {
      int digit = static_cast<int>(c % 3);
      c /= 3;
      e[static_cast<std::size_t>(k)] = E[digit];
      v[static_cast<std::size_t>(k)] = V[digit];
      prod *= V[digit];
    }
    out.emplace_back(g.sd_piece(e, v), Rat(-prod));
  }
  return out;
}

namespace {

// Canonical expressions closed under faces at L = 1, sorted per degree.
struct ExprComplex {
  std::vector<std::vector<CubeExpr>> by_degree;
  int count(int n) const { return n < 0 || n >= static_cast<int>(by_degree.size()) ? 0 : static_cast<int>(by_degree[static_cast<std::size_t>(n)].size()); }
  int index_of(const CubeExpr& e) const {
    int n = e.arity();
    if (n >= static_cast<int>(by_degree.size())) return -1;
    const auto& v = by_degree[static_cast<std::size_t>(n)];
    auto it = std::lower_bound(v.begin(), v.end(), e);
    return it != v.end() && *it == e ? static_cast<int>(it - v.begin()) : -1;
  }
  // ∂_n over ℤ in the closure basis.
  IntMatrix boundary(int n, const WeightVector& w) const {
    IntMatrix M(count(n - 1), count(n));
    if (n == 0) return M;
    const auto& cols = by_degree[static_cast<std::size_t>(n)];
    for (std::size_t c = 0; c < cols.size(); ++c)
      for (const auto& [f, coeff] : boundary_terms(cols[c], w)) M(index_of(f), static_cast<int>(c)) += coeff.get_num();
    return M;
  }
};

ExprComplex close_exprs(const std::vector<CubeExpr>& seeds) {
  std::vector<std::set<CubeExpr>> sets;
  std::vector<CubeExpr> work;
  for (const auto& e : seeds) work.push_back(canonical(e));
  while (!work.empty()) {
    CubeExpr e = work.back();
    work.pop_back();
    auto n = static_cast<std::size_t>(e.arity());
    if (sets.size() <= n) sets.resize(n + 1);
    if (!sets[n].insert(e).second) continue;
    for (int j = 1; j <= e.arity(); ++j)
      for (int i = 0; i <= 1; ++i) work.push_back(canonical_face(e, 1, i, j));
  }
  ExprComplex out;
  for (auto& s : sets) out.by_degree.emplace_back(s.begin(), s.end());
  return out;
}

}  // namespace

SubdivisionClassReport subdivision_class_check(const GridModel& X, long a, long b, int n_max) {
  const RingSpec ZZ = RingSpec::integers();
  const WeightVector w = WeightVector::ints(ZZ, {a, b});
  GeneratorSet gx = closure_generate(X, 1, {n_max + 1});
  BoundaryMatrices mx = assemble(gx, w);

  // The enlargement carries SD z and both subdivision homotopies of every generator, so that
  // a·SD z − b·z and b·SD z − a·z have their witnesses Θ z and Θ̃ z inside the finite complex.
  std::vector<CubeExpr> seeds;
  for (int n = 0; n <= gx.top(); ++n)
    for (const auto& g : gx.at(n)) {
      CubeExpr e = g.to_expr();
      seeds.push_back(e);
      if (n > n_max) continue;
      for (const auto& [t, c] : subdivision_terms(e)) seeds.push_back(t);
      for (bool tilde : {false, true})
        for (const auto& [t, c] : theta_sd_terms(e, tilde)) seeds.push_back(t);
    }
  ExprComplex E = close_exprs(seeds);

  SubdivisionClassReport rep;
  for (const auto& v : E.by_degree) rep.enlarged_generators += static_cast<long>(v.size());
  for (int n = 0; n <= n_max; ++n) {
    SubdivisionClassDegree deg;
    deg.degree = n;
    IntMatrix Z = kernel_basis(to_int_matrix(mx.matrix(n)));
    IntMatrix Be = lattice_basis(E.boundary(n + 1, w));
    deg.cycles = Z.cols();
    const auto& xs = gx.at(n);
    for (int c = 0; c < Z.cols(); ++c) {
      CubeChain z(ZZ, n);
      for (int r = 0; r < Z.rows(); ++r)
        if (Z(r, c) != 0) z.add(xs[static_cast<std::size_t>(r)].to_expr(), Rat(Z(r, c)));
      CubeChain sdz = subdivide(z);
      IntMatrix fwd(E.count(n), 1), mir(E.count(n), 1);
      for (const auto& [g, k] : z.terms()) {
        int i = E.index_of(g);
        fwd(i, 0) -= b * k.get_num();
        mir(i, 0) -= a * k.get_num();
      }
      for (const auto& [g, k] : sdz.terms()) {
        int i = E.index_of(g);
        if (i < 0) throw ClosureError("sd: a subdivision piece is missing from the enlarged model");
        fwd(i, 0) += a * k.get_num();
        mir(i, 0) += b * k.get_num();
      }
      deg.forward = deg.forward && lattice_coordinates(Be, fwd).has_value();
      deg.mirror = deg.mirror && lattice_coordinates(Be, mir).has_value();
    }
    rep.ok = rep.ok && deg.forward && deg.mirror;
    rep.degrees.push_back(deg);
  }
  return rep;
}

json SubdivisionClassReport::to_json() const {
  json d = json::array();
  for (const auto& x : degrees)
    d.push_back(json{{"degree", x.degree}, {"cycles", x.cycles}, {"forward", x.forward}, {"mirror", x.mirror}});
  return json{{"status", ok ? "ok" : "fail"}, {"enlarged_generators", enlarged_generators}, {"degrees", d}};
}

}  // namespace cubar
