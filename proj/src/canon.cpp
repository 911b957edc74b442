#include <stdexcept>

#include "cubar/cubeexpr.hpp"

namespace cubar {

namespace {

constexpr long kMaxTabulationStep = 4096;
constexpr std::size_t kMaxTabulationPoints = std::size_t{1} << 18;

// x ↦ (leaf(coords(x)), extra(x)) on Iᵃʳⁱᵗʸ.
struct Canon {
  int arity = 0;
  std::shared_ptr<const BaseTable> leaf;
  std::vector<CoordFn> coords, extra;
  bool leaf_coarse = false;

  bool is_plain() const {
    if (!extra.empty() || static_cast<int>(coords.size()) != arity) return false;
    for (int i = 0; i < arity; ++i)
      if (!coords[i].is_var() || coords[i].u != i) return false;
    return true;
  }
};

Canon plain(const CubeExpr& e, bool coarse) {
  Canon c;
  c.arity = e.arity();
  c.leaf = e.node().table;
  for (int i = 0; i < c.arity; ++i) c.coords.push_back(CoordFn::var(i));
  c.leaf_coarse = coarse;
  return c;
}

// f with each variable u replaced by sub[u], when the result stays inside CoordFn.
std::optional<CoordFn> compose(const CoordFn& f, const std::vector<CoordFn>& sub) {
  using K = CoordFn::Kind;
  if (f.kind == K::Const) return f;
  if (f.kind == K::Jag) {
    const CoordFn& g = sub[f.u];
    if (g.kind == K::Const) return CoordFn::constant(jag(f.L, f.k, g.c));
    if (g.is_var()) return CoordFn::jag(f.L, f.k, g.u);
    return std::nullopt;
  }
  if (f.t == 0) {
    const CoordFn& g = sub[f.u];
    if (g.kind == K::Const) return CoordFn::constant(f.clamped ? clamp(f.a + f.s * g.c) : Rat(f.a + f.s * g.c));
    if (f.is_var()) return g;
    if (g.kind != K::Frac || g.clamped) return std::nullopt;
    // a + s·(ga + gs·x)/(1 + gt·y) = (a + s·ga + s·gs·x + a·gt·y)/(1 + gt·y)
    Rat a0 = f.a + f.s * g.a;
    Rat cx = f.s * g.s, cy = f.a * g.t;
    int ux = g.u, uy = g.w;
    if (cx == 0) ux = -1;
    if (cy == 0) uy = -1;
    if (ux >= 0 && uy >= 0 && ux != uy) return std::nullopt;
    int u = ux >= 0 ? ux : uy;
    return CoordFn::frac(a0, cx + cy, u, 1, g.t, g.w, f.clamped);
  }
  Rat a = f.a, s = f.s, b = 1, t = f.t;
  int u = -1, w = -1;
  if (f.u >= 0) {
    const CoordFn& g = sub[f.u];
    if (g.kind == K::Const) {
      a += s * g.c;
    } else if (g.is_var()) {
      u = g.u;
    } else {
      return std::nullopt;
    }
  }
  const CoordFn& h = sub[f.w];
  if (h.kind == K::Const) {
    b += t * h.c;
    t = 0;
  } else if (h.is_var()) {
    w = h.u;
  } else {
    return std::nullopt;
  }
  if (u < 0) s = 0;
  return CoordFn::frac(a, s, u, b, t, w, f.clamped);
}

std::optional<Canon> substitute(Canon c, const std::vector<CoordFn>& sub, int new_arity) {
  for (auto* list : {&c.coords, &c.extra})
    for (auto& f : *list) {
      auto g = compose(f, sub);
      if (!g) return std::nullopt;
      f = *g;
    }
  c.arity = new_arity;
  return c;
}

// Denominator of the lattice on which f is linear between consecutive points and, for a
// leaf coordinate, never crosses a leaf lattice level in the interior of a cell.
Int breakpoint_step(const CoordFn& f, long leaf_N, bool feeds_leaf) {
  using K = CoordFn::Kind;
  if (f.kind == K::Const) return 1;
  if (f.kind == K::Jag) return Int(f.L) * (feeds_leaf ? leaf_N : 1);
  if (!feeds_leaf && !f.clamped) return 1;
  long levels = feeds_leaf ? leaf_N : 1;
  Int M = 1;
  for (long k = 0; k <= levels; ++k) {
    Rat x = (rat(k, levels) - f.a) / f.s;
    if (x > 0 && x < 1) M = lcm(M, x.get_den());
  }
  return M;
}

std::optional<BaseTable> tabulate(const Canon& c) {
  std::vector<bool> used(static_cast<std::size_t>(c.arity), false);
  Int M = 1;
  for (const auto& f : c.coords) {
    if (!f.is_piecewise_linear()) return std::nullopt;
    for (int v : f.vars()) {
      if (used[v]) return std::nullopt;
      used[v] = true;
    }
    M = lcm(M, breakpoint_step(f, c.leaf->N(), true));
  }
  for (const auto& f : c.extra) {
    if (!f.is_piecewise_linear()) return std::nullopt;
    M = lcm(M, breakpoint_step(f, 1, false));
  }
  if (M > kMaxTabulationStep) return std::nullopt;
  long m = to_long(M);
  std::size_t pts = 1;
  for (int k = 0; k < c.arity; ++k) {
    pts *= static_cast<std::size_t>(m + 1);
    if (pts > kMaxTabulationPoints) return std::nullopt;
  }
  int dim = c.leaf->dim() + static_cast<int>(c.extra.size());
  std::vector<Rat> values;
  values.reserve(pts * static_cast<std::size_t>(dim));
  for_each_lattice_point(c.arity, m, [&](const Point& x) {
    Point y(c.coords.size());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = c.coords[i].eval(x);
    Point v = c.leaf->eval(y);
    values.insert(values.end(), v.begin(), v.end());
    for (const auto& f : c.extra) values.push_back(f.eval(x));
    return true;
  });
  return BaseTable(c.arity, dim, m, std::move(values)).coarsened();
}

Canon normalize(Canon c) {
  for (auto* list : {&c.coords, &c.extra})
    for (auto& f : *list) f = f.simplified();
  if (c.leaf_coarse && c.is_plain()) return c;

  BaseTable leaf = *c.leaf;
  bool changed = false;
  for (int s = static_cast<int>(c.coords.size()) - 1; s >= 0; --s) {
    if (c.coords[s].kind == CoordFn::Kind::Const) {
      leaf = leaf.restrict_slot(s, c.coords[s].c);
      c.coords.erase(c.coords.begin() + s);
      changed = true;
    }
  }
  for (int s = static_cast<int>(c.coords.size()) - 1; s >= 0; --s) {
    if (leaf.independent_of(s)) {
      leaf = leaf.restrict_slot(s, 0);
      c.coords.erase(c.coords.begin() + s);
      changed = true;
    }
  }
  if (changed || !c.leaf_coarse) {
    c.leaf = std::make_shared<const BaseTable>(leaf.coarsened());
    c.leaf_coarse = true;
  }
  if (c.is_plain()) return c;
  if (auto t = tabulate(c)) {
    Canon out;
    out.arity = c.arity;
    out.leaf = std::make_shared<const BaseTable>(std::move(*t));
    for (int i = 0; i < c.arity; ++i) out.coords.push_back(CoordFn::var(i));
    out.leaf_coarse = true;
    return out;
  }
  return c;
}

CubeExpr from_canon(const Canon& c) {
  if (c.is_plain()) return CubeExpr::base(*c.leaf).marked_canonical();
  return CubeExpr::reparam(c.leaf, c.coords, c.extra, c.arity).marked_canonical();
}

std::vector<CoordFn> eta_coords(const std::vector<int>& z, bool tilde) {
  int y = static_cast<int>(z.size());
  std::vector<CoordFn> sub;
  for (int u = 0; u < y; ++u) {
    Rat a = z[u] == 0 ? 0 : 2;
    Rat s = z[u] == 1 ? -1 : 1;
    bool clamped = z[u] != 0;
    sub.push_back(tilde ? CoordFn::frac(a, s, u, 1, 2, y, clamped) : CoordFn::frac(a, s, u, 3, -2, y, clamped));
  }
  return sub;
}

std::optional<Canon> to_canon(const CubeExpr& e) {
  using K = CubeExpr::Kind;
  const ExprNode& n = e.node();
  switch (n.kind) {
    case K::Base:
      return normalize(plain(e, e.is_canonical()));
    case K::AffineCell:
      return normalize(plain(e, false));
    case K::Reparam: {
      Canon c;
      c.arity = n.arity;
      c.leaf = n.table;
      c.coords = n.coords;
      c.extra = n.extra;
      if (e.is_canonical()) return c;
      return normalize(std::move(c));
    }
    default:
      break;
  }
  if (n.kind == K::Push && n.map->A.is_zero()) {
    Canon c;
    c.arity = n.arity;
    c.leaf = std::make_shared<const BaseTable>(BaseTable::constant(n.arity, n.map->b));
    for (int i = 0; i < n.arity; ++i) c.coords.push_back(CoordFn::var(i));
    return normalize(std::move(c));
  }
  auto inner = to_canon(n.children[0]);
  if (!inner) return std::nullopt;
  int m = n.children[0].arity();
  switch (n.kind) {
    case K::Face: {
      std::vector<CoordFn> sub;
      for (int v = 0; v < m; ++v) {
        if (v < n.j - 1) sub.push_back(CoordFn::var(v));
        else if (v == n.j - 1) sub.push_back(CoordFn::constant(rat(n.i, n.L)));
        else sub.push_back(CoordFn::var(v - 1));
      }
      auto c = substitute(std::move(*inner), sub, m - 1);
      if (!c) return std::nullopt;
      return normalize(std::move(*c));
    }
    case K::Clamped: {
      std::vector<CoordFn> sub;
      for (int v = 0; v < m; ++v) sub.push_back(CoordFn::affine(n.alpha * n.e[v], n.alpha * n.v[v], v, true));
      auto c = substitute(std::move(*inner), sub, m);
      if (!c) return std::nullopt;
      return normalize(std::move(*c));
    }
    case K::Warp: {
      auto c = substitute(std::move(*inner), eta_coords(n.z, n.tilde), m + 1);
      if (!c) return std::nullopt;
      return normalize(std::move(*c));
    }
    case K::CrossZero:
    case K::CrossJag:
    case K::Lift: {
      Canon c = std::move(*inner);
      c.arity = n.arity;
      if (n.kind == K::CrossZero) c.extra.push_back(CoordFn::constant(0));
      else if (n.kind == K::CrossJag) c.extra.push_back(CoordFn::jag(n.L, n.k, m));
      else c.extra.push_back(CoordFn::constant(n.value));
      return normalize(std::move(c));
    }
    case K::Push: {
      Canon c = std::move(*inner);
      if (!c.extra.empty()) return std::nullopt;
      const BaseTable& t = *c.leaf;
      std::vector<Rat> values;
      values.reserve(t.points() * static_cast<std::size_t>(n.dim));
      Point y(static_cast<std::size_t>(t.dim()));
      for (std::size_t p = 0; p < t.points(); ++p) {
        for (int k = 0; k < t.dim(); ++k) y[k] = t.value(p, k);
        Point v = n.map->apply(y);
        values.insert(values.end(), v.begin(), v.end());
      }
      c.leaf = std::make_shared<const BaseTable>(BaseTable(t.arity(), n.dim, t.N(), std::move(values)));
      c.leaf_coarse = false;
      return normalize(std::move(c));
    }
    default:
      break;
  }
  return std::nullopt;
}

CubeExpr rebuild(const CubeExpr& e, CubeExpr child) {
  using K = CubeExpr::Kind;
  const ExprNode& n = e.node();
  switch (n.kind) {
    case K::Clamped: return CubeExpr::clamped(std::move(child), n.alpha, n.e, n.v);
    case K::Face: return CubeExpr::face(std::move(child), n.L, n.i, n.j);
    case K::CrossZero: return CubeExpr::cross_zero(std::move(child));
    case K::CrossJag: return CubeExpr::cross_jag(std::move(child), n.L, n.k);
    case K::Warp: return CubeExpr::warp(std::move(child), n.z, n.tilde);
    case K::Lift: return CubeExpr::lift(std::move(child), n.value);
    case K::Push: return CubeExpr::push(*n.map, std::move(child));
    default: break;
  }
  throw std::logic_error("rebuild: leaf node");
}

}  // namespace

CubeExpr canonical(const CubeExpr& e) {
  if (e.is_canonical()) return e;
  if (auto c = to_canon(e)) return from_canon(*c);
  return rebuild(e, canonical(e.node().children[0])).marked_canonical();
}

CubeExpr canonical_face(const CubeExpr& e, int L, int i, int j) { return canonical(CubeExpr::face(e, L, i, j)); }

Tri is_degenerate(const CubeExpr& e, long search_steps) {
  if (e.arity() < 1) throw std::invalid_argument("is_degenerate: arity must be at least 1");
  CubeExpr c = canonical(e);
  int n = c.arity();
  const ExprNode& node = c.node();
  if (c.kind() == CubeExpr::Kind::Base) {
    for (int s = 0; s < n; ++s)
      if (node.table->independent_of(s)) return Tri::Yes;
    return Tri::No;
  }
  if (c.kind() == CubeExpr::Kind::Reparam) {
    std::vector<bool> used(static_cast<std::size_t>(n), false);
    for (const auto* list : {&node.coords, &node.extra})
      for (const auto& f : *list)
        for (int v : f.vars()) used[v] = true;
    for (int v = 0; v < n; ++v)
      if (!used[v]) return Tri::Yes;
  }
  std::vector<bool> witnessed(static_cast<std::size_t>(n), false);
  int remaining = n;
  for_each_lattice_point(n, search_steps, [&](const Point& x) {
    Point fx = c.eval(x);
    for (int v = 0; v < n; ++v) {
      if (witnessed[v] || x[v] == 0) continue;
      Point y = x;
      y[v] = 0;
      if (c.eval(y) != fx) {
        witnessed[v] = true;
        --remaining;
      }
    }
    return remaining > 0;
  });
  return remaining == 0 ? Tri::No : Tri::Unknown;
}

}  // namespace cubar
