#include "cubar/cubeexpr.hpp"

#include <sstream>
#include <stdexcept>

namespace cubar {

namespace {

std::vector<std::size_t> strides(int n, long N) {
  std::vector<std::size_t> s(static_cast<std::size_t>(n), 1);
  for (int k = n - 2; k >= 0; --k) s[k] = s[k + 1] * static_cast<std::size_t>(N + 1);
  return s;
}

std::size_t mix(std::size_t h, std::size_t v) { return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2)); }

std::size_t hash_rat(const Rat& r) {
  std::size_t h = mpz_get_ui(r.get_num_mpz_t());
  h = mix(h, mpz_get_ui(r.get_den_mpz_t()));
  h = mix(h, static_cast<std::size_t>(sgn(r) + 1));
  return mix(h, mpz_size(r.get_num_mpz_t()));
}

void check_unit_point(const Point& x, int n) {
  if (static_cast<int>(x.size()) != n)
    throw std::invalid_argument("point has " + std::to_string(x.size()) + " coordinates, expected " +
                                std::to_string(n));
  for (const auto& c : x)
    if (c < 0 || c > 1) throw std::domain_error("point outside the unit cube: " + to_string(c));
}

std::string join(const std::vector<Rat>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + to_string(v[i]);
  return s;
}

json rats_json(const std::vector<Rat>& v) {
  json a = json::array();
  for (const auto& x : v) a.push_back(to_string(x));
  return a;
}

std::vector<Rat> rats_from(const json& j) {
  std::vector<Rat> v;
  for (const auto& x : j) v.push_back(x.is_string() ? parse_rat(x.get<std::string>()) : Rat(x.get<long>()));
  return v;
}

}  // namespace

// ---------------------------------------------------------------- BaseTable

BaseTable::BaseTable(int arity, int dim, long N, std::vector<Rat> values)
    : n_(arity), d_(dim), N_(N), values_(std::move(values)) {
  if (arity < 0 || dim < 1 || N < 1) throw std::invalid_argument("BaseTable: bad shape");
  std::size_t pts = 1;
  for (int k = 0; k < n_; ++k) pts *= static_cast<std::size_t>(N_ + 1);
  if (values_.size() != pts * static_cast<std::size_t>(d_))
    throw std::invalid_argument("BaseTable: expected " + std::to_string(pts) + " points of dimension " +
                                std::to_string(d_));
  std::size_t h = mix(mix(static_cast<std::size_t>(n_), static_cast<std::size_t>(d_)), static_cast<std::size_t>(N_));
  for (const auto& v : values_) h = mix(h, hash_rat(v));
  digest_ = h;
}

BaseTable BaseTable::identity(int n) {
  return box(std::vector<Rat>(static_cast<std::size_t>(n), Rat(0)), std::vector<Rat>(static_cast<std::size_t>(n), Rat(1)));
}

BaseTable BaseTable::constant(int n, const Point& p) {
  std::size_t pts = std::size_t{1} << n;
  std::vector<Rat> v;
  v.reserve(pts * p.size());
  for (std::size_t i = 0; i < pts; ++i) v.insert(v.end(), p.begin(), p.end());
  return BaseTable(n, static_cast<int>(p.size()), 1, std::move(v));
}

BaseTable BaseTable::box(const std::vector<Rat>& lo, const std::vector<Rat>& hi) {
  if (lo.size() != hi.size() || lo.empty()) throw std::invalid_argument("box: bounds mismatch");
  std::vector<int> free;
  for (std::size_t k = 0; k < lo.size(); ++k) {
    if (hi[k] < lo[k]) throw std::invalid_argument("box: inverted axis");
    if (hi[k] > lo[k]) free.push_back(static_cast<int>(k));
  }
  int n = static_cast<int>(free.size());
  std::vector<Rat> v;
  for (std::size_t c = 0; c < (std::size_t{1} << n); ++c) {
    Point p = lo;
    // corner index is row-major with input 0 slowest, so input 0 is the high bit
    for (int q = 0; q < n; ++q)
      if (c >> (n - 1 - q) & 1) p[free[q]] = hi[free[q]];
    v.insert(v.end(), p.begin(), p.end());
  }
  return BaseTable(n, static_cast<int>(lo.size()), 1, std::move(v));
}

Point BaseTable::eval(const Point& x) const {
  check_unit_point(x, n_);
  auto st = strides(n_, N_);
  std::size_t base = 0;
  std::vector<int> active;
  std::vector<Rat> frac(static_cast<std::size_t>(n_));
  for (int k = 0; k < n_; ++k) {
    Rat t = x[k] * N_;
    long i = to_long(floor_div(t.get_num(), t.get_den()));
    if (i >= N_) i = N_ - 1;
    frac[k] = t - i;
    base += static_cast<std::size_t>(i) * st[k];
    if (frac[k] != 0) active.push_back(k);
  }
  Point out(static_cast<std::size_t>(d_), Rat(0));
  std::size_t m = active.size();
  for (std::size_t c = 0; c < (std::size_t{1} << m); ++c) {
    Rat w = 1;
    std::size_t idx = base;
    for (std::size_t q = 0; q < m; ++q) {
      int k = active[q];
      if (c >> q & 1) {
        w *= frac[k];
        idx += st[k];
      } else {
        w *= 1 - frac[k];
      }
    }
    for (int r = 0; r < d_; ++r) out[r] += w * values_[idx * d_ + r];
  }
  return out;
}

BaseTable BaseTable::restrict_slot(int slot, const Rat& c) const {
  if (slot < 0 || slot >= n_) throw std::invalid_argument("restrict_slot: bad slot");
  if (c < 0 || c > 1) throw std::domain_error("restrict_slot: value outside [0,1]");
  Rat t = c * N_;
  long i = to_long(floor_div(t.get_num(), t.get_den()));
  if (i >= N_) i = N_ - 1;
  Rat f = t - i;
  auto st = strides(n_, N_);
  std::size_t outer = 1, inner = st[slot];
  for (int k = 0; k < slot; ++k) outer *= static_cast<std::size_t>(N_ + 1);
  std::vector<Rat> v;
  v.reserve(points() / static_cast<std::size_t>(N_ + 1) * d_);
  for (std::size_t o = 0; o < outer; ++o)
    for (std::size_t in = 0; in < inner; ++in) {
      std::size_t p0 = o * st[slot] * (N_ + 1) + static_cast<std::size_t>(i) * st[slot] + in;
      std::size_t p1 = p0 + st[slot];
      for (int r = 0; r < d_; ++r) {
        const Rat& a = values_[p0 * d_ + r];
        v.push_back(f == 0 ? a : a + f * (values_[p1 * d_ + r] - a));
      }
    }
  return BaseTable(n_ - 1, d_, N_, std::move(v));
}

bool BaseTable::exact_at(long M) const {
  long r = N_ / M;
  if (r == 1) return true;
  auto st = strides(n_, N_);
  std::size_t pts = points();
  for (int k = 0; k < n_; ++k)
    for (std::size_t p = 0; p < pts; ++p) {
      long ik = static_cast<long>(p / st[k] % static_cast<std::size_t>(N_ + 1));
      long off = ik % r;
      if (off == 0) continue;
      std::size_t lo = p - static_cast<std::size_t>(off) * st[k];
      std::size_t hi = lo + static_cast<std::size_t>(r) * st[k];
      for (int c = 0; c < d_; ++c) {
        const Rat& a = values_[lo * d_ + c];
        const Rat& b = values_[hi * d_ + c];
        if (values_[p * d_ + c] != a + (b - a) * rat(off, r)) return false;
      }
    }
  return true;
}

BaseTable BaseTable::coarsened() const {
  for (long M = 1; M < N_; ++M) {
    if (N_ % M != 0 || !exact_at(M)) continue;
    long r = N_ / M;
    auto st = strides(n_, N_);
    auto st2 = strides(n_, M);
    std::size_t pts2 = 1;
    for (int k = 0; k < n_; ++k) pts2 *= static_cast<std::size_t>(M + 1);
    std::vector<Rat> v;
    v.reserve(pts2 * d_);
    for (std::size_t q = 0; q < pts2; ++q) {
      std::size_t p = 0;
      for (int k = 0; k < n_; ++k) p += (q / st2[k] % static_cast<std::size_t>(M + 1)) * static_cast<std::size_t>(r) * st[k];
      for (int c = 0; c < d_; ++c) v.push_back(values_[p * d_ + c]);
    }
    return BaseTable(n_, d_, M, std::move(v));
  }
  return *this;
}

bool BaseTable::independent_of(int slot) const {
  auto st = strides(n_, N_);
  for (std::size_t p = 0; p < points(); ++p) {
    std::size_t ik = p / st[slot] % static_cast<std::size_t>(N_ + 1);
    if (ik == 0) continue;
    std::size_t p0 = p - ik * st[slot];
    for (int c = 0; c < d_; ++c)
      if (values_[p * d_ + c] != values_[p0 * d_ + c]) return false;
  }
  return true;
}

int compare(const BaseTable& a, const BaseTable& b) {
  if (a.n_ != b.n_) return a.n_ < b.n_ ? -1 : 1;
  if (a.d_ != b.d_) return a.d_ < b.d_ ? -1 : 1;
  if (a.N_ != b.N_) return a.N_ < b.N_ ? -1 : 1;
  for (std::size_t i = 0; i < a.values_.size(); ++i) {
    int c = cmp(a.values_[i], b.values_[i]);
    if (c) return c < 0 ? -1 : 1;
  }
  return 0;
}

json BaseTable::to_json() const {
  json vals = json::array();
  for (std::size_t p = 0; p < points(); ++p) {
    json row = json::array();
    for (int c = 0; c < d_; ++c) row.push_back(to_string(values_[p * d_ + c]));
    vals.push_back(std::move(row));
  }
  return json{{"arity", n_}, {"target_dim", d_}, {"lattice_step", "1/" + std::to_string(N_)}, {"values", vals}};
}

BaseTable BaseTable::from_json(const json& j) {
  try {
    int n = j.at("arity").get<int>();
    int d = j.at("target_dim").get<int>();
    Rat step = parse_rat(j.at("lattice_step").get<std::string>());
    if (step <= 0 || step.get_num() != 1) throw InputError("lattice_step must be 1/N");
    long N = to_long(step.get_den());
    std::vector<Rat> v;
    for (const auto& row : j.at("values")) {
      if (static_cast<int>(row.size()) != d) throw InputError("table row has wrong dimension");
      auto r = rats_from(row);
      v.insert(v.end(), r.begin(), r.end());
    }
    return BaseTable(n, d, N, std::move(v));
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed base table: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw InputError(std::string("malformed base table: ") + e.what());
  }
}

// ---------------------------------------------------------------- CoordFn

CoordFn CoordFn::constant(const Rat& c) {
  CoordFn f;
  f.kind = Kind::Const;
  f.c = c;
  return f;
}

CoordFn CoordFn::var(int u) { return affine(0, 1, u, false); }

CoordFn CoordFn::affine(const Rat& a, const Rat& s, int u, bool clamped) {
  CoordFn f;
  f.kind = Kind::Frac;
  f.a = a;
  f.s = s;
  f.u = u;
  f.clamped = clamped;
  return f.simplified();
}

CoordFn CoordFn::frac(const Rat& a, const Rat& s, int u, const Rat& b, const Rat& t, int w, bool clamped) {
  if (b == 0) throw std::invalid_argument("CoordFn::frac: denominator constant must be nonzero");
  CoordFn f;
  f.kind = Kind::Frac;
  f.a = a / b;
  f.s = s / b;
  f.t = t / b;
  f.u = u;
  f.w = w;
  f.clamped = clamped;
  return f.simplified();
}

CoordFn CoordFn::jag(int L, int k, int u) {
  CoordFn f;
  f.kind = Kind::Jag;
  f.L = L;
  f.k = k;
  f.u = u;
  return f;
}

Rat CoordFn::eval(const Point& x) const {
  switch (kind) {
    case Kind::Const:
      return c;
    case Kind::Jag:
      return cubar::jag(L, k, x[u]);
    case Kind::Frac: {
      Rat num = a + (u >= 0 ? s * x[u] : Rat(0));
      Rat den = 1 + (w >= 0 ? t * x[w] : Rat(0));
      Rat y = num / den;
      return clamped ? clamp(y) : y;
    }
  }
  return 0;
}

std::vector<int> CoordFn::vars() const {
  std::vector<int> v;
  if (kind == Kind::Const) return v;
  if (u >= 0) v.push_back(u);
  if (kind == Kind::Frac && w >= 0 && w != u) v.push_back(w);
  return v;
}

CoordFn CoordFn::simplified() const {
  if (kind != Kind::Frac) return *this;
  CoordFn f = *this;
  if (f.s == 0) f.u = -1;
  if (f.u < 0) f.s = 0;
  if (f.t == 0) f.w = -1;
  if (f.w < 0) f.t = 0;
  if (f.u < 0 && (f.w < 0 || f.a == 0)) return constant(f.clamped ? clamp(f.a) : f.a);
  // a positive denominator on the cube makes the extremes sit at the corners
  if (1 + f.t <= 0) return f;
  auto vs = f.vars();
  Rat lo, hi;
  bool first = true;
  for (unsigned mask = 0; mask < (1u << vs.size()); ++mask) {
    Point x(static_cast<std::size_t>(std::max(f.u, f.w) + 1), Rat(0));
    for (std::size_t q = 0; q < vs.size(); ++q) x[vs[q]] = (mask >> q & 1) ? 1 : 0;
    Rat num = f.a + (f.u >= 0 ? f.s * x[f.u] : Rat(0));
    Rat y = num / (1 + (f.w >= 0 ? f.t * x[f.w] : Rat(0)));
    if (first || y < lo) lo = y;
    if (first || y > hi) hi = y;
    first = false;
  }
  if (f.clamped) {
    if (lo >= 1) return constant(1);
    if (hi <= 0) return constant(0);
    if (lo >= 0 && hi <= 1) f.clamped = false;
  }
  return f;
}

std::string CoordFn::key() const {
  switch (kind) {
    case Kind::Const:
      return "c" + to_string(c);
    case Kind::Jag:
      return "j" + std::to_string(L) + "," + std::to_string(k) + ",x" + std::to_string(u);
    case Kind::Frac: {
      std::string s = clamped ? "q(" : "(";
      s += to_string(a) + "+" + to_string(this->s) + "x" + std::to_string(u);
      if (w >= 0) s += ")/(1+" + to_string(t) + "x" + std::to_string(w);
      return s + ")";
    }
  }
  return {};
}

json CoordFn::to_json() const {
  switch (kind) {
    case Kind::Const:
      return json{{"kind", "const"}, {"c", to_string(c)}};
    case Kind::Jag:
      return json{{"kind", "jag"}, {"L", L}, {"k", k}, {"u", u}};
    case Kind::Frac:
      return json{{"kind", "frac"}, {"a", to_string(a)}, {"s", to_string(s)}, {"u", u},
                  {"t", to_string(t)},  {"w", w},            {"clamped", clamped}};
  }
  return {};
}

CoordFn CoordFn::from_json(const json& j) {
  std::string k = j.at("kind").get<std::string>();
  if (k == "const") return constant(parse_rat(j.at("c").get<std::string>()));
  if (k == "jag") return jag(j.at("L").get<int>(), j.at("k").get<int>(), j.at("u").get<int>());
  if (k == "frac")
    return frac(parse_rat(j.at("a").get<std::string>()), parse_rat(j.at("s").get<std::string>()), j.at("u").get<int>(),
                1, parse_rat(j.at("t").get<std::string>()), j.at("w").get<int>(), j.at("clamped").get<bool>());
  throw InputError("unknown coordinate kind '" + k + "'");
}

// ---------------------------------------------------------------- AffineMap

AffineMap AffineMap::identity(int d) { return AffineMap{RatMatrix::identity(d), std::vector<Rat>(static_cast<std::size_t>(d), Rat(0))}; }

AffineMap AffineMap::constant(int d_in, const Point& p) {
  return AffineMap{RatMatrix(static_cast<int>(p.size()), d_in), p};
}

Point AffineMap::apply(const Point& y) const {
  if (static_cast<int>(y.size()) != in_dim()) throw std::invalid_argument("AffineMap: dimension mismatch");
  Point out = b;
  for (int i = 0; i < A.rows(); ++i)
    for (int j = 0; j < A.cols(); ++j)
      if (A(i, j) != 0) out[i] += A(i, j) * y[j];
  return out;
}

AffineMap AffineMap::after(const AffineMap& g) const {
  if (g.out_dim() != in_dim()) throw std::invalid_argument("AffineMap: composition mismatch");
  return AffineMap{A * g.A, apply(g.b)};
}

std::string AffineMap::key() const {
  std::string s = std::to_string(A.rows()) + "x" + std::to_string(A.cols()) + ":";
  for (int i = 0; i < A.rows(); ++i)
    for (int j = 0; j < A.cols(); ++j) s += to_string(A(i, j)) + ",";
  return s + "+" + join(b);
}

// ---------------------------------------------------------------- auxiliary curves

Rat clamp(const Rat& y) { return clamp01(y); }

Rat jag(int L, int k, const Rat& x) {
  if (L < 1 || k < 0 || k > L) throw std::domain_error("jag: need 0 <= k <= L, L >= 1");
  if (x < 0 || x > 1) throw std::domain_error("jag: argument outside [0,1]");
  Rat d = x * L - k;
  if (d < 0) d = -d;
  return d >= 1 ? Rat(0) : Rat(1 - d);
}

Rat eta(int z, bool tilde, const Rat& x, const Rat& y) {
  if (x < 0 || x > 1 || y < 0 || y > 1) throw std::domain_error("eta: argument outside [0,1]");
  if (!tilde) {
    switch (z) {
      case 0:
        return x / (3 - 2 * y);
      case 1:
        return y <= (1 + x) / 2 ? Rat((2 - x) / (3 - 2 * y)) : Rat(1);
      case 2:
        return y <= (1 - x) / 2 ? Rat((2 + x) / (3 - 2 * y)) : Rat(1);
    }
  } else {
    switch (z) {
      case 0:
        return x / (1 + 2 * y);
      case 1:
        return y >= (1 - x) / 2 ? Rat((2 - x) / (1 + 2 * y)) : Rat(1);
      case 2:
        return y >= (1 + x) / 2 ? Rat((2 + x) / (1 + 2 * y)) : Rat(1);
    }
  }
  throw std::domain_error("eta: index must be 0, 1 or 2");
}

Rat aux_curve(Curve kind, const std::vector<Rat>& args, int L, int k) {
  if (kind == Curve::Chi) {
    if (args.size() != 1) throw std::domain_error("chi takes one argument");
    return jag(L, k, args[0]);
  }
  if (args.size() != 2) throw std::domain_error("eta takes two arguments");
  switch (kind) {
    case Curve::Eta0: return eta(0, false, args[0], args[1]);
    case Curve::Eta1: return eta(1, false, args[0], args[1]);
    case Curve::Eta2: return eta(2, false, args[0], args[1]);
    case Curve::EtaT0: return eta(0, true, args[0], args[1]);
    case Curve::EtaT1: return eta(1, true, args[0], args[1]);
    case Curve::EtaT2: return eta(2, true, args[0], args[1]);
    default: break;
  }
  throw std::domain_error("unknown curve");
}

// ---------------------------------------------------------------- CubeExpr

namespace {

const char* kind_name(CubeExpr::Kind k) {
  switch (k) {
    case CubeExpr::Kind::Base: return "base";
    case CubeExpr::Kind::AffineCell: return "affine_cell";
    case CubeExpr::Kind::Clamped: return "clamped";
    case CubeExpr::Kind::Face: return "face";
    case CubeExpr::Kind::CrossZero: return "cross_zero";
    case CubeExpr::Kind::CrossJag: return "cross_jag";
    case CubeExpr::Kind::Warp: return "warp";
    case CubeExpr::Kind::Lift: return "lift";
    case CubeExpr::Kind::Reparam: return "reparam";
    case CubeExpr::Kind::Push: return "push";
  }
  return "?";
}

std::string table_key(const BaseTable& t) {
  std::ostringstream os;
  os << "T" << t.arity() << "." << t.dim() << "." << t.N() << "#" << std::hex << t.digest();
  return os.str();
}

std::string make_key(const ExprNode& n) {
  std::string s;
  auto child = [&](int i) { return "[" + n.children[i].key() + "]"; };
  switch (n.kind) {
    case CubeExpr::Kind::Base: return "B" + table_key(*n.table);
    case CubeExpr::Kind::AffineCell: return "A(" + join(n.lo) + ";" + join(n.hi) + ")";
    case CubeExpr::Kind::Clamped:
      return "C(" + to_string(n.alpha) + ";" + join(n.e) + ";" + join(n.v) + ")" + child(0);
    case CubeExpr::Kind::Face:
      return "F(" + std::to_string(n.L) + "," + std::to_string(n.i) + "," + std::to_string(n.j) + ")" + child(0);
    case CubeExpr::Kind::CrossZero: return "X0" + child(0);
    case CubeExpr::Kind::CrossJag: return "XJ(" + std::to_string(n.L) + "," + std::to_string(n.k) + ")" + child(0);
    case CubeExpr::Kind::Warp: {
      s = n.tilde ? "W~(" : "W(";
      for (int z : n.z) s += std::to_string(z);
      return s + ")" + child(0);
    }
    case CubeExpr::Kind::Lift: return "E(" + to_string(n.value) + ")" + child(0);
    case CubeExpr::Kind::Push: return "P(" + n.map->key() + ")" + child(0);
    case CubeExpr::Kind::Reparam: {
      s = "R" + std::to_string(n.arity) + "(" + table_key(*n.table) + ";";
      for (const auto& c : n.coords) s += c.key() + ",";
      s += ";";
      for (const auto& c : n.extra) s += c.key() + ",";
      return s + ")";
    }
  }
  return s;
}

void collect_tables(const ExprNode& n, std::vector<const BaseTable*>& out) {
  if (n.table) out.push_back(n.table.get());
  for (const auto& c : n.children) collect_tables(c.node(), out);
}

}  // namespace

CubeExpr CubeExpr::base(BaseTable t) {
  auto n = std::make_shared<ExprNode>();
  n->kind = Kind::Base;
  n->arity = t.arity();
  n->dim = t.dim();
  n->table = std::make_shared<const BaseTable>(std::move(t));
  n->key = make_key(*n);
  return CubeExpr(n);
}

CubeExpr CubeExpr::identity(int n) { return base(BaseTable::identity(n)); }
CubeExpr CubeExpr::constant(int n, const Point& p) { return base(BaseTable::constant(n, p)); }

CubeExpr CubeExpr::affine_cell(std::vector<Rat> lo, std::vector<Rat> hi) {
  auto n = std::make_shared<ExprNode>();
  n->kind = Kind::AffineCell;
  n->table = std::make_shared<const BaseTable>(BaseTable::box(lo, hi));
  n->arity = n->table->arity();
  n->dim = n->table->dim();
  n->lo = std::move(lo);
  n->hi = std::move(hi);
  n->key = make_key(*n);
  return CubeExpr(n);
}

CubeExpr CubeExpr::clamped(CubeExpr inner, Rat alpha, std::vector<Rat> e, std::vector<Rat> v) {
  if (static_cast<int>(e.size()) != inner.arity() || static_cast<int>(v.size()) != inner.arity())
    throw std::invalid_argument("clamped: offset and slope vectors must match the arity");
  auto n = std::make_shared<ExprNode>();
  n->kind = Kind::Clamped;
  n->arity = inner.arity();
  n->dim = inner.target_dim();
  n->alpha = std::move(alpha);
  n->e = std::move(e);
  n->v = std::move(v);
  n->children.push_back(std::move(inner));
  n->key = make_key(*n);
  return CubeExpr(n);
}

CubeExpr CubeExpr::face(CubeExpr inner, int L, int i, int j) {
  if (inner.arity() < 1) throw std::invalid_argument("face: inner cube has arity 0");
  if (L < 1 || i < 0 || i > L) throw std::invalid_argument("face: need 0 <= i <= L");
  if (j < 1 || j > inner.arity()) throw std::invalid_argument("face: slot out of range");
  auto n = std::make_shared<ExprNode>();
  n->kind = Kind::Face;
  n->arity = inner.arity() - 1;
  n->dim = inner.target_dim();
  n->L = L;
  n->i = i;
  n->j = j;
  n->children.push_back(std::move(inner));
  n->key = make_key(*n);
  return CubeExpr(n);
}

CubeExpr CubeExpr::cross_zero(CubeExpr inner) {
  auto n = std::make_shared<ExprNode>();
  n->kind = Kind::CrossZero;
  n->arity = inner.arity() + 1;
  n->dim = inner.target_dim() + 1;
  n->children.push_back(std::move(inner));
  n->key = make_key(*n);
  return CubeExpr(n);
}

CubeExpr CubeExpr::cross_jag(CubeExpr inner, int L, int k) {
  if (L < 1 || k < 0 || k > L) throw std::invalid_argument("cross_jag: need 0 <= k <= L");
  auto n = std::make_shared<ExprNode>();
  n->kind = Kind::CrossJag;
  n->arity = inner.arity() + 1;
  n->dim = inner.target_dim() + 1;
  n->L = L;
  n->k = k;
  n->children.push_back(std::move(inner));
  n->key = make_key(*n);
  return CubeExpr(n);
}

CubeExpr CubeExpr::warp(CubeExpr inner, std::vector<int> z, bool tilde) {
  if (static_cast<int>(z.size()) != inner.arity()) throw std::invalid_argument("warp: selector length must match arity");
  for (int v : z)
    if (v < 0 || v > 2) throw std::invalid_argument("warp: selector entries must be 0, 1 or 2");
  auto n = std::make_shared<ExprNode>();
  n->kind = Kind::Warp;
  n->arity = inner.arity() + 1;
  n->dim = inner.target_dim();
  n->z = std::move(z);
  n->tilde = tilde;
  n->children.push_back(std::move(inner));
  n->key = make_key(*n);
  return CubeExpr(n);
}

CubeExpr CubeExpr::lift(CubeExpr inner, Rat value) {
  auto n = std::make_shared<ExprNode>();
  n->kind = Kind::Lift;
  n->arity = inner.arity();
  n->dim = inner.target_dim() + 1;
  n->value = std::move(value);
  n->children.push_back(std::move(inner));
  n->key = make_key(*n);
  return CubeExpr(n);
}

CubeExpr CubeExpr::push(AffineMap f, CubeExpr inner) {
  if (f.in_dim() != inner.target_dim()) throw std::invalid_argument("push: map not composable with cube");
  auto n = std::make_shared<ExprNode>();
  n->kind = Kind::Push;
  n->arity = inner.arity();
  n->dim = f.out_dim();
  n->map = std::move(f);
  n->children.push_back(std::move(inner));
  n->key = make_key(*n);
  return CubeExpr(n);
}

CubeExpr CubeExpr::reparam(std::shared_ptr<const BaseTable> leaf, std::vector<CoordFn> coords,
                           std::vector<CoordFn> extra, int arity) {
  if (static_cast<int>(coords.size()) != leaf->arity()) throw std::invalid_argument("reparam: coordinate count mismatch");
  for (const auto* list : {&coords, &extra})
    for (const auto& c : *list)
      for (int v : c.vars())
        if (v >= arity) throw std::invalid_argument("reparam: coordinate uses a variable beyond the arity");
  auto n = std::make_shared<ExprNode>();
  n->kind = Kind::Reparam;
  n->arity = arity;
  n->dim = leaf->dim() + static_cast<int>(extra.size());
  n->table = std::move(leaf);
  n->coords = std::move(coords);
  n->extra = std::move(extra);
  n->key = make_key(*n);
  return CubeExpr(n);
}

CubeExpr::Kind CubeExpr::kind() const { return p_->kind; }
int CubeExpr::arity() const { return p_->arity; }
int CubeExpr::target_dim() const { return p_->dim; }
const std::string& CubeExpr::key() const { return p_->key; }
std::string CubeExpr::describe() const { return p_->key; }
bool CubeExpr::is_canonical() const { return p_->canonical; }

CubeExpr CubeExpr::marked_canonical() const {
  if (p_->canonical) return *this;
  auto n = std::make_shared<ExprNode>(*p_);
  n->canonical = true;
  return CubeExpr(n);
}

Point CubeExpr::eval(const Point& x) const {
  check_unit_point(x, p_->arity);
  const ExprNode& n = *p_;
  switch (n.kind) {
    case Kind::Base:
    case Kind::AffineCell:
      return n.table->eval(x);
    case Kind::Clamped: {
      Point y(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) y[i] = clamp(n.alpha * (n.e[i] + n.v[i] * x[i]));
      return n.children[0].eval(y);
    }
    case Kind::Face: {
      Point y = x;
      y.insert(y.begin() + (n.j - 1), rat(n.i, n.L));
      return n.children[0].eval(y);
    }
    case Kind::CrossZero:
    case Kind::CrossJag: {
      Point y(x.begin(), x.end() - 1);
      Point out = n.children[0].eval(y);
      out.push_back(n.kind == Kind::CrossZero ? Rat(0) : jag(n.L, n.k, x.back()));
      return out;
    }
    case Kind::Warp: {
      Point y(x.size() - 1);
      for (std::size_t i = 0; i < y.size(); ++i) y[i] = eta(n.z[i], n.tilde, x[i], x.back());
      return n.children[0].eval(y);
    }
    case Kind::Lift: {
      Point out = n.children[0].eval(x);
      out.push_back(n.value);
      return out;
    }
    case Kind::Push:
      return n.map->apply(n.children[0].eval(x));
    case Kind::Reparam: {
      Point y(n.coords.size());
      for (std::size_t i = 0; i < y.size(); ++i) y[i] = n.coords[i].eval(x);
      Point out = n.table->eval(y);
      for (const auto& c : n.extra) out.push_back(c.eval(x));
      return out;
    }
  }
  return {};
}

bool operator==(const CubeExpr& a, const CubeExpr& b) { return compare(a, b) == 0; }

int compare(const CubeExpr& a, const CubeExpr& b) {
  if (a.p_ == b.p_) return 0;
  int c = a.key().compare(b.key());
  if (c) return c < 0 ? -1 : 1;
  std::vector<const BaseTable*> ta, tb;
  collect_tables(*a.p_, ta);
  collect_tables(*b.p_, tb);
  for (std::size_t i = 0; i < ta.size() && i < tb.size(); ++i)
    if (int r = compare(*ta[i], *tb[i])) return r;
  return ta.size() < tb.size() ? -1 : (ta.size() > tb.size() ? 1 : 0);
}

json CubeExpr::to_json() const {
  const ExprNode& n = *p_;
  json j{{"node", kind_name(n.kind)}};
  switch (n.kind) {
    case Kind::Base: j["table"] = n.table->to_json(); return j;
    case Kind::AffineCell:
      j["lo"] = rats_json(n.lo);
      j["hi"] = rats_json(n.hi);
      return j;
    case Kind::Clamped:
      j["alpha"] = to_string(n.alpha);
      j["e"] = rats_json(n.e);
      j["v"] = rats_json(n.v);
      break;
    case Kind::Face:
      j["L"] = n.L;
      j["i"] = n.i;
      j["j"] = n.j;
      break;
    case Kind::CrossZero: break;
    case Kind::CrossJag:
      j["L"] = n.L;
      j["k"] = n.k;
      break;
    case Kind::Warp:
      j["z"] = n.z;
      j["tilde"] = n.tilde;
      break;
    case Kind::Lift: j["value"] = to_string(n.value); break;
    case Kind::Push: {
      json rows = json::array();
      for (int r = 0; r < n.map->A.rows(); ++r) {
        std::vector<Rat> row;
        for (int c = 0; c < n.map->A.cols(); ++c) row.push_back(n.map->A(r, c));
        rows.push_back(rats_json(row));
      }
      j["matrix"] = rows;
      j["in_dim"] = n.map->in_dim();
      j["offset"] = rats_json(n.map->b);
      break;
    }
    case Kind::Reparam: {
      j["arity"] = n.arity;
      j["leaf"] = n.table->to_json();
      json c = json::array(), x = json::array();
      for (const auto& f : n.coords) c.push_back(f.to_json());
      for (const auto& f : n.extra) x.push_back(f.to_json());
      j["coords"] = c;
      j["extra"] = x;
      return j;
    }
  }
  j["inner"] = n.children[0].to_json();
  return j;
}

CubeExpr CubeExpr::from_json(const json& j) {
  try {
    std::string k = j.at("node").get<std::string>();
    if (k == "base") return base(BaseTable::from_json(j.at("table")));
    if (k == "affine_cell") return affine_cell(rats_from(j.at("lo")), rats_from(j.at("hi")));
    if (k == "reparam") {
      std::vector<CoordFn> c, x;
      for (const auto& f : j.at("coords")) c.push_back(CoordFn::from_json(f));
      for (const auto& f : j.at("extra")) x.push_back(CoordFn::from_json(f));
      return reparam(std::make_shared<const BaseTable>(BaseTable::from_json(j.at("leaf"))), c, x,
                     j.at("arity").get<int>());
    }
    CubeExpr inner = from_json(j.at("inner"));
    if (k == "clamped")
      return clamped(inner, parse_rat(j.at("alpha").get<std::string>()), rats_from(j.at("e")), rats_from(j.at("v")));
    if (k == "face") return face(inner, j.at("L").get<int>(), j.at("i").get<int>(), j.at("j").get<int>());
    if (k == "cross_zero") return cross_zero(inner);
    if (k == "cross_jag") return cross_jag(inner, j.at("L").get<int>(), j.at("k").get<int>());
    if (k == "warp") return warp(inner, j.at("z").get<std::vector<int>>(), j.at("tilde").get<bool>());
    if (k == "lift") return lift(inner, parse_rat(j.at("value").get<std::string>()));
    if (k == "push") {
      const auto& rows = j.at("matrix");
      RatMatrix A(static_cast<int>(rows.size()), j.at("in_dim").get<int>());
      for (int r = 0; r < A.rows(); ++r) {
        auto row = rats_from(rows[r]);
        if (static_cast<int>(row.size()) != A.cols()) throw InputError("push matrix row has wrong length");
        for (int c = 0; c < A.cols(); ++c) A(r, c) = row[c];
      }
      return push(AffineMap{A, rats_from(j.at("offset"))}, inner);
    }
    throw InputError("unknown cube node '" + k + "'");
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed cube expression: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw InputError(std::string("invalid cube expression: ") + e.what());
  }
}

// ---------------------------------------------------------------- lattice utilities

void for_each_lattice_point(int n, long N, const std::function<bool(const Point&)>& f) {
  std::vector<long> idx(static_cast<std::size_t>(n), 0);
  Point x(static_cast<std::size_t>(n), Rat(0));
  while (true) {
    if (!f(x)) return;
    int k = n - 1;
    while (k >= 0 && idx[k] == N) {
      idx[k] = 0;
      x[k] = 0;
      --k;
    }
    if (k < 0) return;
    ++idx[k];
    x[k] = rat(idx[k], N);
  }
}

std::optional<Point> lattice_witness(const CubeExpr& a, const CubeExpr& b, const Rat& lattice_step) {
  if (a.arity() != b.arity() || a.target_dim() != b.target_dim())
    throw std::invalid_argument("maps_equal: arity or target dimension mismatch");
  if (lattice_step <= 0 || lattice_step.get_num() != 1) throw std::invalid_argument("lattice step must be 1/N");
  std::optional<Point> found;
  for_each_lattice_point(a.arity(), to_long(lattice_step.get_den()), [&](const Point& x) {
    if (a.eval(x) != b.eval(x)) {
      found = x;
      return false;
    }
    return true;
  });
  return found;
}

bool maps_equal(const CubeExpr& a, const CubeExpr& b, const Rat& lattice_step) {
  return !lattice_witness(a, b, lattice_step).has_value();
}

}  // namespace cubar
