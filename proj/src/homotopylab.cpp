#include "cubar/homotopylab.hpp"

namespace cubar {

namespace {

CubeChain collect(RingSpec ring, int degree, const std::vector<std::pair<CubeExpr, Rat>>& terms) {
  CubeChain u(ring, degree);
  for (const auto& [g, c] : terms) u.add(g, c);
  return u;
}

long pow3(long n) {
  long p = 1;
  for (long i = 0; i < n; ++i) p *= 3;
  return p;
}

WeightVector pair_weight(const RingElem& a, const RingElem& b) {
  if (!(a.ring() == b.ring())) throw std::invalid_argument("weight entries over different rings");
  return WeightVector(a.ring(), {a.value(), b.value()});
}

}  // namespace

PrismHomotopy PrismHomotopy::from_weight(const WeightVector& w) {
  auto s = span_is_unit(w);
  if (!s.unit) throw NoWitness("no span witness: the weight entries " + w.str() + " do not generate the ring");
  return PrismHomotopy{w, s.coeffs};
}

PrismHomotopy PrismHomotopy::with_coeffs(const WeightVector& w, std::vector<RingElem> r) {
  if (static_cast<int>(r.size()) != w.L() + 1) throw std::invalid_argument("prism: need L+1 coefficients");
  RingElem s = RingElem::zero(w.ring());
  for (int k = 0; k <= w.L(); ++k) s += r[k] * w[k];
  if (!(s == RingElem::one(w.ring()))) throw std::invalid_argument("prism: coefficients do not combine the weight to 1");
  return PrismHomotopy{w, std::move(r)};
}

CubeExpr cylinder_end(const CubeExpr& T, int end) {
  if (end != 0 && end != 1) throw std::invalid_argument("cylinder_end: end must be 0 or 1");
  return CubeExpr::lift(T, end);
}

std::vector<std::pair<CubeExpr, Rat>> prism_terms(const CubeExpr& T, const PrismHomotopy& h) {
  std::vector<std::pair<CubeExpr, Rat>> out;
  const int L = h.weight.L();
  auto xi = CubeExpr::cross_zero(T);
  for (int k = 0; k <= L; ++k) {
    const Rat& r = h.r[k].value();
    if (r == 0) continue;
    out.emplace_back(xi, r);
    out.emplace_back(CubeExpr::cross_jag(T, L, k), -r);
  }
  return out;
}

CubeChain theta_prism(const CubeExpr& T, const PrismHomotopy& h) {
  return collect(h.weight.ring(), T.arity() + 1, prism_terms(T, h));
}

CubeChain theta_prism(const CubeChain& u, const PrismHomotopy& h) {
  CubeChain out(u.ring(), u.degree() + 1);
  for (const auto& [g, c] : u.terms()) out.add_scaled(theta_prism(g, h), c);
  return out;
}

Certificate settle(std::string identity, long expanded_terms, const CubeChain& difference, const Rat& lattice_step) {
  Certificate cert;
  cert.identity = std::move(identity);
  cert.terms = expanded_terms;
  std::vector<std::pair<CubeExpr, Rat>> left(difference.terms().begin(), difference.terms().end());
  std::vector<bool> done(left.size(), false);
  long leftover = 0;
  for (std::size_t a = 0; a < left.size(); ++a) {
    if (done[a]) continue;
    std::vector<std::size_t> cls{a};
    Rat sum = left[a].second;
    for (std::size_t b = a + 1; b < left.size(); ++b)
      if (!done[b] && maps_equal(left[a].first, left[b].first, lattice_step)) {
        cls.push_back(b);
        sum += left[b].second;
      }
    for (auto i : cls) done[i] = true;
    if (difference.ring().normalize(sum) == 0) {
      cert.lattice += static_cast<long>(cls.size());
    } else {
      leftover += static_cast<long>(cls.size());
      json entry{{"term", left[a].first.describe()}, {"coeff", to_string(difference.ring().normalize(sum))}};
      // a point where this class differs from the zero map of the other side
      for_each_lattice_point(left[a].first.arity(), to_long(lattice_step.get_den()), [&](const Point& x) {
        json p = json::array();
        for (const auto& c : x) p.push_back(to_string(c));
        entry["witness"] = p;
        return false;
      });
      cert.residual.push_back(entry);
    }
  }
  cert.structural = std::max(0L, expanded_terms - cert.lattice - leftover);
  cert.ok = cert.residual.empty();
  return cert;
}

Certificate verify_prism_identity(const CubeExpr& T, const PrismHomotopy& h, const Rat& lattice_step, Exec mode) {
  const WeightVector& w = h.weight;
  const RingSpec R = w.ring();
  const int n = T.arity();
  CubeChain theta = theta_prism(T, h);
  CubeChain lhs = boundary(theta, w, mode);
  CubeChain rhs(R, n);
  rhs.add(cylinder_end(T, 0), n % 2 ? -1 : 1);
  rhs.add(cylinder_end(T, 1), n % 2 ? 1 : -1);
  const long S = w.L() + 1, P = static_cast<long>(prism_terms(T, h).size());
  long terms = P * (n + 1) * S + 2;
  if (n >= 1) {
    rhs += theta_prism(boundary(CubeChain::of(R, T), w, mode), h);
    terms += n * S * P;
  }
  return settle("lemma2", terms, lhs - rhs, lattice_step);
}

std::vector<std::pair<CubeExpr, Rat>> subdivision_terms(const CubeExpr& T) {
  const int n = T.arity();
  std::vector<std::pair<CubeExpr, Rat>> out;
  if (n == 0) {
    out.emplace_back(T, -1);
    return out;
  }
  std::size_t total = 1;
  for (int i = 0; i < n; ++i) total *= 3;
  // digit 0: (e, v) = (0, 1); digit 1: (2, −1); digit 2: (2, 1)
  for (std::size_t code = 0; code < total; ++code) {
    std::vector<Rat> e(n), v(n);
    int sign = -1;
    std::size_t c = code;
    for (int i = 0; i < n; ++i, c /= 3) {
      int d = static_cast<int>(c % 3);
      e[i] = d == 0 ? 0 : 2;
      v[i] = d == 1 ? -1 : 1;
      if (d == 1) sign = -sign;
    }
    out.emplace_back(CubeExpr::clamped(T, rat(1, 3), e, v), sign);
  }
  return out;
}

CubeChain subdivide(RingSpec ring, const CubeExpr& T) { return collect(ring, T.arity(), subdivision_terms(T)); }

CubeChain subdivide(const CubeChain& u) {
  CubeChain out(u.ring(), u.degree());
  std::vector<std::pair<CubeExpr, Rat>> gens(u.terms().begin(), u.terms().end());
  auto parts = map_range<CubeChain>(gens.size(), Exec::Parallel,
                                    [&](std::size_t i) { return subdivide(u.ring(), gens[i].first); });
  for (std::size_t i = 0; i < gens.size(); ++i) out.add_scaled(parts[i], gens[i].second);
  return out;
}

CubeChain iterate_sd(const CubeChain& u, int k) {
  if (k < 0) throw std::invalid_argument("iterate_sd: negative count");
  CubeChain out = u;
  for (int i = 0; i < k; ++i) out = subdivide(out);
  return out;
}

RingElem iterate_sd_coefficient(const RingElem& a, const RingElem& b, int k) {
  auto r = subdivision_coefficient(a, b, k);
  if (!r) throw NoWitness("a^k and b^k do not generate the ring for k = " + std::to_string(k));
  return *r;
}

Certificate verify_sd_naturality(const CubeExpr& T, const RingElem& a, const RingElem& b, const Rat& lattice_step,
                                 Exec mode) {
  const WeightVector w = pair_weight(a, b);
  const RingSpec R = w.ring();
  if (T.arity() == 0) {
    Certificate c;
    c.identity = "lemma3";
    c.note = "degree 0: both sides vanish";
    return c;
  }
  const long n = T.arity();
  CubeChain lhs = boundary(subdivide(R, T), w, mode);
  CubeChain rhs = subdivide(boundary(CubeChain::of(R, T), w, mode));
  long terms = pow3(n) * 2 * n + 2 * n * pow3(n - 1);
  return settle("lemma3", terms, lhs - rhs, lattice_step);
}

std::vector<std::pair<CubeExpr, Rat>> theta_sd_terms(const CubeExpr& T, bool tilde) {
  const int n = T.arity();
  std::size_t total = 1;
  for (int i = 0; i < n; ++i) total *= 3;
  std::vector<std::pair<CubeExpr, Rat>> out;
  for (std::size_t code = 0; code < total; ++code) {
    std::vector<int> z(n);
    int s = 0;
    std::size_t c = code;
    for (int i = 0; i < n; ++i, c /= 3) {
      z[i] = static_cast<int>(c % 3);
      s += z[i];
    }
    out.emplace_back(CubeExpr::warp(T, z, tilde), s % 2 ? -1 : 1);
  }
  return out;
}

CubeChain theta_sd(RingSpec ring, const CubeExpr& T, bool tilde) {
  return collect(ring, T.arity() + 1, theta_sd_terms(T, tilde));
}

CubeChain theta_sd(const CubeChain& u, bool tilde) {
  CubeChain out(u.ring(), u.degree() + 1);
  std::vector<std::pair<CubeExpr, Rat>> gens(u.terms().begin(), u.terms().end());
  auto parts = map_range<CubeChain>(gens.size(), Exec::Parallel,
                                    [&](std::size_t i) { return theta_sd(u.ring(), gens[i].first, tilde); });
  for (std::size_t i = 0; i < gens.size(); ++i) out.add_scaled(parts[i], gens[i].second);
  return out;
}

Certificate verify_sd_homotopy(const CubeExpr& T, const RingElem& a, const RingElem& b, bool tilde,
                               const Rat& lattice_step, Exec mode) {
  const WeightVector w = pair_weight(a, b);
  const RingSpec R = w.ring();
  const int n = T.arity();
  CubeChain theta = theta_sd(R, T, tilde);
  CubeChain lhs = boundary(theta, w, mode);
  const Rat& keep = tilde ? a.value() : b.value();
  const Rat& sub = tilde ? b.value() : a.value();
  const Rat sign = n % 2 ? -1 : 1;
  CubeChain rhs(R, n);
  rhs.add(T, sign * keep);
  CubeChain sd = subdivide(R, T);
  rhs.add_scaled(sd, -sign * sub);
  long terms = pow3(n) * 2 * (n + 1) + 1 + pow3(n);
  if (n >= 1) {
    rhs += theta_sd(boundary(CubeChain::of(R, T), w, mode), tilde);
    terms += 2 * n * pow3(n - 1);
  }
  return settle(tilde ? "eq7~" : "eq7", terms, lhs - rhs, lattice_step);
}

DiameterBound mesh_diameter_bound(const CubeExpr& T, int k) {
  if (T.kind() != CubeExpr::Kind::AffineCell) throw std::invalid_argument("mesh_diameter_bound: needs an affine cell");
  if (k < 0) throw std::invalid_argument("mesh_diameter_bound: negative k");
  DiameterBound out;
  Rat shrink = rpow(rat(1, 3), static_cast<unsigned>(k));
  out.max = 0;
  for (std::size_t i = 0; i < T.node().lo.size(); ++i) {
    out.extent.push_back((T.node().hi[i] - T.node().lo[i]) * shrink);
    if (out.extent.back() > out.max) out.max = out.extent.back();
  }
  return out;
}

std::optional<std::vector<Rat>> image_extent(const CubeExpr& T) {
  CubeExpr c = canonical(T);
  if (c.kind() != CubeExpr::Kind::Base) return std::nullopt;
  const BaseTable& t = *c.node().table;
  std::vector<Rat> lo(t.dim()), hi(t.dim());
  for (std::size_t p = 0; p < t.points(); ++p)
    for (int k = 0; k < t.dim(); ++k) {
      if (p == 0 || t.value(p, k) < lo[k]) lo[k] = t.value(p, k);
      if (p == 0 || t.value(p, k) > hi[k]) hi[k] = t.value(p, k);
    }
  for (int k = 0; k < t.dim(); ++k) hi[k] -= lo[k];
  return hi;
}

}  // namespace cubar
