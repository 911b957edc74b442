#pragma once

#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cubar/coeff.hpp"
#include "cubar/cubeexpr.hpp"
#include "cubar/parallel.hpp"

namespace cubar {

// Degree, face and serialization hooks for chain generators.
template <class G>
struct GeneratorTraits;

template <>
struct GeneratorTraits<CubeExpr> {
  static int degree(const CubeExpr& g) { return g.arity(); }
  static CubeExpr normalize(const CubeExpr& g) { return canonical(g); }
  static CubeExpr face(const CubeExpr& g, int L, int i, int j) { return canonical_face(g, L, i, j); }
  static json to_json(const CubeExpr& g) { return g.to_json(); }
};

// Finite R-linear combination of canonical generators of one degree; no zero coefficients.
template <class G>
class Chain {
 public:
  using Traits = GeneratorTraits<G>;

  Chain(RingSpec ring, int degree) : ring_(ring), degree_(degree) {}
  static Chain of(RingSpec ring, const G& g, const Rat& c = 1) {
    Chain u(ring, Traits::degree(g));
    u.add(g, c);
    return u;
  }

  const RingSpec& ring() const { return ring_; }
  int degree() const { return degree_; }
  const std::map<G, Rat>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }
  RingElem coeff(const G& g) const {
    auto it = terms_.find(Traits::normalize(g));
    return RingElem(ring_, it == terms_.end() ? Rat(0) : it->second);
  }

  void add(const G& g, const Rat& c) { add_canonical(Traits::normalize(g), c); }
  // g must already be in normal form.
  void add_canonical(const G& g, const Rat& c) {
    if (Traits::degree(g) != degree_)
      throw std::invalid_argument("chain: generator of degree " + std::to_string(Traits::degree(g)) +
                                  " added to a degree " + std::to_string(degree_) + " chain");
    Rat v = c;
    auto it = terms_.find(g);
    if (it != terms_.end()) v += it->second;
    v = ring_.normalize(v);
    if (v == 0) {
      if (it != terms_.end()) terms_.erase(it);
    } else if (it != terms_.end()) {
      it->second = v;
    } else {
      terms_.emplace(g, v);
    }
  }

  Chain& add_scaled(const Chain& o, const Rat& r) {
    check(o);
    for (const auto& [g, c] : o.terms_) add_canonical(g, r * c);
    return *this;
  }
  Chain& operator+=(const Chain& o) { return add_scaled(o, 1); }
  Chain& operator-=(const Chain& o) { return add_scaled(o, -1); }
  Chain scaled(const Rat& r) const { return Chain(ring_, degree_).add_scaled(*this, r); }
  friend Chain operator+(Chain a, const Chain& b) { return a += b; }
  friend Chain operator-(Chain a, const Chain& b) { return a -= b; }
  friend bool operator==(const Chain& a, const Chain& b) {
    return a.ring_ == b.ring_ && a.degree_ == b.degree_ && a.terms_ == b.terms_;
  }

  json to_json() const {
    json t = json::array();
    for (const auto& [g, c] : terms_) t.push_back(json{{"gen", Traits::to_json(g)}, {"coeff", to_string(c)}});
    return json{{"degree", degree_}, {"terms", t}};
  }

 private:
  void check(const Chain& o) const {
    if (!(o.ring_ == ring_)) throw std::invalid_argument("chain: ring mismatch");
    if (o.degree_ != degree_) throw std::invalid_argument("chain: degree mismatch");
  }
  RingSpec ring_;
  int degree_;
  std::map<G, Rat> terms_;
};

// Σ_j (−1)^{j+1} Σ_i m_i·face(T, L, i, j) for each generator; degree 0 maps to zero.
template <class G>
std::vector<std::pair<G, Rat>> boundary_terms(const G& T, const WeightVector& w) {
  std::vector<std::pair<G, Rat>> out;
  int n = GeneratorTraits<G>::degree(T);
  if (n == 0) return out;
  int L = w.L();
  for (int j = 1; j <= n; ++j)
    for (int i = 0; i <= L; ++i) {
      Rat c = w[i].value();
      if (j % 2 == 0) c = -c;
      out.emplace_back(GeneratorTraits<G>::face(T, L, i, j), c);
    }
  return out;
}

template <class G>
Chain<G> boundary(const Chain<G>& u, const WeightVector& w, Exec mode = Exec::Parallel) {
  if (!(u.ring() == w.ring())) throw std::invalid_argument("boundary: chain and weight live over different rings");
  Chain<G> out(u.ring(), u.degree() == 0 ? 0 : u.degree() - 1);
  if (u.degree() == 0) return out;
  std::vector<std::pair<G, Rat>> gens(u.terms().begin(), u.terms().end());
  auto parts = map_range<std::vector<std::pair<G, Rat>>>(
      gens.size(), mode, [&](std::size_t t) { return boundary_terms(gens[t].first, w); });
  for (std::size_t t = 0; t < gens.size(); ++t)
    for (const auto& [g, c] : parts[t]) out.add_canonical(g, c * gens[t].second);
  return out;
}

// A chain modulo chains supported in a subspace A; rep carries no generator of A.
template <class G>
struct RelativeChain {
  Chain<G> rep;
  friend bool operator==(const RelativeChain& a, const RelativeChain& b) { return a.rep == b.rep; }
};

template <class G>
RelativeChain<G> relative_reduce(const Chain<G>& u, const std::function<bool(const G&)>& in_A) {
  Chain<G> rep(u.ring(), u.degree());
  for (const auto& [g, c] : u.terms())
    if (!in_A(g)) rep.add_canonical(g, c);
  return RelativeChain<G>{rep};
}

using CubeChain = Chain<CubeExpr>;

// Outcome of an identity check by term expansion.
struct Certificate {
  std::string identity;
  bool ok = true;
  bool constructible = true;
  long terms = 0;       // expanded terms before cancellation
  long structural = 0;  // terms matched by equal canonical form
  long lattice = 0;     // terms matched only by exact lattice equality
  std::vector<json> residual;
  std::string note;
  json to_json() const;
};

// ∂∂T expanded into its n(n−1)(L+1)² face-of-face terms, paired (j, p) ↔ (p+1, j).
Certificate verify_dd_zero(const CubeExpr& T, const WeightVector& w, Exec mode = Exec::Parallel);

CubeChain pushforward(const AffineMap& f, const CubeChain& u);

}  // namespace cubar
