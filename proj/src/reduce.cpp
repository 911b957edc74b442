#include "cubar/reduce.hpp"

#include "cubar/models.hpp"

namespace cubar {

Rat residue_mod_sigma(const RingSpec& ring, const Rat& c, const Rat& sigma) {
  switch (ring.kind()) {
    case RingKind::Rationals:
      return sigma == 0 ? c : Rat(0);
    case RingKind::Integers:
      return sigma == 0 ? c : Rat(mod_floor(c.get_num(), sigma.get_num()));
    case RingKind::IntegersModN: {
      Int g;
      Int s = sigma.get_num(), n(ring.modulus());
      mpz_gcd(g.get_mpz_t(), s.get_mpz_t(), n.get_mpz_t());
      return Rat(mod_floor(c.get_num(), g));
    }
  }
  return c;
}

namespace {

bool drop(const CubeExpr& g, const GammaContext& ctx) {
  for (const auto& k : ctx.known_degenerate)
    if (canonical(k) == g) return true;
  switch (is_degenerate(g)) {
    case Tri::Yes: return true;
    case Tri::No: return false;
    case Tri::Unknown:
      if (ctx.unknown_as_nondegenerate) return false;
      throw UnknownDegeneracy("gamma: degeneracy of " + g.describe() + " is undecided");
  }
  return false;
}

template <class G, class Drop>
Chain<G> quotient(const Chain<G>& u, const GammaContext& ctx, Drop should_drop) {
  if (!(ctx.sigma.ring() == u.ring())) throw std::invalid_argument("gamma: chain and index live over different rings");
  Chain<G> out(u.ring(), u.degree());
  for (const auto& [g, c] : u.terms()) {
    if (should_drop(g)) continue;
    out.add_canonical(g, residue_mod_sigma(u.ring(), c, ctx.sigma.value()));
  }
  return out;
}

}  // namespace

CubeChain gamma_normal_form(const CubeChain& u, const GammaContext& ctx) {
  return quotient(u, ctx, [&](const CubeExpr& g) { return drop(g, ctx); });
}

GridChain gamma_normal_form(const GridChain& u, const GammaContext& ctx) {
  return quotient(u, ctx, [](const LCubicalGenerator& g) { return g.is_degenerate(); });
}

// ---------------------------------------------------------------- presented complexes

RatMatrix PresentedComplex::matrix(int n) const {
  if (n >= 0 && n <= top()) return d[static_cast<std::size_t>(n)];
  return RatMatrix(rank(n - 1), rank(n));
}

namespace {

// The modulus presenting M_n as an abelian group; over ℤ/m a free module gets gcd(0, m) = m.
Int effective_modulus(const RingSpec& ring, const Int& q) {
  if (ring.kind() != RingKind::IntegersModN) return abs(q);
  Int g, n(ring.modulus());
  mpz_gcd(g.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
  return g;
}

IntMatrix relations(int g, const Int& e) {
  if (e == 0) return IntMatrix(g, 0);
  IntMatrix P(g, g);
  for (int i = 0; i < g; ++i) P(i, i) = e;
  return P;
}

}  // namespace

bool PresentedComplex::composes_to_zero() const {
  for (int n = 1; n <= top(); ++n) {
    RatMatrix P = matrix(n) * matrix(n + 1);
    Int e = effective_modulus(ring, modulus(n - 1));
    for (int i = 0; i < P.rows(); ++i)
      for (int j = 0; j < P.cols(); ++j) {
        const Rat& x = P(i, j);
        bool zero = ring.kind() == RingKind::Rationals ? (x == 0 || e != 0)
                                                        : (e == 0 ? x == 0 : mpz_divisible_p(x.get_num().get_mpz_t(), e.get_mpz_t()) != 0);
        if (!zero) return false;
      }
  }
  return true;
}

std::vector<Presentation> presented_homology(const PresentedComplex& c, int n_max) {
  std::vector<Presentation> out;
  if (c.ring.kind() == RingKind::Rationals) {
    // Over ℚ a module with nonzero modulus vanishes; drop it from the complex.
    auto live = [&](int n) { return c.modulus(n) == 0 ? c.rank(n) : 0; };
    auto mat = [&](int n) {
      RatMatrix M = c.matrix(n);
      return M.rows() == live(n - 1) && M.cols() == live(n) ? M : RatMatrix(live(n - 1), live(n));
    };
    for (int n = 0; n <= n_max; ++n) out.push_back(homology_from_matrices(c.ring, mat(n), mat(n + 1)));
    return out;
  }
  for (int n = 0; n <= n_max; ++n) {
    IntMatrix Dn = to_int_matrix(c.matrix(n)), Dn1 = to_int_matrix(c.matrix(n + 1));
    IntMatrix Pm = relations(c.rank(n - 1), effective_modulus(c.ring, c.modulus(n - 1)));
    IntMatrix Pn = relations(c.rank(n), effective_modulus(c.ring, c.modulus(n)));
    Presentation group = homology_presented(Dn, Pm, Dn1, Pn, c.rank(n));
    out.push_back(Presentation::from_abelian(c.ring, group));
  }
  return out;
}

// ---------------------------------------------------------------- Γ and β complexes

namespace {

Int modulus_of_sigma(const RingSpec& ring, const Rat& sigma) {
  if (ring.kind() == RingKind::Rationals) return sigma == 0 ? Int(0) : Int(1);
  return sigma.get_num();
}

}  // namespace

PresentedComplex beta_complex(const GeneratorSet& gens, const WeightVector& w, std::optional<int> beta,
                              const GeneratorSet* sub) {
  if (beta && *beta < 0) throw InputError("beta must be non-negative");
  const RingSpec& R = w.ring();
  const Rat sigma = index(w).value();
  auto raw = [&](int n) { return beta.has_value() && n >= *beta; };
  if (sub)
    for (int n = 0; n <= sub->top(); ++n)
      for (const auto& g : sub->at(n))
        if (!gens.contains(g)) throw InputError("subcomplex generator " + g.str() + " is not in the model");

  std::vector<std::vector<int>> basis;
  std::vector<std::vector<bool>> degenerate_drop;
  for (int n = 0; n <= gens.top(); ++n) {
    std::vector<int> b;
    std::vector<bool> k;
    for (int i = 0; i < gens.count(n); ++i) {
      const auto& g = gens.at(n)[static_cast<std::size_t>(i)];
      bool in_sub = sub && sub->contains(g);
      bool dropped = !raw(n) && g.is_degenerate();
      k.push_back(dropped && !in_sub);
      if (!in_sub && !dropped) b.push_back(i);
    }
    basis.push_back(b);
    degenerate_drop.push_back(k);
  }

  PresentedComplex c;
  c.ring = R;
  for (int n = 0; n <= gens.top(); ++n) {
    RatMatrix full = boundary_matrix(gens, n, w);
    const bool quotient_target = n >= 1 && !raw(n - 1);
    const auto& rows = n >= 1 ? basis[static_cast<std::size_t>(n - 1)] : std::vector<int>{};
    const auto& cols = basis[static_cast<std::size_t>(n)];
    RatMatrix M(static_cast<int>(rows.size()), static_cast<int>(cols.size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t j = 0; j < cols.size(); ++j) {
        Rat x = full(rows[i], cols[j]);
        M(static_cast<int>(i), static_cast<int>(j)) = quotient_target ? residue_mod_sigma(R, x, sigma) : x;
      }
    // Degeneracy guard: a dropped generator's boundary must vanish in the quotient.
    if (!raw(n) && quotient_target) {
      for (int j = 0; j < full.cols(); ++j) {
        if (!degenerate_drop[static_cast<std::size_t>(n)][static_cast<std::size_t>(j)]) continue;
        for (int r : rows)
          if (residue_mod_sigma(R, full(r, j), sigma) != 0)
            throw std::logic_error("gamma: boundary of degenerate " + gens.at(n)[static_cast<std::size_t>(j)].str() +
                                   " leaves the degenerate submodule");
      }
    }
    c.ranks.push_back(static_cast<int>(cols.size()));
    c.moduli.push_back(raw(n) ? Int(0) : modulus_of_sigma(R, sigma));
    c.d.push_back(M);
  }
  return c;
}

PresentedComplex gamma_boundary_matrices(const GeneratorSet& gens, const WeightVector& w) {
  return beta_complex(gens, w, std::nullopt);
}

// ---------------------------------------------------------------- point tables

std::string PointVariant::str() const {
  switch (kind) {
    case Raw: return "raw";
    case Normalized: return "normalized";
    case Beta: return "beta=" + std::to_string(beta);
  }
  return "";
}

namespace {

// R/σR.
Presentation quotient_by(const RingSpec& R, const Rat& sigma) {
  switch (R.kind()) {
    case RingKind::Rationals: return Presentation{R, sigma == 0 ? 1 : 0, {}};
    case RingKind::Integers: return Presentation::from_cyclic(R, {abs(sigma.get_num())});
    case RingKind::IntegersModN: {
      Int g, n(R.modulus()), s = sigma.get_num();
      mpz_gcd(g.get_mpz_t(), s.get_mpz_t(), n.get_mpz_t());
      return Presentation::from_abelian(R, Presentation::from_cyclic(RingSpec::integers(), {g}));
    }
  }
  return Presentation::zero(R);
}

// {x ∈ R : σx = 0}.
Presentation annihilator(const RingSpec& R, const Rat& sigma) {
  if (R.kind() == RingKind::IntegersModN) return quotient_by(R, sigma);  // both are ℤ/gcd(σ, m)
  return Presentation{R, sigma == 0 ? 1 : 0, {}};
}

Presentation free_one(const RingSpec& R) { return Presentation{R, 1, {}}; }

}  // namespace

std::vector<Presentation> point_theory_table(const WeightVector& w, int n_max, PointVariant v) {
  const RingSpec& R = w.ring();
  const Rat sigma = index(w).value();
  auto raw_at = [&](int n) { return n % 2 == 0 ? quotient_by(R, sigma) : annihilator(R, sigma); };
  std::vector<Presentation> out;
  for (int n = 0; n <= n_max; ++n) {
    switch (v.kind) {
      case PointVariant::Raw: out.push_back(raw_at(n)); break;
      case PointVariant::Normalized: out.push_back(n == 0 ? quotient_by(R, sigma) : Presentation::zero(R)); break;
      case PointVariant::Beta: {
        const int b = v.beta;
        if (b == 0 || n > b) out.push_back(raw_at(n));
        else if (n == b) out.push_back(b % 2 == 0 ? quotient_by(R, sigma) : free_one(R));
        else out.push_back(n == 0 ? quotient_by(R, sigma) : Presentation::zero(R));
        break;
      }
    }
  }
  return out;
}

std::vector<Presentation> point_theory_matrices(const WeightVector& w, int n_max, PointVariant v) {
  GridModel point = load_grid_model("point");
  GeneratorSet gens = closure_generate(point, w.L(), {n_max + 1});
  std::optional<int> beta;
  if (v.kind == PointVariant::Raw) beta = 0;
  if (v.kind == PointVariant::Beta) beta = v.beta;
  return presented_homology(beta_complex(gens, w, beta), n_max);
}

}  // namespace cubar
