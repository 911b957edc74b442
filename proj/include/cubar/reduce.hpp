#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cubar/chaincore.hpp"
#include "cubar/gridmodel.hpp"
#include "cubar/modalg.hpp"

namespace cubar {

// A generator whose degeneracy could not be decided blocks the quotient.
class UnknownDegeneracy : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GammaContext {
  RingElem sigma;
  std::vector<CubeExpr> known_degenerate;  // consulted before the decision procedure
  bool unknown_as_nondegenerate = false;
  static GammaContext from_weight(const WeightVector& w) { return GammaContext{index(w), {}, false}; }
};

// Canonical residue of c in R/σR, written as an element of R.
Rat residue_mod_sigma(const RingSpec& ring, const Rat& c, const Rat& sigma);

// Drops degenerate generators, then reduces coefficients modulo σ.
CubeChain gamma_normal_form(const CubeChain& u, const GammaContext& ctx);
GridChain gamma_normal_form(const GridChain& u, const GammaContext& ctx);

// A complex of modules M_n = R^{g_n}/(q_n) with boundary lifts; q_n = 0 means M_n is free.
struct PresentedComplex {
  RingSpec ring = RingSpec::integers();
  std::vector<int> ranks;
  std::vector<Int> moduli;
  std::vector<RatMatrix> d;  // d[n]: lift of M_n → M_{n−1}, entries reduced modulo q_{n−1}

  int top() const { return static_cast<int>(ranks.size()) - 1; }
  int rank(int n) const { return n < 0 || n > top() ? 0 : ranks[static_cast<std::size_t>(n)]; }
  Int modulus(int n) const { return n < 0 || n > top() ? Int(0) : moduli[static_cast<std::size_t>(n)]; }
  RatMatrix matrix(int n) const;
  // True when every composite d[n]·d[n+1] vanishes in M_{n−1}.
  bool composes_to_zero() const;
};

std::vector<Presentation> presented_homology(const PresentedComplex& c, int n_max);

// Raw modules in degrees ≥ β and Γ-quotient modules below; nullopt stands for β = ∞.
// The map out of degree β quotients after the boundary. Degrees above the closure's top are empty.
// With sub, generators of that face-closed subset leave the bases, giving the relative complex.
PresentedComplex beta_complex(const GeneratorSet& gens, const WeightVector& w, std::optional<int> beta,
                              const GeneratorSet* sub = nullptr);

// Γ-quotient complex; raises std::logic_error if a degenerate generator's boundary leaves Γ.
PresentedComplex gamma_boundary_matrices(const GeneratorSet& gens, const WeightVector& w);

struct PointVariant {
  enum Kind { Raw, Normalized, Beta } kind = Raw;
  int beta = 0;
  static PointVariant raw() { return {Raw, 0}; }
  static PointVariant normalized() { return {Normalized, 0}; }
  static PointVariant truncated(int b) { return {Beta, b}; }
  std::string str() const;
};

// Closed-form homology of a point in degrees 0..n_max.
std::vector<Presentation> point_theory_table(const WeightVector& w, int n_max, PointVariant v);
// The same table from the point model's matrices.
std::vector<Presentation> point_theory_matrices(const WeightVector& w, int n_max, PointVariant v);

}  // namespace cubar
