#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "cubar/chaincore.hpp"

namespace cubar {

// The weight admits no Σ r_k·m_k = 1, so the prism homotopy cannot be built.
class NoWitness : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PrismHomotopy {
  WeightVector weight;
  std::vector<RingElem> r;  // Σ r_k·m_k = 1
  static PrismHomotopy from_weight(const WeightVector& w);
  static PrismHomotopy with_coeffs(const WeightVector& w, std::vector<RingElem> r);
};

// T followed by the inclusion at height end of the cylinder.
CubeExpr cylinder_end(const CubeExpr& T, int end);

// r_k·(ξ(T) − ψ_k(T)) for every k, before like terms are combined.
std::vector<std::pair<CubeExpr, Rat>> prism_terms(const CubeExpr& T, const PrismHomotopy& h);
CubeChain theta_prism(const CubeExpr& T, const PrismHomotopy& h);
CubeChain theta_prism(const CubeChain& u, const PrismHomotopy& h);

// ∂Θ_n(T) = (−1)^{n+2}(e₀T − e₁T) + Θ_{n−1}∂T.
Certificate verify_prism_identity(const CubeExpr& T, const PrismHomotopy& h, const Rat& lattice_step,
                                  Exec mode = Exec::Parallel);

// Signed 3ⁿ-term subdivision at scale 1/3; −T in degree 0.
std::vector<std::pair<CubeExpr, Rat>> subdivision_terms(const CubeExpr& T);
CubeChain subdivide(const CubeChain& u);
CubeChain subdivide(RingSpec ring, const CubeExpr& T);
CubeChain iterate_sd(const CubeChain& u, int k);
// r_k = x_k·b^k + y_k·a^k; throws NoWitness when a^k, b^k are not coprime.
RingElem iterate_sd_coefficient(const RingElem& a, const RingElem& b, int k);

// ∂SD(T) = SD(∂T) for the weight (a, b).
Certificate verify_sd_naturality(const CubeExpr& T, const RingElem& a, const RingElem& b, const Rat& lattice_step,
                                 Exec mode = Exec::Parallel);

// Σ_z (−1)^{Σz}·G_z(T) over z ∈ {0,1,2}ⁿ; the mirror family when tilde is set.
std::vector<std::pair<CubeExpr, Rat>> theta_sd_terms(const CubeExpr& T, bool tilde);
CubeChain theta_sd(RingSpec ring, const CubeExpr& T, bool tilde);
CubeChain theta_sd(const CubeChain& u, bool tilde);

// ∂Θ_n(T) = (−1)^{n+2}(b·T − a·SD T) + Θ_{n−1}∂T, with a and b exchanged for the mirror.
Certificate verify_sd_homotopy(const CubeExpr& T, const RingElem& a, const RingElem& b, bool tilde,
                               const Rat& lattice_step, Exec mode = Exec::Parallel);

// Per-axis extent of an affine cell after k subdivisions, and its maximum.
struct DiameterBound {
  std::vector<Rat> extent;
  Rat max;
};
DiameterBound mesh_diameter_bound(const CubeExpr& T, int k);
// Per-axis extent of the image of a cube whose canonical form is a table.
std::optional<std::vector<Rat>> image_extent(const CubeExpr& T);

// Residual of lhs − rhs after structural cancellation, resolved by lattice classes.
Certificate settle(std::string identity, long expanded_terms, const CubeChain& difference, const Rat& lattice_step);

}  // namespace cubar
