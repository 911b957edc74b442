#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cubar/chaincore.hpp"
#include "cubar/coeff.hpp"
#include "cubar/cubeexpr.hpp"
#include "cubar/modalg.hpp"
#include "cubar/parallel.hpp"

namespace cubar {

// Elementary box base + [0, extent] in ℤ^d.
struct Cell {
  std::vector<long> base;
  std::vector<int> extent;
  friend bool operator==(const Cell&, const Cell&) = default;
};

// A finite cubical complex given by its top cells, with an optional subcomplex for pairs.
struct GridModel {
  std::string name;
  int dim = 0;
  int L = 1;
  std::vector<Cell> top_cells;
  std::optional<std::vector<Cell>> subcomplex;

  json to_json() const;
  static GridModel from_json(const json& j);
  GridModel sub_model() const;  // the subcomplex as a model of its own (empty if absent)
};

// One axis of an affine generator: either fixed, or offset + scale·x_var.
struct Axis {
  bool free = false;
  Rat offset;
  Rat scale;
  int var = -1;
  friend bool operator==(const Axis&, const Axis&) = default;
};

// An affine map Iⁿ → ℝ^d sending each output axis to a constant or to one input coordinate.
// Input coordinates that no axis uses make the generator degenerate.
class LCubicalGenerator {
 public:
  LCubicalGenerator(int arity, std::vector<Axis> axes);
  static LCubicalGenerator from_cell(const Cell& c);

  int degree() const { return arity_; }
  int dim() const { return static_cast<int>(axes_.size()); }
  const std::vector<Axis>& axes() const { return axes_; }
  bool is_degenerate() const;
  int used_vars() const;

  // Coordinate j (1-based) fixed at i/L; later coordinates shift down.
  LCubicalGenerator face(int L, int i, int j) const;
  // Re-index inputs: var u becomes slot[u] of a generator with the given arity.
  LCubicalGenerator placed(const std::vector<int>& slot, int arity) const;
  // The clamped subdivision piece y_u = (e_u + v_u·x_u)/3; all pieces stay affine.
  LCubicalGenerator sd_piece(const std::vector<int>& e, const std::vector<int>& v) const;
  // Image under x ↦ A·x + b when each row of A has at most one nonzero entry.
  std::optional<LCubicalGenerator> pushed(const AffineMap& f) const;

  Point eval(const Point& x) const;
  std::pair<Point, Point> carrier() const;  // componentwise min / max of the image
  CubeExpr to_expr() const;
  std::string str() const;

  friend bool operator==(const LCubicalGenerator& a, const LCubicalGenerator& b) {
    return a.arity_ == b.arity_ && a.axes_ == b.axes_;
  }
  friend bool operator<(const LCubicalGenerator& a, const LCubicalGenerator& b);

 private:
  int arity_;
  std::vector<Axis> axes_;
};

template <>
struct GeneratorTraits<LCubicalGenerator> {
  static int degree(const LCubicalGenerator& g) { return g.degree(); }
  static LCubicalGenerator normalize(const LCubicalGenerator& g) { return g; }
  static LCubicalGenerator face(const LCubicalGenerator& g, int L, int i, int j) { return g.face(L, i, j); }
  static json to_json(const LCubicalGenerator& g) { return g.str(); }
};

using GridChain = Chain<LCubicalGenerator>;

// Sorted, deduplicated generators per degree 0..top.
struct GeneratorSet {
  int L = 1;
  std::vector<std::vector<LCubicalGenerator>> by_degree;

  int top() const { return static_cast<int>(by_degree.size()) - 1; }
  int count(int n) const;
  const std::vector<LCubicalGenerator>& at(int n) const;  // empty list outside 0..top
  int index_of(int n, const LCubicalGenerator& g) const;   // −1 when absent
  bool contains(const LCubicalGenerator& g) const { return index_of(g.degree(), g) >= 0; }
  long total() const;
};

struct ClosureOptions {
  // When ≥ 0, every non-degenerate generator is also placed degenerately in all degrees up to this bound.
  int degenerate_up_to = -1;
};

GeneratorSet close_generators(const std::vector<LCubicalGenerator>& seeds, int L, ClosureOptions opts = {});
GeneratorSet closure_generate(const GridModel& K, int L, ClosureOptions opts = {});

// The generators of the closure that are non-degenerate.
GeneratorSet nondegenerate_part(const GeneratorSet& gens);

// Raised when a face of a listed generator is missing from the list.
class ClosureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Column per degree-n generator with its boundary in the degree-(n−1) basis; n = 0 gives 0 rows.
RatMatrix boundary_matrix(const GeneratorSet& gens, int n, const WeightVector& w, Exec mode = Exec::Parallel);

struct BoundaryMatrices {
  RingSpec ring = RingSpec::integers();
  std::vector<int> ranks;      // basis size per degree 0..top
  std::vector<RatMatrix> d;    // d[n]: C_n → C_{n−1}

  int top() const { return static_cast<int>(ranks.size()) - 1; }
  int rank(int n) const { return n < 0 || n > top() ? 0 : ranks[static_cast<std::size_t>(n)]; }
  RatMatrix matrix(int n) const;  // correctly shaped zero outside the stored range
};

BoundaryMatrices assemble(const GeneratorSet& gens, const WeightVector& w, Exec mode = Exec::Parallel);
// Homology of a free complex in degrees 0..n_max.
std::vector<Presentation> free_homology(const BoundaryMatrices& m, int n_max);

// The quotient complex C(X)/C(A) in the basis of X-generators outside A.
BoundaryMatrices pair_matrices(const GeneratorSet& X, const GeneratorSet& A, const WeightVector& w,
                               Exec mode = Exec::Parallel);

struct LesSlot {
  std::string slot;
  bool exact = true;
};
struct LesReport {
  bool exact = true;
  std::vector<LesSlot> slots;
  std::vector<Presentation> H_A, H_X, H_XA;
  std::vector<bool> connecting_nonzero;  // k*: H_n(X,A) → H_{n−1}(A), indexed by n
  long euler = 0;                        // Σ (−1)^n (rk H_n(A) − rk H_n(X) + rk H_n(X,A))
  json to_json() const;
};
LesReport connecting_and_les_check(const GeneratorSet& X, const GeneratorSet& A, const WeightVector& w);

struct Box {
  Point lo, hi;
};
struct FilterResult {
  GeneratorSet gens;
  bool covered = true;
  std::optional<Point> witness;  // a carrier point no cover interior reaches
};
// Keeps generators whose carrier lies in some cover box. Coverage is checked on a lattice that
// refines every box corner; interiors are taken relative to the bounding box of the model.
FilterResult u_small_filter(const GeneratorSet& gens, const std::vector<Box>& cover);
bool inside_some(const LCubicalGenerator& g, const std::vector<Box>& cover);

// SD on grid generators: 3ⁿ affine pieces with sign −Πv.
std::vector<std::pair<LCubicalGenerator, Rat>> sd_generator(const LCubicalGenerator& g);

struct SubdivisionClassDegree {
  int degree = 0;
  int cycles = 0;
  bool forward = true;  // a·SD z − b·z is a boundary for every cycle basis element
  bool mirror = true;   // b·SD z − a·z is a boundary for every cycle basis element
};
struct SubdivisionClassReport {
  bool ok = true;
  long enlarged_generators = 0;
  std::vector<SubdivisionClassDegree> degrees;
  json to_json() const;
};
// Matrix-level check over ℤ that a·SD z − b·z and b·SD z − a·z are boundaries for every cycle z of
// the raw model with degenerates, inside its face closure enlarged by SD and both SD homotopies.
SubdivisionClassReport subdivision_class_check(const GridModel& X, long a, long b, int n_max);

}  // namespace cubar
