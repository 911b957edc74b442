#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cubar/modalg.hpp"
#include "cubar/rational.hpp"
#include "json.hpp"

namespace cubar {

using json = nlohmann::ordered_json;

// Multilinear interpolation of a value table on the lattice (1/N)ℤ^n ∩ Iⁿ.
// Lattice points are stored row-major with input coordinate 0 varying slowest.
class BaseTable {
 public:
  BaseTable(int arity, int dim, long N, std::vector<Rat> values);
  static BaseTable identity(int n);
  static BaseTable constant(int n, const Point& p);
  // Affine parametrization of the box Π[lo_k, hi_k]; axes with lo_k = hi_k are fixed.
  static BaseTable box(const std::vector<Rat>& lo, const std::vector<Rat>& hi);

  int arity() const { return n_; }
  int dim() const { return d_; }
  long N() const { return N_; }
  std::size_t points() const { return values_.size() / static_cast<std::size_t>(d_); }
  const std::vector<Rat>& values() const { return values_; }
  const Rat& value(std::size_t point, int k) const { return values_[point * d_ + k]; }

  Point eval(const Point& x) const;
  BaseTable restrict_slot(int slot, const Rat& c) const;
  BaseTable coarsened() const;
  bool independent_of(int slot) const;
  std::size_t digest() const { return digest_; }

  json to_json() const;
  static BaseTable from_json(const json& j);

  friend bool operator==(const BaseTable& a, const BaseTable& b) {
    return a.n_ == b.n_ && a.d_ == b.d_ && a.N_ == b.N_ && a.values_ == b.values_;
  }
  friend int compare(const BaseTable& a, const BaseTable& b);

 private:
  bool exact_at(long M) const;
  int n_, d_;
  long N_;
  std::vector<Rat> values_;
  std::size_t digest_;
};

// One coordinate of a reparametrization, as a function of the input variables:
//   Const:  c
//   Frac:   clamp?((a + s·x_u) / (1 + t·x_w)); t = 0 gives the affine case
//   Jag:    χ_k with step 1/L applied to x_u
struct CoordFn {
  enum class Kind { Const, Frac, Jag };
  Kind kind = Kind::Const;
  Rat c, a, s, t;
  int u = -1, w = -1;
  bool clamped = false;
  int L = 0, k = 0;

  static CoordFn constant(const Rat& c);
  static CoordFn var(int u);
  static CoordFn affine(const Rat& a, const Rat& s, int u, bool clamped);
  static CoordFn frac(const Rat& a, const Rat& s, int u, const Rat& b, const Rat& t, int w, bool clamped);
  static CoordFn jag(int L, int k, int u);

  Rat eval(const Point& x) const;
  CoordFn simplified() const;
  bool is_var() const { return kind == Kind::Frac && !clamped && a == 0 && s == 1 && t == 0; }
  bool is_piecewise_linear() const { return kind != Kind::Frac || t == 0; }
  std::vector<int> vars() const;
  std::string key() const;
  json to_json() const;
  static CoordFn from_json(const json& j);
  friend bool operator==(const CoordFn&, const CoordFn&) = default;
};

// Post-composition y ↦ A·y + b.
struct AffineMap {
  RatMatrix A;
  std::vector<Rat> b;
  static AffineMap identity(int d);
  static AffineMap constant(int d_in, const Point& p);
  int in_dim() const { return A.cols(); }
  int out_dim() const { return A.rows(); }
  Point apply(const Point& y) const;
  AffineMap after(const AffineMap& g) const;  // this ∘ g
  std::string key() const;
  friend bool operator==(const AffineMap& x, const AffineMap& y) { return x.A == y.A && x.b == y.b; }
};

enum class Curve { Chi, Eta0, Eta1, Eta2, EtaT0, EtaT1, EtaT2 };

Rat clamp(const Rat& y);
// χ_k for step 1/L at x, or η_z / η̃_z at (x, y), with the case splits written out.
Rat aux_curve(Curve kind, const std::vector<Rat>& args, int L = 0, int k = 0);
Rat jag(int L, int k, const Rat& x);
Rat eta(int z, bool tilde, const Rat& x, const Rat& y);

struct ExprNode;

// A symbolic singular cube Iⁿ → ℚ^d. Immutable; copies share the tree.
class CubeExpr {
 public:
  enum class Kind { Base, AffineCell, Clamped, Face, CrossZero, CrossJag, Warp, Lift, Reparam, Push };

  static CubeExpr base(BaseTable t);
  static CubeExpr identity(int n);
  static CubeExpr constant(int n, const Point& p);
  static CubeExpr affine_cell(std::vector<Rat> lo, std::vector<Rat> hi);
  static CubeExpr clamped(CubeExpr inner, Rat alpha, std::vector<Rat> e, std::vector<Rat> v);
  static CubeExpr face(CubeExpr inner, int L, int i, int j);
  static CubeExpr cross_zero(CubeExpr inner);
  static CubeExpr cross_jag(CubeExpr inner, int L, int k);
  static CubeExpr warp(CubeExpr inner, std::vector<int> z, bool tilde);
  static CubeExpr lift(CubeExpr inner, Rat value);
  static CubeExpr push(AffineMap f, CubeExpr inner);
  static CubeExpr reparam(std::shared_ptr<const BaseTable> leaf, std::vector<CoordFn> coords,
                          std::vector<CoordFn> extra, int arity);

  Kind kind() const;
  int arity() const;
  int target_dim() const;
  const ExprNode& node() const { return *p_; }
  const std::string& key() const;
  bool is_canonical() const;
  CubeExpr marked_canonical() const;

  Point eval(const Point& x) const;
  std::string describe() const;
  json to_json() const;
  static CubeExpr from_json(const json& j);

  friend bool operator==(const CubeExpr& a, const CubeExpr& b);
  friend int compare(const CubeExpr& a, const CubeExpr& b);
  friend bool operator<(const CubeExpr& a, const CubeExpr& b) { return compare(a, b) < 0; }

 private:
  explicit CubeExpr(std::shared_ptr<const ExprNode> p) : p_(std::move(p)) {}
  std::shared_ptr<const ExprNode> p_;
};

struct ExprNode {
  CubeExpr::Kind kind;
  int arity = 0, dim = 0;
  std::string key;
  std::vector<CubeExpr> children;
  std::shared_ptr<const BaseTable> table;  // Base, AffineCell and Reparam leaf
  std::vector<Rat> lo, hi;                 // AffineCell
  Rat alpha, value;                        // Clamped, Lift
  std::vector<Rat> e, v;                   // Clamped
  int L = 0, i = 0, j = 0, k = 0;          // Face, CrossJag
  std::vector<int> z;                      // Warp
  bool tilde = false;
  std::vector<CoordFn> coords, extra;      // Reparam
  std::optional<AffineMap> map;            // Push
  bool canonical = false;
};

// Canonical representative: a Base table whenever the map lies in the piecewise-multilinear
// fragment, a Reparam node over a Base leaf otherwise, and the tree with canonical children
// when neither applies. Equal canonical forms denote equal maps.
CubeExpr canonical(const CubeExpr& e);
CubeExpr canonical_face(const CubeExpr& e, int L, int i, int j);

enum class Tri { Yes, No, Unknown };
Tri is_degenerate(const CubeExpr& e, long search_steps = 6);
bool maps_equal(const CubeExpr& a, const CubeExpr& b, const Rat& lattice_step);
// First lattice point where the maps differ.
std::optional<Point> lattice_witness(const CubeExpr& a, const CubeExpr& b, const Rat& lattice_step);
void for_each_lattice_point(int n, long N, const std::function<bool(const Point&)>& f);

}  // namespace cubar
