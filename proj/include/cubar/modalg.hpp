#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cubar/coeff.hpp"
#include "json.hpp"

namespace cubar {

// Dense row-major matrix; the shape is kept even when one dimension is zero.
template <class T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols) : r_(rows), c_(cols), a_(static_cast<std::size_t>(rows) * cols) {}
  static Matrix identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }
  static Matrix from_rows(const std::vector<std::vector<long>>& rows) {
    Matrix m(static_cast<int>(rows.size()), rows.empty() ? 0 : static_cast<int>(rows[0].size()));
    for (int i = 0; i < m.r_; ++i)
      for (int j = 0; j < m.c_; ++j) m(i, j) = rows[i][j];
    return m;
  }

  int rows() const { return r_; }
  int cols() const { return c_; }
  T& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * c_ + j]; }
  const T& operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * c_ + j]; }

  bool is_zero() const {
    for (const auto& x : a_)
      if (x != 0) return false;
    return true;
  }
  Matrix transpose() const {
    Matrix t(c_, r_);
    for (int i = 0; i < r_; ++i)
      for (int j = 0; j < c_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }
  Matrix col_range(int begin, int end) const {
    Matrix m(r_, end - begin);
    for (int i = 0; i < r_; ++i)
      for (int j = begin; j < end; ++j) m(i, j - begin) = (*this)(i, j);
    return m;
  }
  Matrix row_range(int begin, int end) const {
    Matrix m(end - begin, c_);
    for (int i = begin; i < end; ++i)
      for (int j = 0; j < c_; ++j) m(i - begin, j) = (*this)(i, j);
    return m;
  }
  static Matrix hcat(const Matrix& a, const Matrix& b) {
    if (a.r_ != b.r_) throw std::invalid_argument("hcat: row count mismatch");
    Matrix m(a.r_, a.c_ + b.c_);
    for (int i = 0; i < a.r_; ++i) {
      for (int j = 0; j < a.c_; ++j) m(i, j) = a(i, j);
      for (int j = 0; j < b.c_; ++j) m(i, a.c_ + j) = b(i, j);
    }
    return m;
  }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.c_ != b.r_) throw std::invalid_argument("matrix product: shape mismatch");
    Matrix m(a.r_, b.c_);
    for (int i = 0; i < a.r_; ++i)
      for (int k = 0; k < a.c_; ++k) {
        const T& x = a(i, k);
        if (x == 0) continue;
        for (int j = 0; j < b.c_; ++j)
          if (b(k, j) != 0) m(i, j) += x * b(k, j);
      }
    return m;
  }
  friend bool operator==(const Matrix& a, const Matrix& b) { return a.r_ == b.r_ && a.c_ == b.c_ && a.a_ == b.a_; }

 private:
  int r_ = 0, c_ = 0;
  std::vector<T> a_;
};

using IntMatrix = Matrix<Int>;
using RatMatrix = Matrix<Rat>;

// U·M·V = D with U, V unimodular; Uinv = U⁻¹ is tracked alongside so that lattice
// bases of the column span can be read off as Uinv·D.
struct SmithForm {
  IntMatrix D, U, V, Uinv;
  std::vector<Int> diagonal;  // nonzero invariant factors, d_1 | d_2 | …
  int rank = 0;
};
SmithForm smith_normal_form(const IntMatrix& M);
std::vector<Int> invariant_factors(const IntMatrix& M);
Int determinant(const IntMatrix& M);

// Lattice helpers; bases are stored as matrix columns.
IntMatrix kernel_basis(const IntMatrix& A);
IntMatrix lattice_basis(const IntMatrix& generators);
// Coordinates c with basis·c = targets (basis of full column rank), or nullopt if some target is outside.
std::optional<IntMatrix> lattice_coordinates(const IntMatrix& basis, const IntMatrix& targets);

int rank_over_q(const RatMatrix& M);
int rank_mod_p(const IntMatrix& M, long p);

// A finitely generated module: free part plus invariant factors d_1 | … | d_k.
// Over ℤ/n the free part counts ℤ/n summands and every d_i is a proper divisor of n;
// over ℚ the torsion list is always empty.
struct Presentation {
  RingSpec ring = RingSpec::integers();
  int free_rank = 0;
  std::vector<Int> torsion;

  static Presentation zero(RingSpec r) { return Presentation{r, 0, {}}; }
  // Canonicalizes an arbitrary list of cyclic orders (0 meaning a free summand).
  static Presentation from_cyclic(RingSpec r, const std::vector<Int>& orders);
  // Reinterprets an abelian group (ℤ-module) killed by the modulus as a ℤ/n-module.
  static Presentation from_abelian(RingSpec r, const Presentation& group);
  // The underlying abelian group, for rings other than ℚ.
  Presentation as_abelian() const;

  bool is_zero() const { return free_rank == 0 && torsion.empty(); }
  Presentation operator+(const Presentation& o) const;  // direct sum
  friend bool operator==(const Presentation&, const Presentation&) = default;
  std::string str() const;
};

// Homology at C_n of a free chain complex given the two adjacent matrices
// (d_n: C_n → C_{n−1}, d_{n+1}: C_{n+1} → C_n) with entries in the ring.
// Entries are ring values (integers for ℤ, residues for ℤ/n).
Presentation homology_from_matrices(RingSpec ring, const RatMatrix& d_n, const RatMatrix& d_np1);
Presentation homology_integral(const IntMatrix& d_n, const IntMatrix& d_np1);

// Homology at M_n = ℤ^{g_n}/im(P_n) of a complex of finitely presented abelian groups,
// with lifted boundaries D_n: ℤ^{g_n} → ℤ^{g_{n−1}} that respect the relations.
Presentation homology_presented(const IntMatrix& D_n, const IntMatrix& P_nm1, const IntMatrix& D_np1,
                                const IntMatrix& P_n, int g_n);

// H_k(·; ℤ_s) = (H_k ⊗ ℤ_s) ⊕ Tor(H_{k−1}, ℤ_s), returned as an abelian group.
// H_integral[i] is H_i over ℤ; k indexes into it, k−1 must be present when k ≥ 1.
Presentation change_coefficients(const std::vector<Presentation>& H_integral, const Int& s, int k);

// {"rank": r, "torsion": [d_1, …]} with integer entries.
nlohmann::ordered_json to_json(const Presentation& p);
Presentation presentation_from_json(RingSpec ring, const nlohmann::ordered_json& j);

// Integral lift of a matrix with integer entries (throws on fractions).
IntMatrix to_int_matrix(const RatMatrix& m);

}  // namespace cubar
