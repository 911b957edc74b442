#include "cubar/modalg.hpp"

#include <algorithm>
#include <utility>

namespace cubar {

namespace {

int cmpabs(const Int& a, const Int& b) { return mpz_cmpabs(a.get_mpz_t(), b.get_mpz_t()); }

// In-place Smith reduction. Transform bookkeeping is skipped when the pointers are null.
class SmithReducer {
 public:
  SmithReducer(IntMatrix& A, IntMatrix* U, IntMatrix* Uinv, IntMatrix* V) : A_(A), U_(U), Uinv_(Uinv), V_(V) {}

  int run() {
    const int m = A_.rows(), n = A_.cols();
    int t = 0;
    for (; t < std::min(m, n); ++t) {
      auto piv = smallest_in_block(t);
      if (!piv) break;
      swap_rows(t, piv->first);
      swap_cols(t, piv->second);
      for (;;) {
        bool dirty = false;
        for (int i = t + 1; i < m; ++i) {
          if (A_(i, t) == 0) continue;
          Int q;
          mpz_tdiv_q(q.get_mpz_t(), A_(i, t).get_mpz_t(), A_(t, t).get_mpz_t());
          if (q != 0) add_row(i, t, -q);
          if (A_(i, t) != 0) dirty = true;
        }
        for (int j = t + 1; j < n; ++j) {
          if (A_(t, j) == 0) continue;
          Int q;
          mpz_tdiv_q(q.get_mpz_t(), A_(t, j).get_mpz_t(), A_(t, t).get_mpz_t());
          if (q != 0) add_col(j, t, -q);
          if (A_(t, j) != 0) dirty = true;
        }
        if (dirty) {
          repivot_cross(t);
          continue;
        }
        if (auto bad = non_divisible(t)) {
          add_row(t, *bad, 1);
          continue;
        }
        break;
      }
      if (A_(t, t) < 0) negate_row(t);
    }
    return t;
  }

 private:
  std::optional<std::pair<int, int>> smallest_in_block(int t) const {
    std::optional<std::pair<int, int>> best;
    Int bestv;
    for (int i = t; i < A_.rows(); ++i)
      for (int j = t; j < A_.cols(); ++j) {
        const Int& x = A_(i, j);
        if (x == 0) continue;
        if (!best || cmpabs(x, bestv) < 0) {
          best = {i, j};
          bestv = x;
        }
      }
    return best;
  }

  // After elimination left remainders in row/column t, move the smallest of them to (t,t).
  void repivot_cross(int t) {
    int bi = t, bj = t;
    Int bestv = A_(t, t);
    for (int i = t; i < A_.rows(); ++i)
      if (A_(i, t) != 0 && cmpabs(A_(i, t), bestv) < 0) bestv = A_(i, t), bi = i, bj = t;
    for (int j = t; j < A_.cols(); ++j)
      if (A_(t, j) != 0 && cmpabs(A_(t, j), bestv) < 0) bestv = A_(t, j), bi = t, bj = j;
    swap_rows(t, bi);
    swap_cols(t, bj);
  }

  std::optional<int> non_divisible(int t) const {
    const Int& p = A_(t, t);
    for (int i = t + 1; i < A_.rows(); ++i)
      for (int j = t + 1; j < A_.cols(); ++j)
        if (A_(i, j) != 0 && !mpz_divisible_p(A_(i, j).get_mpz_t(), p.get_mpz_t())) return i;
    return std::nullopt;
  }

  static void row_swap(IntMatrix& M, int a, int b) {
    for (int j = 0; j < M.cols(); ++j) std::swap(M(a, j), M(b, j));
  }
  static void col_swap(IntMatrix& M, int a, int b) {
    for (int i = 0; i < M.rows(); ++i) std::swap(M(i, a), M(i, b));
  }
  static void row_add(IntMatrix& M, int dst, int src, const Int& q) {
    for (int j = 0; j < M.cols(); ++j)
      if (M(src, j) != 0) M(dst, j) += q * M(src, j);
  }
  static void col_add(IntMatrix& M, int dst, int src, const Int& q) {
    for (int i = 0; i < M.rows(); ++i)
      if (M(i, src) != 0) M(i, dst) += q * M(i, src);
  }

  void swap_rows(int a, int b) {
    if (a == b) return;
    row_swap(A_, a, b);
    if (U_) row_swap(*U_, a, b);
    if (Uinv_) col_swap(*Uinv_, a, b);
  }
  void swap_cols(int a, int b) {
    if (a == b) return;
    col_swap(A_, a, b);
    if (V_) col_swap(*V_, a, b);
  }
  // row_dst += q·row_src
  void add_row(int dst, int src, const Int& q) {
    row_add(A_, dst, src, q);
    if (U_) row_add(*U_, dst, src, q);
    if (Uinv_) col_add(*Uinv_, src, dst, -q);
  }
  void add_col(int dst, int src, const Int& q) {
    col_add(A_, dst, src, q);
    if (V_) col_add(*V_, dst, src, q);
  }
  void negate_row(int t) {
    for (int j = 0; j < A_.cols(); ++j) A_(t, j) = -A_(t, j);
    if (U_)
      for (int j = 0; j < U_->cols(); ++j) (*U_)(t, j) = -(*U_)(t, j);
    if (Uinv_)
      for (int i = 0; i < Uinv_->rows(); ++i) (*Uinv_)(i, t) = -(*Uinv_)(i, t);
  }

  IntMatrix& A_;
  IntMatrix* U_;
  IntMatrix* Uinv_;
  IntMatrix* V_;
};

}  // namespace

SmithForm smith_normal_form(const IntMatrix& M) {
  SmithForm f;
  f.D = M;
  f.U = IntMatrix::identity(M.rows());
  f.Uinv = IntMatrix::identity(M.rows());
  f.V = IntMatrix::identity(M.cols());
  SmithReducer red(f.D, &f.U, &f.Uinv, &f.V);
  f.rank = red.run();
  for (int i = 0; i < f.rank; ++i) f.diagonal.push_back(f.D(i, i));
  return f;
}

std::vector<Int> invariant_factors(const IntMatrix& M) {
  IntMatrix A = M;
  SmithReducer red(A, nullptr, nullptr, nullptr);
  int r = red.run();
  std::vector<Int> d;
  for (int i = 0; i < r; ++i) d.push_back(A(i, i));
  return d;
}

Int determinant(const IntMatrix& M) {
  if (M.rows() != M.cols()) throw std::invalid_argument("determinant of a non-square matrix");
  const int n = M.rows();
  if (n == 0) return 1;
  IntMatrix A = M;
  Int prev = 1;
  int sign = 1;
  for (int k = 0; k < n - 1; ++k) {
    if (A(k, k) == 0) {
      int p = k + 1;
      while (p < n && A(p, k) == 0) ++p;
      if (p == n) return 0;
      for (int j = 0; j < n; ++j) std::swap(A(k, j), A(p, j));
      sign = -sign;
    }
    for (int i = k + 1; i < n; ++i)
      for (int j = k + 1; j < n; ++j) A(i, j) = (A(i, j) * A(k, k) - A(i, k) * A(k, j)) / prev;
    prev = A(k, k);
  }
  return sign * A(n - 1, n - 1);
}

IntMatrix kernel_basis(const IntMatrix& A) {
  SmithForm f = smith_normal_form(A);
  return f.V.col_range(f.rank, A.cols());
}

IntMatrix lattice_basis(const IntMatrix& generators) {
  SmithForm f = smith_normal_form(generators);
  IntMatrix B(generators.rows(), f.rank);
  for (int j = 0; j < f.rank; ++j)
    for (int i = 0; i < generators.rows(); ++i) B(i, j) = f.Uinv(i, j) * f.diagonal[j];
  return B;
}

std::optional<IntMatrix> lattice_coordinates(const IntMatrix& basis, const IntMatrix& targets) {
  const int k = basis.cols();
  SmithForm f = smith_normal_form(basis);
  if (f.rank != k) throw std::invalid_argument("lattice_coordinates: basis columns are dependent");
  IntMatrix y = f.U * targets;
  IntMatrix w(k, targets.cols());
  for (int c = 0; c < targets.cols(); ++c) {
    for (int i = 0; i < y.rows(); ++i) {
      if (i < k) {
        if (!mpz_divisible_p(y(i, c).get_mpz_t(), f.diagonal[i].get_mpz_t())) return std::nullopt;
        mpz_divexact(w(i, c).get_mpz_t(), y(i, c).get_mpz_t(), f.diagonal[i].get_mpz_t());
      } else if (y(i, c) != 0) {
        return std::nullopt;
      }
    }
  }
  return f.V * w;
}

int rank_over_q(const RatMatrix& M) {
  RatMatrix A = M;
  int rank = 0;
  for (int col = 0; col < A.cols() && rank < A.rows(); ++col) {
    int p = rank;
    while (p < A.rows() && A(p, col) == 0) ++p;
    if (p == A.rows()) continue;
    for (int j = 0; j < A.cols(); ++j) std::swap(A(rank, j), A(p, j));
    for (int i = rank + 1; i < A.rows(); ++i) {
      if (A(i, col) == 0) continue;
      Rat f = A(i, col) / A(rank, col);
      for (int j = col; j < A.cols(); ++j) A(i, j) -= f * A(rank, j);
    }
    ++rank;
  }
  return rank;
}

int rank_mod_p(const IntMatrix& M, long p) {
  const int m = M.rows(), n = M.cols();
  std::vector<std::vector<long>> A(m, std::vector<long>(n));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) A[i][j] = mod_floor(M(i, j), Int(p)).get_si();
  auto inv = [p](long a) {
    Int r;
    mpz_invert(r.get_mpz_t(), Int(a).get_mpz_t(), Int(p).get_mpz_t());
    return r.get_si();
  };
  int rank = 0;
  for (int col = 0; col < n && rank < m; ++col) {
    int q = rank;
    while (q < m && A[q][col] == 0) ++q;
    if (q == m) continue;
    std::swap(A[rank], A[q]);
    long iv = inv(A[rank][col]);
    for (int i = rank + 1; i < m; ++i) {
      if (A[i][col] == 0) continue;
      __int128 f = static_cast<__int128>(A[i][col]) * iv % p;
      for (int j = col; j < n; ++j) {
        __int128 v = A[i][j] - f * A[rank][j] % p;
        v %= p;
        if (v < 0) v += p;
        A[i][j] = static_cast<long>(v);
      }
    }
    ++rank;
  }
  return rank;
}

Presentation Presentation::from_cyclic(RingSpec r, const std::vector<Int>& orders) {
  Presentation p{r, 0, {}};
  std::vector<Int> finite;
  for (const auto& o : orders) {
    if (o == 0) ++p.free_rank;
    else if (abs(o) != 1) finite.push_back(abs(o));
  }
  if (!finite.empty()) {
    IntMatrix d(static_cast<int>(finite.size()), static_cast<int>(finite.size()));
    for (std::size_t i = 0; i < finite.size(); ++i) d(static_cast<int>(i), static_cast<int>(i)) = finite[i];
    for (const auto& f : invariant_factors(d))
      if (f != 1) p.torsion.push_back(f);
  }
  return p;
}

Presentation Presentation::from_abelian(RingSpec r, const Presentation& group) {
  if (r.kind() != RingKind::IntegersModN) return group;
  const Int n(r.modulus());
  if (group.free_rank != 0) throw std::logic_error("a Z/n-module cannot have a free abelian summand");
  Presentation p{r, 0, {}};
  for (const auto& d : group.torsion) {
    if (!mpz_divisible_p(n.get_mpz_t(), d.get_mpz_t())) throw std::logic_error("torsion order does not divide the modulus");
    if (d == n) ++p.free_rank;
    else p.torsion.push_back(d);
  }
  return p;
}

Presentation Presentation::as_abelian() const {
  if (ring.kind() != RingKind::IntegersModN) return *this;
  Presentation g{RingSpec::integers(), 0, torsion};
  for (int i = 0; i < free_rank; ++i) g.torsion.push_back(Int(ring.modulus()));
  return from_cyclic(RingSpec::integers(), g.torsion);
}

Presentation Presentation::operator+(const Presentation& o) const {
  if (!(ring == o.ring)) throw std::invalid_argument("direct sum across rings");
  if (ring.kind() == RingKind::IntegersModN) {
    Presentation a = as_abelian(), b = o.as_abelian();
    return from_abelian(ring, a + b);
  }
  std::vector<Int> orders = torsion;
  orders.insert(orders.end(), o.torsion.begin(), o.torsion.end());
  Presentation p = from_cyclic(ring, orders);
  p.free_rank = free_rank + o.free_rank;
  return p;
}

std::string Presentation::str() const {
  if (is_zero()) return "0";
  std::string base;
  switch (ring.kind()) {
    case RingKind::Integers: base = "Z"; break;
    case RingKind::Rationals: base = "Q"; break;
    case RingKind::IntegersModN: base = "(Z/" + std::to_string(ring.modulus()) + ")"; break;
  }
  std::vector<std::string> parts;
  if (free_rank == 1) parts.push_back(base);
  else if (free_rank > 1) parts.push_back(base + "^" + std::to_string(free_rank));
  for (const auto& d : torsion) parts.push_back("Z/" + d.get_str());
  std::string s;
  for (std::size_t i = 0; i < parts.size(); ++i) s += (i ? " + " : "") + parts[i];
  return s;
}

nlohmann::ordered_json to_json(const Presentation& p) {
  nlohmann::ordered_json t = nlohmann::ordered_json::array();
  for (const auto& d : p.torsion) {
    if (d.fits_slong_p()) t.push_back(d.get_si());
    else t.push_back(d.get_str());
  }
  return nlohmann::ordered_json{{"rank", p.free_rank}, {"torsion", t}};
}

Presentation presentation_from_json(RingSpec ring, const nlohmann::ordered_json& j) {
  if (!j.is_object() || !j.contains("rank") || !j["rank"].is_number_integer() || j["rank"].get<long>() < 0)
    throw InputError("presentation: expected {\"rank\": non-negative integer, \"torsion\": [...]}");
  std::vector<Int> orders(static_cast<std::size_t>(j["rank"].get<long>()), Int(0));
  if (j.contains("torsion")) {
    if (!j["torsion"].is_array()) throw InputError("presentation: torsion must be an array");
    for (const auto& d : j["torsion"]) {
      Int v;
      if (d.is_number_integer()) v = static_cast<long>(d.get<long>());
      else if (d.is_string()) v = parse_int(d.get<std::string>());
      else throw InputError("presentation: torsion entries must be integers");
      if (v < 2) throw InputError("presentation: torsion entries must be at least 2");
      orders.push_back(v);
    }
  }
  return Presentation::from_cyclic(ring, orders);
}

IntMatrix to_int_matrix(const RatMatrix& m) {
  IntMatrix z(m.rows(), m.cols());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) {
      if (m(i, j).get_den() != 1) throw std::invalid_argument("to_int_matrix: non-integer entry " + to_string(m(i, j)));
      z(i, j) = m(i, j).get_num();
    }
  return z;
}

Presentation homology_integral(const IntMatrix& d_n, const IntMatrix& d_np1) {
  const int dim = d_n.cols();
  if (d_np1.rows() != dim) throw std::invalid_argument("homology: adjacent matrices disagree on the module rank");
  if (d_n.rows() > 0 && d_np1.cols() > 0 && !(d_n * d_np1).is_zero())
    throw std::invalid_argument("homology: d_n * d_{n+1} is not zero");
  const int rank_n = static_cast<int>(invariant_factors(d_n).size());
  std::vector<Int> f = invariant_factors(d_np1);
  Presentation p = Presentation::from_cyclic(RingSpec::integers(), f);
  p.free_rank = dim - rank_n - static_cast<int>(f.size());
  return p;
}

namespace {

// Torsion of H_{n−1} of a free ℤ-complex is read off the invariant factors of d_n alone,
// because im d_n sits inside the saturated lattice ker d_{n−1}.
Presentation universal_coefficients(const IntMatrix& d_n, const IntMatrix& d_np1, const Int& s) {
  Presentation h = homology_integral(d_n, d_np1);
  std::vector<Int> orders;
  for (int i = 0; i < h.free_rank; ++i) orders.push_back(s);
  Int g;
  for (const auto& d : h.torsion) {
    mpz_gcd(g.get_mpz_t(), d.get_mpz_t(), s.get_mpz_t());
    orders.push_back(g);
  }
  for (const auto& d : invariant_factors(d_n)) {
    mpz_gcd(g.get_mpz_t(), d.get_mpz_t(), s.get_mpz_t());
    orders.push_back(g);
  }
  return Presentation::from_cyclic(RingSpec::integers(), orders);
}

}  // namespace

Presentation homology_from_matrices(RingSpec ring, const RatMatrix& d_n, const RatMatrix& d_np1) {
  switch (ring.kind()) {
    case RingKind::Integers:
      return homology_integral(to_int_matrix(d_n), to_int_matrix(d_np1));
    case RingKind::IntegersModN: {
      IntMatrix a = to_int_matrix(d_n), b = to_int_matrix(d_np1);
      if (a.rows() > 0 && b.cols() > 0) {
        IntMatrix c = a * b;
        for (int i = 0; i < c.rows(); ++i)
          for (int j = 0; j < c.cols(); ++j)
            if (mod_floor(c(i, j), Int(ring.modulus())) != 0)
              throw std::invalid_argument("homology: d_n * d_{n+1} is not zero mod n");
      }
      // The integral lift need not square to zero over ℤ; fall back to the presented route then.
      if (a.rows() > 0 && b.cols() > 0 && !(a * b).is_zero()) {
        IntMatrix Pm = IntMatrix::identity(a.rows()), Pn = IntMatrix::identity(a.cols());
        for (int i = 0; i < Pm.rows(); ++i) Pm(i, i) = ring.modulus();
        for (int i = 0; i < Pn.rows(); ++i) Pn(i, i) = ring.modulus();
        return Presentation::from_abelian(ring, homology_presented(a, Pm, b, Pn, a.cols()));
      }
      return Presentation::from_abelian(ring, universal_coefficients(a, b, Int(ring.modulus())));
    }
    case RingKind::Rationals: {
      if (d_np1.rows() != d_n.cols()) throw std::invalid_argument("homology: adjacent matrices disagree on the module rank");
      if (d_n.rows() > 0 && d_np1.cols() > 0 && !(d_n * d_np1).is_zero())
        throw std::invalid_argument("homology: d_n * d_{n+1} is not zero");
      return Presentation{ring, d_n.cols() - rank_over_q(d_n) - rank_over_q(d_np1), {}};
    }
  }
  throw std::logic_error("unreachable ring kind");
}

Presentation homology_presented(const IntMatrix& D_n, const IntMatrix& P_nm1, const IntMatrix& D_np1,
                                const IntMatrix& P_n, int g_n) {
  const RingSpec Z = RingSpec::integers();
  if (g_n == 0) return Presentation::zero(Z);
  IntMatrix Zb;
  if (D_n.rows() == 0) {
    Zb = IntMatrix::identity(g_n);
  } else {
    IntMatrix K = kernel_basis(IntMatrix::hcat(D_n, P_nm1));
    Zb = lattice_basis(K.row_range(0, g_n));
  }
  if (Zb.cols() == 0) return Presentation::zero(Z);
  IntMatrix B = IntMatrix::hcat(D_np1, P_n);
  auto C = lattice_coordinates(Zb, B);
  if (!C) throw std::invalid_argument("homology: boundaries are not cycles (relations not respected)");
  std::vector<Int> f = invariant_factors(*C);
  Presentation p = Presentation::from_cyclic(Z, f);
  p.free_rank = Zb.cols() - static_cast<int>(f.size());
  return p;
}

Presentation change_coefficients(const std::vector<Presentation>& H_integral, const Int& s, int k) {
  if (s < 2) throw std::invalid_argument("change_coefficients needs a modulus >= 2");
  if (k < 0 || k >= static_cast<int>(H_integral.size())) throw std::invalid_argument("change_coefficients: missing degree data");
  std::vector<Int> orders;
  Int g;
  const Presentation& hk = H_integral[static_cast<std::size_t>(k)];
  for (int i = 0; i < hk.free_rank; ++i) orders.push_back(s);
  for (const auto& d : hk.torsion) {
    mpz_gcd(g.get_mpz_t(), d.get_mpz_t(), s.get_mpz_t());
    orders.push_back(g);
  }
  if (k >= 1) {
    for (const auto& d : H_integral[static_cast<std::size_t>(k - 1)].torsion) {
      mpz_gcd(g.get_mpz_t(), d.get_mpz_t(), s.get_mpz_t());
      orders.push_back(g);
    }
  }
  return Presentation::from_cyclic(RingSpec::integers(), orders);
}

}  // namespace cubar
