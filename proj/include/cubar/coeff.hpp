#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cubar/rational.hpp"

namespace cubar {

enum class RingKind { Integers, IntegersModN, Rationals };

// One of ℤ, ℤ/n (n ≥ 2) or ℚ. Elements of every kind are carried as exact rationals
// in canonical form: integers for ℤ, residues in [0, n) for ℤ/n.
class RingSpec {
 public:
  static RingSpec integers() { return RingSpec(RingKind::Integers, 0); }
  static RingSpec mod(long n);
  static RingSpec rationals() { return RingSpec(RingKind::Rationals, 0); }
  static RingSpec parse(std::string_view name);  // "Z", "Q", "Z/5", "Zn:5"

  RingKind kind() const { return kind_; }
  long modulus() const { return n_; }
  bool is_field() const;
  std::string name() const;

  Rat normalize(const Rat& v) const;
  bool is_unit(const Rat& v) const;
  std::optional<Rat> inverse(const Rat& v) const;

  friend bool operator==(const RingSpec&, const RingSpec&) = default;

 private:
  RingSpec(RingKind k, long n) : kind_(k), n_(n) {}
  RingKind kind_;
  long n_;
};

class RingElem {
 public:
  RingElem() : ring_(RingSpec::integers()), v_(0) {}
  RingElem(RingSpec ring, const Rat& v) : ring_(ring), v_(ring.normalize(v)) {}
  RingElem(RingSpec ring, long v) : RingElem(ring, Rat(v)) {}

  static RingElem zero(RingSpec r) { return RingElem(r, 0L); }
  static RingElem one(RingSpec r) { return RingElem(r, 1L); }

  const RingSpec& ring() const { return ring_; }
  const Rat& value() const { return v_; }
  bool is_zero() const { return v_ == 0; }
  bool is_unit() const { return ring_.is_unit(v_); }
  std::optional<RingElem> inverse() const;
  RingElem pow(unsigned k) const;

  RingElem operator-() const { return RingElem(ring_, -v_); }
  RingElem& operator+=(const RingElem& o);
  RingElem& operator-=(const RingElem& o);
  RingElem& operator*=(const RingElem& o);
  friend RingElem operator+(RingElem a, const RingElem& b) { return a += b; }
  friend RingElem operator-(RingElem a, const RingElem& b) { return a -= b; }
  friend RingElem operator*(RingElem a, const RingElem& b) { return a *= b; }
  friend bool operator==(const RingElem& a, const RingElem& b) { return a.ring_ == b.ring_ && a.v_ == b.v_; }

  std::string str() const { return to_string(v_); }

 private:
  void check(const RingElem& o) const;
  RingSpec ring_;
  Rat v_;
};

// The weight (m_0, …, m_L) attached to the L+1 slices of every axis.
class WeightVector {
 public:
  WeightVector(RingSpec ring, std::vector<Rat> entries);
  static WeightVector ints(RingSpec ring, std::initializer_list<long> entries);

  const RingSpec& ring() const { return ring_; }
  int L() const { return static_cast<int>(m_.size()) - 1; }
  const std::vector<RingElem>& entries() const { return m_; }
  const RingElem& operator[](int i) const { return m_[static_cast<std::size_t>(i)]; }
  std::string str() const;

 private:
  RingSpec ring_;
  std::vector<RingElem> m_;
};

RingElem index(const WeightVector& w);

struct SpanWitness {
  bool unit = false;
  std::vector<RingElem> coeffs;  // Σ coeffs[i]·m_i = 1 when unit
};
SpanWitness span_is_unit(const WeightVector& w);

struct BezoutWitness {
  RingElem g, x, y;
  int k = 1;
};
// x·a^k + y·b^k = 1, or nullopt when a^k and b^k do not generate the unit ideal.
std::optional<BezoutWitness> ncd_witness(const RingElem& a, const RingElem& b, int k);

// r_k = x_k·b^k + y_k·a^k, the coefficient with r_k·[SD^(k) u] = [u].
std::optional<RingElem> subdivision_coefficient(const RingElem& a, const RingElem& b, int k);

// Canonical integer Bezout pair for (A, B): x·A + y·B = gcd(A, B) ≥ 0.
// A unit A gives (A, 0); else a unit B gives (0, B); else x lies in (−|B'|/2, |B'|/2], B' = B/g.
struct IntBezout {
  Int g, x, y;
};
IntBezout bezout(const Int& A, const Int& B);

}  // namespace cubar
