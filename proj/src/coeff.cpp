#include "cubar/coeff.hpp"

#include <numeric>

namespace cubar {

RingSpec RingSpec::mod(long n) {
  if (n < 2) throw InputError("Z/n requires n >= 2, got " + std::to_string(n));
  return RingSpec(RingKind::IntegersModN, n);
}

RingSpec RingSpec::parse(std::string_view name) {
  std::string s(name);
  if (s == "Z" || s == "z") return integers();
  if (s == "Q" || s == "q") return rationals();
  for (std::string prefix : {"Z/", "Zn:", "Zn"}) {
    if (s.rfind(prefix, 0) == 0 && s.size() > prefix.size()) {
      Int n = parse_int(s.substr(prefix.size()));
      if (!n.fits_slong_p()) throw InputError("modulus too large: " + s);
      return mod(n.get_si());
    }
  }
  throw InputError("unknown ring '" + s + "' (expected Z, Q or Z/n)");
}

bool RingSpec::is_field() const {
  if (kind_ == RingKind::Rationals) return true;
  if (kind_ == RingKind::Integers) return false;
  return mpz_probab_prime_p(Int(n_).get_mpz_t(), 30) != 0;
}

std::string RingSpec::name() const {
  switch (kind_) {
    case RingKind::Integers: return "Z";
    case RingKind::Rationals: return "Q";
    case RingKind::IntegersModN: return "Z/" + std::to_string(n_);
  }
  return "?";
}

Rat RingSpec::normalize(const Rat& v) const {
  if (kind_ == RingKind::Rationals) return v;
  if (v.get_den() != 1) {
    if (kind_ == RingKind::Integers) throw InputError("non-integer " + to_string(v) + " in ring Z");
    // p/q in Z/n exists iff q is invertible mod n.
    Int inv;
    Int den = v.get_den();
    if (mpz_invert(inv.get_mpz_t(), den.get_mpz_t(), Int(n_).get_mpz_t()) == 0)
      throw InputError("denominator of " + to_string(v) + " not invertible in " + name());
    return Rat(mod_floor(v.get_num() * inv, Int(n_)));
  }
  if (kind_ == RingKind::Integers) return v;
  return Rat(mod_floor(v.get_num(), Int(n_)));
}

bool RingSpec::is_unit(const Rat& v) const { return inverse(v).has_value(); }

std::optional<Rat> RingSpec::inverse(const Rat& v) const {
  switch (kind_) {
    case RingKind::Rationals:
      if (v == 0) return std::nullopt;
      return Rat(1) / v;
    case RingKind::Integers:
      if (v == 1 || v == -1) return v;
      return std::nullopt;
    case RingKind::IntegersModN: {
      Int inv;
      Int num = v.get_num();
      if (mpz_invert(inv.get_mpz_t(), num.get_mpz_t(), Int(n_).get_mpz_t()) == 0) return std::nullopt;
      return Rat(mod_floor(inv, Int(n_)));
    }
  }
  return std::nullopt;
}

void RingElem::check(const RingElem& o) const {
  if (!(ring_ == o.ring_)) throw std::invalid_argument("ring mismatch: " + ring_.name() + " vs " + o.ring_.name());
}

RingElem& RingElem::operator+=(const RingElem& o) {
  check(o);
  v_ = ring_.normalize(v_ + o.v_);
  return *this;
}

RingElem& RingElem::operator-=(const RingElem& o) {
  check(o);
  v_ = ring_.normalize(v_ - o.v_);
  return *this;
}

RingElem& RingElem::operator*=(const RingElem& o) {
  check(o);
  v_ = ring_.normalize(v_ * o.v_);
  return *this;
}

std::optional<RingElem> RingElem::inverse() const {
  auto inv = ring_.inverse(v_);
  if (!inv) return std::nullopt;
  return RingElem(ring_, *inv);
}

RingElem RingElem::pow(unsigned k) const { return RingElem(ring_, rpow(v_, k)); }

WeightVector::WeightVector(RingSpec ring, std::vector<Rat> entries) : ring_(ring) {
  if (entries.size() < 2) throw InputError("weight needs L+1 >= 2 entries");
  m_.reserve(entries.size());
  for (const auto& e : entries) m_.emplace_back(ring, e);
}

WeightVector WeightVector::ints(RingSpec ring, std::initializer_list<long> entries) {
  std::vector<Rat> v;
  for (long e : entries) v.emplace_back(e);
  return WeightVector(ring, std::move(v));
}

std::string WeightVector::str() const {
  std::string s = "(";
  for (std::size_t i = 0; i < m_.size(); ++i) s += (i ? "," : "") + m_[i].str();
  return s + ")";
}

RingElem index(const WeightVector& w) {
  RingElem s = RingElem::zero(w.ring());
  for (const auto& m : w.entries()) s += m;
  return s;
}

IntBezout bezout(const Int& A, const Int& B) {
  if (abs(A) == 1) return {1, A, 0};
  if (abs(B) == 1) return {1, 0, B};
  Int g;
  mpz_gcd(g.get_mpz_t(), A.get_mpz_t(), B.get_mpz_t());
  if (g == 0) return {0, 0, 0};
  if (B == 0) return {g, A > 0 ? Int(1) : Int(-1), 0};
  Int a1 = A / g, b1 = abs(B / g);
  Int x;
  if (b1 == 1) {
    x = 0;
  } else {
    Int ar = mod_floor(a1, b1);
    mpz_invert(x.get_mpz_t(), ar.get_mpz_t(), b1.get_mpz_t());
    if (2 * x > b1) x -= b1;
  }
  Int y = (g - x * A) / B;
  return {g, x, y};
}

namespace {

// Coefficients c with Σ c_i·v_i = gcd(v) ≥ 0, folding the canonical two-term pair left to right.
std::pair<Int, std::vector<Int>> bezout_many(const std::vector<Int>& v) {
  std::vector<Int> c(v.size(), 0);
  Int g = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i == 0) {
      if (v[0] != 0) {
        c[0] = v[0] > 0 ? 1 : -1;
        g = abs(v[0]);
      }
      continue;
    }
    IntBezout b = bezout(g, v[i]);
    for (std::size_t j = 0; j < i; ++j) c[j] *= b.x;
    c[i] = b.y;
    g = b.g;
  }
  return {g, c};
}

}  // namespace

SpanWitness span_is_unit(const WeightVector& w) {
  const RingSpec& R = w.ring();
  SpanWitness out;
  const std::size_t n = w.entries().size();
  if (R.kind() == RingKind::Rationals) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!w.entries()[i].is_zero()) {
        out.unit = true;
        out.coeffs.assign(n, RingElem::zero(R));
        out.coeffs[i] = *w.entries()[i].inverse();
        return out;
      }
    }
    return out;
  }
  std::vector<Int> v;
  for (const auto& m : w.entries()) v.push_back(m.value().get_num());
  if (R.kind() == RingKind::IntegersModN) v.push_back(Int(R.modulus()));
  auto [g, c] = bezout_many(v);
  if (g != 1) return out;
  out.unit = true;
  for (std::size_t i = 0; i < n; ++i) out.coeffs.emplace_back(R, Rat(c[i]));
  return out;
}

std::optional<BezoutWitness> ncd_witness(const RingElem& a, const RingElem& b, int k) {
  if (k < 1) throw std::invalid_argument("ncd_witness requires k >= 1");
  const RingSpec& R = a.ring();
  if (!(R == b.ring())) throw std::invalid_argument("ring mismatch in ncd_witness");
  RingElem ak = a.pow(static_cast<unsigned>(k)), bk = b.pow(static_cast<unsigned>(k));
  BezoutWitness w{RingElem::one(R), RingElem::zero(R), RingElem::zero(R), k};
  switch (R.kind()) {
    case RingKind::Rationals:
      if (!ak.is_zero()) w.x = *ak.inverse();
      else if (!bk.is_zero()) w.y = *bk.inverse();
      else return std::nullopt;
      return w;
    case RingKind::Integers: {
      IntBezout z = bezout(ak.value().get_num(), bk.value().get_num());
      if (z.g != 1) return std::nullopt;
      w.x = RingElem(R, Rat(z.x));
      w.y = RingElem(R, Rat(z.y));
      return w;
    }
    case RingKind::IntegersModN: {
      auto [g, c] = bezout_many({ak.value().get_num(), bk.value().get_num(), Int(R.modulus())});
      if (g != 1) return std::nullopt;
      w.x = RingElem(R, Rat(c[0]));
      w.y = RingElem(R, Rat(c[1]));
      return w;
    }
  }
  return std::nullopt;
}

std::optional<RingElem> subdivision_coefficient(const RingElem& a, const RingElem& b, int k) {
  auto w = ncd_witness(a, b, k);
  if (!w) return std::nullopt;
  unsigned uk = static_cast<unsigned>(k);
  return w->x * b.pow(uk) + w->y * a.pow(uk);
}

}  // namespace cubar
