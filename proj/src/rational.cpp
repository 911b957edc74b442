#include "cubar/rational.hpp"

#include <climits>

namespace cubar {

Rat rat(long p, long q) {
  Rat r(p, q);
  r.canonicalize();
  return r;
}

Rat parse_rat(std::string_view s) {
  std::string t(s);
  auto slash = t.find('/');
  try {
    if (slash == std::string::npos) return Rat(parse_int(t));
    Int num = parse_int(t.substr(0, slash));
    Int den = parse_int(t.substr(slash + 1));
    if (den == 0) throw InputError("zero denominator in rational '" + t + "'");
    Rat r(num, den);
    r.canonicalize();
    return r;
  } catch (const InputError&) {
    throw;
  } catch (const std::exception&) {
    throw InputError("malformed rational '" + t + "'");
  }
}

Int parse_int(std::string_view s) {
  std::string t(s);
  while (!t.empty() && t.front() == ' ') t.erase(t.begin());
  while (!t.empty() && t.back() == ' ') t.pop_back();
  std::size_t start = (!t.empty() && (t[0] == '-' || t[0] == '+')) ? 1 : 0;
  if (start == t.size()) throw InputError("malformed integer '" + t + "'");
  for (std::size_t i = start; i < t.size(); ++i)
    if (t[i] < '0' || t[i] > '9') throw InputError("malformed integer '" + t + "'");
  if (t[0] == '+') t.erase(t.begin());
  return Int(t, 10);
}

std::string to_string(const Rat& r) {
  if (r.get_den() == 1) return r.get_num().get_str();
  return r.get_num().get_str() + "/" + r.get_den().get_str();
}

std::string to_string(const Int& z) { return z.get_str(); }

Int floor_div(const Int& a, const Int& b) {
  Int q;
  mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

Int mod_floor(const Int& a, const Int& m) {
  Int r;
  Int am = abs(m);
  mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), am.get_mpz_t());
  return r;
}

Int ipow(const Int& base, unsigned k) {
  Int r;
  mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), k);
  return r;
}

Rat rpow(const Rat& base, unsigned k) {
  Rat r(ipow(base.get_num(), k), ipow(base.get_den(), k));
  r.canonicalize();
  return r;
}

Int lcm(const Int& a, const Int& b) {
  Int r;
  mpz_lcm(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return r;
}

long to_long(const Int& z) {
  if (!z.fits_slong_p()) throw std::overflow_error("integer does not fit in a machine word: " + z.get_str());
  return z.get_si();
}

Rat clamp01(const Rat& y) {
  if (y <= 0) return Rat(0);
  if (y >= 1) return Rat(1);
  return y;
}

}  // namespace cubar
