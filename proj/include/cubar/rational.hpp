#pragma once

#include <gmpxx.h>

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cubar {

using Int = mpz_class;
using Rat = mpq_class;
using Point = std::vector<Rat>;

// Thrown for malformed user input; the CLI maps it to exit code 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Rat rat(long p, long q = 1);
Rat parse_rat(std::string_view s);
Int parse_int(std::string_view s);
std::string to_string(const Rat& r);
std::string to_string(const Int& z);

Int floor_div(const Int& a, const Int& b);
// Smallest non-negative residue of a modulo |m| (m != 0).
Int mod_floor(const Int& a, const Int& m);
Int ipow(const Int& base, unsigned k);
Rat rpow(const Rat& base, unsigned k);
Int lcm(const Int& a, const Int& b);
long to_long(const Int& z);

Rat clamp01(const Rat& y);

}  // namespace cubar
