#pragma once

#include <gmpxx.h>

#include <string>

namespace agora {

// All quantities of the solver (prices, flows, surpluses, update factors)
// are exact rationals. Arithmetic never rounds; results are kept canonical
// (positive denominator, coprime numerator/denominator) by GMP.
using BigInt = mpz_class;
using Rational = mpq_class;

// den must be nonzero. Result is canonical.
inline Rational make_rational(const BigInt& num, const BigInt& den) {
  Rational r(num, den);
  r.canonicalize();
  return r;
}

inline Rational make_rational(long num, long den = 1) {
  return make_rational(BigInt(num), BigInt(den));
}

// Nearest integer; exact halves round to even.
BigInt round_nearest_even(const Rational& v);

// base^e for non-negative e, exact.
BigInt pow_int(const BigInt& base, unsigned long e);

std::string to_string(const BigInt& v);
std::string to_string(const Rational& v);  // "num" or "num/den"

// ceil(log2(v)) for v >= 1.
long ceil_log2(const BigInt& v);

}  // namespace agora
