#include "agora/rational.hpp"

#include "agora/errors.hpp"

namespace agora {

BigInt round_nearest_even(const Rational& v) {
  BigInt fl;
  mpz_fdiv_q(fl.get_mpz_t(), v.get_num().get_mpz_t(), v.get_den().get_mpz_t());
  Rational frac = v - Rational(fl);
  int c = cmp(frac * 2, 1);
  if (c < 0) return fl;
  if (c > 0) return fl + 1;
  return mpz_even_p(fl.get_mpz_t()) ? fl : BigInt(fl + 1);
}

BigInt pow_int(const BigInt& base, unsigned long e) {
  BigInt r;
  mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
  return r;
}

std::string to_string(const BigInt& v) { return v.get_str(); }

std::string to_string(const Rational& v) {
  if (v.get_den() == 1) return v.get_num().get_str();
  return v.get_num().get_str() + "/" + v.get_den().get_str();
}

long ceil_log2(const BigInt& v) {
  if (v < 1) throw InternalError("ceil_log2: argument must be >= 1");
  size_t bits = mpz_sizeinbase(v.get_mpz_t(), 2);
  // sizeinbase gives floor(log2(v)) + 1; exact powers of two need one less.
  BigInt pow2 = BigInt(1) << (bits - 1);
  if (pow2 == v) return static_cast<long>(bits - 1);
  return static_cast<long>(bits);
}

}  // namespace agora
