#include "agora/numerics.hpp"

#include <vector>

#include "agora/errors.hpp"

namespace agora {

namespace {

// Fixed-point value m / 2^zbits with an error mantissa: the distance to the
// true (rational) quantity is at most e / 2^{zbits+16}. Keeping the bound as
// a scaled integer avoids rational canonicalization in the hot loop.
struct Fx {
  BigInt m;
  BigInt e;
};

constexpr long kErrShift = 16;

// round(v / 2^zbits), half away from zero; v is non-negative here.
BigInt shift_round(const BigInt& v, long zbits) {
  BigInt biased = v + (BigInt(1) << (zbits - 1));
  BigInt r;
  mpz_fdiv_q_2exp(r.get_mpz_t(), biased.get_mpz_t(), static_cast<mp_bitcnt_t>(zbits));
  return r;
}

BigInt ceil_shift(const BigInt& v, long bits) {
  BigInt r;
  mpz_cdiv_q_2exp(r.get_mpz_t(), v.get_mpz_t(), static_cast<mp_bitcnt_t>(bits));
  return r;
}

Fx fx_mul(const Fx& a, const Fx& b, long zbits) {
  Fx c;
  c.m = shift_round(a.m * b.m, zbits);
  // e_c/2^{Z+16} >= 2^{-Z-1} + |a| e_b + e_a |b| + e_a e_b, scaled through.
  c.e = (BigInt(1) << (kErrShift - 1)) + ceil_shift(a.m * b.e, zbits) +
        ceil_shift(a.e * b.m, zbits) + ceil_shift(a.e * b.e, zbits + kErrShift) + 3;
  return c;
}

struct FxContext {
  long zbits;
  BigInt unit;       // 2^zbits
  BigInt err_unit;   // 2^{zbits+16}
  Fx base;           // 1 + 1/L rounded to the grid

  explicit FxContext(const BigInt& L, long z) : zbits(z) {
    unit = BigInt(1) << zbits;
    err_unit = BigInt(1) << (zbits + kErrShift);
    Rational true_base = make_rational(L + 1, L);
    base.m = round_nearest_even(true_base * Rational(unit));
    Rational err = abs(make_rational(base.m, unit) - true_base);
    BigInt scaled;
    mpz_cdiv_q(scaled.get_mpz_t(), BigInt(err.get_num() * err_unit).get_mpz_t(),
               err.get_den().get_mpz_t());
    base.e = scaled;
  }

  Rational value(const Fx& f) const { return make_rational(f.m, unit); }
  Rational error(const Fx& f) const { return make_rational(f.e, err_unit); }
};

Fx fx_pow(const FxContext& ctx, const BigInt& k) {
  if (k == 0) return Fx{ctx.unit, BigInt(0)};
  size_t nbits = mpz_sizeinbase(k.get_mpz_t(), 2);
  Fx acc = ctx.base;
  for (size_t i = nbits - 1; i-- > 0;) {
    acc = fx_mul(acc, acc, ctx.zbits);
    if (mpz_tstbit(k.get_mpz_t(), static_cast<mp_bitcnt_t>(i)))
      acc = fx_mul(acc, ctx.base, ctx.zbits);
  }
  return acc;
}

}  // namespace

FixedPointPower approx_power(const BigInt& k, const BigInt& L, long zbits) {
  if (k < 0) throw ValidationError("approx_power: exponent must be non-negative");
  if (L < 3) throw ValidationError("approx_power: L must be >= 3");
  if (zbits < 16) throw ValidationError("approx_power: too few fixed-point bits");
  if (k == 0) return FixedPointPower{Rational(1), Rational(0)};

  FxContext ctx(L, zbits);
  Fx acc = fx_pow(ctx, k);
  FixedPointPower out{ctx.value(acc), ctx.error(acc)};
  if (out.error_bound * 4 * L > 1)
    throw PrecisionError("approx_power: error bound exceeds 1/(4L); increase zbits");
  return out;
}

BigInt round_to_denominator(const Rational& value_approx, const BigInt& L) {
  return round_nearest_even(value_approx * Rational(L));
}

BigInt round_factor_to_power(const Rational& x_hat, const BigInt& L, long zbits) {
  if (x_hat < 1) throw ValidationError("round_factor_to_power: x_hat must be >= 1");
  const Rational step = make_rational(L + 1, L);
  const BigInt& xn = x_hat.get_num();
  const BigInt& xd = x_hat.get_den();
  const BigInt err_unit = BigInt(1) << (zbits + kErrShift);

  // Accepting k requires certifying x_hat/(1+1/L)^k in [1/(1+1/L), 1+1/L]
  // through the error window of the freshly evaluated power. Comparisons
  // cross-multiply raw integers; x_hat's parts may be huge and rational
  // arithmetic would pay a full-size gcd per step.
  auto certified = [&](const BigInt& k) {
    FixedPointPower b = approx_power(k, L, zbits);
    BigInt value_scaled = b.value.get_num() * (err_unit / b.value.get_den());
    BigInt err_scaled = b.error_bound.get_num() * (err_unit / b.error_bound.get_den());
    // x_hat (1+1/L) >= value + err  and  x_hat <= (value - err)(1+1/L)
    return xn * (L + 1) * err_unit >= (value_scaled + err_scaled) * xd * L &&
           xn * L * err_unit <= (value_scaled - err_scaled) * (L + 1) * xd;
  };

  if (x_hat <= step) return 0;  // k = 0 certifies trivially

  // Square chain (1+1/L)^{2^i} up to the first power surely above x_hat,
  // then a most-significant-bit-first descent; one multiplication per step
  // instead of a power evaluation per probe. The descent compares against
  // x_hat quantized once to the fixed-point grid; the grid error sits far
  // inside the certification slack.
  FxContext ctx(L, zbits);
  BigInt x_grid;  // floor(x_hat * 2^zbits)
  mpz_fdiv_q(x_grid.get_mpz_t(), BigInt(x_hat.get_num() * ctx.unit).get_mpz_t(),
             x_hat.get_den().get_mpz_t());
  const BigInt x_hi = (x_grid + 1) << kErrShift;
  auto possibly_below_grid = [&](const Fx& f) { return (f.m << kErrShift) - f.e <= x_hi; };

  std::vector<Fx> squares{ctx.base};
  while (possibly_below_grid(squares.back())) {
    if (squares.size() > 2048)
      throw InternalError("round_factor_to_power: x_hat out of representable range");
    squares.push_back(fx_mul(squares.back(), squares.back(), ctx.zbits));
  }

  BigInt k(0);
  Fx acc{ctx.unit, BigInt(0)};  // exactly one
  for (size_t i = squares.size() - 1; i-- > 0;) {
    Fx cand = fx_mul(acc, squares[i], ctx.zbits);
    if (possibly_below_grid(cand)) {
      acc = cand;
      k += BigInt(1) << i;
    }
  }

  // The greedy digit choices sit deep inside the error slack, so the true
  // exponent is within one of k; certify before returning.
  if (certified(k)) return k;
  if (certified(k + 1)) return k + 1;
  if (k > 0 && certified(k - 1)) return k - 1;
  throw InternalError("round_factor_to_power: failed to certify the descent result");
}

BigInt round_utility(long long u, const BigInt& L, long zbits) {
  if (u <= 0) throw ValidationError("round_utility: utility must be positive");
  return round_factor_to_power(Rational(static_cast<long>(u)), L, zbits);
}

int compare_power(const BigInt& k, const BigInt& L, const Rational& target, long zbits) {
  for (long z = zbits;; z *= 2) {
    FixedPointPower b = approx_power(k, L, z);
    if (b.value - b.error_bound > target) return 1;
    if (b.value + b.error_bound < target) return -1;
    if (b.error_bound == 0) return cmp(b.value, target);
    if (z > zbits * 1024)
      throw InternalError("compare_power: could not separate power from target");
  }
}

PowerBasis PowerBasis::for_market(int n, long long max_utility) {
  if (n < 1 || max_utility < 1) throw ValidationError("PowerBasis: need n >= 1, U >= 1");
  PowerBasis basis;
  BigInt nU = BigInt(n) * BigInt(static_cast<long>(max_utility));
  basis.L = BigInt(128) * pow_int(BigInt(n), static_cast<unsigned long>(5 * n + 5)) *
            pow_int(BigInt(static_cast<long>(max_utility)), static_cast<unsigned long>(4 * n));
  BigInt range = pow_int(nU, static_cast<unsigned long>(n));  // (nU)^n
  basis.zbits = 4 * ceil_log2(range) + 2 * ceil_log2(basis.L) + 64;
  basis.K = round_factor_to_power(Rational(range), basis.L, basis.zbits) + 1;
  return basis;
}

FixedPointPower PowerBasis::approx(const BigInt& exponent) const {
  return approx_power(exponent, L, zbits);
}

BigInt PowerBasis::round_price(const BigInt& exponent) const {
  return round_to_denominator(approx(exponent).value, L);
}

Rational PowerBasis::rounded_price(const BigInt& exponent) const {
  return make_rational(round_price(exponent), L);
}

}  // namespace agora
