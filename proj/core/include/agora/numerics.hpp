#pragma once

#include <vector>

#include "agora/rational.hpp"

namespace agora {

// Result of a fixed-point power computation. `value` has denominator 2^Z;
// `error_bound` is an exact bound on |value - (1+1/L)^k| accumulated over
// the repeated-squaring steps.
struct FixedPointPower {
  Rational value;
  Rational error_bound;
};

// (1+1/L)^k by repeated squaring in fixed-point arithmetic with `zbits`
// fractional bits. Throws PrecisionError if the tracked error bound ends up
// above 1/(4L); callers rely on that bound downstream.
FixedPointPower approx_power(const BigInt& k, const BigInt& L, long zbits);

// Nearest integer q to value_approx * L, ties to even. When value_approx is
// within 1/(4L) of a target a >= 1 and L >= 3, q/L is an additive 3/(4L)-
// and a multiplicative (1+1/L)-approximation of a.
BigInt round_to_denominator(const Rational& value_approx, const BigInt& L);

// Smallest-effort exponent k such that (1+1/L)^k is a multiplicative
// (1+1/L)-approximation of x_hat, found by binary search over certified
// fixed-point power comparisons. Requires 1 <= x_hat.
BigInt round_factor_to_power(const Rational& x_hat, const BigInt& L, long zbits);

// Exponent e with u/(1+1/L) <= (1+1/L)^e <= u(1+1/L). Rejects u = 0: zero
// utilities are never rounded, they simply induce no equality edge.
BigInt round_utility(long long u, const BigInt& L, long zbits);

// Certified comparison of (1+1/L)^k against an exact rational target.
// Returns -1/0/+1; escalates precision until decidable (0 only for the
// genuinely equal case k = 0, target = 1).
int compare_power(const BigInt& k, const BigInt& L, const Rational& target, long zbits);

// Shared fixed-mode context: the power-of-(1+1/L) price representation.
struct PowerBasis {
  BigInt L;    // prices and utilities are powers of 1 + 1/L
  BigInt K;    // exponent cap covering the price range [1, (nU)^n]
  long zbits;  // fixed-point fractional bits for power evaluation

  static PowerBasis for_market(int n, long long max_utility);

  FixedPointPower approx(const BigInt& exponent) const;
  // q such that p_hat = q/L approximates (1+1/L)^exponent per the rounding
  // contract (additive 1/L, multiplicative 1+1/L).
  BigInt round_price(const BigInt& exponent) const;
  Rational rounded_price(const BigInt& exponent) const;
};

}  // namespace agora
