#include <doctest.h>

#include <random>

#include "agora/errors.hpp"
#include "agora/numerics.hpp"
#include "test_support.hpp"

using namespace agora;
using testsupport::exact_power;

TEST_SUITE("numerics") {

TEST_CASE("rational arithmetic is an exact field") {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 200; ++t) {
    Rational a = make_rational(static_cast<long>(rng() % 2001) - 1000,
                               static_cast<long>(rng() % 999) + 1);
    Rational b = make_rational(static_cast<long>(rng() % 2001) - 1000,
                               static_cast<long>(rng() % 999) + 1);
    CHECK((a + b) - b == a);
    if (b != 0) CHECK((a * b) / b == a);
    Rational sum = a + b;
    CHECK(sum.get_den() > 0);
    BigInt g;
    mpz_gcd(g.get_mpz_t(), sum.get_num().get_mpz_t(), sum.get_den().get_mpz_t());
    CHECK(g == 1);
  }
}

TEST_CASE("round_nearest_even") {
  CHECK(round_nearest_even(make_rational(5, 2)) == 2);
  CHECK(round_nearest_even(make_rational(7, 2)) == 4);
  CHECK(round_nearest_even(make_rational(-1, 2)) == 0);
  CHECK(round_nearest_even(make_rational(3, 1)) == 3);
  CHECK(round_nearest_even(make_rational(-7, 3)) == -2);
}

TEST_CASE("approx_power: exponent zero is exactly one") {
  FixedPointPower p = approx_power(BigInt(0), BigInt(100), 128);
  CHECK(p.value == 1);
  CHECK(p.error_bound == 0);
}

TEST_CASE("approx_power: single factor within 1/(4L)") {
  BigInt L(100);
  FixedPointPower p = approx_power(BigInt(1), L, 128);
  CHECK(abs(p.value - make_rational(101, 100)) <= make_rational(1, 400));
}

TEST_CASE("approx_power: k=37, L=1000 against the exact oracle") {
  BigInt L(1000);
  FixedPointPower p = approx_power(BigInt(37), L, 192);
  CHECK(abs(p.value - exact_power(L, 37)) <= make_rational(1, 4000));
  CHECK(p.error_bound <= make_rational(1, 4000));
}

TEST_CASE("approx_power: sampled exponents stay within 1/(4L)") {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 60; ++t) {
    unsigned long k = 1 + rng() % 5000;
    long l = 3 + static_cast<long>(rng() % 1000000);
    BigInt L(l);
    // zbits ample for these sizes
    FixedPointPower p = approx_power(BigInt(static_cast<long>(k)), L, 160);
    Rational bound = make_rational(BigInt(1), 4 * L);
    CHECK(abs(p.value - exact_power(L, k)) <= bound);
    CHECK(p.value.get_den() <= (BigInt(1) << 160));
  }
}

TEST_CASE("approx_power rejects a hopeless precision budget") {
  // 16 fractional bits cannot carry (1+1/L)^k to within 1/(4L) for large L.
  CHECK_THROWS_AS(approx_power(BigInt(1000), BigInt(1 << 20), 16), PrecisionError);
}

TEST_CASE("round_to_denominator examples") {
  CHECK(round_to_denominator(Rational(1), BigInt(10)) == 10);
  CHECK(round_to_denominator(make_rational(3, 2), BigInt(4)) == 6);
  // value within 1/(4L) of (101/100)^5; the rounding lands within 3/(4L).
  BigInt L(100);
  Rational target = exact_power(L, 5);
  Rational approx = target + make_rational(1, 500);
  BigInt q = round_to_denominator(approx, L);
  CHECK(abs(target - make_rational(q, L)) <= make_rational(3, 400));
}

TEST_CASE("round_factor_to_power examples") {
  CHECK(round_factor_to_power(Rational(1), BigInt(50), 128) == 0);

  BigInt L(50);
  Rational x = exact_power(L, 7);
  BigInt k = round_factor_to_power(x, L, 128);
  CHECK(abs(k - 7) <= 1);
  Rational power = exact_power(L, k.get_ui());
  Rational step = make_rational(51, 50);
  CHECK(x <= power * step);
  CHECK(power <= x * step);

  BigInt L2(1000);
  BigInt k2 = round_factor_to_power(Rational(2), L2, 160);
  Rational p2 = exact_power(L2, k2.get_ui());
  Rational step2 = make_rational(1001, 1000);
  CHECK(Rational(2) <= p2 * step2);
  CHECK(p2 <= Rational(2) * step2);
}

TEST_CASE("round_factor_to_power is within one step of an exact power") {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 40; ++t) {
    long l = 10 + static_cast<long>(rng() % 100000);
    unsigned long j = rng() % 3000;
    BigInt L(l);
    BigInt k = round_factor_to_power(exact_power(L, j), L, 160);
    CHECK(abs(k - BigInt(static_cast<long>(j))) <= 1);
  }
}

TEST_CASE("round_utility contract") {
  CHECK(round_utility(1, BigInt(1000), 160) == 0);
  CHECK_THROWS_AS(round_utility(0, BigInt(1000), 160), ValidationError);

  BigInt L(1000);
  BigInt e = round_utility(2, L, 160);
  Rational power = exact_power(L, e.get_ui());
  Rational step = make_rational(1001, 1000);
  CHECK(Rational(2) <= power * step);
  CHECK(power <= Rational(2) * step);
}

TEST_CASE("round_utility at the production L for n=2, U=10") {
  PowerBasis basis = PowerBasis::for_market(2, 10);
  BigInt e = round_utility(10, basis.L, basis.zbits);
  // Certify 10/(1+1/L) <= (1+1/L)^e <= 10 (1+1/L) through approx_power.
  FixedPointPower p = approx_power(e, basis.L, basis.zbits);
  Rational step = make_rational(basis.L + 1, basis.L);
  CHECK(Rational(10) <= (p.value + p.error_bound) * step);
  CHECK(p.value - p.error_bound <= Rational(10) * step);
}

TEST_CASE("PowerBasis covers the full price range") {
  PowerBasis basis = PowerBasis::for_market(3, 4);
  BigInt range = pow_int(BigInt(12), 3);  // (nU)^n
  CHECK(compare_power(basis.K, basis.L, Rational(range), basis.zbits) >= 0);
  // Rounded price of exponent zero is exactly one.
  CHECK(basis.rounded_price(BigInt(0)) == 1);
}

TEST_CASE("compare_power separates powers from rational targets") {
  BigInt L(977);
  CHECK(compare_power(BigInt(0), L, Rational(1), 64) == 0);
  CHECK(compare_power(BigInt(5), L, exact_power(L, 4), 64) > 0);
  CHECK(compare_power(BigInt(5), L, exact_power(L, 6), 64) < 0);
  CHECK(compare_power(BigInt(200), L, exact_power(L, 200) + make_rational(1, 1000000), 64) < 0);
}

}  // TEST_SUITE
