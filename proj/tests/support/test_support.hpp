#pragma once

// Shared helpers for the unit and acceptance suites. The oracles here are
// deliberately independent of the library's flow machinery: exact rational
// exponentiation via GMP, a subset-enumeration min-cut, and an active-set
// enumeration minimizer for the l2 surplus objective.

#include <vector>

#include "agora/rational.hpp"

namespace testsupport {

// (1 + 1/L)^k computed exactly as (L+1)^k / L^k.
agora::Rational exact_power(const agora::BigInt& L, unsigned long k);

// The same as a raw numerator/denominator pair (already coprime); avoids
// rational canonicalization for very large exponents.
std::pair<agora::BigInt, agora::BigInt> exact_power_parts(const agora::BigInt& L, unsigned long k);

// Gaussian elimination over exact rationals; empty result if singular.
std::vector<agora::Rational> solve_linear(std::vector<std::vector<agora::Rational>> m,
                                          std::vector<agora::Rational> rhs);

// Maximum-flow value of the bipartite equality network by min-cut subset
// enumeration (n <= ~10): min over buyer subsets A of p(B\A) + c(Gamma(A)).
agora::Rational enumerated_max_flow_value(const std::vector<agora::Rational>& buyer_cap,
                                          const std::vector<agora::Rational>& good_cap,
                                          const std::vector<std::vector<char>>& edges);

// Minimum of sum r_i^2 over the surplus vectors of maximum flows, by
// enumerating active constraint sets of the surplus polytope
//   { 0 <= r <= p, sum r = T, sum_{i in A} r_i >= p(A) - c(Gamma(A)) }.
agora::Rational l2_min_oracle(const std::vector<agora::Rational>& buyer_cap,
                              const std::vector<agora::Rational>& good_cap,
                              const std::vector<std::vector<char>>& edges);

}  // namespace testsupport
