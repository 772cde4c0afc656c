#pragma once

#include <vector>

#include "agora/flow.hpp"
#include "agora/market.hpp"
#include "agora/numerics.hpp"

namespace agora {

// Connected components of the undirected equality graph F_p (buyers and
// goods, node ids 0..n-1 buyers, n..2n-1 goods) and of F'_p, which adds the
// ownership edges (b_i, c_i). Component ids are assigned in order of the
// smallest contained node.
struct ComponentStructure {
  int n = 0;
  std::vector<int> f_comp;   // F_p component per node
  std::vector<int> fp_comp;  // F'_p component per node
  int f_count = 0;
  int fp_count = 0;
};

ComponentStructure analyze_components(const std::vector<std::vector<char>>& edges);

// The integer linear system whose solution q/D pins the equilibrium prices:
// per F_p component, spanning-tree rows u_ij' p_j - u_ij p_j' = 0 over the
// true utilities; per F'_p component, one money-balance row for every F_p
// component except the anchor's; and one row p_a = 1 per anchor good.
struct ExtractionSystem {
  std::vector<std::vector<BigInt>> matrix;
  std::vector<BigInt> rhs;              // idealized right-hand side X'
  std::vector<int> anchors;             // anchor good per F'_p component
};

// good_has_surplus selects anchors; good_price_is_one is the fallback
// anchor criterion for components whose surplus is exactly zero.
ExtractionSystem build_system(const Market& market, const std::vector<std::vector<char>>& edges,
                              const std::vector<char>& good_has_surplus,
                              const std::vector<char>& good_price_is_one);

// |det| via fraction-free (Bareiss) elimination; exact over integers.
BigInt bareiss_determinant(std::vector<std::vector<BigInt>> m);

// Cramer solution of the extraction system: A (q/D) = rhs with D = |det A|.
// q is kept with the common denominator D, no global gcd normalization.
// Throws InternalError on a singular matrix.
std::pair<std::vector<BigInt>, BigInt> solve_system(const ExtractionSystem& system);

// Exact min-cut test in N_q: both the source and the sink side must be
// saturated by a maximum flow, i.e. its value equals sum(q). Throws
// VerificationError otherwise.
void verify_prices_min_cut(const Market& market, const std::vector<BigInt>& q);

struct Extraction {
  std::vector<BigInt> q;
  BigInt denominator;        // D
  int joins = 0;
  bool det_bound_ok = true;      // D <= (nU)^n
  bool perturbation_ok = true;   // |p_i - q_i/D| <= 4 eps (nU)^n (certified)
};

// Full rounding pipeline over exact rational prices: join surplus-free
// components of F'_p by scaling until a new equality edge appears, set up
// and solve the integer system, then verify the min-cut test and edge
// preservation.
Extraction extract_exact(const Market& market, std::vector<Rational> prices, FlowState flow,
                         const Rational& epsilon, bool audit = false);

// Same over the power-of-(1+1/L) representation; joins are pure exponent
// arithmetic, utilities enter the system as true integers.
Extraction extract_fixed(const Market& market, const PowerBasis& basis,
                         std::vector<BigInt> price_exp,
                         const std::vector<std::vector<BigInt>>& util_exp,
                         const std::vector<Rational>& p_hat, const FlowState& flow,
                         const Rational& epsilon, bool audit = false);

}  // namespace agora
