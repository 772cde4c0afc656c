#pragma once

#include <optional>
#include <vector>

#include "agora/balanced_flow.hpp"
#include "agora/flow.hpp"
#include "agora/market.hpp"

namespace agora {

// Buyers sorted by surplus, threshold index, the price-raise set B(S) with
// its good neighborhood, and the type classification:
//   type 1: b in B(S), own good in Gamma     (surplus scales by x)
//   type 2: b in B(S), own good outside      (surplus falls)
//   type 3: b outside, own good in Gamma     (surplus rises)
//   type 4: b outside, own good outside      (surplus unchanged)
struct ActiveSet {
  std::vector<int> order;       // buyer indices, surplus descending, ties by index
  int ell = 0;                  // |B(S)|, 1-based threshold position
  Rational threshold;           // S = r(b_ell)
  std::vector<char> in_bs;      // membership of B(S)
  std::vector<char> in_gamma;   // Gamma(B(S))
  std::vector<int> type;        // 1..4 per buyer
};

// ell is the smallest index with r(b_ell)/r(b_ell+1) > 1 + 1/n (n if none).
// Requires positive total surplus.
ActiveSet select_active_set(const SurplusVector& r, const EqualityNetwork& net);

// Smallest price factor creating a new equality edge from B(S) to a good
// outside Gamma: min over alpha_i * p_k / u_ik. Empty domain -> nullopt.
std::optional<Rational> compute_x_eq(const ActiveSet& active, const std::vector<Rational>& prices,
                                     const Market& market);

// Same in exponent space when prices and utilities are powers of a common
// base; util_exp entries < 0 encode zero utility.
std::optional<BigInt> compute_x_eq_exponent(const ActiveSet& active,
                                            const std::vector<BigInt>& price_exp,
                                            const std::vector<std::vector<BigInt>>& util_exp);

struct MeetFactors {
  std::optional<Rational> x23;  // type-2 surplus meets type-3
  std::optional<Rational> x24;  // type-2 surplus meets type-4
};

// Factors at which a falling type-2 surplus meets a rising type-3 (resp.
// constant type-4) surplus. Degenerate (<= 0) denominators are skipped.
MeetFactors compute_x23_x24(const ActiveSet& active, const std::vector<Rational>& caps,
                            const SurplusVector& r);

// Scales prices of Gamma goods, flows on edges incident to them, and source
// flows of B(S) buyers by the common factor x. Requires a balanced flow (no
// flow from outside B(S) into Gamma) and x within the event bounds.
void apply_update(std::vector<Rational>& prices, FlowState& f, const Rational& x,
                  const ActiveSet& active);

// Flow fix-up when the update created a new equality edge (bi, cj):
// first absorb cj's surplus from bi, then rebalance bi against the other
// buyers sending flow to cj (ascending index), stopping once bi's surplus
// reaches the highest surplus outside B(S). No good's surplus increases.
void augment_new_edge(const EqualityNetwork& net, FlowState& f, int bi, int cj,
                      const ActiveSet& active);

}  // namespace agora
