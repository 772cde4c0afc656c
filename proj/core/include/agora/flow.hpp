#pragma once

#include <vector>

#include "agora/market.hpp"
#include "agora/rational.hpp"

namespace agora {

// Bipartite flow network s -> buyers -> goods -> t. Buyer-good edges exist
// only at maximum bang per buck and are uncapacitated; "infinite" capacity
// is represented by the absence of an upper bound, never by a large number.
struct EqualityNetwork {
  int n = 0;
  std::vector<Rational> buyer_cap;       // capacity of (s, b_i)
  std::vector<Rational> good_cap;        // capacity of (c_j, t)
  std::vector<std::vector<char>> edge;   // edge[i][j]: b_i -> c_j in E_p
  std::vector<Rational> bang_per_buck;   // alpha_i (exact-mode builds only)

  static EqualityNetwork raw(std::vector<Rational> buyer_cap, std::vector<Rational> good_cap,
                             std::vector<std::vector<char>> edges);
};

// N_p for exact prices and true utilities: caps = prices, edges by exact
// cross-multiplied comparison of u_ij/p_j against the row maximum.
EqualityNetwork build_equality_network(const std::vector<Rational>& prices, const Market& market);

// N(p, p_hat): edge set from prices p (here already reduced to exponent
// comparisons by the caller), capacities from the rounded prices p_hat.
EqualityNetwork build_equality_network(const std::vector<Rational>& capacities,
                                       std::vector<std::vector<char>> edges);

// Equality edges when utilities and prices are powers of a common base:
// (i, j) is an edge iff util_exp[i][j] - price_exp[j] attains buyer i's
// maximum. Entries with util_exp[i][j] < 0 mean u_ij = 0 (never an edge).
std::vector<std::vector<char>> equality_edges_from_exponents(
    const std::vector<std::vector<BigInt>>& util_exp, const std::vector<BigInt>& price_exp);

struct FlowState {
  std::vector<Rational> source;             // flow on (s, b_i)
  std::vector<Rational> sink;               // flow on (c_j, t)
  std::vector<std::vector<Rational>> flow;  // flow on (b_i, c_j)

  Rational value() const;
  Rational buyer_surplus(const EqualityNetwork& net, int i) const {
    return net.buyer_cap[i] - source[i];
  }
  Rational good_surplus(const EqualityNetwork& net, int j) const {
    return net.good_cap[j] - sink[j];
  }
  Rational total_surplus(const EqualityNetwork& net) const;
};

FlowState empty_flow(const EqualityNetwork& net);

// Augments the given feasible flow to a maximum flow with BFS shortest
// augmenting paths; deterministic ascending scan order. Goods saturated in
// the warm start stay saturated. Throws on an infeasible warm start.
void max_flow(const EqualityNetwork& net, FlowState& f);

// Nodes reachable from s in the residual graph: entries 0..n-1 are buyers,
// n..2n-1 goods. Requires a maximum flow (throws if t is reachable).
std::vector<char> residual_reachable(const EqualityNetwork& net, const FlowState& f);

// Exact capacity of the cut (s + reachable, rest + t).
Rational cut_capacity(const EqualityNetwork& net, const std::vector<char>& reachable);

// Full feasibility audit: conservation at every node, capacities respected,
// flow only on equality edges. Throws InternalError with a description.
void check_flow(const EqualityNetwork& net, const FlowState& f);

// Pulls flow into unsaturated target goods by value-preserving residual
// swaps against goods outside the target set. Used after flow transfers to
// restore the zero-surplus invariant. With strict set, failure to restore a
// target good throws InternalError; otherwise the good is left as is.
void resaturate_goods(const EqualityNetwork& net, FlowState& f, const std::vector<char>& targets,
                      bool strict);

}  // namespace agora
