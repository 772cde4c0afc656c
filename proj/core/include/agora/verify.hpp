#pragma once

#include <vector>

#include "agora/market.hpp"
#include "agora/rational.hpp"

namespace agora {

struct EquilibriumReport {
  bool goods_cleared = false;        // every good completely sold
  bool budgets_spent = false;        // every buyer's money fully spent
  bool bang_per_buck_optimal = false;  // flow only on maximum-ratio edges
  std::vector<int> unsold_goods;     // 1-based witnesses
  std::vector<int> unspent_buyers;   // 1-based witnesses
  std::vector<std::vector<Rational>> allocations;  // x_ij, meaningful when ok()

  bool ok() const { return goods_cleared && budgets_spent && bang_per_buck_optimal; }
};

// Solver-independent exact check: builds N_q from the true utilities and
// the integer prices, runs an exact max-flow, and reads off the three
// equilibrium conditions. Allocations are x_ij = f_ij / q_j.
EquilibriumReport check_equilibrium(const Market& market, const std::vector<BigInt>& prices);

// Brute-force reference for n <= 3: enumerates candidate equality-edge
// subsets, solves the induced exact price constraints (ratio components,
// scale lower bounds, clearing as a flow feasibility problem), and returns
// the first consistent price vector scaled to integers. Every returned
// vector passes check_equilibrium.
std::vector<BigInt> oracle_solve(const Market& market);

// True iff a and b are proportional as rays (exact cross-multiplication).
bool proportional(const std::vector<BigInt>& a, const std::vector<BigInt>& b);

}  // namespace agora
