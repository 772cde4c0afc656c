#pragma once

#include <string>
#include <vector>

#include "agora/rational.hpp"

namespace agora {

struct ValidationReport {
  bool everyone_likes_some_good = false;  // every row has a positive entry
  bool every_good_liked = false;          // every column has a positive entry
  bool irreducible = false;               // liking graph strongly connected
  bool utilities_in_range = false;        // entries within [0, max_utility]
  std::vector<int> buyers_without_likes;  // 1-based, for reports
  std::vector<int> goods_unliked;         // 1-based

  bool basic_ok() const { return everyone_likes_some_good && every_good_liked; }
  bool all_ok() const { return basic_ok() && irreducible && utilities_in_range; }
};

// The problem instance: n agents, agent i owns one unit of good i, linear
// utilities u[i][j] as non-negative integers. The utility bound U is derived
// from the matrix, never user-supplied.
class Market {
 public:
  // Throws ValidationError on non-square or negative input.
  static Market from_utilities(std::vector<std::vector<long long>> u);

  int size() const { return n_; }
  long long max_utility() const { return max_u_; }
  long long utility(int i, int j) const { return u_[i][j]; }
  const std::vector<std::vector<long long>>& utilities() const { return u_; }

  ValidationReport validate() const;

  // Sub-market induced by the given agents (indices ascending).
  Market submarket(const std::vector<int>& agents) const;

 private:
  Market() = default;
  int n_ = 0;
  long long max_u_ = 0;
  std::vector<std::vector<long long>> u_;
};

// Strongly connected components of the liking graph (i -> j iff u_ij > 0)
// in topological order: edges go only from lower-numbered components to
// higher-numbered ones or stay inside one.
struct SccDecomposition {
  std::vector<std::vector<int>> components;  // agent indices, ascending per component
  bool is_irreducible() const { return components.size() == 1; }
};

// Throws NoEquilibriumError if a singleton component lacks a self-loop
// (u_ii = 0); such markets have no equilibrium.
SccDecomposition scc_decompose(const Market& market);

// Glues per-component equilibrium prices into a global vector: component
// i's prices are scaled by (U+1) * max{p_j : j in component i-1}, applied
// cumulatively after the previous component's scaling.
std::vector<BigInt> compose_equilibria(const SccDecomposition& decomposition,
                                       const std::vector<std::vector<BigInt>>& sub_prices,
                                       long long max_utility);

}  // namespace agora
