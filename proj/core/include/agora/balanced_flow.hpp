#pragma once

#include <vector>

#include "agora/flow.hpp"

namespace agora {

struct SurplusVector {
  std::vector<Rational> buyer;
  std::vector<Rational> good;

  Rational l1() const;     // total buyer surplus |r(B)|
  Rational l2_sq() const;  // squared l2 norm, kept rational
};

SurplusVector surplus_of(const EqualityNetwork& net, const FlowState& f);

// Turns f into a balanced flow: a maximum flow minimizing the l2 norm of
// the buyer surplus vector. Divide and conquer: make f maximum, split off
// the zero-surplus part along the min cut, route supplies r(b_i) - r_avg
// toward demands in the residual graph, and recurse across the induced cut
// when not everything routes. Goods with zero surplus keep zero surplus.
void balance(const EqualityNetwork& net, FlowState& f);

// Balancedness witness: true iff there is no residual path from a buyer
// with strictly larger surplus to a buyer with strictly smaller surplus.
// This certifies l2 minimality without an external solver.
bool no_crossing_certificate(const EqualityNetwork& net, const FlowState& f);

}  // namespace agora
