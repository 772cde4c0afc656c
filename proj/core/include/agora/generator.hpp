#pragma once

#include <cstdint>

#include "agora/market.hpp"

namespace agora {

// Deterministic per seed: uniform entries in [0, umax], rejection-sampled
// until every agent likes some good and every good is liked (and, when
// requested, until the liking graph is strongly connected).
Market generate_market(int n, long long umax, std::uint64_t seed, bool irreducible);

// A market whose liking graph is a DAG of strongly connected blocks, with
// self-loops on singleton blocks (so an equilibrium exists). Inter-block
// utilities point only from earlier to later blocks.
Market generate_dag_market(int n, long long umax, std::uint64_t seed);

}  // namespace agora
