#include "agora/generator.hpp"

#include <random>

#include "agora/errors.hpp"

namespace agora {

Market generate_market(int n, long long umax, std::uint64_t seed, bool irreducible) {
  if (n < 1 || umax < 1) throw ValidationError("generate_market: need n >= 1 and umax >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<long long> entry(0, umax);
  for (int attempt = 0; attempt < 1000000; ++attempt) {
    std::vector<std::vector<long long>> u(n, std::vector<long long>(n, 0));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) u[i][j] = entry(rng);
    bool nonzero = false;
    for (const auto& row : u)
      for (long long v : row) nonzero |= v > 0;
    if (!nonzero) continue;
    Market m = Market::from_utilities(std::move(u));
    ValidationReport rep = m.validate();
    if (!rep.basic_ok()) continue;
    if (irreducible && !rep.irreducible) continue;
    return m;
  }
  throw Error("generate_market: rejection sampling did not converge");
}

Market generate_dag_market(int n, long long umax, std::uint64_t seed) {
  if (n < 2 || umax < 1) throw ValidationError("generate_dag_market: need n >= 2 and umax >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<long long> entry(0, umax);
  std::uniform_int_distribution<long long> positive(1, umax);

  // Random composition of n into 2..min(4, n) blocks.
  int blocks = 2 + static_cast<int>(rng() % std::min<std::uint64_t>(3, n - 1));
  std::vector<int> sizes(blocks, 1);
  for (int rest = n - blocks; rest > 0; --rest) ++sizes[rng() % blocks];

  std::vector<std::vector<long long>> u(n, std::vector<long long>(n, 0));
  int offset = 0;
  std::vector<std::pair<int, int>> spans;
  for (int b = 0; b < blocks; ++b) {
    int sz = sizes[b];
    spans.emplace_back(offset, sz);
    if (sz == 1) {
      u[offset][offset] = positive(rng);
    } else {
      Market block = generate_market(sz, umax, rng(), true);
      for (int i = 0; i < sz; ++i)
        for (int j = 0; j < sz; ++j) u[offset + i][offset + j] = block.utility(i, j);
    }
    offset += sz;
  }
  // Forward utilities between blocks, half of the pairs on average.
  for (int a = 0; a < blocks; ++a)
    for (int b = a + 1; b < blocks; ++b)
      for (int i = spans[a].first; i < spans[a].first + spans[a].second; ++i)
        for (int j = spans[b].first; j < spans[b].first + spans[b].second; ++j)
          if (rng() % 2 == 0) u[i][j] = entry(rng);
  return Market::from_utilities(std::move(u));
}

}  // namespace agora
