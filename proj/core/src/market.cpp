#include "agora/market.hpp"

#include <algorithm>
#include <queue>

#include "agora/errors.hpp"

namespace agora {

Market Market::from_utilities(std::vector<std::vector<long long>> u) {
  Market m;
  m.n_ = static_cast<int>(u.size());
  if (m.n_ == 0) throw ValidationError("market: utility matrix is empty");
  for (const auto& row : u) {
    if (static_cast<int>(row.size()) != m.n_)
      throw ValidationError("market: utility matrix must be square");
    for (long long v : row) {
      if (v < 0) throw ValidationError("market: utilities must be non-negative");
      m.max_u_ = std::max(m.max_u_, v);
    }
  }
  if (m.max_u_ == 0) throw ValidationError("market: all utilities are zero");
  m.u_ = std::move(u);
  return m;
}

namespace {

// Tarjan's algorithm; components come out in reverse topological order.
void scc_dfs(const std::vector<std::vector<long long>>& u, int v, int& counter,
             std::vector<int>& index, std::vector<int>& lowlink, std::vector<int>& stack,
             std::vector<char>& on_stack, std::vector<std::vector<int>>& sccs) {
  int n = static_cast<int>(u.size());
  index[v] = lowlink[v] = counter++;
  stack.push_back(v);
  on_stack[v] = 1;
  for (int w = 0; w < n; ++w) {
    if (u[v][w] <= 0) continue;
    if (index[w] < 0) {
      scc_dfs(u, w, counter, index, lowlink, stack, on_stack, sccs);
      lowlink[v] = std::min(lowlink[v], lowlink[w]);
    } else if (on_stack[w]) {
      lowlink[v] = std::min(lowlink[v], index[w]);
    }
  }
  if (lowlink[v] == index[v]) {
    std::vector<int> comp;
    while (true) {
      int w = stack.back();
      stack.pop_back();
      on_stack[w] = 0;
      comp.push_back(w);
      if (w == v) break;
    }
    std::sort(comp.begin(), comp.end());
    sccs.push_back(std::move(comp));
  }
}

}  // namespace

ValidationReport Market::validate() const {
  ValidationReport rep;
  rep.utilities_in_range = true;  // by construction: entries in [0, max_u_]
  rep.everyone_likes_some_good = true;
  rep.every_good_liked = true;
  for (int i = 0; i < n_; ++i) {
    bool likes = false;
    for (int j = 0; j < n_; ++j) likes |= u_[i][j] > 0;
    if (!likes) {
      rep.everyone_likes_some_good = false;
      rep.buyers_without_likes.push_back(i + 1);
    }
  }
  for (int j = 0; j < n_; ++j) {
    bool liked = false;
    for (int i = 0; i < n_; ++i) liked |= u_[i][j] > 0;
    if (!liked) {
      rep.every_good_liked = false;
      rep.goods_unliked.push_back(j + 1);
    }
  }
  // Strong connectivity of the liking graph.
  std::vector<int> index(n_, -1), lowlink(n_, -1), stack;
  std::vector<char> on_stack(n_, 0);
  std::vector<std::vector<int>> sccs;
  int counter = 0;
  for (int v = 0; v < n_; ++v)
    if (index[v] < 0) scc_dfs(u_, v, counter, index, lowlink, stack, on_stack, sccs);
  rep.irreducible = sccs.size() == 1;
  return rep;
}

Market Market::submarket(const std::vector<int>& agents) const {
  std::vector<std::vector<long long>> sub;
  sub.reserve(agents.size());
  for (int i : agents) {
    std::vector<long long> row;
    row.reserve(agents.size());
    for (int j : agents) row.push_back(u_[i][j]);
    sub.push_back(std::move(row));
  }
  return from_utilities(std::move(sub));
}

SccDecomposition scc_decompose(const Market& market) {
  const auto& u = market.utilities();
  int n = market.size();
  std::vector<int> index(n, -1), lowlink(n, -1), stack;
  std::vector<char> on_stack(n, 0);
  std::vector<std::vector<int>> sccs;
  int counter = 0;
  for (int v = 0; v < n; ++v)
    if (index[v] < 0) scc_dfs(u, v, counter, index, lowlink, stack, on_stack, sccs);

  int k = static_cast<int>(sccs.size());
  std::vector<int> comp_of(n);
  for (int c = 0; c < k; ++c)
    for (int v : sccs[c]) comp_of[v] = c;

  // Topological order over the component DAG; ties resolved by smallest
  // agent index for deterministic output.
  std::vector<std::vector<char>> dag(k, std::vector<char>(k, 0));
  std::vector<int> indegree(k, 0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (u[i][j] > 0 && comp_of[i] != comp_of[j] && !dag[comp_of[i]][comp_of[j]]) {
        dag[comp_of[i]][comp_of[j]] = 1;
        ++indegree[comp_of[j]];
      }

  auto cmp_comp = [&](int a, int b) { return sccs[a][0] > sccs[b][0]; };
  std::priority_queue<int, std::vector<int>, decltype(cmp_comp)> ready(cmp_comp);
  for (int c = 0; c < k; ++c)
    if (indegree[c] == 0) ready.push(c);

  SccDecomposition out;
  while (!ready.empty()) {
    int c = ready.top();
    ready.pop();
    out.components.push_back(sccs[c]);
    for (int d = 0; d < k; ++d)
      if (dag[c][d] && --indegree[d] == 0) ready.push(d);
  }
  if (static_cast<int>(out.components.size()) != k)
    throw InternalError("scc_decompose: topological sort failed");

  for (const auto& comp : out.components)
    if (comp.size() == 1 && u[comp[0]][comp[0]] <= 0)
      throw NoEquilibriumError("no equilibrium: agent " + std::to_string(comp[0] + 1) +
                               " forms a component alone and does not like its own good");
  return out;
}

std::vector<BigInt> compose_equilibria(const SccDecomposition& decomposition,
                                       const std::vector<std::vector<BigInt>>& sub_prices,
                                       long long max_utility) {
  size_t k = decomposition.components.size();
  if (sub_prices.size() != k)
    throw ValidationError("compose_equilibria: one price vector per component required");
  size_t n = 0;
  for (const auto& comp : decomposition.components) n += comp.size();

  std::vector<BigInt> global(n, 0);
  BigInt prev_max = 0;
  BigInt scale = 1;
  for (size_t c = 0; c < k; ++c) {
    const auto& comp = decomposition.components[c];
    const auto& sub = sub_prices[c];
    if (sub.size() != comp.size())
      throw ValidationError("compose_equilibria: component/price size mismatch");
    if (c > 0) scale = (BigInt(static_cast<long>(max_utility)) + 1) * prev_max;
    BigInt cur_max = 0;
    for (size_t t = 0; t < comp.size(); ++t) {
      global[comp[t]] = sub[t] * scale;
      cur_max = std::max(cur_max, global[comp[t]]);
    }
    prev_max = cur_max;
  }
  return global;
}

}  // namespace agora
