#include "agora/verify.hpp"

#include <deque>
#include <optional>

#include "agora/errors.hpp"
#include "agora/flow.hpp"

namespace agora {

EquilibriumReport check_equilibrium(const Market& market, const std::vector<BigInt>& prices) {
  int n = market.size();
  if (static_cast<int>(prices.size()) != n)
    throw ValidationError("check_equilibrium: price vector size mismatch");
  for (const BigInt& p : prices)
    if (p < 1) throw ValidationError("check_equilibrium: prices must be positive integers");

  std::vector<Rational> caps;
  caps.reserve(n);
  for (const BigInt& p : prices) caps.emplace_back(p);
  EqualityNetwork net = build_equality_network(caps, market);
  FlowState f = empty_flow(net);
  max_flow(net, f);

  EquilibriumReport rep;
  rep.goods_cleared = true;
  rep.budgets_spent = true;
  rep.bang_per_buck_optimal = true;
  for (int j = 0; j < n; ++j)
    if (f.sink[j] != net.good_cap[j]) {
      rep.goods_cleared = false;
      rep.unsold_goods.push_back(j + 1);
    }
  for (int i = 0; i < n; ++i)
    if (f.source[i] != net.buyer_cap[i]) {
      rep.budgets_spent = false;
      rep.unspent_buyers.push_back(i + 1);
    }
  // Flow lives on equality edges by construction; re-verify the maximum
  // bang-per-buck property by integer cross-multiplication anyway.
  for (int i = 0; i < n && rep.bang_per_buck_optimal; ++i)
    for (int j = 0; j < n && rep.bang_per_buck_optimal; ++j) {
      if (f.flow[i][j] <= 0) continue;
      for (int k = 0; k < n; ++k)
        if (BigInt(static_cast<long>(market.utility(i, j))) * prices[k] <
            BigInt(static_cast<long>(market.utility(i, k))) * prices[j]) {
          rep.bang_per_buck_optimal = false;
          break;
        }
    }

  rep.allocations.assign(n, std::vector<Rational>(n, Rational(0)));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (f.flow[i][j] > 0) rep.allocations[i][j] = f.flow[i][j] / caps[j];
  return rep;
}

namespace {

// The oracle keeps its own small graph and linear-algebra helpers so the
// enumeration stays an independent path from the solver and extraction code
// it cross-checks.

struct MaskComponents {
  std::vector<int> ratio_comp;  // connected components of the edge graph
  std::vector<int> own_comp;    // with the ownership pairs (b_i, c_i) added
  int ratio_count = 0;
  int own_count = 0;
};

MaskComponents mask_components(int n, const std::vector<std::vector<char>>& edges) {
  MaskComponents mc;
  auto label = [&](std::vector<int>& comp, bool ownership) {
    comp.assign(2 * n, -1);
    int count = 0;
    for (int start = 0; start < 2 * n; ++start) {
      if (comp[start] != -1) continue;
      std::deque<int> queue{start};
      comp[start] = count;
      while (!queue.empty()) {
        int v = queue.front();
        queue.pop_front();
        int own = v < n ? n + v : v - n;
        if (ownership && comp[own] == -1) {
          comp[own] = count;
          queue.push_back(own);
        }
        if (v < n) {
          for (int j = 0; j < n; ++j)
            if (edges[v][j] && comp[n + j] == -1) {
              comp[n + j] = count;
              queue.push_back(n + j);
            }
        } else {
          for (int i = 0; i < n; ++i)
            if (edges[i][v - n] && comp[i] == -1) {
              comp[i] = count;
              queue.push_back(i);
            }
        }
      }
      ++count;
    }
    return count;
  };
  mc.ratio_count = label(mc.ratio_comp, false);
  mc.own_count = label(mc.own_comp, true);
  return mc;
}

// Plain rational Gaussian elimination; empty on singular input.
std::vector<Rational> gauss(std::vector<std::vector<Rational>> m, std::vector<Rational> rhs) {
  int n = static_cast<int>(m.size());
  for (int k = 0; k < n; ++k) {
    int pivot = -1;
    for (int r = k; r < n && pivot < 0; ++r)
      if (m[r][k] != 0) pivot = r;
    if (pivot < 0) return {};
    std::swap(m[k], m[pivot]);
    std::swap(rhs[k], rhs[pivot]);
    for (int r = 0; r < n; ++r) {
      if (r == k || m[r][k] == 0) continue;
      Rational factor = m[r][k] / m[k][k];
      for (int c = k; c < n; ++c) m[r][c] -= factor * m[k][c];
      rhs[r] -= factor * rhs[k];
    }
  }
  std::vector<Rational> x(n);
  for (int k = 0; k < n; ++k) x[k] = rhs[k] / m[k][k];
  return x;
}

// Candidate prices for one edge subset: spanning-tree tie rows per ratio
// component, money-balance rows for all ratio components but one anchor per
// ownership component, and p(anchor) = 1. Budgets never cross ownership
// components, so each one's overall scale stays a free parameter here.
std::vector<Rational> candidate_prices(const Market& market,
                                       const std::vector<std::vector<char>>& edges,
                                       const MaskComponents& mc) {
  int n = market.size();
  std::vector<std::vector<Rational>> rows;
  std::vector<Rational> rhs;
  auto add_row = [&]() -> std::vector<Rational>& {
    rows.emplace_back(n, Rational(0));
    rhs.emplace_back(0);
    return rows.back();
  };

  std::vector<int> anchor(mc.own_count, -1);
  for (int j = 0; j < n; ++j)
    if (anchor[mc.own_comp[n + j]] == -1) anchor[mc.own_comp[n + j]] = j;
  std::vector<char> exempt(mc.ratio_count, 0);
  for (int c = 0; c < mc.own_count; ++c)
    if (anchor[c] >= 0) exempt[mc.ratio_comp[n + anchor[c]]] = 1;

  for (int c = 0; c < mc.ratio_count; ++c) {
    int root = -1;
    for (int j = 0; j < n && root < 0; ++j)
      if (mc.ratio_comp[n + j] == c) root = j;
    if (root < 0) continue;  // buyer-only component has no price rows
    std::vector<char> seen_b(n, 0), seen_g(n, 0);
    std::deque<int> queue{root};
    seen_g[root] = 1;
    while (!queue.empty()) {
      int g = queue.front();
      queue.pop_front();
      for (int b = 0; b < n; ++b) {
        if (!edges[b][g] || seen_b[b]) continue;
        seen_b[b] = 1;
        for (int g2 = 0; g2 < n; ++g2) {
          if (!edges[b][g2] || seen_g[g2]) continue;
          seen_g[g2] = 1;
          auto& row = add_row();
          row[g] += Rational(static_cast<long>(market.utility(b, g2)));
          row[g2] -= Rational(static_cast<long>(market.utility(b, g)));
          queue.push_back(g2);
        }
      }
    }
  }
  for (int c = 0; c < mc.ratio_count; ++c) {
    if (exempt[c]) continue;
    auto& row = add_row();
    for (int i = 0; i < n; ++i) {
      if (mc.ratio_comp[i] == c) row[i] += 1;      // buyer's budget is p_i
      if (mc.ratio_comp[n + i] == c) row[i] -= 1;  // the good itself
    }
  }
  for (int c = 0; c < mc.own_count; ++c) {
    if (anchor[c] < 0) return {};
    auto& row = add_row();
    row[anchor[c]] = 1;
    rhs.back() = 1;
  }
  if (static_cast<int>(rows.size()) != n) return {};
  return gauss(std::move(rows), std::move(rhs));
}

}  // namespace

std::vector<BigInt> oracle_solve(const Market& market) {
  int n = market.size();
  if (n > 3) throw ValidationError("oracle_solve: only markets with n <= 3");

  int pairs = n * n;
  for (unsigned mask = 1; mask < (1u << pairs); ++mask) {
    std::vector<std::vector<char>> edges(n, std::vector<char>(n, 0));
    bool valid = true;
    for (int i = 0; i < n && valid; ++i)
      for (int j = 0; j < n; ++j)
        if (mask & (1u << (i * n + j))) {
          if (market.utility(i, j) <= 0) {
            valid = false;
            break;
          }
          edges[i][j] = 1;
        }
    if (!valid) continue;
    for (int i = 0; i < n && valid; ++i) {
      bool any = false;
      for (int j = 0; j < n; ++j) any |= edges[i][j];
      valid = any;
    }
    if (!valid) continue;

    MaskComponents mc = mask_components(n, edges);
    std::vector<Rational> p = candidate_prices(market, edges, mc);
    if (p.empty()) continue;
    bool positive = true;
    for (const Rational& v : p) positive &= v > 0;
    if (!positive) continue;

    // Every candidate edge must attain its buyer's bang per buck; goods in
    // the same ownership component must not beat it. Preferences toward
    // other ownership components yield lower bounds on their scales.
    std::vector<Rational> alpha(n, Rational(0));
    std::vector<int> buyer_comp(n, -1);
    bool feasible = true;
    for (int i = 0; i < n && feasible; ++i) {
      for (int j = 0; j < n; ++j)
        if (edges[i][j]) {
          Rational bang = Rational(static_cast<long>(market.utility(i, j))) / p[j];
          if (buyer_comp[i] < 0) {
            alpha[i] = bang;
            buyer_comp[i] = mc.own_comp[i];
          } else if (bang != alpha[i]) {
            feasible = false;  // a dropped tie row disagrees
            break;
          }
        }
    }
    if (!feasible) continue;

    std::vector<std::vector<std::optional<Rational>>> need(
        mc.own_count, std::vector<std::optional<Rational>>(mc.own_count));
    for (int i = 0; i < n && feasible; ++i) {
      for (int k = 0; k < n; ++k) {
        if (market.utility(i, k) <= 0 || edges[i][k]) continue;
        Rational attraction = Rational(static_cast<long>(market.utility(i, k))) / p[k];
        if (mc.own_comp[n + k] == buyer_comp[i]) {
          if (attraction > alpha[i]) {
            feasible = false;
            break;
          }
        } else {
          Rational c = attraction / alpha[i];
          auto& cell = need[buyer_comp[i]][mc.own_comp[n + k]];
          if (!cell || *cell < c) cell = c;
        }
      }
    }
    if (!feasible) continue;

    std::vector<Rational> scale(mc.own_count, Rational(1));
    for (int round = 0; round <= mc.own_count; ++round)
      for (int a = 0; a < mc.own_count; ++a)
        for (int b = 0; b < mc.own_count; ++b)
          if (need[a][b] && scale[a] * *need[a][b] > scale[b]) scale[b] = scale[a] * *need[a][b];
    for (int a = 0; a < mc.own_count && feasible; ++a)
      for (int b = 0; b < mc.own_count; ++b)
        if (need[a][b] && scale[a] * *need[a][b] > scale[b]) {
          feasible = false;  // positive cycle of scale constraints
          break;
        }
    if (!feasible) continue;

    std::vector<Rational> scaled(n);
    for (int j = 0; j < n; ++j) scaled[j] = scale[mc.own_comp[n + j]] * p[j];

    // Market clearing through the candidate edges only.
    EqualityNetwork net = EqualityNetwork::raw(scaled, scaled, edges);
    FlowState f = empty_flow(net);
    max_flow(net, f);
    if (f.total_surplus(net) != 0) continue;

    BigInt common(1);
    for (const Rational& v : scaled)
      mpz_lcm(common.get_mpz_t(), common.get_mpz_t(), v.get_den().get_mpz_t());
    std::vector<BigInt> q;
    q.reserve(n);
    for (const Rational& v : scaled) q.push_back(Rational(v * Rational(common)).get_num());
    if (!check_equilibrium(market, q).ok())
      throw InternalError("oracle_solve: candidate passed clearing but failed verification");
    return q;
  }
  throw InternalError("oracle_solve: no equilibrium found; this contradicts existence");
}

bool proportional(const std::vector<BigInt>& a, const std::vector<BigInt>& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = i + 1; j < a.size(); ++j)
      if (a[i] * b[j] != a[j] * b[i]) return false;
  return true;
}

}  // namespace agora
