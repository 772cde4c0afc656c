#include "agora/price_update.hpp"

#include <algorithm>

#include "agora/errors.hpp"

namespace agora {

ActiveSet select_active_set(const SurplusVector& r, const EqualityNetwork& net) {
  int n = net.n;
  ActiveSet as;
  as.order.resize(n);
  for (int i = 0; i < n; ++i) as.order[i] = i;
  std::stable_sort(as.order.begin(), as.order.end(),
                   [&](int a, int b) { return r.buyer[a] > r.buyer[b]; });
  if (r.buyer[as.order[0]] <= 0)
    throw InternalError("select_active_set: no buyer has positive surplus");

  // smallest ell with r(b_ell) * n > r(b_ell+1) * (n+1); zero next surplus
  // counts as an infinite ratio.
  as.ell = n;
  for (int t = 0; t + 1 < n; ++t) {
    const Rational& cur = r.buyer[as.order[t]];
    const Rational& next = r.buyer[as.order[t + 1]];
    if (cur * n > next * (n + 1)) {
      as.ell = t + 1;
      break;
    }
  }
  as.threshold = r.buyer[as.order[as.ell - 1]];

  as.in_bs.assign(n, 0);
  for (int t = 0; t < as.ell; ++t) as.in_bs[as.order[t]] = 1;
  as.in_gamma.assign(n, 0);
  for (int i = 0; i < n; ++i)
    if (as.in_bs[i])
      for (int j = 0; j < n; ++j)
        if (net.edge[i][j]) as.in_gamma[j] = 1;

  as.type.assign(n, 0);
  for (int i = 0; i < n; ++i) {
    if (as.in_bs[i])
      as.type[i] = as.in_gamma[i] ? 1 : 2;
    else
      as.type[i] = as.in_gamma[i] ? 3 : 4;
  }
  return as;
}

std::optional<Rational> compute_x_eq(const ActiveSet& active, const std::vector<Rational>& prices,
                                     const Market& market) {
  int n = static_cast<int>(prices.size());
  std::optional<Rational> best;
  for (int i = 0; i < n; ++i) {
    if (!active.in_bs[i]) continue;
    // alpha_i from any equality edge of buyer i.
    std::optional<Rational> alpha;
    for (int j = 0; j < n; ++j)
      if (market.utility(i, j) > 0) {
        Rational ratio = Rational(static_cast<long>(market.utility(i, j))) / prices[j];
        if (!alpha || ratio > *alpha) alpha = ratio;
      }
    if (!alpha) continue;
    for (int k = 0; k < n; ++k) {
      if (active.in_gamma[k] || market.utility(i, k) <= 0) continue;
      Rational cand = *alpha * prices[k] / Rational(static_cast<long>(market.utility(i, k)));
      if (!best || cand < *best) best = cand;
    }
  }
  return best;
}

std::optional<BigInt> compute_x_eq_exponent(const ActiveSet& active,
                                            const std::vector<BigInt>& price_exp,
                                            const std::vector<std::vector<BigInt>>& util_exp) {
  int n = static_cast<int>(price_exp.size());
  std::optional<BigInt> best;
  for (int i = 0; i < n; ++i) {
    if (!active.in_bs[i]) continue;
    std::optional<BigInt> alpha;
    for (int j = 0; j < n; ++j)
      if (util_exp[i][j] >= 0) {
        BigInt gap = util_exp[i][j] - price_exp[j];
        if (!alpha || gap > *alpha) alpha = gap;
      }
    if (!alpha) continue;
    for (int k = 0; k < n; ++k) {
      if (active.in_gamma[k] || util_exp[i][k] < 0) continue;
      BigInt cand = *alpha - (util_exp[i][k] - price_exp[k]);
      if (!best || cand < *best) best = cand;
    }
  }
  return best;
}

MeetFactors compute_x23_x24(const ActiveSet& active, const std::vector<Rational>& caps,
                            const SurplusVector& r) {
  int n = static_cast<int>(caps.size());
  MeetFactors out;
  for (int i = 0; i < n; ++i) {
    if (active.type[i] != 2) continue;
    for (int j = 0; j < n; ++j) {
      if (active.type[j] == 3) {
        Rational den = caps[i] + caps[j] - r.buyer[i];
        if (den <= 0) continue;
        Rational cand = (caps[i] + caps[j] - r.buyer[j]) / den;
        if (!out.x23 || cand < *out.x23) out.x23 = cand;
      } else if (active.type[j] == 4) {
        Rational den = caps[i] - r.buyer[i];
        if (den <= 0) continue;
        Rational cand = (caps[i] - r.buyer[j]) / den;
        if (!out.x24 || cand < *out.x24) out.x24 = cand;
      }
    }
  }
  return out;
}

void apply_update(std::vector<Rational>& prices, FlowState& f, const Rational& x,
                  const ActiveSet& active) {
  int n = static_cast<int>(prices.size());
  if (x < 1) throw InternalError("apply_update: factor below one");
  for (int i = 0; i < n; ++i)
    if (!active.in_bs[i])
      for (int j = 0; j < n; ++j)
        if (active.in_gamma[j] && f.flow[i][j] > 0)
          throw InternalError("apply_update: flow from outside B(S) into Gamma; flow not balanced");

  for (int j = 0; j < n; ++j) {
    if (!active.in_gamma[j]) continue;
    prices[j] *= x;
    f.sink[j] *= x;
    for (int i = 0; i < n; ++i) f.flow[i][j] *= x;
  }
  for (int i = 0; i < n; ++i)
    if (active.in_bs[i]) f.source[i] *= x;
}

void augment_new_edge(const EqualityNetwork& net, FlowState& f, int bi, int cj,
                      const ActiveSet& active) {
  int n = net.n;
  if (!active.in_bs[bi] || active.in_gamma[cj])
    throw InternalError("augment_new_edge: edge is not B(S) -> outside Gamma");
  if (!net.edge[bi][cj]) throw InternalError("augment_new_edge: not an equality edge");

  Rational w(0);  // largest surplus outside B(S); 0 when B(S) = B
  for (int k = 0; k < n; ++k)
    if (!active.in_bs[k]) w = std::max(w, f.buyer_surplus(net, k));

  // Phase one: push along (bi, cj) until bi's surplus hits w or cj fills up.
  Rational ri = f.buyer_surplus(net, bi);
  Rational headroom = ri - w;
  Rational gap = f.good_surplus(net, cj);
  Rational push = std::min(headroom, gap);
  if (push > 0) {
    f.source[bi] += push;
    f.flow[bi][cj] += push;
    f.sink[cj] += push;
    ri -= push;
  }
  if (ri == w) return;

  // Phase two: divert flow of cj's other suppliers through (bi, cj, bk),
  // equalizing bi with each bk (or stopping at the floor w).
  for (int bk = 0; bk < n; ++bk) {
    if (bk == bi || f.flow[bk][cj] <= 0) continue;
    Rational rk = f.buyer_surplus(net, bk);
    Rational half_gap = (ri - rk) / 2;
    Rational to_floor = ri - w;
    Rational target = std::min(half_gap, to_floor);
    Rational delta = std::min(target, f.flow[bk][cj]);
    if (delta > 0) {
      f.flow[bi][cj] += delta;
      f.source[bi] += delta;
      f.flow[bk][cj] -= delta;
      f.source[bk] -= delta;
      ri -= delta;
      rk += delta;
    }
    w = std::max(w, rk);
    if (ri == w) return;
  }
}

}  // namespace agora
