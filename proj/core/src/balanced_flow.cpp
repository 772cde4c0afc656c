#include "agora/balanced_flow.hpp"

#include <algorithm>
#include <deque>

#include "agora/errors.hpp"

namespace agora {

Rational SurplusVector::l1() const {
  Rational v(0);
  for (const Rational& r : buyer) v += r;
  return v;
}

Rational SurplusVector::l2_sq() const {
  Rational v(0);
  for (const Rational& r : buyer) v += r * r;
  return v;
}

SurplusVector surplus_of(const EqualityNetwork& net, const FlowState& f) {
  SurplusVector s;
  s.buyer.reserve(net.n);
  s.good.reserve(net.n);
  for (int i = 0; i < net.n; ++i) s.buyer.push_back(f.buyer_surplus(net, i));
  for (int j = 0; j < net.n; ++j) s.good.push_back(f.good_surplus(net, j));
  return s;
}

namespace {

// One supply->demand augmenting path inside the scope, found by BFS over
// the residual graph restricted to scope nodes. Buyers with positive
// remaining supply act as sources; buyers with positive remaining demand
// absorb. Returns false when no path exists.
bool route_one(const EqualityNetwork& net, FlowState& f, const std::vector<char>& scope,
               std::vector<Rational>& supply, std::vector<Rational>& demand) {
  int n = net.n;
  // parent[node]: node ids 0..n-1 buyers, n..2n-1 goods; -1 unvisited,
  // -2 marks a BFS source buyer.
  std::vector<int> parent(2 * n, -1);
  std::deque<int> queue;
  for (int i = 0; i < n; ++i)
    if (scope[i] && supply[i] > 0) {
      parent[i] = -2;
      queue.push_back(i);
    }
  int found = -1;
  while (!queue.empty() && found < 0) {
    int v = queue.front();
    queue.pop_front();
    if (v < n) {
      for (int j = 0; j < n; ++j)
        if (net.edge[v][j] && scope[n + j] && parent[n + j] < 0) {
          parent[n + j] = v;
          queue.push_back(n + j);
        }
    } else {
      int j = v - n;
      for (int i = 0; i < n; ++i)
        if (f.flow[i][j] > 0 && scope[i] && parent[i] == -1) {
          parent[i] = v;
          if (demand[i] > 0) {
            found = i;
            break;
          }
          queue.push_back(i);
        }
    }
  }
  if (found < 0) return false;

  // Bottleneck: remaining demand at the end, remaining supply at the start,
  // and the reverse-edge flows along the path.
  Rational delta = demand[found];
  for (int v = found; parent[v] != -2;) {
    int u = parent[v];
    if (v < n) delta = std::min(delta, f.flow[v][u - n]);  // good u -> buyer v
    v = u;
  }
  int start = found;
  while (parent[start] != -2) start = parent[start];
  delta = std::min(delta, supply[start]);
  if (delta <= 0) throw InternalError("balance: degenerate routing path");

  for (int v = found; parent[v] != -2;) {
    int u = parent[v];
    if (v < n)
      f.flow[v][u - n] -= delta;  // buyer v returns flow to good u
    else
      f.flow[u][v - n] += delta;  // buyer u pushes flow into good v
    v = u;
  }
  f.source[start] += delta;
  supply[start] -= delta;
  f.source[found] -= delta;
  demand[found] -= delta;
  return true;
}

void balance_scope(const EqualityNetwork& net, FlowState& f, const std::vector<char>& scope) {
  int n = net.n;
  std::vector<int> buyers;
  for (int i = 0; i < n; ++i)
    if (scope[i]) buyers.push_back(i);
  if (buyers.size() <= 1) return;

  Rational total(0);
  for (int i : buyers) total += f.buyer_surplus(net, i);
  Rational r_avg = total / Rational(static_cast<long>(buyers.size()));

  std::vector<Rational> supply(n, Rational(0)), demand(n, Rational(0));
  bool any_supply = false;
  for (int i : buyers) {
    Rational r = f.buyer_surplus(net, i);
    if (r > r_avg) {
      supply[i] = r - r_avg;
      any_supply = true;
    } else {
      // Buyers sitting at the average count as demand nodes; a buyer can
      // absorb at most the flow it currently sends out.
      Rational gap = r_avg - r;
      demand[i] = std::min(gap, f.source[i]);
    }
  }
  if (!any_supply) return;

  while (route_one(net, f, scope, supply, demand)) {
  }

  std::vector<int> unrouted;
  for (int i : buyers)
    if (supply[i] > 0) unrouted.push_back(i);
  if (unrouted.empty()) return;  // all buyers in scope now sit at r_avg

  // Split along the induced min cut: nodes reachable from the buyers with
  // leftover supply form the high side; recurse on both sides.
  std::vector<char> high(2 * n, 0);
  std::deque<int> queue;
  for (int i : unrouted) {
    high[i] = 1;
    queue.push_back(i);
  }
  while (!queue.empty()) {
    int v = queue.front();
    queue.pop_front();
    if (v < n) {
      for (int j = 0; j < n; ++j)
        if (net.edge[v][j] && scope[n + j] && !high[n + j]) {
          high[n + j] = 1;
          queue.push_back(n + j);
        }
    } else {
      int j = v - n;
      for (int i = 0; i < n; ++i)
        if (f.flow[i][j] > 0 && scope[i] && !high[i]) {
          high[i] = 1;
          queue.push_back(i);
        }
    }
  }
  std::vector<char> low(2 * n, 0);
  bool low_has_buyer = false;
  for (int v = 0; v < 2 * n; ++v) {
    if (!scope[v] || high[v]) continue;
    low[v] = 1;
    if (v < n) low_has_buyer = true;
  }
  // The buyer whose demand stayed open (or whose source edge was drained)
  // is never reachable from the leftover supplies, so both sides shrink.
  if (!low_has_buyer) throw InternalError("balance: split produced an empty side");
  balance_scope(net, f, high);
  balance_scope(net, f, low);
}

}  // namespace

void balance(const EqualityNetwork& net, FlowState& f) {
  max_flow(net, f);
  std::vector<char> scope = residual_reachable(net, f);
  balance_scope(net, f, scope);
}

bool no_crossing_certificate(const EqualityNetwork& net, const FlowState& f) {
  int n = net.n;
  for (int i = 0; i < n; ++i) {
    Rational ri = f.buyer_surplus(net, i);
    if (ri == 0) continue;
    std::vector<char> seen(2 * n, 0);
    std::deque<int> queue;
    seen[i] = 1;
    queue.push_back(i);
    while (!queue.empty()) {
      int v = queue.front();
      queue.pop_front();
      if (v < n) {
        if (v != i && f.buyer_surplus(net, v) < ri) return false;
        for (int j = 0; j < n; ++j)
          if (net.edge[v][j] && !seen[n + j]) {
            seen[n + j] = 1;
            queue.push_back(n + j);
          }
      } else {
        int j = v - n;
        for (int k = 0; k < n; ++k)
          if (f.flow[k][j] > 0 && !seen[k]) {
            seen[k] = 1;
            queue.push_back(k);
          }
      }
    }
  }
  return true;
}

}  // namespace agora
