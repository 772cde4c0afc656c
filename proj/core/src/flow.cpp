#include "agora/flow.hpp"

#include <algorithm>
#include <deque>

#include "agora/errors.hpp"

namespace agora {

EqualityNetwork EqualityNetwork::raw(std::vector<Rational> buyer_cap,
                                     std::vector<Rational> good_cap,
                                     std::vector<std::vector<char>> edges) {
  EqualityNetwork net;
  net.n = static_cast<int>(buyer_cap.size());
  net.buyer_cap = std::move(buyer_cap);
  net.good_cap = std::move(good_cap);
  net.edge = std::move(edges);
  return net;
}

EqualityNetwork build_equality_network(const std::vector<Rational>& prices, const Market& market) {
  int n = market.size();
  EqualityNetwork net;
  net.n = n;
  net.buyer_cap = prices;
  net.good_cap = prices;
  net.edge.assign(n, std::vector<char>(n, 0));
  net.bang_per_buck.assign(n, Rational(0));
  for (int i = 0; i < n; ++i) {
    Rational alpha(0);
    for (int j = 0; j < n; ++j) {
      if (market.utility(i, j) <= 0) continue;
      Rational ratio = Rational(static_cast<long>(market.utility(i, j))) / prices[j];
      if (ratio > alpha) alpha = ratio;
    }
    net.bang_per_buck[i] = alpha;
    for (int j = 0; j < n; ++j) {
      if (market.utility(i, j) <= 0) continue;
      // u_ij / p_j == alpha, compared by cross-multiplication.
      if (Rational(static_cast<long>(market.utility(i, j))) == alpha * prices[j])
        net.edge[i][j] = 1;
    }
  }
  return net;
}

EqualityNetwork build_equality_network(const std::vector<Rational>& capacities,
                                       std::vector<std::vector<char>> edges) {
  EqualityNetwork net;
  net.n = static_cast<int>(capacities.size());
  net.buyer_cap = capacities;
  net.good_cap = capacities;
  net.edge = std::move(edges);
  return net;
}

std::vector<std::vector<char>> equality_edges_from_exponents(
    const std::vector<std::vector<BigInt>>& util_exp, const std::vector<BigInt>& price_exp) {
  int n = static_cast<int>(price_exp.size());
  std::vector<std::vector<char>> edges(n, std::vector<char>(n, 0));
  for (int i = 0; i < n; ++i) {
    bool have = false;
    BigInt best;
    for (int j = 0; j < n; ++j) {
      if (util_exp[i][j] < 0) continue;
      BigInt gap = util_exp[i][j] - price_exp[j];
      if (!have || gap > best) {
        best = gap;
        have = true;
      }
    }
    if (!have) continue;
    for (int j = 0; j < n; ++j)
      if (util_exp[i][j] >= 0 && util_exp[i][j] - price_exp[j] == best) edges[i][j] = 1;
  }
  return edges;
}

Rational FlowState::value() const {
  Rational v(0);
  for (const Rational& x : source) v += x;
  return v;
}

Rational FlowState::total_surplus(const EqualityNetwork& net) const {
  Rational v(0);
  for (int i = 0; i < net.n; ++i) v += buyer_surplus(net, i);
  return v;
}

FlowState empty_flow(const EqualityNetwork& net) {
  FlowState f;
  f.source.assign(net.n, Rational(0));
  f.sink.assign(net.n, Rational(0));
  f.flow.assign(net.n, std::vector<Rational>(net.n, Rational(0)));
  return f;
}

namespace {

// Node ids in the residual graph: 0 = s, 1..n buyers, n+1..2n goods, 2n+1 = t.
constexpr int kSource = 0;
inline int buyer_node(int i) { return 1 + i; }
inline int good_node(int n, int j) { return 1 + n + j; }
inline int sink_node(int n) { return 2 * n + 1; }

// BFS for a shortest augmenting path s -> t; returns predecessor list or
// empty if none. Deterministic: neighbors scanned in ascending index order.
std::vector<int> find_augmenting_path(const EqualityNetwork& net, const FlowState& f) {
  int n = net.n;
  std::vector<int> pred(2 * n + 2, -1);
  std::deque<int> queue;
  pred[kSource] = kSource;
  queue.push_back(kSource);
  while (!queue.empty()) {
    int v = queue.front();
    queue.pop_front();
    if (v == kSource) {
      for (int i = 0; i < n; ++i)
        if (pred[buyer_node(i)] < 0 && f.source[i] < net.buyer_cap[i]) {
          pred[buyer_node(i)] = v;
          queue.push_back(buyer_node(i));
        }
    } else if (v <= n) {
      int i = v - 1;
      for (int j = 0; j < n; ++j)
        if (net.edge[i][j] && pred[good_node(n, j)] < 0) {
          pred[good_node(n, j)] = v;
          queue.push_back(good_node(n, j));
        }
    } else if (v <= 2 * n) {
      int j = v - 1 - n;
      if (f.sink[j] < net.good_cap[j] && pred[sink_node(n)] < 0) {
        pred[sink_node(n)] = v;
        return pred;
      }
      for (int i = 0; i < n; ++i)
        if (f.flow[i][j] > 0 && pred[buyer_node(i)] < 0) {
          pred[buyer_node(i)] = v;
          queue.push_back(buyer_node(i));
        }
    }
  }
  return {};
}

}  // namespace

void max_flow(const EqualityNetwork& net, FlowState& f) {
  check_flow(net, f);
  int n = net.n;
  while (true) {
    std::vector<int> pred = find_augmenting_path(net, f);
    if (pred.empty()) break;

    // Bottleneck over the path (buyer->good edges are uncapacitated).
    Rational delta;
    bool have = false;
    int v = sink_node(n);
    while (v != kSource) {
      int u = pred[v];
      Rational avail;
      if (u == kSource) {
        avail = net.buyer_cap[v - 1] - f.source[v - 1];
      } else if (v == sink_node(n)) {
        avail = net.good_cap[u - 1 - n] - f.sink[u - 1 - n];
      } else if (u <= n) {
        v = u;
        continue;  // forward buyer->good edge, no bound
      } else {
        avail = f.flow[v - 1][u - 1 - n];  // residual of good->buyer
      }
      if (!have || avail < delta) {
        delta = avail;
        have = true;
      }
      v = u;
    }
    if (!have || delta <= 0) throw InternalError("max_flow: degenerate augmenting path");

    v = sink_node(n);
    while (v != kSource) {
      int u = pred[v];
      if (u == kSource) {
        f.source[v - 1] += delta;
      } else if (v == sink_node(n)) {
        f.sink[u - 1 - n] += delta;
      } else if (u <= n) {
        f.flow[u - 1][v - 1 - n] += delta;
      } else {
        f.flow[v - 1][u - 1 - n] -= delta;
      }
      v = u;
    }
  }
}

std::vector<char> residual_reachable(const EqualityNetwork& net, const FlowState& f) {
  int n = net.n;
  std::vector<char> seen(2 * n, 0);
  std::deque<int> queue;  // node ids as in the BFS above
  std::vector<char> visited(2 * n + 2, 0);
  visited[kSource] = 1;
  queue.push_back(kSource);
  while (!queue.empty()) {
    int v = queue.front();
    queue.pop_front();
    if (v == kSource) {
      for (int i = 0; i < n; ++i)
        if (!visited[buyer_node(i)] && f.source[i] < net.buyer_cap[i]) {
          visited[buyer_node(i)] = 1;
          seen[i] = 1;
          queue.push_back(buyer_node(i));
        }
    } else if (v <= n) {
      int i = v - 1;
      for (int j = 0; j < n; ++j)
        if (net.edge[i][j] && !visited[good_node(n, j)]) {
          visited[good_node(n, j)] = 1;
          seen[n + j] = 1;
          queue.push_back(good_node(n, j));
        }
    } else {
      int j = v - 1 - n;
      if (f.sink[j] < net.good_cap[j])
        throw InternalError("residual_reachable: flow is not maximum (t reachable)");
      for (int i = 0; i < n; ++i)
        if (f.flow[i][j] > 0 && !visited[buyer_node(i)]) {
          visited[buyer_node(i)] = 1;
          seen[i] = 1;
          queue.push_back(buyer_node(i));
        }
    }
  }
  return seen;
}

Rational cut_capacity(const EqualityNetwork& net, const std::vector<char>& reachable) {
  // Cut (s + S, T + t): saturated s-edges into T plus saturated t-edges from
  // S. Equality edges crossing S -> T would be infinite; a valid min cut has
  // none, which residual_reachable guarantees.
  Rational cap(0);
  for (int i = 0; i < net.n; ++i)
    if (!reachable[i]) cap += net.buyer_cap[i];
  for (int j = 0; j < net.n; ++j)
    if (reachable[net.n + j]) cap += net.good_cap[j];
  return cap;
}

void resaturate_goods(const EqualityNetwork& net, FlowState& f, const std::vector<char>& targets,
                      bool strict) {
  int n = net.n;
  for (int j = 0; j < n; ++j) {
    if (!targets[j]) continue;
    while (f.good_surplus(net, j) > 0) {
      // BFS from donor goods (outside the target set, with positive sink
      // flow) toward j over residual edges; parent -2 marks a donor.
      std::vector<int> parent(2 * n, -1);
      std::deque<int> queue;
      for (int k = 0; k < n; ++k)
        if (!targets[k] && f.sink[k] > 0) {
          parent[n + k] = -2;
          queue.push_back(n + k);
        }
      bool reached = false;
      while (!queue.empty() && !reached) {
        int v = queue.front();
        queue.pop_front();
        if (v >= n) {
          int g = v - n;
          for (int i = 0; i < n; ++i)
            if (f.flow[i][g] > 0 && parent[i] == -1) {
              parent[i] = v;
              queue.push_back(i);
            }
        } else {
          for (int g = 0; g < n; ++g)
            if (net.edge[v][g] && parent[n + g] == -1) {
              parent[n + g] = v;
              if (g == j) {
                reached = true;
                break;
              }
              queue.push_back(n + g);
            }
        }
      }
      if (!reached) {
        if (strict)
          throw InternalError("resaturate_goods: cannot restore saturation of good " +
                              std::to_string(j + 1));
        break;
      }
      // Bottleneck along the path plus the donor's sink flow and j's gap.
      Rational delta = f.good_surplus(net, j);
      int v = n + j;
      while (parent[v] != -2) {
        int u = parent[v];
        if (v < n) delta = std::min(delta, f.flow[v][u - n]);
        v = u;
      }
      int donor = v - n;
      delta = std::min(delta, f.sink[donor]);
      if (delta <= 0) throw InternalError("resaturate_goods: degenerate swap path");
      v = n + j;
      while (parent[v] != -2) {
        int u = parent[v];
        if (v < n)
          f.flow[v][u - n] -= delta;
        else
          f.flow[u][v - n] += delta;
        v = u;
      }
      f.sink[donor] -= delta;
      f.sink[j] += delta;
    }
  }
}

void check_flow(const EqualityNetwork& net, const FlowState& f) {
  int n = net.n;
  if (static_cast<int>(f.source.size()) != n || static_cast<int>(f.sink.size()) != n ||
      static_cast<int>(f.flow.size()) != n)
    throw InternalError("check_flow: shape mismatch");
  Rational out_total(0), in_total(0);
  for (int i = 0; i < n; ++i) {
    if (f.source[i] < 0 || f.source[i] > net.buyer_cap[i])
      throw InternalError("check_flow: source edge capacity violated at buyer " +
                          std::to_string(i + 1));
    Rational row(0);
    for (int j = 0; j < n; ++j) {
      if (f.flow[i][j] < 0) throw InternalError("check_flow: negative edge flow");
      if (f.flow[i][j] > 0 && !net.edge[i][j])
        throw InternalError("check_flow: flow on a non-equality edge");
      row += f.flow[i][j];
    }
    if (row != f.source[i])
      throw InternalError("check_flow: conservation violated at buyer " + std::to_string(i + 1));
    out_total += f.source[i];
  }
  for (int j = 0; j < n; ++j) {
    if (f.sink[j] < 0 || f.sink[j] > net.good_cap[j])
      throw InternalError("check_flow: sink edge capacity violated at good " +
                          std::to_string(j + 1));
    Rational col(0);
    for (int i = 0; i < n; ++i) col += f.flow[i][j];
    if (col != f.sink[j])
      throw InternalError("check_flow: conservation violated at good " + std::to_string(j + 1));
    in_total += f.sink[j];
  }
  if (out_total != in_total) throw InternalError("check_flow: global conservation violated");
}

}  // namespace agora
