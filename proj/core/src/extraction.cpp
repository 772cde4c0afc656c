#include "agora/extraction.hpp"

#include <algorithm>
#include <deque>
#include <optional>

#include "agora/balanced_flow.hpp"
#include "agora/errors.hpp"

namespace agora {

ComponentStructure analyze_components(const std::vector<std::vector<char>>& edges) {
  int n = static_cast<int>(edges.size());
  ComponentStructure cs;
  cs.n = n;

  auto label = [&](std::vector<int>& comp, bool with_ownership) {
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
        if (with_ownership && comp[own] == -1) {
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
          int j = v - n;
          for (int i = 0; i < n; ++i)
            if (edges[i][j] && comp[i] == -1) {
              comp[i] = count;
              queue.push_back(i);
            }
        }
      }
      ++count;
    }
    return count;
  };
  cs.f_count = label(cs.f_comp, false);
  cs.fp_count = label(cs.fp_comp, true);
  return cs;
}

ExtractionSystem build_system(const Market& market, const std::vector<std::vector<char>>& edges,
                              const std::vector<char>& good_has_surplus,
                              const std::vector<char>& good_price_is_one) {
  int n = market.size();
  ComponentStructure cs = analyze_components(edges);

  // One anchor good per F'_p component: the lowest-indexed surplus good,
  // falling back to a price-one good when the component carries no surplus.
  std::vector<int> anchor(cs.fp_count, -1);
  for (int j = 0; j < n; ++j)
    if (good_has_surplus[j] && anchor[cs.fp_comp[n + j]] == -1) anchor[cs.fp_comp[n + j]] = j;
  for (int j = 0; j < n; ++j)
    if (good_price_is_one[j] && anchor[cs.fp_comp[n + j]] == -1) anchor[cs.fp_comp[n + j]] = j;
  for (int c = 0; c < cs.fp_count; ++c)
    if (anchor[c] < 0)
      throw InternalError(
          "build_system: component has neither a surplus good nor a price-one good");

  std::vector<char> exempt(cs.f_count, 0);
  for (int c = 0; c < cs.fp_count; ++c) exempt[cs.f_comp[n + anchor[c]]] = 1;

  ExtractionSystem sys;
  auto add_row = [&]() -> std::vector<BigInt>& {
    sys.matrix.emplace_back(n, BigInt(0));
    sys.rhs.emplace_back(0);
    return sys.matrix.back();
  };

  // Spanning-tree rows: prices inside an equality component are linked by
  // the buyers' tie equations u_ij' p_j = u_ij p_j' over true utilities.
  std::vector<char> comp_has_good(cs.f_count, 0);
  for (int c = 0; c < cs.f_count; ++c) {
    int root = -1;
    for (int j = 0; j < n && root < 0; ++j)
      if (cs.f_comp[n + j] == c) root = j;
    if (root < 0) throw InternalError("build_system: equality component without a good");
    comp_has_good[c] = 1;
    std::vector<char> seen_b(n, 0), seen_g(n, 0);
    std::deque<int> queue;
    seen_g[root] = 1;
    queue.push_back(root);
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
          row[g] += BigInt(static_cast<long>(market.utility(b, g2)));
          row[g2] -= BigInt(static_cast<long>(market.utility(b, g)));
          queue.push_back(g2);
        }
      }
    }
  }

  // Money-balance rows: buyers minus goods per equality component, for all
  // components but the anchors'.
  for (int c = 0; c < cs.f_count; ++c) {
    if (exempt[c]) continue;
    auto& row = add_row();
    for (int i = 0; i < n; ++i) {
      if (cs.f_comp[i] == c) row[i] += 1;      // buyer b_i's budget is p_i
      if (cs.f_comp[n + i] == c) row[i] -= 1;  // good c_i
    }
  }

  for (int c = 0; c < cs.fp_count; ++c) {
    auto& row = add_row();
    row[anchor[c]] = 1;
    sys.rhs.back() = 1;
    sys.anchors.push_back(anchor[c]);
  }

  if (static_cast<int>(sys.matrix.size()) != n)
    throw InternalError("build_system: assembled " + std::to_string(sys.matrix.size()) +
                        " rows for " + std::to_string(n) + " unknowns");
  return sys;
}

BigInt bareiss_determinant(std::vector<std::vector<BigInt>> m) {
  int n = static_cast<int>(m.size());
  if (n == 0) return 1;
  BigInt prev = 1;
  int sign = 1;
  for (int k = 0; k + 1 < n; ++k) {
    if (m[k][k] == 0) {
      int pivot = -1;
      for (int r = k + 1; r < n && pivot < 0; ++r)
        if (m[r][k] != 0) pivot = r;
      if (pivot < 0) return 0;
      std::swap(m[k], m[pivot]);
      sign = -sign;
    }
    for (int i = k + 1; i < n; ++i) {
      for (int j = k + 1; j < n; ++j) {
        BigInt num = m[i][j] * m[k][k] - m[i][k] * m[k][j];
        mpz_divexact(m[i][j].get_mpz_t(), num.get_mpz_t(), prev.get_mpz_t());
      }
      m[i][k] = 0;
    }
    prev = m[k][k];
  }
  return sign < 0 ? BigInt(-m[n - 1][n - 1]) : m[n - 1][n - 1];
}

std::pair<std::vector<BigInt>, BigInt> solve_system(const ExtractionSystem& system) {
  int n = static_cast<int>(system.matrix.size());
  BigInt det = bareiss_determinant(system.matrix);
  if (det == 0) throw InternalError("solve_system: extraction matrix is singular");
  std::vector<BigInt> q(n);
  for (int col = 0; col < n; ++col) {
    auto m = system.matrix;
    for (int r = 0; r < n; ++r) m[r][col] = system.rhs[r];
    q[col] = bareiss_determinant(std::move(m));
  }
  BigInt d = det;
  if (d < 0) {
    d = -d;
    for (BigInt& v : q) v = -v;
  }
  for (int r = 0; r < n; ++r) {  // A q == D rhs, exactly
    BigInt acc = 0;
    for (int c = 0; c < n; ++c) acc += system.matrix[r][c] * q[c];
    if (acc != d * system.rhs[r]) throw InternalError("solve_system: Cramer check failed");
  }
  return {std::move(q), std::move(d)};
}

void verify_prices_min_cut(const Market& market, const std::vector<BigInt>& q) {
  int n = market.size();
  std::vector<Rational> prices;
  prices.reserve(n);
  BigInt total = 0;
  for (const BigInt& v : q) {
    if (v <= 0) throw VerificationError("verify: prices must be positive");
    prices.emplace_back(v);
    total += v;
  }
  EqualityNetwork net = build_equality_network(prices, market);
  FlowState f = empty_flow(net);
  max_flow(net, f);
  if (f.value() != Rational(total))
    throw VerificationError("verify: maximum flow does not saturate both cuts");
}

namespace {

Extraction run_system(const Market& market, const std::vector<std::vector<char>>& edges,
                      const std::vector<char>& good_has_surplus,
                      const std::vector<char>& good_price_is_one, int joins) {
  int n = market.size();
  ExtractionSystem sys = build_system(market, edges, good_has_surplus, good_price_is_one);
  auto [q, d] = solve_system(sys);
  Extraction ext;
  ext.q = std::move(q);
  ext.denominator = std::move(d);
  ext.joins = joins;

  // Equality edges of the solver's final state must survive the rounding:
  // integer cross-multiplication against all alternatives.
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (!edges[i][j]) continue;
      for (int k = 0; k < n; ++k)
        if (BigInt(static_cast<long>(market.utility(i, j))) * ext.q[k] <
            BigInt(static_cast<long>(market.utility(i, k))) * ext.q[j])
          throw VerificationError("extraction: equality edge lost in rounding");
    }

  verify_prices_min_cut(market, ext.q);
  BigInt bound = pow_int(BigInt(n) * BigInt(static_cast<long>(market.max_utility())),
                         static_cast<unsigned long>(n));
  ext.det_bound_ok = ext.denominator <= bound;
  return ext;
}

Rational perturbation_budget(const Market& market, const Rational& epsilon) {
  // 4 eps (nU)^n
  return epsilon * 4 *
         Rational(pow_int(BigInt(market.size()) * BigInt(static_cast<long>(market.max_utility())),
                          static_cast<unsigned long>(market.size())));
}

}  // namespace

Extraction extract_exact(const Market& market, std::vector<Rational> prices, FlowState flow,
                         const Rational& epsilon, bool audit) {
  int n = market.size();
  EqualityNetwork net = build_equality_network(prices, market);
  SurplusVector r = surplus_of(net, flow);
  if (r.l1() > epsilon) throw InternalError("extract_exact: surplus is not below epsilon");

  if (r.l1() == 0) {
    // Already an exact equilibrium; return p scaled to integers.
    BigInt common(1);
    for (const Rational& p : prices)
      mpz_lcm(common.get_mpz_t(), common.get_mpz_t(), p.get_den().get_mpz_t());
    Extraction ext;
    ext.denominator = common;
    for (const Rational& p : prices) {
      Rational scaled = p * Rational(common);
      ext.q.push_back(scaled.get_num());
    }
    verify_prices_min_cut(market, ext.q);
    BigInt bound = pow_int(BigInt(n) * BigInt(static_cast<long>(market.max_utility())),
                           static_cast<unsigned long>(n));
    ext.det_bound_ok = ext.denominator <= bound;
    ext.perturbation_ok = true;
    return ext;
  }

  std::vector<char> good_surplus(n, 0);
  for (int j = 0; j < n; ++j) good_surplus[j] = r.good[j] > 0;

  // Join surplus-free components of F'_p: scale the component's prices (and
  // its internal flow) by the smallest factor creating an equality edge out
  // of the component. Each pass merges at least two components.
  int joins = 0;
  while (true) {
    std::vector<std::vector<char>> edges = build_equality_network(prices, market).edge;
    ComponentStructure cs = analyze_components(edges);
    std::vector<char> comp_ok(cs.fp_count, 0);
    for (int j = 0; j < n; ++j)
      if (good_surplus[j]) comp_ok[cs.fp_comp[n + j]] = 1;
    int target = -1;
    for (int c = 0; c < cs.fp_count && target < 0; ++c)
      if (!comp_ok[c]) target = c;
    if (target < 0) break;

    std::optional<Rational> factor;
    for (int i = 0; i < n; ++i) {
      if (cs.fp_comp[i] != target) continue;
      std::optional<Rational> alpha;
      for (int j = 0; j < n; ++j)
        if (market.utility(i, j) > 0) {
          Rational ratio = Rational(static_cast<long>(market.utility(i, j))) / prices[j];
          if (!alpha || ratio > *alpha) alpha = ratio;
        }
      if (!alpha) continue;
      for (int k = 0; k < n; ++k) {
        if (cs.fp_comp[n + k] == target || market.utility(i, k) <= 0) continue;
        Rational cand = *alpha * prices[k] / Rational(static_cast<long>(market.utility(i, k)));
        if (!factor || cand < *factor) factor = cand;
      }
    }
    if (!factor)
      throw InternalError("extract_exact: surplus-free component has no outside utility");
    for (int j = 0; j < n; ++j) {
      if (cs.fp_comp[n + j] != target) continue;
      prices[j] *= *factor;
      flow.sink[j] *= *factor;
    }
    for (int i = 0; i < n; ++i) {
      if (cs.fp_comp[i] != target) continue;
      flow.source[i] *= *factor;
      for (int j = 0; j < n; ++j) flow.flow[i][j] *= *factor;
    }
    if (++joins >= n) throw InternalError("extract_exact: join loop failed to terminate");
  }

  if (audit) {
    EqualityNetwork joined = build_equality_network(prices, market);
    check_flow(joined, flow);
    if (flow.total_surplus(joined) > epsilon)
      throw InternalError("extract_exact: joins increased the surplus");
  }

  std::vector<std::vector<char>> edges = build_equality_network(prices, market).edge;
  std::vector<char> price_one(n, 0);
  for (int j = 0; j < n; ++j) price_one[j] = prices[j] == 1;
  Extraction ext = run_system(market, edges, good_surplus, price_one, joins);

  Rational budget = perturbation_budget(market, epsilon);
  for (int i = 0; i < n; ++i)
    if (abs(prices[i] - Rational(ext.q[i]) / Rational(ext.denominator)) > budget)
      ext.perturbation_ok = false;
  return ext;
}

Extraction extract_fixed(const Market& market, const PowerBasis& basis,
                         std::vector<BigInt> price_exp,
                         const std::vector<std::vector<BigInt>>& util_exp,
                         const std::vector<Rational>& p_hat, const FlowState& flow,
                         const Rational& epsilon, bool audit) {
  int n = market.size();
  EqualityNetwork net =
      build_equality_network(p_hat, equality_edges_from_exponents(util_exp, price_exp));
  SurplusVector r = surplus_of(net, flow);
  if (r.l1() > epsilon) throw InternalError("extract_fixed: surplus is not below epsilon");

  std::vector<char> good_surplus(n, 0);
  for (int j = 0; j < n; ++j) good_surplus[j] = r.good[j] > 0;

  // Joins are exponent arithmetic only: scaling a surplus-free component
  // keeps all its (zero) surpluses at zero, so the flags stay valid and the
  // flow itself is no longer needed.
  int joins = 0;
  if (r.l1() > 0) {
    while (true) {
      std::vector<std::vector<char>> edges = equality_edges_from_exponents(util_exp, price_exp);
      ComponentStructure cs = analyze_components(edges);
      std::vector<char> comp_ok(cs.fp_count, 0);
      for (int j = 0; j < n; ++j)
        if (good_surplus[j]) comp_ok[cs.fp_comp[n + j]] = 1;
      int target = -1;
      for (int c = 0; c < cs.fp_count && target < 0; ++c)
        if (!comp_ok[c]) target = c;
      if (target < 0) break;

      std::optional<BigInt> gap;
      for (int i = 0; i < n; ++i) {
        if (cs.fp_comp[i] != target) continue;
        std::optional<BigInt> alpha;
        for (int j = 0; j < n; ++j)
          if (util_exp[i][j] >= 0) {
            BigInt g = util_exp[i][j] - price_exp[j];
            if (!alpha || g > *alpha) alpha = g;
          }
        if (!alpha) continue;
        for (int k = 0; k < n; ++k) {
          if (cs.fp_comp[n + k] == target || util_exp[i][k] < 0) continue;
          BigInt cand = *alpha - (util_exp[i][k] - price_exp[k]);
          if (!gap || cand < *gap) gap = cand;
        }
      }
      if (!gap)
        throw InternalError("extract_fixed: surplus-free component has no outside utility");
      for (int j = 0; j < n; ++j)
        if (cs.fp_comp[n + j] == target) price_exp[j] += *gap;
      if (++joins >= n) throw InternalError("extract_fixed: join loop failed to terminate");
    }
  }

  std::vector<std::vector<char>> edges = equality_edges_from_exponents(util_exp, price_exp);
  std::vector<char> price_one(n, 0);
  for (int j = 0; j < n; ++j) price_one[j] = price_exp[j] == 0;
  Extraction ext = run_system(market, edges, good_surplus, price_one, joins);

  // |p_i - q_i/D| <= 4 eps (nU)^n, certified through the power error bound.
  Rational budget = perturbation_budget(market, epsilon);
  for (int i = 0; i < n; ++i) {
    FixedPointPower p = basis.approx(price_exp[i]);
    Rational diff =
        abs(p.value - Rational(ext.q[i]) / Rational(ext.denominator)) + p.error_bound;
    if (diff > budget) ext.perturbation_ok = false;
  }
  (void)audit;
  return ext;
}

}  // namespace agora
