#include "agora/solver.hpp"

#include <algorithm>
#include <optional>

#include "agora/errors.hpp"
#include "agora/extraction.hpp"
#include "agora/verify.hpp"

namespace agora {

const char* to_cstr(BindingEvent e) {
  switch (e) {
    case BindingEvent::kEq: return "eq";
    case BindingEvent::kBal23: return "bal23";
    case BindingEvent::kBal24: return "bal24";
    case BindingEvent::kXmax: return "xmax";
  }
  return "?";
}

namespace {

Rational paper_epsilon(int n, long long max_utility) {
  // 1 / (8 n^{4n} U^{3n})
  BigInt den = BigInt(8) * pow_int(BigInt(n), static_cast<unsigned long>(4 * n)) *
               pow_int(BigInt(static_cast<long>(max_utility)), static_cast<unsigned long>(3 * n));
  return make_rational(BigInt(1), den);
}

long default_fixed_cap(int n, long long max_utility) {
  BigInt nU = BigInt(n) * BigInt(static_cast<long>(max_utility));
  long log2nU = std::max(1L, ceil_log2(nU));
  BigInt cap = BigInt(64) * pow_int(BigInt(n), 5) * log2nU;
  if (!cap.fits_slong_p()) return 1L << 40;
  return std::max(1L, cap.get_si());
}

void require_solvable(const Market& market, const char* who) {
  ValidationReport rep = market.validate();
  if (!rep.basic_ok())
    throw ValidationError(std::string(who) +
                          ": every agent must like some good and every good must be liked");
  if (!rep.irreducible)
    throw ValidationError(std::string(who) +
                          ": market is reducible; solve() handles the general case");
}

std::pair<int, int> find_new_edge(const EqualityNetwork& net, const ActiveSet& active) {
  for (int i = 0; i < net.n; ++i) {
    if (!active.in_bs[i]) continue;
    for (int j = 0; j < net.n; ++j)
      if (!active.in_gamma[j] && net.edge[i][j]) return {i, j};
  }
  throw InternalError("x = x_eq but no new equality edge from B(S) appeared");
}

struct CandidateSet {
  std::optional<Rational> x_eq, x23, x24;
  Rational x_max;
};

// min with tie priority eq > bal23 > bal24 > xmax.
std::pair<Rational, BindingEvent> pick_factor(const CandidateSet& c) {
  Rational m = c.x_max;
  if (c.x_eq && *c.x_eq < m) m = *c.x_eq;
  if (c.x23 && *c.x23 < m) m = *c.x23;
  if (c.x24 && *c.x24 < m) m = *c.x24;
  BindingEvent ev = BindingEvent::kXmax;
  if (c.x_eq && *c.x_eq == m)
    ev = BindingEvent::kEq;
  else if (c.x23 && *c.x23 == m)
    ev = BindingEvent::kBal23;
  else if (c.x24 && *c.x24 == m)
    ev = BindingEvent::kBal24;
  return {m, ev};
}

struct ExponentCandidates {
  std::optional<BigInt> e_eq, e23, e24;
  BigInt e_max;
};

std::pair<BigInt, BindingEvent> pick_exponent(const ExponentCandidates& c) {
  BigInt m = c.e_max;
  if (c.e_eq && *c.e_eq < m) m = *c.e_eq;
  if (c.e23 && *c.e23 < m) m = *c.e23;
  if (c.e24 && *c.e24 < m) m = *c.e24;
  BindingEvent ev = BindingEvent::kXmax;
  if (c.e_eq && *c.e_eq == m)
    ev = BindingEvent::kEq;
  else if (c.e23 && *c.e23 == m)
    ev = BindingEvent::kBal23;
  else if (c.e24 && *c.e24 == m)
    ev = BindingEvent::kBal24;
  return {m, ev};
}

// Iteration-boundary audits shared by both modes. `price_is_one(j)` must
// answer whether good j currently has price one.
struct InvariantAuditor {
  int n;
  bool enabled = false;

  void threshold_bound(const ActiveSet& active, const SurplusVector& r) const {
    if (!enabled) return;
    // r(b_ell) >= |r(B)| * 1000 / (2719 n): rational stand-in for the e bound.
    if (active.threshold * 2719 * n < r.l1() * 1000)
      throw InternalError("invariant: active-set threshold fell below |r(B)|/(en)");
  }

  template <typename PriceOneFn>
  void boundary(const EqualityNetwork& net, const FlowState& f, const SurplusVector& before,
                const SurplusVector& after, PriceOneFn price_is_one) const {
    if (!enabled) return;
    for (int j = 0; j < n; ++j) {
      if (before.good[j] == 0 && after.good[j] != 0)
        throw InternalError("invariant: zero-surplus good regained surplus (good " +
                            std::to_string(j + 1) + ")");
      if (after.good[j] > 0 && !price_is_one(j))
        throw InternalError("invariant: surplus-bearing good has price above one (good " +
                            std::to_string(j + 1) + ")");
    }
    if (!no_crossing_certificate(net, f))
      throw InternalError("invariant: balanced flow admits a high-to-low residual path");
    check_flow(net, f);
  }
};

}  // namespace

SolverConstants SolverConstants::exact_mode(int n, long long max_utility, Profile profile) {
  SolverConstants c;
  c.n = n;
  c.max_utility = max_utility;
  c.epsilon = paper_epsilon(n, max_utility);
  c.R = 256;
  if (profile == Profile::kPaper)
    c.x_max = Rational(1) + make_rational(BigInt(1), BigInt(static_cast<long>(c.R)) * n * n * n);
  else
    c.x_max = Rational(1) + make_rational(1, n);
  return c;
}

SolverConstants SolverConstants::fixed_mode(int n, long long max_utility, Profile profile) {
  SolverConstants c;
  c.n = n;
  c.max_utility = max_utility;
  c.epsilon = paper_epsilon(n, max_utility);
  c.R = 256;
  auto basis = std::make_shared<PowerBasis>(PowerBasis::for_market(n, max_utility));
  Rational target = profile == Profile::kPaper
                        ? Rational(1) + make_rational(BigInt(1), BigInt(static_cast<long>(c.R)) * n * n * n)
                        : Rational(1) + make_rational(1, n);
  c.x_max = target;
  // Largest representable step not exceeding the target: one below the
  // rounded exponent keeps x_max within [target/(1+1/L)^2, target]. Only
  // for n = U = 1 is L too small to fit a power under the target; such a
  // market saturates before the first iteration, so the cap is never used
  // and the smallest step stands in.
  BigInt k = round_factor_to_power(target, basis->L, basis->zbits);
  c.x_max_exponent = k > 2 ? BigInt(k - 1) : BigInt(1);
  c.basis = std::move(basis);
  return c;
}

ExactSolveResult solve_exact(const Market& market, const SolverConfig& config) {
  require_solvable(market, "solve_exact");
  const int n = market.size();
  const SolverConstants cns = SolverConstants::exact_mode(n, market.max_utility(), config.profile);
  const long cap = config.max_iterations >= 0 ? config.max_iterations : 200;
  const BigInt price_bound =
      pow_int(BigInt(n) * BigInt(static_cast<long>(market.max_utility())),
              static_cast<unsigned long>(n - 1));
  const bool check_potential = config.check_invariants && config.profile == Profile::kPaper;
  InvariantAuditor audit{n, config.check_invariants};

  ExactSolveResult res;
  res.prices.assign(n, Rational(1));
  res.net = build_equality_network(res.prices, market);
  res.flow = empty_flow(res.net);
  balance(res.net, res.flow);

  SurplusVector r = surplus_of(res.net, res.flow);
  while (true) {
    if (r.l1() < cns.epsilon) {
      res.status = SolveStatus::kConverged;
      break;
    }
    if (res.iterations >= cap) {
      res.status = SolveStatus::kIterationCap;
      break;
    }
    size_t max_bits = 0;
    for (const Rational& p : res.prices)
      max_bits = std::max(max_bits, mpz_sizeinbase(p.get_num().get_mpz_t(), 2) +
                                        mpz_sizeinbase(p.get_den().get_mpz_t(), 2));
    if (static_cast<long>(max_bits) > config.max_price_bits) {
      res.status = SolveStatus::kBitLengthGuard;
      break;
    }

    ActiveSet active = select_active_set(r, res.net);
    audit.threshold_bound(active, r);

    CandidateSet cand;
    cand.x_eq = compute_x_eq(active, res.prices, market);
    MeetFactors mf = compute_x23_x24(active, res.prices, r);
    cand.x23 = mf.x23;
    cand.x24 = mf.x24;
    cand.x_max = cns.x_max;
    auto [x, ev] = pick_factor(cand);
    bool is_xmax = x == cns.x_max;
    if (x < 1) throw InternalError("solve_exact: update factor below one");

    std::vector<Rational> old_prices;
    if (config.check_invariants) old_prices = res.prices;

    apply_update(res.prices, res.flow, x, active);
    res.net = build_equality_network(res.prices, market);

    if (config.check_invariants) {
      // The closed surplus forms of the four buyer types, recomputed from
      // the scaled flow, must match exactly.
      check_flow(res.net, res.flow);
      for (int i = 0; i < n; ++i) {
        Rational expect;
        switch (active.type[i]) {
          case 1: expect = x * r.buyer[i]; break;
          case 2: expect = (Rational(1) - x) * old_prices[i] + x * r.buyer[i]; break;
          case 3: expect = (x - 1) * old_prices[i] + r.buyer[i]; break;
          default: expect = r.buyer[i];
        }
        if (res.flow.buyer_surplus(res.net, i) != expect)
          throw InternalError("invariant: surplus formula mismatch for buyer " +
                              std::to_string(i + 1));
        if (expect < 0) throw InternalError("invariant: negative buyer surplus after update");
      }
    }

    if (ev == BindingEvent::kEq) {
      auto [bi, cj] = find_new_edge(res.net, active);
      augment_new_edge(res.net, res.flow, bi, cj, active);
    }
    max_flow(res.net, res.flow);
    balance(res.net, res.flow);
    SurplusVector after = surplus_of(res.net, res.flow);
    ++res.iterations;

    if (config.keep_trace || config.trace_sink) {
      IterationRecord rec;
      rec.index = res.iterations - 1;
      rec.is_xmax = is_xmax;
      rec.binding = ev;
      rec.x = x;
      rec.ell = active.ell;
      rec.bs_size = active.ell;
      rec.l1_before = r.l1();
      rec.l1_after = after.l1();
      rec.l2sq_before = r.l2_sq();
      rec.l2sq_after = after.l2_sq();
      rec.max_price = *std::max_element(res.prices.begin(), res.prices.end());
      if (config.keep_trace) res.trace.push_back(rec);
      if (config.trace_sink) config.trace_sink(rec);
    }

    if (config.check_invariants) {
      for (const Rational& p : res.prices)
        if (p > Rational(price_bound))
          throw InternalError("invariant: price exceeded (nU)^(n-1)");
      audit.boundary(res.net, res.flow, r, after,
                     [&](int j) { return res.prices[j] == 1; });
      if (check_potential) {
        if (is_xmax) {
          if (after.l2_sq() > r.l2_sq() * cns.x_max * cns.x_max)
            throw InternalError("invariant: x_max iteration grew the norm beyond x_max^2");
        } else {
          Rational rn3 = Rational(static_cast<long>(cns.R)) * n * n * n;
          Rational factor = (rn3 - 1) * (rn3 - 1) / (rn3 * rn3);
          if (after.l2_sq() > r.l2_sq() * factor)
            throw InternalError("invariant: balancing iteration missed the potential drop");
        }
      }
    }
    r = std::move(after);
  }
  return res;
}

FixedSolveResult solve_fixed(const Market& market, const SolverConfig& config) {
  require_solvable(market, "solve_fixed");
  const int n = market.size();
  const SolverConstants cns = SolverConstants::fixed_mode(n, market.max_utility(), config.profile);
  const PowerBasis& basis = *cns.basis;
  const long cap =
      config.max_iterations >= 0 ? config.max_iterations : default_fixed_cap(n, market.max_utility());
  InvariantAuditor audit{n, config.check_invariants};

  // Exponent bound equivalent to price <= (nU)^{n-1}, computed once.
  BigInt exp_bound(0);
  if (config.check_invariants && n > 1) {
    Rational bound(pow_int(BigInt(n) * BigInt(static_cast<long>(market.max_utility())),
                           static_cast<unsigned long>(n - 1)));
    exp_bound = round_factor_to_power(bound, basis.L, basis.zbits);
    while (compare_power(exp_bound, basis.L, bound, basis.zbits) > 0) exp_bound -= 1;
    while (compare_power(exp_bound + 1, basis.L, bound, basis.zbits) <= 0) exp_bound += 1;
  }

  FixedSolveResult res;
  res.basis = cns.basis;
  res.price_exp.assign(n, BigInt(0));

  // Utilities rounded once; distinct values cached.
  res.util_exp.assign(n, std::vector<BigInt>(n, BigInt(-1)));
  {
    std::vector<std::pair<long long, BigInt>> cache;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        long long u = market.utility(i, j);
        if (u <= 0) continue;
        auto it = std::find_if(cache.begin(), cache.end(),
                               [&](const auto& kv) { return kv.first == u; });
        if (it == cache.end()) {
          cache.emplace_back(u, round_utility(u, basis.L, basis.zbits));
          it = std::prev(cache.end());
        }
        res.util_exp[i][j] = it->second;
      }
  }

  res.p_hat.assign(n, basis.rounded_price(BigInt(0)));
  res.net = build_equality_network(res.p_hat, equality_edges_from_exponents(res.util_exp, res.price_exp));
  res.flow = empty_flow(res.net);
  balance(res.net, res.flow);

  SurplusVector r = surplus_of(res.net, res.flow);
  while (true) {
    if (r.l1() < cns.epsilon) {
      res.status = SolveStatus::kConverged;
      break;
    }
    if (res.iterations >= cap) {
      res.status = SolveStatus::kIterationCap;
      break;
    }

    ActiveSet active = select_active_set(r, res.net);
    audit.threshold_bound(active, r);

    ExponentCandidates cand;
    cand.e_eq = compute_x_eq_exponent(active, res.price_exp, res.util_exp);
    MeetFactors mf = compute_x23_x24(active, res.p_hat, r);
    cand.e_max = cns.x_max_exponent;
    // Rounding a meet factor costs a binary search of power evaluations;
    // one probe rules it out when its exponent provably cannot undercut the
    // running minimum (round(x) >= log(x) - 1 >= cutoff).
    BigInt cutoff = cns.x_max_exponent;
    if (cand.e_eq && *cand.e_eq < cutoff) cutoff = *cand.e_eq;
    auto beats_cutoff = [&](const Rational& x_hat) {
      FixedPointPower p = basis.approx(cutoff + 1);
      return x_hat < p.value + p.error_bound;
    };
    if (mf.x23 && beats_cutoff(*mf.x23)) {
      cand.e23 = round_factor_to_power(*mf.x23, basis.L, basis.zbits);
      if (*cand.e23 < cutoff) cutoff = *cand.e23;
    }
    if (mf.x24 && beats_cutoff(*mf.x24))
      cand.e24 = round_factor_to_power(*mf.x24, basis.L, basis.zbits);
    auto [e, ev] = pick_exponent(cand);
    bool is_xmax = e == cns.x_max_exponent;
    if (e < 1)
      throw InternalError("solve_fixed: update exponent vanished; L is inconsistent with eps");

    // Record which goods are saturated before touching the flow.
    std::vector<char> was_zero(n, 0);
    for (int j = 0; j < n; ++j) was_zero[j] = r.good[j] == 0;

    // Raise prices of Gamma goods by (1+1/L)^e and re-round.
    std::vector<Rational> new_p_hat = res.p_hat;
    for (int j = 0; j < n; ++j)
      if (active.in_gamma[j]) {
        res.price_exp[j] += e;
        if (res.price_exp[j] > basis.K)
          throw InternalError("solve_fixed: price exponent escaped the representable range");
        new_p_hat[j] = basis.rounded_price(res.price_exp[j]);
      }

    // Transfer the flow: per-good factors keep every saturated good exactly
    // saturated; buyer source edges are recomputed from conservation.
    for (int j = 0; j < n; ++j) {
      if (!active.in_gamma[j] || new_p_hat[j] == res.p_hat[j]) continue;
      Rational factor = new_p_hat[j] / res.p_hat[j];
      res.flow.sink[j] *= factor;
      for (int i = 0; i < n; ++i) {
        if (res.flow.flow[i][j] == 0) continue;
        if (!active.in_bs[i])
          throw InternalError("solve_fixed: flow from outside B(S) into Gamma");
        res.flow.flow[i][j] *= factor;
      }
    }
    res.p_hat = std::move(new_p_hat);
    for (int i = 0; i < n; ++i) {
      Rational row(0);
      for (int j = 0; j < n; ++j) row += res.flow.flow[i][j];
      res.flow.source[i] = row;
    }

    // Rounding slack can push a buyer's outflow a hair over its own rounded
    // budget; trim such rows (descending good index) and remember the goods
    // that lost inflow so they can be re-saturated below.
    std::vector<char> shorted(n, 0);
    for (int i = 0; i < n; ++i) {
      Rational excess = res.flow.source[i] - res.p_hat[i];
      if (excess <= 0) continue;
      for (int j = n - 1; j >= 0 && excess > 0; --j) {
        if (res.flow.flow[i][j] <= 0) continue;
        Rational cut = std::min(excess, res.flow.flow[i][j]);
        res.flow.flow[i][j] -= cut;
        res.flow.sink[j] -= cut;
        res.flow.source[i] -= cut;
        excess -= cut;
        shorted[j] = 1;
      }
    }

    res.net = build_equality_network(res.p_hat,
                                     equality_edges_from_exponents(res.util_exp, res.price_exp));
    if (config.check_invariants) check_flow(res.net, res.flow);

    if (ev == BindingEvent::kEq) {
      auto [bi, cj] = find_new_edge(res.net, active);
      augment_new_edge(res.net, res.flow, bi, cj, active);
    }
    max_flow(res.net, res.flow);

    // Restore saturation of previously-zero goods that the trimming step
    // disturbed, by pulling flow back from surplus-tolerant goods.
    bool need_resaturation = false;
    for (int j = 0; j < n; ++j)
      if (shorted[j] && was_zero[j] && res.flow.good_surplus(res.net, j) > 0)
        need_resaturation = true;
    if (need_resaturation) {
      std::vector<char> targets(n, 0);
      for (int j = 0; j < n; ++j) targets[j] = was_zero[j];
      resaturate_goods(res.net, res.flow, targets, config.check_invariants);
    }

    balance(res.net, res.flow);
    SurplusVector after = surplus_of(res.net, res.flow);
    ++res.iterations;

    if (config.keep_trace || config.trace_sink) {
      IterationRecord rec;
      rec.index = res.iterations - 1;
      rec.is_xmax = is_xmax;
      rec.binding = ev;
      rec.x_exponent = e;
      rec.ell = active.ell;
      rec.bs_size = active.ell;
      rec.l1_before = r.l1();
      rec.l1_after = after.l1();
      rec.l2sq_before = r.l2_sq();
      rec.l2sq_after = after.l2_sq();
      rec.max_price_exponent = *std::max_element(res.price_exp.begin(), res.price_exp.end());
      if (config.keep_trace) res.trace.push_back(rec);
      if (config.trace_sink) config.trace_sink(rec);
    }

    if (config.check_invariants) {
      if (n > 1)
        for (const BigInt& k : res.price_exp)
          if (k > exp_bound) throw InternalError("invariant: price exceeded (nU)^(n-1)");
      audit.boundary(res.net, res.flow, r, after,
                     [&](int j) { return res.price_exp[j] == 0; });
      // Rounded prices stay within the additive and multiplicative contract
      // of the true powers, certified through the tracked power error.
      for (int j = 0; j < n; ++j) {
        FixedPointPower p = basis.approx(res.price_exp[j]);
        Rational diff = abs(res.p_hat[j] - p.value) + p.error_bound;
        if (diff * basis.L > 1)
          throw InternalError("invariant: rounded price drifted beyond 1/L");
      }
    }
    r = std::move(after);
  }
  return res;
}

Solution solve(const Market& market, const SolverConfig& config) {
  ValidationReport rep = market.validate();
  if (!rep.basic_ok())
    throw ValidationError("solve: every agent must like some good and every good must be liked");
  SccDecomposition decomposition = scc_decompose(market);

  auto run = [&](Profile profile) -> Solution {
    Solution sol;
    sol.mode = config.mode == SolverMode::kExact ? "exact" : "fixed";
    std::vector<std::vector<BigInt>> sub_prices;
    int comp_id = 0;
    for (const auto& agents : decomposition.components) {
      Market sub = market.submarket(agents);
      SolverConfig sub_cfg = config;
      sub_cfg.profile = profile;
      if (config.trace_sink)
        sub_cfg.trace_sink = [&config, comp_id](const IterationRecord& rec) {
          IterationRecord tagged = rec;
          tagged.component = comp_id;
          config.trace_sink(tagged);
        };
      ComponentDiagnostics diag;
      diag.agents = agents;
      Extraction ext;
      if (config.mode == SolverMode::kExact) {
        ExactSolveResult r = solve_exact(sub, sub_cfg);
        if (r.status != SolveStatus::kConverged)
          throw InternalError(r.status == SolveStatus::kIterationCap
                                  ? "solve: exact-mode iteration cap exceeded"
                                  : "solve: exact-mode price bitlength guard tripped");
        SolverConstants cns = SolverConstants::exact_mode(sub.size(), sub.max_utility(), profile);
        ext = extract_exact(sub, r.prices, r.flow, cns.epsilon, config.check_invariants);
        diag.iterations = r.iterations;
        for (auto& rec : r.trace) {
          rec.component = comp_id;
          sol.trace.push_back(rec);
        }
      } else {
        FixedSolveResult r = solve_fixed(sub, sub_cfg);
        if (r.status != SolveStatus::kConverged)
          throw InternalError("solve: fixed-mode iteration cap exceeded");
        SolverConstants cns = SolverConstants::fixed_mode(sub.size(), sub.max_utility(), profile);
        ext = extract_fixed(sub, *r.basis, r.price_exp, r.util_exp, r.p_hat, r.flow, cns.epsilon,
                            config.check_invariants);
        diag.iterations = r.iterations;
        for (auto& rec : r.trace) {
          rec.component = comp_id;
          sol.trace.push_back(rec);
        }
      }
      sol.iterations += diag.iterations;
      diag.joins = ext.joins;
      diag.determinant = ext.denominator;
      diag.det_bound_ok = ext.det_bound_ok;
      diag.perturbation_ok = ext.perturbation_ok;
      sol.components.push_back(std::move(diag));
      sub_prices.push_back(std::move(ext.q));
      ++comp_id;
    }
    sol.prices = compose_equilibria(decomposition, sub_prices, market.max_utility());
    EquilibriumReport report = check_equilibrium(market, sol.prices);
    sol.verified = report.ok();
    if (sol.verified) sol.allocations = std::move(report.allocations);
    return sol;
  };

  Solution sol = run(config.profile);
  if (!sol.verified && config.profile == Profile::kFast) {
    // Reduced constants are heuristics; the conservative profile is the
    // guaranteed fallback.
    sol = run(Profile::kPaper);
  }
  return sol;
}

}  // namespace agora
