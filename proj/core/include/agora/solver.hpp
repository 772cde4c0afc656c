#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "agora/balanced_flow.hpp"
#include "agora/flow.hpp"
#include "agora/market.hpp"
#include "agora/numerics.hpp"
#include "agora/price_update.hpp"

namespace agora {

enum class SolverMode { kExact, kFixed };
enum class Profile { kPaper, kFast };
enum class SolveStatus { kConverged, kIterationCap, kBitLengthGuard };
enum class BindingEvent { kEq, kBal23, kBal24, kXmax };

const char* to_cstr(BindingEvent e);

// Loop constants. The conservative "paper" profile uses R = 256,
// eps = 1/(8 n^{4n} U^{3n}), x_max = 1 + 1/(R n^3), and in fixed mode
// L = 128 n^{5n+5} U^{4n}. The "fast" profile keeps eps and L but relaxes
// the step cap to x_max = 1 + 1/n; the cap only limits geometric price
// growth, every event bound (x_eq, x_23, x_24) still applies, and results
// are verified exactly afterwards.
struct SolverConstants {
  int n = 0;
  long long max_utility = 1;
  long long R = 256;
  Rational epsilon;
  Rational x_max;                           // exact mode step cap
  std::shared_ptr<const PowerBasis> basis;  // fixed mode
  BigInt x_max_exponent;                    // fixed mode step cap, power of 1+1/L

  static SolverConstants exact_mode(int n, long long max_utility, Profile profile);
  static SolverConstants fixed_mode(int n, long long max_utility, Profile profile);
};

struct IterationRecord {
  long index = 0;
  int component = 0;             // submarket id when solving a reducible market
  bool is_xmax = false;          // x == x_max; otherwise a balancing iteration
  BindingEvent binding = BindingEvent::kXmax;
  Rational x;                    // applied factor (exact mode)
  BigInt x_exponent;             // applied exponent (fixed mode)
  int ell = 0;
  int bs_size = 0;
  Rational l1_before, l1_after;
  Rational l2sq_before, l2sq_after;
  Rational max_price;            // exact mode
  BigInt max_price_exponent;     // fixed mode
};

struct SolverConfig {
  SolverMode mode = SolverMode::kFixed;
  Profile profile = Profile::kFast;
  long max_iterations = -1;       // -1: 200 in exact mode, 64 n^5 log2(nU) in fixed
  long max_price_bits = 1 << 16;  // exact-mode guard; bitlength can double per iteration
  bool keep_trace = false;
  bool check_invariants = false;  // audit every iteration (tests)
  std::function<void(const IterationRecord&)> trace_sink;
};

struct ExactSolveResult {
  SolveStatus status = SolveStatus::kIterationCap;
  std::vector<Rational> prices;
  EqualityNetwork net;  // final network N_p
  FlowState flow;       // final balanced flow
  long iterations = 0;
  std::vector<IterationRecord> trace;
};

struct FixedSolveResult {
  SolveStatus status = SolveStatus::kIterationCap;
  std::shared_ptr<const PowerBasis> basis;
  std::vector<BigInt> price_exp;               // p_i = (1+1/L)^{price_exp[i]}
  std::vector<std::vector<BigInt>> util_exp;   // rounded utilities; -1 for u = 0
  std::vector<Rational> p_hat;                 // rounded prices, denominator L
  EqualityNetwork net;                         // final N(p, p_hat)
  FlowState flow;
  long iterations = 0;
  std::vector<IterationRecord> trace;
};

// The main loop over exact rationals. Requires an irreducible market.
// Reference mode: price bitlength may double per iteration, hence the caps.
ExactSolveResult solve_exact(const Market& market, const SolverConfig& config = {});

// The polynomial-time loop: prices and utilities restricted to powers of
// 1 + 1/L, surpluses measured against rounded prices p_hat.
FixedSolveResult solve_fixed(const Market& market, const SolverConfig& config = {});

struct ComponentDiagnostics {
  std::vector<int> agents;
  long iterations = 0;
  int joins = 0;
  BigInt determinant;             // common denominator D of the extracted prices
  bool det_bound_ok = false;      // D <= (nU)^n
  bool perturbation_ok = false;   // |p_i - q_i/D| <= 4 eps (nU)^n, certified
};

struct Solution {
  std::vector<BigInt> prices;    // integer equilibrium prices
  std::vector<std::vector<Rational>> allocations;
  long iterations = 0;
  std::string mode;              // "exact" or "fixed"
  bool verified = false;
  std::vector<IterationRecord> trace;
  std::vector<ComponentDiagnostics> components;
};

// Full pipeline: validation, SCC decomposition, per-component solve and
// extraction, composition, and an exact equilibrium check of the result.
// With the fast profile a verification failure triggers one automatic
// rerun with paper constants.
Solution solve(const Market& market, const SolverConfig& config = {});

}  // namespace agora
