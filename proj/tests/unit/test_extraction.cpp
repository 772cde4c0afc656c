#include <doctest.h>

#include "agora/errors.hpp"
#include "agora/extraction.hpp"
#include "agora/solver.hpp"
#include "agora/verify.hpp"

using namespace agora;

TEST_SUITE("extraction") {

TEST_CASE("bareiss determinant") {
  CHECK(bareiss_determinant({{BigInt(1)}}) == 1);
  CHECK(bareiss_determinant({{BigInt(2), BigInt(-3)}, {BigInt(0), BigInt(1)}}) == 2);
  CHECK(bareiss_determinant({{BigInt(0), BigInt(1)}, {BigInt(1), BigInt(0)}}) == -1);
  CHECK(bareiss_determinant({{BigInt(1), BigInt(2)}, {BigInt(2), BigInt(4)}}) == 0);
  CHECK(bareiss_determinant({{BigInt(2), BigInt(0), BigInt(1)},
                             {BigInt(1), BigInt(3), BigInt(2)},
                             {BigInt(0), BigInt(1), BigInt(4)}}) == 21);
}

TEST_CASE("solve_system: identity") {
  ExtractionSystem sys;
  sys.matrix = {{BigInt(1), BigInt(0)}, {BigInt(0), BigInt(1)}};
  sys.rhs = {BigInt(1), BigInt(0)};
  auto [q, d] = solve_system(sys);
  CHECK(q == std::vector<BigInt>{BigInt(1), BigInt(0)});
  CHECK(d == 1);
}

TEST_CASE("solve_system: tied prices") {
  ExtractionSystem sys;
  sys.matrix = {{BigInt(1), BigInt(-1)}, {BigInt(0), BigInt(1)}};
  sys.rhs = {BigInt(0), BigInt(1)};
  auto [q, d] = solve_system(sys);
  CHECK(q == std::vector<BigInt>{BigInt(1), BigInt(1)});
  CHECK(d == 1);
}

TEST_CASE("solve_system: 2:3 ratio keeps the common denominator") {
  ExtractionSystem sys;
  sys.matrix = {{BigInt(2), BigInt(-3)}, {BigInt(0), BigInt(1)}};
  sys.rhs = {BigInt(0), BigInt(1)};
  auto [q, d] = solve_system(sys);
  CHECK(q == std::vector<BigInt>{BigInt(3), BigInt(2)});
  CHECK(d == 2);  // no gcd normalization
}

TEST_CASE("solve_system rejects singular systems") {
  ExtractionSystem sys;
  sys.matrix = {{BigInt(1), BigInt(1)}, {BigInt(1), BigInt(1)}};
  sys.rhs = {BigInt(0), BigInt(1)};
  CHECK_THROWS_AS(solve_system(sys), InternalError);
}

TEST_CASE("analyze_components: ownership edges merge components") {
  // Edges (b0,c1), (b1,c0): F_p has one component {b0,c1} and one {b1,c0};
  // ownership edges merge everything in F'_p.
  std::vector<std::vector<char>> edges{{0, 1}, {1, 0}};
  ComponentStructure cs = analyze_components(edges);
  CHECK(cs.f_count == 2);
  CHECK(cs.fp_count == 1);
  CHECK(cs.f_comp[0] == cs.f_comp[2 + 1]);  // b0 with c1
  CHECK(cs.f_comp[1] == cs.f_comp[2 + 0]);  // b1 with c0
}

TEST_CASE("build_system: spec instance with a designated surplus good") {
  // u=[[1,2],[1,1]], equality edges (b0,c1),(b1,c0),(b1,c1), one component;
  // tree row p_0 = p_1 via buyer 1's tie plus the anchor p_0 = 1.
  Market m = Market::from_utilities({{1, 2}, {1, 1}});
  std::vector<std::vector<char>> edges{{0, 1}, {1, 1}};
  std::vector<char> surplus{1, 0};
  std::vector<char> price_one{1, 1};
  ExtractionSystem sys = build_system(m, edges, surplus, price_one);
  REQUIRE(sys.matrix.size() == 2);
  auto [q, d] = solve_system(sys);
  CHECK(q == std::vector<BigInt>{BigInt(1), BigInt(1)});
  CHECK(d == 1);
}

TEST_CASE("build_system: two equality components inside one ownership component") {
  // Edges (b0,c1),(b1,c0): two F_p components, no tree rows (one good each),
  // one balance row for the non-anchor component, plus the anchor row.
  Market m = Market::from_utilities({{1, 3}, {2, 1}});
  std::vector<std::vector<char>> edges{{0, 1}, {1, 0}};
  std::vector<char> surplus{1, 0};
  std::vector<char> price_one{1, 0};
  ExtractionSystem sys = build_system(m, edges, surplus, price_one);
  REQUIRE(sys.matrix.size() == 2);
  // Balance of component {b0, c1}: p_0 - p_1 = 0; anchor p_0 = 1.
  auto [q, d] = solve_system(sys);
  CHECK(q == std::vector<BigInt>{BigInt(1), BigInt(1)});
  CHECK(d == 1);
}

TEST_CASE("verify_prices_min_cut accepts and rejects") {
  Market m = Market::from_utilities({{0, 1}, {1, 0}});
  CHECK_NOTHROW(verify_prices_min_cut(m, {BigInt(1), BigInt(1)}));
  CHECK_THROWS_AS(verify_prices_min_cut(m, {BigInt(1), BigInt(2)}), VerificationError);
}

TEST_CASE("extract_exact: zero-surplus input returns the prices scaled to integers") {
  Market m = Market::from_utilities({{0, 1}, {1, 0}});
  SolverConfig cfg;
  cfg.mode = SolverMode::kExact;
  ExactSolveResult r = solve_exact(m, cfg);
  REQUIRE(r.status == SolveStatus::kConverged);
  SolverConstants cns = SolverConstants::exact_mode(2, 1, Profile::kPaper);
  Extraction ext = extract_exact(m, r.prices, r.flow, cns.epsilon, true);
  CHECK(ext.q == std::vector<BigInt>{BigInt(1), BigInt(1)});
  CHECK(ext.joins == 0);
  CHECK(ext.det_bound_ok);
  CHECK(ext.perturbation_ok);
}

TEST_CASE("extract_exact joins a surplus-free component before solving") {
  // Prices (1,1) on u=[[2,1],[1,2]] give two ownership components:
  // {b0,c0} fully cleared, {b1,c1} holding surplus 1/2. Joining scales
  // good 0's price by 2, creating the tie (b0,c1); the system then pins
  // q = (2,1).
  Market m = Market::from_utilities({{2, 1}, {1, 2}});
  std::vector<Rational> p{Rational(1), Rational(1)};
  EqualityNetwork net = build_equality_network(p, m);
  FlowState f = empty_flow(net);
  f.source = {Rational(1), make_rational(1, 2)};
  f.sink = {Rational(1), make_rational(1, 2)};
  f.flow = {{Rational(1), Rational(0)}, {Rational(0), make_rational(1, 2)}};
  Extraction ext = extract_exact(m, p, f, Rational(1), true);
  CHECK(ext.joins == 1);
  CHECK(ext.q == std::vector<BigInt>{BigInt(2), BigInt(1)});
  CHECK(ext.denominator == 1);
  CHECK(check_equilibrium(m, ext.q).ok());
}

TEST_CASE("extraction bounds hold on a fixed-mode run") {
  Market m = Market::from_utilities({{2, 1}, {2, 1}});
  SolverConfig cfg;
  cfg.mode = SolverMode::kFixed;
  cfg.profile = Profile::kFast;
  FixedSolveResult r = solve_fixed(m, cfg);
  REQUIRE(r.status == SolveStatus::kConverged);
  SolverConstants cns = SolverConstants::fixed_mode(2, 2, Profile::kFast);
  Extraction ext =
      extract_fixed(m, *r.basis, r.price_exp, r.util_exp, r.p_hat, r.flow, cns.epsilon, true);
  CHECK(ext.det_bound_ok);
  CHECK(ext.perturbation_ok);
  CHECK(ext.q[0] == 2 * ext.q[1]);
  CHECK(check_equilibrium(m, ext.q).ok());
}

}  // TEST_SUITE
