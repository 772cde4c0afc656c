#include <benchmark/benchmark.h>

#include "agora/balanced_flow.hpp"
#include "agora/extraction.hpp"
#include "agora/generator.hpp"
#include "agora/numerics.hpp"
#include "agora/solver.hpp"
#include "agora/verify.hpp"

using namespace agora;

namespace {

EqualityNetwork unit_network(int n, std::uint64_t seed) {
  Market m = generate_market(n, 10, seed, true);
  return build_equality_network(std::vector<Rational>(n, Rational(1)), m);
}

void BM_MaxFlow(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  EqualityNetwork net = unit_network(n, 42);
  for (auto _ : state) {
    FlowState f = empty_flow(net);
    max_flow(net, f);
    benchmark::DoNotOptimize(f.source.data());
  }
}
BENCHMARK(BM_MaxFlow)->Arg(4)->Arg(8)->Arg(16);

void BM_BalancedFlow(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  EqualityNetwork net = unit_network(n, 77);
  for (auto _ : state) {
    FlowState f = empty_flow(net);
    balance(net, f);
    benchmark::DoNotOptimize(f.source.data());
  }
}
BENCHMARK(BM_BalancedFlow)->Arg(4)->Arg(8)->Arg(16);

void BM_ApproxPower(benchmark::State& state) {
  PowerBasis basis = PowerBasis::for_market(5, 10);
  BigInt k = basis.K / 3;
  for (auto _ : state) {
    FixedPointPower p = basis.approx(k);
    benchmark::DoNotOptimize(p.value.get_num().get_mpz_t());
  }
}
BENCHMARK(BM_ApproxPower);

void BM_RoundFactorToPower(benchmark::State& state) {
  PowerBasis basis = PowerBasis::for_market(4, 10);
  Rational x = make_rational(10007, 9881);
  for (auto _ : state) {
    BigInt e = round_factor_to_power(x, basis.L, basis.zbits);
    benchmark::DoNotOptimize(e.get_mpz_t());
  }
}
BENCHMARK(BM_RoundFactorToPower);

void BM_SolveFixed(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  Market m = generate_market(n, 10, 4242, true);
  for (auto _ : state) {
    Solution s = solve(m);
    benchmark::DoNotOptimize(s.prices.data());
  }
}
BENCHMARK(BM_SolveFixed)->Arg(2)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_CheckEquilibrium(benchmark::State& state) {
  Market m = generate_market(5, 10, 99, true);
  Solution s = solve(m);
  for (auto _ : state) {
    EquilibriumReport rep = check_equilibrium(m, s.prices);
    benchmark::DoNotOptimize(rep.goods_cleared);
  }
}
BENCHMARK(BM_CheckEquilibrium);

}  // namespace

BENCHMARK_MAIN();
