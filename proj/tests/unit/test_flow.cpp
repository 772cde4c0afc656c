#include <doctest.h>

#include <random>

#include "agora/errors.hpp"

#include "agora/balanced_flow.hpp"
#include "agora/flow.hpp"
#include "agora/generator.hpp"
#include "agora/market.hpp"
#include "test_support.hpp"

using namespace agora;

namespace {

std::vector<Rational> ones(int n) { return std::vector<Rational>(n, Rational(1)); }

}  // namespace

TEST_SUITE("flow") {

TEST_CASE("build_equality_network: cross preferences") {
  Market m = Market::from_utilities({{0, 1}, {1, 0}});
  EqualityNetwork net = build_equality_network(ones(2), m);
  CHECK(net.edge[0][0] == 0);
  CHECK(net.edge[0][1] == 1);
  CHECK(net.edge[1][0] == 1);
  CHECK(net.edge[1][1] == 0);
  CHECK(net.bang_per_buck[0] == 1);
  CHECK(net.bang_per_buck[1] == 1);
}

TEST_CASE("build_equality_network: strict maximum and tie") {
  Market m = Market::from_utilities({{1, 2}, {1, 1}});
  EqualityNetwork net = build_equality_network(ones(2), m);
  CHECK(net.edge[0][0] == 0);
  CHECK(net.edge[0][1] == 1);
  CHECK(net.edge[1][0] == 1);
  CHECK(net.edge[1][1] == 1);
}

TEST_CASE("build_equality_network: prices break the tie") {
  Market m = Market::from_utilities({{1, 1}, {0, 1}});
  std::vector<Rational> p{Rational(1), Rational(2)};
  EqualityNetwork net = build_equality_network(p, m);
  CHECK(net.edge[0][0] == 1);
  CHECK(net.edge[0][1] == 0);
  CHECK(net.edge[1][0] == 0);
  CHECK(net.edge[1][1] == 1);
}

TEST_CASE("equality_edges_from_exponents matches the gap maximum") {
  // utilities (1+1/L)^{e}; buyer 0: gaps 5-0=5 and 3-1=2 -> edge to good 0.
  std::vector<std::vector<BigInt>> util{{BigInt(5), BigInt(3)}, {BigInt(-1), BigInt(2)}};
  std::vector<BigInt> price{BigInt(0), BigInt(1)};
  auto edges = equality_edges_from_exponents(util, price);
  CHECK(edges[0][0] == 1);
  CHECK(edges[0][1] == 0);
  CHECK(edges[1][0] == 0);  // zero utility never forms an edge
  CHECK(edges[1][1] == 1);
}

TEST_CASE("max_flow saturates a perfect matching") {
  Market m = Market::from_utilities({{0, 1}, {1, 0}});
  EqualityNetwork net = build_equality_network(ones(2), m);
  FlowState f = empty_flow(net);
  max_flow(net, f);
  CHECK(f.value() == 2);
  CHECK(f.total_surplus(net) == 0);
}

TEST_CASE("max_flow routes around the tie") {
  Market m = Market::from_utilities({{1, 1}, {0, 1}});
  EqualityNetwork net = build_equality_network(ones(2), m);
  FlowState f = empty_flow(net);
  max_flow(net, f);
  CHECK(f.value() == 2);
  CHECK(f.total_surplus(net) == 0);
}

TEST_CASE("max_flow on a disconnected pair") {
  std::vector<std::vector<char>> edges{{1, 0}, {0, 0}};
  EqualityNetwork net = EqualityNetwork::raw(ones(2), ones(2), edges);
  FlowState f = empty_flow(net);
  max_flow(net, f);
  CHECK(f.value() == 1);
  CHECK(f.buyer_surplus(net, 1) == 1);
  CHECK(f.good_surplus(net, 1) == 1);

  SUBCASE("residual_reachable identifies the cut") {
    auto reach = residual_reachable(net, f);
    CHECK(reach[1] == 1);       // buyer 2 keeps surplus
    CHECK(reach[0] == 0);       // buyer 1 saturated
    CHECK(reach[2] == 0);
    CHECK(reach[3] == 0);
    CHECK(cut_capacity(net, reach) == f.value());
  }
}

TEST_CASE("max_flow value equals min cut on fuzzed networks") {
  std::mt19937_64 rng(23);
  for (int t = 0; t < 300; ++t) {
    int n = 2 + static_cast<int>(rng() % 3);
    std::vector<Rational> bc(n), gc(n);
    std::vector<std::vector<char>> edges(n, std::vector<char>(n, 0));
    for (int i = 0; i < n; ++i) {
      bc[i] = make_rational(1 + static_cast<long>(rng() % 8), 1 + static_cast<long>(rng() % 4));
      gc[i] = make_rational(1 + static_cast<long>(rng() % 8), 1 + static_cast<long>(rng() % 4));
      for (int j = 0; j < n; ++j) edges[i][j] = rng() % 2;
    }
    EqualityNetwork net = EqualityNetwork::raw(bc, gc, edges);
    FlowState f = empty_flow(net);
    max_flow(net, f);
    check_flow(net, f);
    CHECK(f.value() == testsupport::enumerated_max_flow_value(bc, gc, edges));
    auto reach = residual_reachable(net, f);
    CHECK(cut_capacity(net, reach) == f.value());
  }
}

TEST_CASE("warm starts preserve zero-surplus goods") {
  std::mt19937_64 rng(29);
  int preserved_cases = 0;
  for (int t = 0; t < 1000; ++t) {
    int n = 2 + static_cast<int>(rng() % 3);
    std::vector<Rational> bc(n), gc(n);
    std::vector<std::vector<char>> edges(n, std::vector<char>(n, 0));
    for (int i = 0; i < n; ++i) {
      bc[i] = make_rational(1 + static_cast<long>(rng() % 6), 1 + static_cast<long>(rng() % 3));
      gc[i] = make_rational(1 + static_cast<long>(rng() % 6), 1 + static_cast<long>(rng() % 3));
      for (int j = 0; j < n; ++j) edges[i][j] = rng() % 3 != 0;
    }
    EqualityNetwork net = EqualityNetwork::raw(bc, gc, edges);
    FlowState f = empty_flow(net);
    max_flow(net, f);

    // Build a warm start: drain flow from edges into goods that keep their
    // surplus anyway, leaving saturated goods untouched.
    std::vector<char> saturated(n, 0);
    for (int j = 0; j < n; ++j) saturated[j] = f.good_surplus(net, j) == 0;
    FlowState warm = f;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (saturated[j] || warm.flow[i][j] == 0) continue;
        Rational cut = warm.flow[i][j] / static_cast<long>(1 + rng() % 3);
        warm.flow[i][j] -= cut;
        warm.sink[j] -= cut;
        warm.source[i] -= cut;
      }
    check_flow(net, warm);
    max_flow(net, warm);
    for (int j = 0; j < n; ++j)
      if (saturated[j]) {
        CHECK(warm.good_surplus(net, j) == 0);
        ++preserved_cases;
      }
  }
  CHECK(preserved_cases > 0);
}

TEST_CASE("residual_reachable requires a maximum flow") {
  Market m = Market::from_utilities({{1, 1}, {1, 1}});
  EqualityNetwork net = build_equality_network(ones(2), m);
  FlowState f = empty_flow(net);
  CHECK_THROWS_AS(residual_reachable(net, f), InternalError);
}

TEST_CASE("resaturate_goods pulls flow back through a residual swap") {
  // Buyer 0 feeds good 1 although good 0 also accepts it; pulling the flow
  // back restores good 0 without changing the flow value.
  std::vector<std::vector<char>> edges{{1, 1}, {0, 0}};
  EqualityNetwork net = EqualityNetwork::raw(ones(2), ones(2), edges);
  FlowState f = empty_flow(net);
  f.source[0] = Rational(1);
  f.flow[0][1] = Rational(1);
  f.sink[1] = Rational(1);
  std::vector<char> targets{1, 0};
  resaturate_goods(net, f, targets, true);
  CHECK(f.good_surplus(net, 0) == 0);
  CHECK(f.flow[0][0] == 1);
  CHECK(f.flow[0][1] == 0);
  CHECK(f.value() == 1);
  check_flow(net, f);
}

TEST_CASE("resaturate_goods: unreachable target") {
  std::vector<std::vector<char>> edges{{0, 1}, {0, 0}};
  EqualityNetwork net = EqualityNetwork::raw(ones(2), ones(2), edges);
  FlowState f = empty_flow(net);
  f.source[0] = Rational(1);
  f.flow[0][1] = Rational(1);
  f.sink[1] = Rational(1);
  std::vector<char> targets{1, 0};
  FlowState keep = f;
  resaturate_goods(net, keep, targets, false);  // best effort: no change
  CHECK(keep.good_surplus(net, 0) == 1);
  CHECK_THROWS_AS(resaturate_goods(net, f, targets, true), InternalError);
}

TEST_CASE("check_flow rejects corrupt states") {
  Market m = Market::from_utilities({{0, 1}, {1, 0}});
  EqualityNetwork net = build_equality_network(ones(2), m);
  FlowState f = empty_flow(net);
  max_flow(net, f);
  FlowState broken = f;
  broken.flow[0][0] = Rational(1);  // not an equality edge
  CHECK_THROWS_AS(check_flow(net, broken), InternalError);
  broken = f;
  broken.source[0] += 1;  // conservation violated
  CHECK_THROWS_AS(check_flow(net, broken), InternalError);
}

}  // TEST_SUITE
