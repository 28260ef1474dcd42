#include <random>

#include "catch_amalgamated.hpp"
#include "rrlab/rrlab.hpp"
#include "support/oracles.hpp"

using namespace rrlab;

TEST_CASE("nearest element and displacement") {
  const CoordSet e{2, 10};
  CHECK(gamma(e, 6) == 10);
  CHECK(gamma(e, 3) == 2);
  CHECK(gamma(e, 10) == 10);
  CHECK(delta(e, 6) == -4);
  CHECK(delta(e, 3) == 1);
  CHECK(delta(e, 2) == 0);
  CHECK(delta(e, 0) == -2);
  CHECK(delta(e, 50) == 40);
  std::mt19937_64 rng(3);
  for (int i = 0; i < 2000; ++i) {
    std::vector<Coord> ev;
    for (int j = 0; j < 1 + static_cast<int>(rng() % 5); ++j) ev.push_back(static_cast<Coord>(rng() % 30));
    const CoordSet s(ev);
    const Value n = static_cast<Value>(rng() % 40);
    REQUIRE(gamma(s, n) == oracle::nearest(s.values(), n));
  }
}

TEST_CASE("log-bound check") {
  const CoordSet e{1, 2, 3, 4};  // threshold 1 * 2^2 = 4, budget log2(4) = 2
  CHECK(small_threshold(e, 2) == 4);
  CHECK(is_log_bounded(std::vector<Value>{20, 30, 40, 50}, e, 2, 1).ok);
  CHECK(is_log_bounded(std::vector<Value>{20, 30, 40, 50}, e, 2, 1).small_count == 0);
  CHECK_FALSE(is_log_bounded(std::vector<Value>{4, 30, 40, 50}, e, 2, 1).ok);
  CHECK_FALSE(is_log_bounded(std::vector<Value>{2, 30, 40, 50}, e, 2, 1).all_positive);
  const auto two = is_log_bounded(std::vector<Value>{5, 6, 40, 50}, e, 2, 1);
  CHECK(two.small_count == 2);
  CHECK(two.ok);
  const auto three = is_log_bounded(std::vector<Value>{5, 6, 7, 50}, e, 2, 1);
  CHECK(three.small_count == 3);
  CHECK_FALSE(three.ok);
  CHECK(is_log_bounded(std::vector<Value>{5, 6, 7, 50}, e, 2, 2).ok);
  CHECK(within_log_budget(3, 8, 1));
  CHECK_FALSE(within_log_budget(4, 8, 1));
  CHECK(within_log_budget(60, 1024, 6));
  CHECK_FALSE(within_log_budget(61, 1024, 6));
}

TEST_CASE("lower sets") {
  const CoordSet e{2, 5};
  const Domain c = cube(e, 2);
  std::vector<VertexResult> mins, consts;
  for (const auto& x : c) {
    mins.push_back({min_coord(x), true});
    consts.push_back({1, false});
  }
  const auto a = lower_sets(Evaluation(EvalKind::HRho, c, mins), e, 2);
  CHECK(a.lower.empty());
  CHECK(a.below_floor.empty());
  const auto b = lower_sets(Evaluation(EvalKind::HRho, c, consts), e, 2);
  CHECK(b.lower == c);
  CHECK(b.below_floor == c);
}

TEST_CASE("instances from the layered family") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto gi = layered_regular_instance(2, 3 + seed % 6, 1, seed);
    const auto& inst = gi.instance;
    REQUIRE(inst.flags.regressively_regular);
    REQUIRE(inst.flags.diag_in_lower != inst.flags.diag_equals_rho);
    const auto ls = lower_sets(gi.h, gi.e, 2);
    REQUIRE(ls.lower == ls.below_floor);
    for (const auto& el : inst.elements) {
      for (const auto& prov : el.from) {
        if (prov.kind == Provenance::Kind::Lower) {
          REQUIRE(el.value < 0);
          REQUIRE(el.value == gi.h.value(prov.point) - gi.e.front());
        }
      }
    }
    std::vector<Value> vals = inst.values();
    std::sort(vals.begin(), vals.end());
    REQUIRE(std::adjacent_find(vals.begin(), vals.end()) == vals.end());
  }
}

TEST_CASE("all-negative and cancelling instances") {
  // Every cube point drops to (1,1): diag inside E_L, all values negative.
  const CoordSet e{2, 3};
  const Domain c = cube(e, 2);
  std::vector<Edge> edges;
  for (const auto& x : c) edges.emplace_back(x, Point{1, 1});
  const DownwardGraph g(c.united(Domain(2, {{1, 1}})), edges);
  const auto rho = RhoFamily::table({{Point{2, 2}, 100}, {Point{3, 3}, 200}});
  const auto h = eval_h_rho(g, SelectionRule::min_rule(1), CommitteeSpec::exhaustive(1), rho);
  const auto inst = build_instance(h, e, 2, 1, rho);
  CHECK(inst.flags.diag_in_lower);
  REQUIRE(inst.elements.size() == 1);
  CHECK(inst.elements[0].value == -1);
  CHECK(inst.elements[0].from.size() == 6);
  CHECK(inst.elements[0].primary().key() == "lower:[2,2]");

  // f = min on E^k and large positive diagonal displacements: all positive.
  const DownwardGraph flat(c);
  const auto hi = RhoFamily::table({{Point{2, 2}, 20}, {Point{3, 3}, 40}});
  const auto h2 = eval_h_rho(flat, SelectionRule::min_rule(1), CommitteeSpec::exhaustive(1), hi);
  const auto pos = build_instance(h2, e, 2, 1, hi);
  CHECK(pos.flags.diag_equals_rho);
  for (const auto& el : pos.elements) CHECK(el.value > 0);

  const auto h3 = eval_h_rho(flat, SelectionRule::min_rule(1), CommitteeSpec::exhaustive(1), RhoFamily::min());
  CHECK_THROWS_AS(build_instance(h3, e, 2, 1, RhoFamily::min()), LogBoundError);
  BuildOptions loose;
  loose.require_log_bound = false;
  CHECK_FALSE(build_instance(h3, e, 2, 1, RhoFamily::min(), loose).log_bound.ok);

  // (2,3) drops to 1, displacement -1; rho on (2,2) gives +1.
  const DownwardGraph mixed(c.united(Domain(2, {{1, 1}})), {{{2, 3}, {1, 1}}});
  const auto cancel = RhoFamily::table({{Point{2, 2}, 4}, {Point{3, 3}, 100}});
  const auto hm = eval_h_rho(mixed, SelectionRule::min_rule(1), CommitteeSpec::exhaustive(1), cancel);
  const auto mi = build_instance(hm, e, 2, 1, cancel);
  CHECK(mi.flags.regressively_regular);
  CHECK(mi.values() == std::vector<Value>{-1, 1, 97});
  const auto s = eval_s_hat(flat, SelectionRule::min_rule(1), CommitteeSpec::exhaustive(1));
  CHECK_THROWS_AS(build_instance(s, e, 2, 1, hi), ValidationError);
}
