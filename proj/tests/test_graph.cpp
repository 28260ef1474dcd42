#include <random>

#include "catch_amalgamated.hpp"
#include "rrlab/graph.hpp"

using namespace rrlab;

TEST_CASE("downward validation") {
  const Domain d(2, {{7, 11}, {6, 8}, {2, 2}, {1, 3}, {3, 1}});
  CHECK(validate_downward(DownwardGraph(d, {{{7, 11}, {6, 8}}})).ok());
  const auto loop = validate_downward(DownwardGraph(d, {{{2, 2}, {2, 2}}}));
  CHECK(loop.violations.size() == 1);
  CHECK_FALSE(validate_downward(DownwardGraph(d, {{{1, 3}, {3, 1}}})).ok());
  CHECK_THROWS_AS(require_downward(DownwardGraph(d, {{{1, 3}, {3, 1}}})), ValidationError);
  CHECK_THROWS_AS(DownwardGraph(d, {{{9, 9}, {1, 3}}}), ValidationError);
}

TEST_CASE("induced subgraphs") {
  const Domain d(2, {{0, 0}, {1, 1}, {2, 2}, {3, 0}, {3, 3}});
  const auto g = AmbientGraph::complete().induce(d);
  CHECK(induced_subgraph(g, d) == g);
  CHECK(induced_subgraph(g, Domain(2, {{2, 2}})).edge_count() == 0);

  // Removing the middle vertex (2,2) removes exactly its incident edges.
  const Domain without = d.minus(Domain(2, {{2, 2}}));
  const auto sub = induced_subgraph(g, without);
  std::vector<Edge> expected;
  for (const auto& e : g.edges()) {
    if (!(e.first == Point{2, 2}) && !(e.second == Point{2, 2})) expected.push_back(e);
  }
  CHECK(sub.edges() == expected);
  CHECK_THROWS_AS(induced_subgraph(g, Domain(2, {{9, 9}})), ValidationError);
}

TEST_CASE("adjacency is strictly lower") {
  const Domain d(2, {{0, 1}, {1, 1}, {2, 0}, {2, 2}});
  const auto g = AmbientGraph::complete().induce(d);
  CHECK(adjacency(g, Point{0, 1}).empty());
  for (const auto& z : d) {
    for (const auto& y : adjacency(g, z)) {
      CHECK(max_norm(y) < max_norm(z));
      CHECK_FALSE(y == z);
    }
  }
  CHECK(adjacency(g, Point{2, 2}).size() == 2);
}

TEST_CASE("layers bucket by max norm") {
  const auto ls = layers(Domain(2, {{1, 2}, {0, 2}, {3, 1}}));
  REQUIRE(ls.size() == 2);
  CHECK(ls[0].norm == 2);
  CHECK(ls[0].points.points() == std::vector<Point>{{0, 2}, {1, 2}});
  CHECK(ls[1].norm == 3);
  const auto lc = layers(cube({1, 3}, 2));
  REQUIRE(lc.size() == 2);
  CHECK(lc[0].norm == 1);
  CHECK(lc[1].norm == 3);
  CHECK(layers(Domain(2, {{4, 4}})).size() == 1);
}

TEST_CASE("random downward graphs") {
  std::vector<Point> pts;
  for (Coord a = 0; a < 5; ++a) {
    for (Coord b = 0; b < 5; ++b) pts.push_back({a, b});
  }
  const Domain d(2, pts);
  CHECK(gen_random_downward(2, d, 0.0, 3).edge_count() == 0);
  const auto full = gen_random_downward(2, d, 1.0, 3);
  CHECK(full == AmbientGraph::complete().induce(d));
  std::size_t decreasing = 0;
  for (const auto& x : d) {
    for (const auto& y : d) decreasing += max_norm(x) > max_norm(y);
  }
  CHECK(full.edge_count() == decreasing);
  CHECK(gen_random_downward(2, d, 0.4, 9) == gen_random_downward(2, d, 0.4, 9));
  CHECK_FALSE(gen_random_downward(2, d, 0.4, 9) == gen_random_downward(2, d, 0.4, 10));
  CHECK(validate_downward(gen_random_downward(2, d, 0.5, 1)).ok());

  // Induced subgraphs of an ambient graph agree with induction on the subdomain.
  const auto amb = AmbientGraph::random(0.5, 77);
  const Domain sub(2, {{0, 0}, {1, 4}, {3, 3}, {4, 2}});
  CHECK(induced_subgraph(amb.induce(d), sub) == amb.induce(sub));
}
