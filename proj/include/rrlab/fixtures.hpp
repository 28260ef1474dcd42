#pragma once

#include <map>
#include <string>
#include <vector>

#include "rrlab/graph.hpp"
#include "rrlab/lattice.hpp"
#include "rrlab/selection.hpp"

namespace rrlab {

// The committee example: boss (7,11), three committees reporting 4, 7, 3,
// eight terminal vertices. Items marked "reconstructed" are placeholders
// chosen to reproduce the reported values.
struct CommitteeExample {
  DownwardGraph graph;
  CommitteeSpec committees = CommitteeSpec::exhaustive(3);
  TableRule table{3};
  Point boss;
  std::vector<Point> terminals;  // left-to-right order of the drawing
  std::vector<std::string> notes;

  SelectionRule rule() const { return SelectionRule::table(table); }
};

inline CommitteeExample committee_example() {
  CommitteeExample ex;
  constexpr std::size_t r = 3;
  const Point boss{7, 11};
  const Point t1{2, 2}, t2{1, 3}, t3{1, 4}, t4{5, 5}, t5{6, 4}, t6{8, 4}, t7{8, 7}, t8{9, 3};
  const Point a{3, 5}, b{6, 8}, c{10, 7};

  ex.boss = boss;
  ex.terminals = {t1, t2, t3, t4, t5, t6, t7, t8};
  ex.notes = {
      "terminal maxima 2,3,4,5,6,8,8,9 and minima 2,1,1,5,4,4,7,3 are the reported values; "
      "orientation of each terminal (which coordinate is larger) is reconstructed",
      "the third boss committee member is (10,7) rather than (11,7): an edge (7,11)->(11,7) keeps the max "
      "norm at 11 and is not downward; (10,7) reports the same value 3 (reconstructed)",
      "committees of (3,5), (6,8), (10,7) are reconstructed placeholders producing the reported values 2, 4, 3",
  };

  std::map<Point, std::vector<Committee>> declared;
  declared[boss] = {{a, b, t7}, {b, t7}, {b, c}};
  declared[a] = {{t1, t2}, {t3}};
  declared[b] = {{t4, t5}};
  declared[c] = {{t6, t8}};
  ex.committees = CommitteeSpec::declared(r, declared);

  std::vector<Edge> edges;
  for (const auto& [z, list] : declared) {
    for (const auto& committee : list) {
      for (const auto& y : committee) edges.emplace_back(z, y);
    }
  }
  std::vector<Point> vertices = ex.terminals;
  vertices.insert(vertices.end(), {a, b, c, boss});
  ex.graph = DownwardGraph(Domain(2, vertices), edges);

  auto entry = [&](const Point& z, std::vector<LabeledMember> members, Value v) {
    while (members.size() < r) members.push_back(members.back());
    ex.table.add(z, std::move(members), v);
  };
  entry(boss, {{a, 2}, {b, 4}, {t7, 7}}, 4);
  entry(boss, {{b, 4}, {t7, 7}}, 7);
  entry(boss, {{b, 4}, {c, 3}}, 3);
  entry(a, {{t1, 2}, {t2, 1}}, 2);  // (3,5)'s second committee {(1,4)} is left undefined
  entry(b, {{t4, 5}, {t5, 4}}, 4);
  entry(c, {{t6, 4}, {t8, 3}}, 3);
  return ex;
}

}  // namespace rrlab
