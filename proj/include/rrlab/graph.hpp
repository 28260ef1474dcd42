#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rrlab/detail/hash.hpp"
#include "rrlab/error.hpp"
#include "rrlab/lattice.hpp"

namespace rrlab {

using Edge = std::pair<Point, Point>;

// Finite digraph on lattice points. Endpoints are validated on construction;
// the downward property (every edge strictly decreases the max norm) is
// checked by validate_downward / require_downward so that malformed inputs
// can be reported rather than rejected outright.
class DownwardGraph {
 public:
  DownwardGraph() = default;
  explicit DownwardGraph(Domain domain) : domain_(std::move(domain)), out_(domain_.size()) {}

  DownwardGraph(Domain domain, const std::vector<Edge>& edges) : DownwardGraph(std::move(domain)) {
    for (const auto& [from, to] : edges) {
      auto i = domain_.index_of(from);
      auto j = domain_.index_of(to);
      if (!i || !j) {
        throw ValidationError("edge " + from.to_string() + " -> " + to.to_string() + " leaves the vertex set");
      }
      out_[*i].push_back(*j);
    }
    for (auto& adj : out_) {
      std::sort(adj.begin(), adj.end());
      adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
    }
  }

  const Domain& domain() const { return domain_; }
  std::size_t dimension() const { return domain_.dimension(); }
  std::size_t size() const { return domain_.size(); }

  // Out-neighbour indices of the i-th vertex, ascending.
  std::span<const std::size_t> out_indices(std::size_t i) const { return out_[i]; }

  std::size_t edge_count() const {
    std::size_t n = 0;
    for (const auto& adj : out_) n += adj.size();
    return n;
  }

  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    out.reserve(edge_count());
    for (std::size_t i = 0; i < out_.size(); ++i) {
      for (std::size_t j : out_[i]) out.emplace_back(domain_[i], domain_[j]);
    }
    return out;
  }

  bool has_edge(const Point& from, const Point& to) const {
    auto i = domain_.index_of(from);
    auto j = domain_.index_of(to);
    if (!i || !j) return false;
    return std::binary_search(out_[*i].begin(), out_[*i].end(), *j);
  }

  friend bool operator==(const DownwardGraph& a, const DownwardGraph& b) {
    return a.domain_ == b.domain_ && a.out_ == b.out_;
  }

 private:
  Domain domain_;
  std::vector<std::vector<std::size_t>> out_;
};

struct DownwardReport {
  std::vector<Edge> violations;
  bool ok() const { return violations.empty(); }
};

inline DownwardReport validate_downward(const DownwardGraph& g) {
  DownwardReport report;
  for (const auto& [from, to] : g.edges()) {
    if (max_norm(from) <= max_norm(to)) report.violations.emplace_back(from, to);
  }
  return report;
}

inline void require_downward(const DownwardGraph& g) {
  auto report = validate_downward(g);
  if (!report.ok()) {
    const auto& [from, to] = report.violations.front();
    throw ValidationError("graph is not downward: " + std::to_string(report.violations.size()) +
                          " offending edge(s), first " + from.to_string() + " -> " + to.to_string());
  }
}

inline DownwardGraph induced_subgraph(const DownwardGraph& g, const Domain& d) {
  g.domain().require_same_dimension(d);
  if (!d.is_subset_of(g.domain())) throw ValidationError("induced subgraph: vertex set is not contained in the graph");
  std::vector<Edge> kept;
  for (const auto& v : d) {
    const std::size_t i = *g.domain().index_of(v);
    for (std::size_t j : g.out_indices(i)) {
      const Point& w = g.domain()[j];
      if (d.contains(w)) kept.emplace_back(v, w);
    }
  }
  return DownwardGraph(d, kept);
}

inline Domain adjacency(const DownwardGraph& g, const Point& z) {
  auto i = g.domain().index_of(z);
  if (!i) throw ValidationError("vertex " + z.to_string() + " not in graph");
  std::vector<Point> out;
  for (std::size_t j : g.out_indices(*i)) out.push_back(g.domain()[j]);
  return Domain(g.dimension(), std::move(out));
}

struct Layer {
  Coord norm = 0;
  Domain points;
};
using Layering = std::vector<Layer>;

// Partition by max norm, ascending.
inline Layering layers(const Domain& d) {
  if (d.empty()) throw ValidationError("layers of an empty domain");
  std::vector<std::pair<Coord, Point>> keyed;
  keyed.reserve(d.size());
  for (const auto& p : d) keyed.emplace_back(max_norm(p), p);
  std::stable_sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  Layering out;
  std::size_t i = 0;
  while (i < keyed.size()) {
    const Coord norm = keyed[i].first;
    std::vector<Point> level;
    for (; i < keyed.size() && keyed[i].first == norm; ++i) level.push_back(keyed[i].second);
    out.push_back({norm, Domain(d.dimension(), std::move(level))});
  }
  return out;
}

// An edge relation on all of N^k, queried only for norm-decreasing pairs.
// Inducing it on different finite domains yields mutually consistent
// subgraphs, which is what the nested-domain experiments rely on.
class AmbientGraph {
 public:
  using Predicate = std::function<bool(const Point&, const Point&)>;

  AmbientGraph(std::string name, Predicate edge) : name_(std::move(name)), edge_(std::move(edge)) {}

  // Each norm-decreasing pair is an edge independently with the given
  // probability, decided by a seeded hash of the pair.
  static AmbientGraph random(double density, std::uint64_t seed) {
    if (!(density >= 0.0 && density <= 1.0)) throw ValidationError("edge probability must lie in [0, 1]");
    return AmbientGraph("random(" + std::to_string(density) + "," + std::to_string(seed) + ")",
                        [density, seed](const Point& x, const Point& y) {
                          std::uint64_t h = detail::splitmix64(seed);
                          for (Coord c : x.coords()) h = detail::hash_combine(h, static_cast<std::uint64_t>(c));
                          h = detail::hash_combine(h, 0xfeedULL);
                          for (Coord c : y.coords()) h = detail::hash_combine(h, static_cast<std::uint64_t>(c));
                          return detail::bernoulli(h, density);
                        });
  }

  static AmbientGraph complete() {
    return AmbientGraph("complete", [](const Point&, const Point&) { return true; });
  }

  static AmbientGraph edgeless() {
    return AmbientGraph("edgeless", [](const Point&, const Point&) { return false; });
  }

  // Edges of a concrete graph; pairs outside it are non-edges.
  static AmbientGraph from_graph(DownwardGraph g) {
    auto shared = std::make_shared<const DownwardGraph>(std::move(g));
    return AmbientGraph("graph", [shared](const Point& x, const Point& y) { return shared->has_edge(x, y); });
  }

  const std::string& name() const { return name_; }

  bool has_edge(const Point& x, const Point& y) const { return max_norm(x) > max_norm(y) && edge_(x, y); }

  DownwardGraph induce(const Domain& d) const {
    std::vector<Edge> edges;
    for (const auto& x : d) {
      const Coord mx = max_norm(x);
      for (const auto& y : d) {
        if (max_norm(y) < mx && edge_(x, y)) edges.emplace_back(x, y);
      }
    }
    return DownwardGraph(d, edges);
  }

 private:
  std::string name_;
  Predicate edge_;
};

inline DownwardGraph gen_random_downward(std::size_t k, const Domain& d, double edge_probability, std::uint64_t seed) {
  if (d.dimension() != k) throw DimensionError("generator dimension does not match the domain");
  return AmbientGraph::random(edge_probability, seed).induce(d);
}

}  // namespace rrlab
