#pragma once

// Independent reference implementations used only by the tests. They follow
// the raw definitions and share no code paths with the library beyond the
// basic Point / Domain containers.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <vector>

#include "rrlab/rrlab.hpp"

namespace oracle {

using rrlab::Coord;
using rrlab::Point;
using rrlab::Value;

// Order equivalence straight from the pairwise comparison pattern.
inline bool same_order_type(const Point& x, const Point& y) {
  if (x.dimension() != y.dimension()) return false;
  for (std::size_t i = 0; i < x.dimension(); ++i) {
    for (std::size_t j = 0; j < x.dimension(); ++j) {
      if ((x[i] < x[j]) != (y[i] < y[j])) return false;
      if ((x[i] == x[j]) != (y[i] == y[j])) return false;
    }
  }
  return true;
}

// Groups points by pairwise-comparison equivalence (quadratic, no ranks).
inline std::vector<std::vector<Point>> group_by_order_type(const std::vector<Point>& pts) {
  std::vector<std::vector<Point>> groups;
  for (const auto& p : pts) {
    bool placed = false;
    for (auto& g : groups) {
      if (same_order_type(g.front(), p)) {
        g.push_back(p);
        placed = true;
        break;
      }
    }
    if (!placed) groups.push_back({p});
  }
  return groups;
}

// Number of surjections [k] -> [j] by inclusion-exclusion.
inline std::int64_t surjections(int k, int j) {
  std::int64_t total = 0;
  std::int64_t binom = 1;
  for (int i = 0; i <= j; ++i) {
    std::int64_t pw = 1;
    for (int n = 0; n < k; ++n) pw *= (j - i);
    total += (i % 2 ? -1 : 1) * binom * pw;
    binom = binom * (j - i) / (i + 1);
  }
  return total;
}

inline std::int64_t fubini(int k) {
  std::int64_t s = 0;
  for (int j = 1; j <= k; ++j) s += surjections(k, j);
  return s;
}

// Committee-model value by memoised recursion straight from the
// definition: all r-tuples of out-neighbours (or the declared list), labels
// min(y) when y has no defined output. base(z) supplies the base case.
class RecursiveModel {
 public:
  RecursiveModel(const rrlab::DownwardGraph& g, const rrlab::SelectionRule& rule, const rrlab::CommitteeSpec& spec,
                 std::function<Value(const Point&)> base)
      : g_(g), rule_(rule), spec_(spec), base_(std::move(base)) {}

  struct Result {
    Value value;
    bool empty;
  };

  Result at(const Point& z) {
    if (auto it = memo_.find(z); it != memo_.end()) return it->second;
    std::vector<Point> adj;
    for (const auto& y : g_.domain()) {
      if (g_.has_edge(z, y)) adj.push_back(y);
    }
    std::set<Value> phi;
    auto visit = [&](const std::vector<Point>& members) {
      std::vector<rrlab::LabeledMember> labeled;
      for (const auto& y : members) {
        const Result r = at(y);
        labeled.push_back({y, r.empty ? rrlab::min_coord(y) : r.value});
      }
      if (auto v = rule_.raw(z, labeled)) phi.insert(*v);
    };
    if (spec_.is_exhaustive()) {
      std::vector<Point> cur;
      std::function<void()> rec = [&] {
        if (cur.size() == spec_.arity()) {
          visit(cur);
          return;
        }
        for (const auto& y : adj) {
          cur.push_back(y);
          rec();
          cur.pop_back();
        }
      };
      if (!adj.empty()) rec();
    } else if (auto it = spec_.declared_committees().find(z); it != spec_.declared_committees().end()) {
      for (const auto& c : it->second) {
        const bool ok = std::all_of(c.begin(), c.end(), [&](const Point& y) { return g_.has_edge(z, y); });
        if (ok) visit(c);
      }
    }
    Result r = phi.empty() ? Result{base_(z), true} : Result{*phi.begin(), false};
    memo_[z] = r;
    return r;
  }

 private:
  const rrlab::DownwardGraph& g_;
  rrlab::SelectionRule rule_;
  rrlab::CommitteeSpec spec_;
  std::function<Value(const Point&)> base_;
  std::map<Point, Result> memo_;
};

// Regressive regularity by direct quantifier expansion: for every class X
// (pairwise order equivalence), either all f(x) equal one value c < min(E),
// or f(x) >= min(x) for all x.
inline bool regular_by_definition(const std::map<Point, Value>& f, const std::vector<Coord>& e, std::size_t k) {
  std::vector<Point> cube;
  std::vector<Coord> cur;
  std::function<void()> rec = [&] {
    if (cur.size() == k) {
      cube.emplace_back(cur);
      return;
    }
    for (Coord v : e) {
      cur.push_back(v);
      rec();
      cur.pop_back();
    }
  };
  rec();
  const Coord lo = *std::min_element(e.begin(), e.end());
  for (const auto& cls : group_by_order_type(cube)) {
    bool constant_below = true;
    for (const auto& x : cls) {
      if (f.at(x) != f.at(cls.front()) || f.at(x) >= lo) constant_below = false;
    }
    bool above = true;
    for (const auto& x : cls) {
      if (f.at(x) < rrlab::min_coord(x)) above = false;
    }
    if (!constant_below && !above) return false;
  }
  return true;
}

// Nearest element of E by scanning, ties to the larger.
inline Value nearest(const std::vector<Coord>& e, Value n) {
  Value best = e.front();
  for (Coord c : e) {
    const Value dc = c > n ? c - n : n - c;
    const Value db = best > n ? best - n : n - best;
    if (dc < db || (dc == db && c > best)) best = c;
  }
  return best;
}

// Plain recursive subset-sum decision.
inline bool zero_subset_exists(const std::vector<Value>& s) {
  std::function<bool(std::size_t, Value, bool)> rec = [&](std::size_t i, Value sum, bool any) -> bool {
    if (i == s.size()) return any && sum == 0;
    return rec(i + 1, sum + s[i], true) || rec(i + 1, sum, any);
  };
  return rec(0, 0, false);
}

}  // namespace oracle
