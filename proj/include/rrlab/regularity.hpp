#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "rrlab/error.hpp"
#include "rrlab/evaluator.hpp"
#include "rrlab/graph.hpp"
#include "rrlab/lattice.hpp"
#include "rrlab/parallel.hpp"
#include "rrlab/selection.hpp"

namespace rrlab {

// {n : f(x) = n < min(x) for some x in X}.
inline std::set<Value> regressive_values(const Evaluation& e, const Domain& x) {
  std::set<Value> out;
  for (const auto& p : x) {
    const Value v = e.value(p);
    if (v < min_coord(p)) out.insert(v);
  }
  return out;
}

enum class ClassCase {
  Constant,   // constant on the class, below min(E)
  AboveMin,   // f(x) >= min(x) throughout the class
  Violation,
};

inline const char* to_string(ClassCase c) {
  switch (c) {
    case ClassCase::Constant: return "constant";
    case ClassCase::AboveMin: return "above_min";
    case ClassCase::Violation: return "violation";
  }
  return "?";
}

struct ClassVerdict {
  OrderSignature type;
  ClassCase kind = ClassCase::AboveMin;
  std::size_t points = 0;
  Value constant = 0;            // Constant only
  std::optional<Point> witness;  // Violation: a point with a regressive value
  std::optional<Point> partner;  // Violation: a same-class point with a different value
  std::string reason;
};

struct RegularityVerdict {
  CoordSet e;
  std::size_t k = 2;
  std::vector<ClassVerdict> classes;  // order types present in E^k, ascending
  std::set<Value> regressive_values;  // over E^k
  bool regular = true;

  const ClassVerdict* find(const OrderSignature& t) const {
    for (const auto& c : classes) {
      if (c.type == t) return &c;
    }
    return nullptr;
  }
};

// Classifies every order type of E^k as constant-below-min(E), above-min,
// or a violation with a concrete witness.
inline RegularityVerdict check_regressive_regular(const Evaluation& e, const CoordSet& set, std::size_t k) {
  if (set.size() < 2) throw ValidationError("regressive regularity needs |E| >= 2");
  const Domain c = cube(set, k);
  if (!c.is_subset_of(e.domain())) throw ValidationError("E^k is not contained in the evaluated domain");

  std::map<OrderSignature, std::vector<Point>> classes;
  for (const auto& p : c) classes[order_signature(p)].push_back(p);

  RegularityVerdict out;
  out.e = set;
  out.k = k;
  out.regressive_values = regressive_values(e, c);
  const Coord floor = set.front();
  for (const auto& [type, members] : classes) {
    ClassVerdict v;
    v.type = type;
    v.points = members.size();
    const Point* regressive = nullptr;
    for (const auto& p : members) {
      if (e.value(p) < min_coord(p)) {
        regressive = &p;
        break;
      }
    }
    if (!regressive) {
      v.kind = ClassCase::AboveMin;
    } else {
      const Value first = e.value(*regressive);
      const Point* differing = nullptr;
      for (const auto& p : members) {
        if (e.value(p) != first) {
          differing = &p;
          break;
        }
      }
      if (!differing && first < floor) {
        v.kind = ClassCase::Constant;
        v.constant = first;
      } else {
        v.kind = ClassCase::Violation;
        v.witness = *regressive;
        if (first >= floor) {
          v.reason = "regressive value " + std::to_string(first) + " at " + regressive->to_string() +
                     " is not below min(E) = " + std::to_string(floor);
        } else {
          v.partner = *differing;
          v.reason = "values " + std::to_string(first) + " at " + regressive->to_string() + " and " +
                     std::to_string(e.value(*differing)) + " at " + differing->to_string() + " differ";
        }
        out.regular = false;
      }
    }
    out.classes.push_back(std::move(v));
  }
  return out;
}

struct CapReduction {
  Domain domain;
  // Points of D at or above max(E) that are not in setmax(E^k).
  std::vector<Point> discarded;
};

// D_x plus setmax(E^k), x = max(E). The result is capped by E^k.
inline CapReduction restrict_capped(const Domain& d, const CoordSet& set, std::size_t k) {
  if (d.dimension() != k) throw DimensionError("restrict_capped: dimension mismatch");
  const Domain c = cube(set, k);
  if (!c.is_subset_of(d)) throw ValidationError("restrict_capped: E^k is not contained in D");
  const Coord top = set.back();
  const Domain lower = d.filter([top](const Point& p) { return max_norm(p) < top; });
  CapReduction out;
  out.domain = lower.united(setmax(c));
  for (const auto& p : d.minus(out.domain)) out.discarded.push_back(p);
  return out;
}

struct SearchBounds {
  Coord n_min = 0;
  Coord n_max = 6;
  // At most this many filler points (max norm below max(E)) added to E^k.
  std::size_t max_filler = 1;
  // Candidate domains tried per E, so exhaustion is deterministic.
  std::size_t max_domains_per_e = 5000;
  unsigned threads = 1;
};

struct RegularWitness {
  CoordSet e;
  Domain d;
  Evaluation values;
  RegularityVerdict verdict;
};

struct SearchReport {
  std::optional<RegularWitness> witness;
  std::size_t e_candidates = 0;
  std::size_t domains_evaluated = 0;
  bool exhausted() const { return !witness.has_value(); }
};

namespace detail {

// Advances a strictly increasing index combination over [0, n); false when done.
inline bool next_combination(std::vector<std::size_t>& c, std::size_t n) {
  const std::size_t s = c.size();
  std::size_t i = s;
  while (i > 0) {
    --i;
    if (c[i] < n - s + i) {
      ++c[i];
      for (std::size_t j = i + 1; j < s; ++j) c[j] = c[j - 1] + 1;
      return true;
    }
  }
  return false;
}

inline std::vector<CoordSet> candidate_sets(Coord lo, Coord hi, std::size_t p) {
  std::vector<CoordSet> out;
  if (hi < lo) return out;
  const std::size_t n = static_cast<std::size_t>(hi - lo + 1);
  if (p > n) return out;
  std::vector<std::size_t> c(p);
  for (std::size_t i = 0; i < p; ++i) c[i] = i;
  do {
    std::vector<Coord> v;
    for (std::size_t i : c) v.push_back(lo + static_cast<Coord>(i));
    out.emplace_back(std::move(v));
  } while (next_combination(c, n));
  return out;
}

}  // namespace detail

// Bounded exhaustive search for a capped domain D over which h-rho is
// regressively regular. E runs over p-subsets of [n_min, n_max] in
// lexicographic order; for each E, D runs over E^k plus filler subsets
// (by size, then lexicographically) drawn from points with max norm below
// max(E). The first witness in that order is returned whatever the thread
// count.
inline SearchReport search_regular(const AmbientGraph& ambient, const SelectionRule& rule, const CommitteeSpec& spec,
                                   const RhoFamily& rho, std::size_t k, std::size_t p, const SearchBounds& bounds) {
  if (p < 2) throw ValidationError("search needs p >= 2");
  if (k < 2 || k > kMaxDimension) throw DimensionError("search needs 2 <= k <= " + std::to_string(kMaxDimension));
  const auto sets = detail::candidate_sets(bounds.n_min, bounds.n_max, p);

  struct Outcome {
    std::optional<RegularWitness> witness;
    std::size_t evaluated = 0;
  };

  auto try_set = [&](const CoordSet& e) {
    Outcome out;
    const Domain base = cube(e, k);
    const Coord top = e.back();
    std::vector<Point> pool;
    if (top > 0) {
      std::vector<Coord> below;
      for (Coord c = 0; c < top; ++c) below.push_back(c);
      for (const auto& q : cube(CoordSet(std::move(below)), k)) {
        if (!base.contains(q)) pool.push_back(q);
      }
    }
    for (std::size_t size = 0; size <= std::min(bounds.max_filler, pool.size()); ++size) {
      std::vector<std::size_t> c(size);
      for (std::size_t i = 0; i < size; ++i) c[i] = i;
      do {
        if (out.evaluated >= bounds.max_domains_per_e) return out;
        std::vector<Point> pts(base.begin(), base.end());
        for (std::size_t i : c) pts.push_back(pool[i]);
        Domain d(k, std::move(pts));
        const DownwardGraph g = ambient.induce(d);
        Evaluation h = eval_h_rho(g, rule, spec.restricted_to(g), rho);
        ++out.evaluated;
        RegularityVerdict verdict = check_regressive_regular(h, e, k);
        if (verdict.regular) {
          out.witness = RegularWitness{e, d, std::move(h), std::move(verdict)};
          return out;
        }
      } while (size > 0 && detail::next_combination(c, pool.size()));
    }
    return out;
  };

  SearchReport report;
  const std::size_t batch = std::max<std::size_t>(1, bounds.threads) * 4;
  for (std::size_t start = 0; start < sets.size(); start += batch) {
    const std::size_t n = std::min(batch, sets.size() - start);
    std::vector<Outcome> outcomes(n);
    parallel_for(n, bounds.threads, [&](std::size_t i) { outcomes[i] = try_set(sets[start + i]); });
    for (std::size_t i = 0; i < n; ++i) {
      ++report.e_candidates;
      report.domains_evaluated += outcomes[i].evaluated;
      if (outcomes[i].witness) {
        report.witness = std::move(outcomes[i].witness);
        return report;
      }
    }
  }
  return report;
}

}  // namespace rrlab
