#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <vector>

#include "rrlab/displacement.hpp"
#include "rrlab/evaluator.hpp"
#include "rrlab/graph.hpp"
#include "rrlab/lattice.hpp"
#include "rrlab/regularity.hpp"
#include "rrlab/selection.hpp"

namespace rrlab {

// Largest s with 2^s <= p^t.
inline std::size_t log_budget(std::size_t p, std::size_t t) {
  std::size_t s = 0;
  while (within_log_budget(s + 1, p, t)) ++s;
  return s;
}

// A random subset of [0, n_max]^k with the requested number of points.
inline Domain random_domain(std::size_t k, Coord n_max, std::size_t points, std::mt19937_64& rng) {
  std::vector<Coord> range;
  for (Coord c = 0; c <= n_max; ++c) range.push_back(c);
  const Domain box = cube(CoordSet(range), k);
  std::vector<Point> all(box.begin(), box.end());
  std::shuffle(all.begin(), all.end(), rng);
  all.resize(std::min(points, all.size()));
  return Domain(k, std::move(all));
}

// Diagonal rho values (rho(e_j) for j = 0..p-1) with every displacement
// positive and at most `small` of them below e_0 k^k. Each value sits above
// max(E), so its displacement is rho - max(E).
inline std::vector<Value> log_bounded_diag(const CoordSet& e, std::size_t k, std::span<const Value> small_offsets,
                                           std::mt19937_64& rng) {
  const Value threshold = small_threshold(e, k);
  std::vector<Value> offsets(small_offsets.begin(), small_offsets.end());
  Value next_big = threshold;
  while (offsets.size() < e.size()) {
    next_big += 1 + static_cast<Value>(rng() % 5);
    offsets.push_back(next_big);
  }
  std::shuffle(offsets.begin(), offsets.end(), rng);
  std::vector<Value> out;
  for (Value a : offsets) out.push_back(e.back() + a);
  return out;
}

struct GeneratedInstance {
  CoordSet e;
  std::size_t k = 2;
  DownwardGraph graph;
  SelectionRule rule = SelectionRule::min_rule(1);
  CommitteeSpec spec = CommitteeSpec::exhaustive(1);
  RhoFamily rho = RhoFamily::min();
  Evaluation h;
  DisplacementInstance instance;
};

struct LayeredFamilyOptions {
  double constant_class_probability = 0.5;
  double diagonal_constant_probability = 0.25;
  // Chance that a small diagonal displacement is chosen to cancel a subset
  // of the negative values.
  double cancel_probability = 0.5;
};

// Regressively regular instances for any p: each order type of E^k is
// either wired to its own low filler vertex (constant class, value below
// e_0) or left edgeless (h = rho >= min). The selection rule is min over
// single-member committees. Regularity is verified, not assumed.
inline GeneratedInstance layered_regular_instance(std::size_t k, std::size_t p, std::size_t t, std::uint64_t seed,
                                                  const LayeredFamilyOptions& opts = {}) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coin(0.0, 1.0);

  std::vector<Coord> ev;
  Coord c = 2 + static_cast<Coord>(rng() % 5);
  for (std::size_t i = 0; i < p; ++i) {
    ev.push_back(c);
    c += 1 + static_cast<Coord>(rng() % 4);
  }
  GeneratedInstance out;
  out.e = CoordSet(ev);
  out.k = k;
  const Coord e0 = out.e.front();

  const Domain base = cube(out.e, k);
  const OrderSignature diagonal_type = order_signature(diagonal_point(e0, k));
  std::map<OrderSignature, Value> constant;  // class -> value below e_0
  for (const auto& x : base) {
    const OrderSignature type = order_signature(x);
    if (constant.count(type)) continue;
    const double prob = type == diagonal_type ? opts.diagonal_constant_probability : opts.constant_class_probability;
    if (coin(rng) < prob) constant[type] = static_cast<Value>(rng() % static_cast<std::uint64_t>(e0));
    else constant[type] = -1;
  }

  std::vector<Point> points(base.begin(), base.end());
  std::vector<Edge> edges;
  for (const auto& x : base) {
    const Value v = constant[order_signature(x)];
    if (v < 0) continue;
    const Point filler = diagonal_point(v, k);
    points.push_back(filler);
    edges.emplace_back(x, filler);
  }
  out.graph = DownwardGraph(Domain(k, points), edges);

  // Negative magnitudes available for cancellation.
  std::vector<Value> magnitudes;
  for (const auto& [type, v] : constant) {
    if (v >= 0) magnitudes.push_back(e0 - v);
  }
  std::sort(magnitudes.begin(), magnitudes.end());
  magnitudes.erase(std::unique(magnitudes.begin(), magnitudes.end()), magnitudes.end());

  const Value threshold = small_threshold(out.e, k);
  const std::size_t budget = log_budget(p, t);
  const std::size_t small_count = budget == 0 ? 0 : static_cast<std::size_t>(rng() % (budget + 1));
  std::vector<Value> small;
  for (std::size_t i = 0; i < small_count; ++i) {
    Value a = 1 + static_cast<Value>(rng() % static_cast<std::uint64_t>(threshold - 1));
    if (!magnitudes.empty() && coin(rng) < opts.cancel_probability) {
      a = 0;
      for (Value m : magnitudes) {
        if (rng() % 2) a += m;
      }
      if (a == 0) a = magnitudes[rng() % magnitudes.size()];
    }
    small.push_back(a);
  }
  std::map<Point, Value> overrides;
  const auto diag_values = log_bounded_diag(out.e, k, small, rng);
  for (std::size_t j = 0; j < p; ++j) overrides[diagonal_point(out.e[j], k)] = diag_values[j];
  out.rho = RhoFamily::table(std::move(overrides));

  out.h = eval_h_rho(out.graph, out.rule, out.spec, out.rho);
  out.instance = build_instance(out.h, out.e, k, t, out.rho);
  return out;
}

struct RandomFamilyOptions {
  std::size_t k = 2;
  std::size_t p_min = 2;
  std::size_t p_max = 3;
  Coord e_max = 7;
  std::size_t max_filler = 4;
  double density = 0.6;
  std::size_t attempts = 200;
};

// Random ambient graph, random selection rule, random filler below max(E),
// log-bounded rho on the diagonal; retried until h-rho is regressively
// regular over E. Returns nothing if no attempt succeeds.
inline std::optional<GeneratedInstance> random_regular_instance(std::uint64_t seed, std::size_t t,
                                                                const RandomFamilyOptions& opts = {}) {
  std::mt19937_64 rng(seed);
  for (std::size_t attempt = 0; attempt < opts.attempts; ++attempt) {
    const std::size_t k = opts.k;
    const std::size_t p = opts.p_min + static_cast<std::size_t>(rng() % (opts.p_max - opts.p_min + 1));
    std::vector<Coord> ev;
    while (ev.size() < p) {
      const Coord v = 1 + static_cast<Coord>(rng() % static_cast<std::uint64_t>(opts.e_max));
      if (std::find(ev.begin(), ev.end(), v) == ev.end()) ev.push_back(v);
    }
    const CoordSet e(ev);
    const Domain base = cube(e, k);
    std::vector<Point> points(base.begin(), base.end());
    const std::size_t filler = static_cast<std::size_t>(rng() % (opts.max_filler + 1));
    for (std::size_t i = 0; i < filler; ++i) {
      std::vector<Coord> coords(k);
      for (auto& x : coords) x = static_cast<Coord>(rng() % static_cast<std::uint64_t>(e.back()));
      points.emplace_back(coords);
    }
    const Domain d(k, points);
    const DownwardGraph g = gen_random_downward(k, d, opts.density, rng());

    const std::size_t r = 1 + static_cast<std::size_t>(rng() % 2);
    SelectionRule rule = SelectionRule::min_rule(r);
    switch (rng() % 3) {
      case 0: rule = SelectionRule::min_rule(r); break;
      case 1: rule = SelectionRule::max_rule(r); break;
      default: rule = SelectionRule::index_rule(r, rng(), 0.3); break;
    }
    const auto spec = CommitteeSpec::exhaustive(r);

    std::map<Point, Value> overrides;
    const std::size_t budget = log_budget(p, t);
    std::vector<Value> small;
    const Value threshold = small_threshold(e, k);
    const std::size_t small_count = static_cast<std::size_t>(rng() % (budget + 1));
    for (std::size_t i = 0; i < small_count; ++i) {
      small.push_back(1 + static_cast<Value>(rng() % static_cast<std::uint64_t>(std::max<Value>(1, threshold - 1))));
    }
    const auto diag_values = log_bounded_diag(e, k, small, rng);
    for (std::size_t j = 0; j < p; ++j) overrides[diagonal_point(e[j], k)] = diag_values[j];
    for (const auto& x : d) {
      if (!overrides.count(x) && rng() % 4 == 0) overrides[x] = min_coord(x) + static_cast<Value>(rng() % 3);
    }
    RhoFamily rho = RhoFamily::table(std::move(overrides));

    Evaluation h = eval_h_rho(g, rule, spec, rho);
    if (!check_regressive_regular(h, e, k).regular) continue;
    GeneratedInstance out;
    out.e = e;
    out.k = k;
    out.graph = g;
    out.rule = rule;
    out.spec = spec;
    out.rho = rho;
    out.h = std::move(h);
    out.instance = build_instance(out.h, e, k, t, out.rho);
    return out;
  }
  return std::nullopt;
}

}  // namespace rrlab
