#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rrlab/error.hpp"
#include "rrlab/graph.hpp"
#include "rrlab/lattice.hpp"
#include "rrlab/parallel.hpp"
#include "rrlab/selection.hpp"

namespace rrlab {

class RhoViolation : public ContractViolation {
 public:
  using ContractViolation::ContractViolation;
};

// Base values for vertices with no defined committee output: a family
// D -> rho_D with rho_D(x) >= min(x). Values may lie outside field(D).
class RhoFamily {
 public:
  using Fn = std::function<Value(const Domain&, const Point&)>;

  RhoFamily(std::string name, Fn fn) : name_(std::move(name)), fn_(std::move(fn)) {}

  static RhoFamily min() {
    return RhoFamily("min", [](const Domain&, const Point& x) { return min_coord(x); });
  }

  static RhoFamily offset(Value c) {
    return RhoFamily("offset:" + std::to_string(c), [c](const Domain&, const Point& x) { return min_coord(x) + c; });
  }

  // Explicit per-point values; points not listed fall back to min(x).
  static RhoFamily table(std::map<Point, Value> overrides) {
    auto shared = std::make_shared<const std::map<Point, Value>>(std::move(overrides));
    return RhoFamily("table", [shared](const Domain&, const Point& x) {
      auto it = shared->find(x);
      return it == shared->end() ? min_coord(x) : it->second;
    });
  }

  const std::string& name() const { return name_; }

  Value operator()(const Domain& d, const Point& x) const { return fn_(d, x); }

  Value checked(const Domain& d, const Point& x) const {
    const Value v = fn_(d, x);
    if (v < min_coord(x)) {
      throw RhoViolation("rho '" + name_ + "' gives " + std::to_string(v) + " at " + x.to_string() +
                         ", below min " + std::to_string(min_coord(x)));
    }
    return v;
  }

 private:
  std::string name_;
  Fn fn_;
};

enum class EvalKind { SHat, HRho };

inline const char* to_string(EvalKind k) { return k == EvalKind::SHat ? "shat" : "hrho"; }

struct VertexResult {
  Value value = 0;
  bool phi_empty = true;
  friend bool operator==(const VertexResult&, const VertexResult&) = default;
};

// Value map of s-hat or h-rho over a domain, with per-vertex flags telling
// whether the defined-output set was empty there.
class Evaluation {
 public:
  Evaluation() = default;
  Evaluation(EvalKind kind, Domain domain, std::vector<VertexResult> results)
      : kind_(kind), domain_(std::move(domain)), results_(std::move(results)) {
    if (results_.size() != domain_.size()) throw ValidationError("evaluation size does not match its domain");
  }

  EvalKind kind() const { return kind_; }
  const Domain& domain() const { return domain_; }
  const std::vector<VertexResult>& results() const { return results_; }

  const VertexResult& at(const Point& p) const {
    auto i = domain_.index_of(p);
    if (!i) throw ValidationError("point " + p.to_string() + " is not in the evaluated domain");
    return results_[*i];
  }
  Value value(const Point& p) const { return at(p).value; }
  bool phi_empty(const Point& p) const { return at(p).phi_empty; }

  // What this vertex reports upward as a committee member.
  Value label(const Point& p) const {
    const auto& r = at(p);
    return r.phi_empty ? min_coord(p) : r.value;
  }

  Evaluation restricted(const Domain& sub) const {
    std::vector<VertexResult> out;
    out.reserve(sub.size());
    for (const auto& p : sub) out.push_back(at(p));
    return Evaluation(kind_, sub, std::move(out));
  }

  friend bool operator==(const Evaluation&, const Evaluation&) = default;

 private:
  EvalKind kind_ = EvalKind::SHat;
  Domain domain_;
  std::vector<VertexResult> results_;
};

struct EvalOptions {
  unsigned threads = 1;
  // Layers smaller than this run sequentially even when threads > 1.
  std::size_t parallel_layer_min = 256;
};

namespace detail {

// Defined selection outputs at vertex zi. Reads only vertices flagged in
// `ready`; a read of anything else means the layer order was broken.
inline std::set<Value> phi_at(const DownwardGraph& g, const SelectionRule& rule, const CommitteeSpec& spec,
                              std::size_t zi, const std::vector<VertexResult>& results,
                              const std::vector<char>& ready) {
  std::set<Value> out;
  const Point& z = g.domain()[zi];
  const Coord znorm = max_norm(z);
  std::vector<LabeledMember> labeled(spec.arity());
  for_each_committee(g, zi, spec, [&](std::span<const std::size_t> members) {
    for (std::size_t i = 0; i < members.size(); ++i) {
      const std::size_t yi = members[i];
      const Point& y = g.domain()[yi];
      if (!ready[yi] || max_norm(y) >= znorm) {
        throw std::logic_error("evaluation read " + y.to_string() + " before it was final while computing " +
                               z.to_string());
      }
      labeled[i].point = y;
      labeled[i].label = results[yi].phi_empty ? min_coord(y) : results[yi].value;
    }
    if (auto v = apply_selection(rule, z, labeled)) out.insert(*v);
  });
  return out;
}

inline Evaluation evaluate(const DownwardGraph& g, const SelectionRule& rule, const CommitteeSpec& spec,
                           EvalKind kind, const RhoFamily* rho, const EvalOptions& opts) {
  require_downward(g);
  if (rule.arity() != spec.arity()) {
    throw ValidationError("selection rule arity " + std::to_string(rule.arity()) + " does not match committee arity " +
                          std::to_string(spec.arity()));
  }
  const Domain& d = g.domain();
  std::vector<VertexResult> results(d.size());
  std::vector<char> ready(d.size(), 0);
  if (d.empty()) return Evaluation(kind, d, std::move(results));

  for (const auto& layer : layers(d)) {
    std::vector<std::size_t> idx;
    idx.reserve(layer.points.size());
    for (const auto& p : layer.points) idx.push_back(*d.index_of(p));
    const unsigned threads = idx.size() >= opts.parallel_layer_min ? opts.threads : 1u;
    parallel_for(idx.size(), threads, [&](std::size_t n) {
      const std::size_t zi = idx[n];
      const Point& z = d[zi];
      auto phi = phi_at(g, rule, spec, zi, results, ready);
      VertexResult r;
      r.phi_empty = phi.empty();
      if (r.phi_empty) {
        r.value = kind == EvalKind::SHat ? max_norm(z) : rho->checked(d, z);
      } else {
        r.value = *phi.begin();
      }
      results[zi] = r;
    });
    for (std::size_t zi : idx) ready[zi] = 1;
  }
  return Evaluation(kind, d, std::move(results));
}

}  // namespace detail

// Defined outputs at z given an evaluation that already covers every
// out-neighbour of z.
inline std::set<Value> phi_set(const DownwardGraph& g, const SelectionRule& rule, const CommitteeSpec& spec,
                               const Point& z, const Evaluation& lower) {
  auto zi = g.domain().index_of(z);
  if (!zi) throw ValidationError("vertex " + z.to_string() + " not in graph");
  std::vector<VertexResult> results(g.size());
  std::vector<char> ready(g.size(), 0);
  for (std::size_t j : g.out_indices(*zi)) {
    const Point& y = g.domain()[j];
    if (!lower.domain().contains(y)) {
      throw ValidationError("neighbour " + y.to_string() + " of " + z.to_string() + " has not been evaluated");
    }
    results[j] = lower.at(y);
    ready[j] = 1;
  }
  return detail::phi_at(g, rule, spec, *zi, results, ready);
}

inline Evaluation eval_s_hat(const DownwardGraph& g, const SelectionRule& rule, const CommitteeSpec& spec,
                             const EvalOptions& opts = {}) {
  return detail::evaluate(g, rule, spec, EvalKind::SHat, nullptr, opts);
}

inline Evaluation eval_h_rho(const DownwardGraph& g, const SelectionRule& rule, const CommitteeSpec& spec,
                             const RhoFamily& rho, const EvalOptions& opts = {}) {
  return detail::evaluate(g, rule, spec, EvalKind::HRho, &rho, opts);
}

struct Mismatch {
  Point point;
  std::string reason;
};

struct ComparisonReport {
  std::size_t checked = 0;
  std::vector<Mismatch> mismatches;
  bool ok() const { return mismatches.empty(); }
};

// Pointwise check that h-rho and s-hat agree (and lie below max) where the
// output set is nonempty, and fall back to rho / max where it is empty.
inline ComparisonReport compare_evaluations(const Evaluation& s_hat, const Evaluation& h_rho, const RhoFamily& rho) {
  if (s_hat.kind() != EvalKind::SHat || h_rho.kind() != EvalKind::HRho) {
    throw ValidationError("compare_evaluations expects an s-hat and an h-rho evaluation");
  }
  if (!(s_hat.domain() == h_rho.domain())) throw ValidationError("evaluations are over different domains");
  ComparisonReport report;
  const Domain& d = s_hat.domain();
  for (std::size_t i = 0; i < d.size(); ++i) {
    const Point& z = d[i];
    const auto& a = s_hat.results()[i];
    const auto& b = h_rho.results()[i];
    ++report.checked;
    auto fail = [&](std::string why) { report.mismatches.push_back({z, std::move(why)}); };
    if (a.phi_empty != b.phi_empty) {
      fail("output-set emptiness differs");
    } else if (!a.phi_empty) {
      if (a.value != b.value) fail("values differ: " + std::to_string(a.value) + " vs " + std::to_string(b.value));
      else if (a.value >= max_norm(z)) fail("s-hat value " + std::to_string(a.value) + " is not below max");
    } else {
      if (a.value != max_norm(z)) fail("s-hat base value is not max(z)");
      const Value expect = rho(d, z);
      if (b.value != expect) fail("h-rho base value " + std::to_string(b.value) + " != rho " + std::to_string(expect));
    }
  }
  return report;
}

struct JumpFreeResult {
  bool holds = true;
  bool premise_held = false;
  Value s_a = 0;
  Value s_b = 0;
  std::string premise_failure;
};

// Evaluates s-hat on A and B and, when x is shared, A_x is inside B_x, both
// graphs carry the same edges on A_x and x, and the two functions agree on
// A_x, reports whether s_A(x) >= s_B(x). Declared committees are restricted
// to each graph.
inline JumpFreeResult check_jump_free_pair(const DownwardGraph& ga, const DownwardGraph& gb, const SelectionRule& rule,
                                           const CommitteeSpec& spec, const Point& x) {
  JumpFreeResult out;
  auto premise_fails = [&](std::string why) {
    out.premise_held = false;
    out.holds = true;
    out.premise_failure = std::move(why);
    return out;
  };
  if (!ga.domain().contains(x) || !gb.domain().contains(x)) return premise_fails("x is not in both domains");
  const Coord xnorm = max_norm(x);
  Domain ax = ga.domain().filter([&](const Point& p) { return max_norm(p) < xnorm; });
  Domain bx = gb.domain().filter([&](const Point& p) { return max_norm(p) < xnorm; });
  if (!ax.is_subset_of(bx)) return premise_fails("A_x is not contained in B_x");

  std::vector<Point> shared(ax.begin(), ax.end());
  shared.push_back(x);
  for (const auto& u : shared) {
    for (const auto& v : shared) {
      if (ga.has_edge(u, v) != gb.has_edge(u, v)) {
        return premise_fails("edge " + u.to_string() + " -> " + v.to_string() + " differs between A and B");
      }
    }
  }

  const Evaluation ea = eval_s_hat(ga, rule, spec.restricted_to(ga));
  const Evaluation eb = eval_s_hat(gb, rule, spec.restricted_to(gb));
  for (const auto& y : ax) {
    if (ea.value(y) != eb.value(y)) return premise_fails("s_A and s_B differ at " + y.to_string());
  }
  out.premise_held = true;
  out.s_a = ea.value(x);
  out.s_b = eb.value(x);
  out.holds = out.s_a >= out.s_b;
  return out;
}

}  // namespace rrlab
