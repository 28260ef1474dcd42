#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rrlab/detail/hash.hpp"
#include "rrlab/error.hpp"
#include "rrlab/graph.hpp"
#include "rrlab/lattice.hpp"

namespace rrlab {

struct LabeledMember {
  Point point;
  Value label = 0;

  friend auto operator<=>(const LabeledMember&, const LabeledMember&) = default;
  friend bool operator==(const LabeledMember&, const LabeledMember&) = default;
};

using Committee = std::vector<Point>;

inline std::string describe_committee(const Point& z, std::span<const LabeledMember> labeled) {
  std::string out = "F[" + z.to_string();
  for (const auto& m : labeled) out += ", (" + m.point.to_string() + "," + std::to_string(m.label) + ")";
  return out + "]";
}

// Explicit input -> output map; undefined off the table.
class TableRule {
 public:
  struct Key {
    Point z;
    std::vector<LabeledMember> committee;
    friend auto operator<=>(const Key&, const Key&) = default;
    friend bool operator==(const Key&, const Key&) = default;
  };

  explicit TableRule(std::size_t arity) : arity_(arity) {
    if (arity == 0) throw ValidationError("selection arity must be at least 1");
  }

  std::size_t arity() const { return arity_; }
  const std::map<Key, Value>& entries() const { return entries_; }

  void add(const Point& z, std::vector<LabeledMember> committee, Value value) {
    if (committee.size() != arity_) {
      throw ValidationError("table entry at " + z.to_string() + " has " + std::to_string(committee.size()) +
                            " slots, rule arity is " + std::to_string(arity_));
    }
    Key key{z, std::move(committee)};
    auto [it, inserted] = entries_.emplace(std::move(key), value);
    if (!inserted && it->second != value) {
      throw ValidationError("conflicting table entries for " + describe_committee(z, it->first.committee));
    }
  }

  std::optional<Value> lookup(const Point& z, std::span<const LabeledMember> labeled) const {
    Key key{z, std::vector<LabeledMember>(labeled.begin(), labeled.end())};
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
  }

 private:
  std::size_t arity_;
  std::map<Key, Value> entries_;
};

// A deterministic partial selection function of fixed arity. The wrapped
// callable must be pure; apply_selection enforces the selection contract.
class SelectionRule {
 public:
  using Fn = std::function<std::optional<Value>(const Point&, std::span<const LabeledMember>)>;

  SelectionRule(std::string name, std::size_t arity, Fn fn) : name_(std::move(name)), arity_(arity), fn_(std::move(fn)) {
    if (arity_ == 0) throw ValidationError("selection arity must be at least 1");
  }

  static SelectionRule min_rule(std::size_t r) {
    return SelectionRule("min", r, [](const Point&, std::span<const LabeledMember> m) -> std::optional<Value> {
      return std::min_element(m.begin(), m.end(), [](auto& a, auto& b) { return a.label < b.label; })->label;
    });
  }

  static SelectionRule max_rule(std::size_t r) {
    return SelectionRule("max", r, [](const Point&, std::span<const LabeledMember> m) -> std::optional<Value> {
      return std::max_element(m.begin(), m.end(), [](auto& a, auto& b) { return a.label < b.label; })->label;
    });
  }

  // Hashes (z, committee points) to either "undefined" (with probability
  // undefined_probability) or a slot index. Labels do not enter the hash.
  static SelectionRule index_rule(std::size_t r, std::uint64_t seed, double undefined_probability = 0.25) {
    return SelectionRule(
        "index(" + std::to_string(seed) + ")", r,
        [r, seed, undefined_probability](const Point& z, std::span<const LabeledMember> m) -> std::optional<Value> {
          std::uint64_t h = detail::splitmix64(seed ^ 0x5e1ec7ULL);
          for (Coord c : z.coords()) h = detail::hash_combine(h, static_cast<std::uint64_t>(c));
          for (const auto& member : m) {
            h = detail::hash_combine(h, 0xc0ffeeULL);
            for (Coord c : member.point.coords()) h = detail::hash_combine(h, static_cast<std::uint64_t>(c));
          }
          if (detail::bernoulli(h, undefined_probability)) return std::nullopt;
          return m[detail::splitmix64(h) % r].label;
        });
  }

  static SelectionRule undefined(std::size_t r) {
    return SelectionRule("undefined", r,
                         [](const Point&, std::span<const LabeledMember>) -> std::optional<Value> { return std::nullopt; });
  }

  static SelectionRule table(TableRule t) {
    const std::size_t r = t.arity();
    auto shared = std::make_shared<const TableRule>(std::move(t));
    return SelectionRule("table", r, [shared](const Point& z, std::span<const LabeledMember> m) {
      return shared->lookup(z, m);
    });
  }

  const std::string& name() const { return name_; }
  std::size_t arity() const { return arity_; }

  std::optional<Value> raw(const Point& z, std::span<const LabeledMember> labeled) const { return fn_(z, labeled); }

 private:
  std::string name_;
  std::size_t arity_;
  Fn fn_;
};

inline std::optional<Value> apply_selection(const SelectionRule& rule, const Point& z,
                                            std::span<const LabeledMember> labeled) {
  if (labeled.size() != rule.arity()) {
    throw ValidationError("committee at " + z.to_string() + " has " + std::to_string(labeled.size()) +
                          " slots, rule '" + rule.name() + "' has arity " + std::to_string(rule.arity()));
  }
  auto out = rule.raw(z, labeled);
  if (out) {
    const bool selects = std::any_of(labeled.begin(), labeled.end(), [&](const auto& m) { return m.label == *out; });
    if (!selects) {
      throw ContractViolation("selection rule '" + rule.name() + "' returned " + std::to_string(*out) +
                              ", which is not a committee label: " + describe_committee(z, labeled));
    }
  }
  return out;
}

// Repeats the last member until the committee has r slots.
inline Committee pad_committee(std::span<const Point> members, std::size_t r) {
  if (members.empty()) throw ValidationError("cannot pad an empty committee");
  if (members.size() > r) {
    throw ValidationError("committee of " + std::to_string(members.size()) + " members exceeds arity " +
                          std::to_string(r));
  }
  Committee out(members.begin(), members.end());
  out.resize(r, members.back());
  return out;
}

// Which r-tuples of out-neighbours feed the selection rule at each vertex.
class CommitteeSpec {
 public:
  static constexpr std::size_t kDefaultCap = 100000;

  // All ordered r-tuples, with repetition, over the out-neighbourhood.
  static CommitteeSpec exhaustive(std::size_t r, std::size_t cap = kDefaultCap) {
    CommitteeSpec s(r);
    s.exhaustive_ = true;
    s.cap_ = cap;
    return s;
  }

  // Declared committees per vertex; tuples shorter than r are padded.
  static CommitteeSpec declared(std::size_t r, std::map<Point, std::vector<Committee>> committees) {
    CommitteeSpec s(r);
    for (auto& [z, list] : committees) {
      for (auto& c : list) c = pad_committee(c, r);
    }
    s.declared_ = std::move(committees);
    return s;
  }

  std::size_t arity() const { return arity_; }
  bool is_exhaustive() const { return exhaustive_; }
  std::size_t cap() const { return cap_; }
  const std::map<Point, std::vector<Committee>>& declared_committees() const { return declared_; }

  // Declared committees whose members are all out-neighbours in g. Used when
  // evaluating on an induced subgraph of the graph the committees were
  // declared for.
  CommitteeSpec restricted_to(const DownwardGraph& g) const {
    if (exhaustive_) return *this;
    std::map<Point, std::vector<Committee>> kept;
    for (const auto& [z, list] : declared_) {
      auto zi = g.domain().index_of(z);
      if (!zi) continue;
      auto adj = g.out_indices(*zi);
      for (const auto& c : list) {
        const bool inside = std::all_of(c.begin(), c.end(), [&](const Point& y) {
          auto yi = g.domain().index_of(y);
          return yi && std::binary_search(adj.begin(), adj.end(), *yi);
        });
        if (inside) kept[z].push_back(c);
      }
    }
    CommitteeSpec s(arity_);
    s.declared_ = std::move(kept);
    return s;
  }

 private:
  explicit CommitteeSpec(std::size_t r) : arity_(r) {
    if (r == 0) throw ValidationError("committee arity must be at least 1");
  }

  std::size_t arity_;
  bool exhaustive_ = false;
  std::size_t cap_ = kDefaultCap;
  std::map<Point, std::vector<Committee>> declared_;
};

// Calls fn(span of member vertex indices) for every committee of vertex zi,
// in a fixed order (declaration order, or odometer order over ascending
// out-neighbours).
template <typename Fn>
void for_each_committee(const DownwardGraph& g, std::size_t zi, const CommitteeSpec& spec, Fn&& fn) {
  const std::size_t r = spec.arity();
  auto adj = g.out_indices(zi);
  std::vector<std::size_t> members(r);
  if (spec.is_exhaustive()) {
    if (adj.empty()) return;
    std::size_t total = 1;
    for (std::size_t i = 0; i < r; ++i) {
      if (total > spec.cap() / adj.size()) {
        throw CapExceeded("vertex " + g.domain()[zi].to_string() + " has " + std::to_string(adj.size()) +
                          " neighbours; " + std::to_string(adj.size()) + "^" + std::to_string(r) +
                          " committees exceed the cap of " + std::to_string(spec.cap()));
      }
      total *= adj.size();
    }
    std::vector<std::size_t> odo(r, 0);
    while (true) {
      for (std::size_t i = 0; i < r; ++i) members[i] = adj[odo[i]];
      fn(std::span<const std::size_t>(members));
      std::size_t pos = r;
      while (pos > 0) {
        --pos;
        if (++odo[pos] < adj.size()) break;
        odo[pos] = 0;
        if (pos == 0) return;
      }
    }
  }
  const Point& z = g.domain()[zi];
  auto it = spec.declared_committees().find(z);
  if (it == spec.declared_committees().end()) return;
  for (const auto& c : it->second) {
    for (std::size_t i = 0; i < r; ++i) {
      auto yi = g.domain().index_of(c[i]);
      if (!yi || !std::binary_search(adj.begin(), adj.end(), *yi)) {
        throw ValidationError("committee member " + c[i].to_string() + " is not adjacent to " + z.to_string());
      }
      members[i] = *yi;
    }
    fn(std::span<const std::size_t>(members));
  }
}

inline std::vector<Committee> committees(const DownwardGraph& g, const Point& z, const CommitteeSpec& spec) {
  auto zi = g.domain().index_of(z);
  if (!zi) throw ValidationError("vertex " + z.to_string() + " not in graph");
  std::vector<Committee> out;
  for_each_committee(g, *zi, spec, [&](std::span<const std::size_t> members) {
    Committee c;
    for (std::size_t m : members) c.push_back(g.domain()[m]);
    out.push_back(std::move(c));
  });
  return out;
}

}  // namespace rrlab
