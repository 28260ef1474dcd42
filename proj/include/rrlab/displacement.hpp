#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "rrlab/error.hpp"
#include "rrlab/evaluator.hpp"
#include "rrlab/lattice.hpp"
#include "rrlab/regularity.hpp"

namespace rrlab {

class LogBoundError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Closest element of E to n, ties going to the larger element.
inline Value gamma(const CoordSet& e, Value n) {
  if (e.empty()) throw ValidationError("gamma over an empty set");
  auto it = std::lower_bound(e.begin(), e.end(), n);
  if (it == e.end()) return e.back();
  if (it == e.begin() || *it == n) return *it;
  const Value above = *it;
  const Value below = *(it - 1);
  return (n - below < above - n) ? below : above;
}

inline Value delta(const CoordSet& e, Value n) { return n - gamma(e, n); }

namespace detail {

inline Value checked_mul(Value a, Value b) {
  Value out = 0;
  if (__builtin_mul_overflow(a, b, &out)) throw ValidationError("integer overflow in displacement bound");
  return out;
}

inline Value power(Value base, std::size_t exp) {
  Value out = 1;
  for (std::size_t i = 0; i < exp; ++i) out = checked_mul(out, base);
  return out;
}

}  // namespace detail

// e_0 * k^k: diagonal displacements below this are "small".
inline Value small_threshold(const CoordSet& e, std::size_t k) {
  return detail::checked_mul(e.front(), detail::power(static_cast<Value>(k), k));
}

// 2^count <= p^t, i.e. count <= t log2(p), compared exactly.
inline bool within_log_budget(std::size_t count, std::size_t p, std::size_t t) {
  using boost::multiprecision::cpp_int;
  return (cpp_int(1) << count) <= boost::multiprecision::pow(cpp_int(p), static_cast<unsigned>(t));
}

struct LowerSets {
  Domain lower;        // f(x) < min(x)
  Domain below_floor;  // f(x) < min(E)
};

inline LowerSets lower_sets(const Evaluation& e, const CoordSet& set, std::size_t k) {
  const Domain c = cube(set, k);
  if (!c.is_subset_of(e.domain())) throw ValidationError("E^k is not contained in the evaluated domain");
  const Coord floor = set.front();
  return {c.filter([&](const Point& x) { return e.value(x) < min_coord(x); }),
          c.filter([&](const Point& x) { return e.value(x) < floor; })};
}

struct LogBoundReport {
  bool ok = false;
  bool all_positive = false;
  Value threshold = 0;
  std::vector<Value> displacements;  // delta_E(rho(e_j)), j = 0..p-1
  std::size_t small_count = 0;       // indices j with a positive displacement below the threshold
  std::size_t small_distinct = 0;    // distinct such values
};

// The bound counts indices j rather than distinct values; the distinct
// count is reported alongside.
inline LogBoundReport is_log_bounded(std::span<const Value> rho_on_diag, const CoordSet& set, std::size_t k,
                                     std::size_t t) {
  if (set.size() < 2) throw ValidationError("log bound needs p >= 2");
  if (t < 1) throw ValidationError("log bound needs t >= 1");
  if (rho_on_diag.size() != set.size()) throw ValidationError("need one rho value per diagonal point");
  LogBoundReport out;
  out.threshold = small_threshold(set, k);
  out.all_positive = true;
  std::vector<Value> small;
  for (Value v : rho_on_diag) {
    const Value d = delta(set, v);
    out.displacements.push_back(d);
    if (d <= 0) out.all_positive = false;
    if (d > 0 && d < out.threshold) small.push_back(d);
  }
  out.small_count = small.size();
  std::sort(small.begin(), small.end());
  out.small_distinct = static_cast<std::size_t>(std::unique(small.begin(), small.end()) - small.begin());
  out.ok = out.all_positive && within_log_budget(out.small_count, set.size(), t);
  return out;
}

struct Provenance {
  enum class Kind { Lower, Diag };
  Kind kind = Kind::Lower;
  Point point;             // Lower
  std::size_t index = 0;   // Diag

  static Provenance lower(const Point& x) { return {Kind::Lower, x, 0}; }
  static Provenance diagonal(std::size_t j) { return {Kind::Diag, Point{}, j}; }

  std::string key() const {
    if (kind == Kind::Diag) return "diag:" + std::to_string(index);
    std::string out = "lower:[";
    for (std::size_t i = 0; i < point.dimension(); ++i) {
      if (i) out += ',';
      out += std::to_string(point[i]);
    }
    return out + "]";
  }

  friend auto operator<=>(const Provenance&, const Provenance&) = default;
  friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct InstanceElement {
  Value value = 0;
  std::vector<Provenance> from;  // sorted; from.front() is the element's key
  const Provenance& primary() const { return from.front(); }
};

struct InstanceFlags {
  bool regressively_regular = false;
  bool diag_in_lower = false;   // diag(E^k) inside E_L
  bool diag_equals_rho = false; // h = rho pointwise on diag(E^k)
};

// Set of displacements of h over E^k_l and diag(E^k), as a subset-sum
// input. Elements are unique by value and ordered by primary provenance.
struct DisplacementInstance {
  CoordSet e;
  std::size_t k = 2;
  std::size_t t = 1;
  std::vector<InstanceElement> elements;
  std::vector<Value> rho_diag;
  InstanceFlags flags;
  LogBoundReport log_bound;

  std::size_t p() const { return e.size(); }

  std::vector<Value> values() const {
    std::vector<Value> out;
    for (const auto& el : elements) out.push_back(el.value);
    return out;
  }
};

// Merges (value, provenance) pairs into set semantics, keeping every
// provenance of a shared value.
inline std::vector<InstanceElement> merge_elements(std::vector<std::pair<Value, Provenance>> raw) {
  std::map<Value, std::vector<Provenance>> by_value;
  for (auto& [v, prov] : raw) by_value[v].push_back(std::move(prov));
  std::vector<InstanceElement> out;
  for (auto& [v, provs] : by_value) {
    std::sort(provs.begin(), provs.end());
    provs.erase(std::unique(provs.begin(), provs.end()), provs.end());
    out.push_back({v, std::move(provs)});
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.primary() < b.primary(); });
  return out;
}

struct BuildOptions {
  bool require_log_bound = true;
};

inline DisplacementInstance build_instance(const Evaluation& h, const CoordSet& set, std::size_t k, std::size_t t,
                                           const RhoFamily& rho, const BuildOptions& opts = {}) {
  if (h.kind() != EvalKind::HRho) throw ValidationError("instances are built from h-rho evaluations");
  if (h.domain().dimension() != k) throw DimensionError("build_instance: dimension mismatch");
  if (!is_capped(h.domain(), set)) throw ValidationError("domain is not capped by E^k");

  DisplacementInstance inst;
  inst.e = set;
  inst.k = k;
  inst.t = t;
  const Domain dg = diag(set, k);
  for (const auto& x : dg) inst.rho_diag.push_back(rho.checked(h.domain(), x));
  inst.log_bound = is_log_bounded(inst.rho_diag, set, k, t);
  if (opts.require_log_bound && !inst.log_bound.ok) {
    throw LogBoundError("rho is not " + std::to_string(t) + "-log bounded over E: " +
                        (inst.log_bound.all_positive ? std::to_string(inst.log_bound.small_count) +
                                                           " small diagonal displacements"
                                                     : std::string("a diagonal displacement is not positive")));
  }

  const RegularityVerdict verdict = check_regressive_regular(h, set, k);
  const LowerSets ls = lower_sets(h, set, k);

  std::vector<std::pair<Value, Provenance>> raw;
  for (const auto& x : ls.lower) raw.emplace_back(delta(set, h.value(x)), Provenance::lower(x));
  for (std::size_t j = 0; j < dg.size(); ++j) raw.emplace_back(delta(set, h.value(dg[j])), Provenance::diagonal(j));
  inst.elements = merge_elements(std::move(raw));

  inst.flags.regressively_regular = verdict.regular;
  inst.flags.diag_in_lower = std::all_of(dg.begin(), dg.end(), [&](const Point& x) { return ls.below_floor.contains(x); });
  bool equals = true;
  for (std::size_t j = 0; j < dg.size(); ++j) equals = equals && h.value(dg[j]) == inst.rho_diag[j];
  inst.flags.diag_equals_rho = equals;
  if (verdict.regular && inst.flags.diag_in_lower == inst.flags.diag_equals_rho) {
    throw std::logic_error("diagonal dichotomy broken on a regular evaluation");
  }
  return inst;
}

// Negative mass of the lower-set values against the e_0 k^k budget.
struct MassReport {
  Value floor = 0;            // e_0
  Value bound = 0;            // e_0 k^k
  Value total = 0;            // sum of |v| over distinct lower-set values
  Value largest = 0;          // max |v|
  std::size_t values = 0;     // distinct lower-set values
  bool sum_below_bound = true;
  bool each_below_floor = true;  // every |v| < e_0
};

inline MassReport lower_mass(const DisplacementInstance& inst) {
  MassReport out;
  out.floor = inst.e.front();
  out.bound = small_threshold(inst.e, inst.k);
  for (const auto& el : inst.elements) {
    const bool from_lower = std::any_of(el.from.begin(), el.from.end(),
                                        [](const Provenance& p) { return p.kind == Provenance::Kind::Lower; });
    if (!from_lower) continue;
    const Value mag = el.value < 0 ? -el.value : el.value;
    ++out.values;
    out.total += mag;
    out.largest = std::max(out.largest, mag);
    if (mag >= out.floor) out.each_below_floor = false;
  }
  out.sum_below_bound = out.total < out.bound;
  return out;
}

}  // namespace rrlab
