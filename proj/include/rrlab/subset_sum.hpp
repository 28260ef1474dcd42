#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "rrlab/displacement.hpp"
#include "rrlab/error.hpp"
#include "rrlab/lattice.hpp"

namespace rrlab {

class PreconditionError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// A nonempty zero-sum choice of distinct instance values.
struct Witness {
  std::vector<Value> values;
};

inline constexpr std::size_t kBruteCap = 25;

struct SolveStats {
  std::uint64_t subsets_explored = 0;
  std::size_t neg = 0;
  std::size_t small = 0;
  std::size_t big = 0;
};

struct SolveResult {
  std::optional<Witness> witness;
  std::vector<std::string> keys;  // primary provenance keys of the chosen elements
  SolveStats stats;
  bool solvable() const { return witness.has_value(); }
};

inline bool verify_witness(std::span<const Value> set, const Witness& w) {
  if (w.values.empty()) return false;
  std::vector<Value> chosen = w.values;
  std::sort(chosen.begin(), chosen.end());
  if (std::adjacent_find(chosen.begin(), chosen.end()) != chosen.end()) return false;
  __int128 sum = 0;
  for (Value v : chosen) {
    if (std::find(set.begin(), set.end(), v) == set.end()) return false;
    sum += v;
  }
  return sum == 0;
}

// Exhaustive search over the 2^n - 1 nonempty subsets in ascending bitmask
// order (bit i selects set[i]); the first zero-sum subset is returned.
inline SolveResult brute_solve(std::span<const Value> set, std::size_t cap = kBruteCap) {
  if (set.size() > cap) {
    throw CapExceeded("brute force over " + std::to_string(set.size()) + " elements exceeds the cap of " +
                      std::to_string(cap));
  }
  if (set.size() >= 63) throw CapExceeded("brute force limited to 62 elements");
  {
    std::vector<Value> sorted(set.begin(), set.end());
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw ValidationError("subset-sum input must be a set (duplicate value)");
    }
  }
  SolveResult out;
  const std::size_t n = set.size();
  if (n == 0) return out;

  // Sums split into a low table and a running high part so that each mask
  // costs O(1).
  const std::size_t low_bits = std::min<std::size_t>(n, 12);
  const std::uint64_t low_size = std::uint64_t{1} << low_bits;
  std::vector<__int128> low(low_size, 0);
  for (std::uint64_t m = 1; m < low_size; ++m) {
    const int b = __builtin_ctzll(m);
    low[m] = low[m & (m - 1)] + set[static_cast<std::size_t>(b)];
  }
  const std::uint64_t total = (std::uint64_t{1} << n);
  for (std::uint64_t high = 0; high < total; high += low_size) {
    __int128 high_sum = 0;
    for (std::size_t b = low_bits; b < n; ++b) {
      if (high >> b & 1) high_sum += set[b];
    }
    for (std::uint64_t m = (high == 0 ? 1 : 0); m < low_size; ++m) {
      ++out.stats.subsets_explored;
      if (high_sum + low[m] == 0) {
        const std::uint64_t mask = high | m;
        Witness w;
        for (std::size_t b = 0; b < n; ++b) {
          if (mask >> b & 1) w.values.push_back(set[b]);
        }
        out.witness = std::move(w);
        return out;
      }
    }
  }
  return out;
}

namespace detail {

inline std::vector<std::string> keys_for(const DisplacementInstance& inst, const Witness& w) {
  std::vector<std::string> keys;
  for (const auto& el : inst.elements) {
    if (std::find(w.values.begin(), w.values.end(), el.value) != w.values.end()) keys.push_back(el.primary().key());
  }
  return keys;
}

// Orders witness values like the instance elements.
inline void order_like(const DisplacementInstance& inst, Witness& w) {
  std::vector<Value> ordered;
  for (const auto& el : inst.elements) {
    if (std::find(w.values.begin(), w.values.end(), el.value) != w.values.end()) ordered.push_back(el.value);
  }
  w.values = std::move(ordered);
}

}  // namespace detail

inline SolveResult brute_solve(const DisplacementInstance& inst, std::size_t cap = kBruteCap) {
  const auto values = inst.values();
  SolveResult out = brute_solve(values, cap);
  const Value threshold = small_threshold(inst.e, inst.k);
  for (Value v : values) {
    if (v < 0) ++out.stats.neg;
    else if (v < threshold) ++out.stats.small;
    else ++out.stats.big;
  }
  if (out.witness) {
    detail::order_like(inst, *out.witness);
    out.keys = detail::keys_for(inst, *out.witness);
  }
  return out;
}

// Solver for instances built from a regressively regular evaluation with a
// log-bounded rho. Negative values come from the lower sets (fewer than
// k^k of them, total magnitude below e_0 k^k); positive diagonal values at
// or above e_0 k^k cannot be cancelled and are dropped; the remaining
// "small" positives number at most t log2(p). Only NEG x SMALL subset pairs
// are enumerated, so at most 2^|NEG| * 2^|SMALL| subsets are examined.
inline SolveResult structured_solve(const DisplacementInstance& inst) {
  if (!inst.flags.regressively_regular) {
    throw PreconditionError("structured solver requires an instance built from a regressively regular evaluation");
  }
  const LogBoundReport bound = is_log_bounded(inst.rho_diag, inst.e, inst.k, inst.t);
  if (!bound.ok) throw LogBoundError("structured solver requires a t-log bounded rho on the diagonal");

  const Value threshold = small_threshold(inst.e, inst.k);
  std::vector<Value> neg;
  std::vector<Value> small;
  SolveResult out;
  for (const auto& el : inst.elements) {
    if (el.value == 0) {
      // delta = 0 means h landed in E; cannot happen under the preconditions.
      throw PreconditionError("instance contains a zero displacement at " + el.primary().key());
    }
    if (el.value < 0) neg.push_back(el.value);
    else if (el.value < threshold) small.push_back(el.value);
    else ++out.stats.big;
  }
  out.stats.neg = neg.size();
  out.stats.small = small.size();

  const Value kk = detail::power(static_cast<Value>(inst.k), inst.k);
  if (static_cast<Value>(neg.size()) >= kk) {
    throw PreconditionError("instance has " + std::to_string(neg.size()) + " negative values, expected fewer than k^k");
  }
  Value mass = 0;
  for (Value v : neg) mass -= v;
  if (mass >= threshold) throw PreconditionError("negative mass reaches e_0 k^k; large values cannot be excluded");
  if (!within_log_budget(small.size(), inst.p(), inst.t)) {
    throw LogBoundError("more small diagonal values than t log2(p)");
  }

  const std::size_t ns = small.size();
  std::vector<Value> small_sums(std::size_t{1} << ns, 0);
  for (std::size_t m = 1; m < small_sums.size(); ++m) {
    small_sums[m] = small_sums[m & (m - 1)] + small[static_cast<std::size_t>(__builtin_ctzll(m))];
  }
  const Value small_total = small_sums.empty() ? 0 : small_sums.back();

  const std::size_t nn = neg.size();
  std::vector<Value> neg_sums(std::size_t{1} << nn, 0);
  for (std::size_t m = 1; m < neg_sums.size(); ++m) {
    neg_sums[m] = neg_sums[m & (m - 1)] + neg[static_cast<std::size_t>(__builtin_ctzll(m))];
  }
  for (std::size_t nm = 1; nm < neg_sums.size(); ++nm) {
    const Value need = -neg_sums[nm];
    if (need > small_total) continue;  // no positive subset reaches it
    for (std::size_t sm = 1; sm < small_sums.size(); ++sm) {
      ++out.stats.subsets_explored;
      if (small_sums[sm] == need) {
        Witness w;
        for (std::size_t b = 0; b < nn; ++b) {
          if (nm >> b & 1) w.values.push_back(neg[b]);
        }
        for (std::size_t b = 0; b < ns; ++b) {
          if (sm >> b & 1) w.values.push_back(small[b]);
        }
        detail::order_like(inst, w);
        out.keys = detail::keys_for(inst, w);
        out.witness = std::move(w);
        return out;
      }
    }
  }
  return out;
}

// 2^(k^k) * p^t, the enumeration budget for the structured solver.
inline boost::multiprecision::cpp_int structured_budget(std::size_t k, std::size_t p, std::size_t t) {
  using boost::multiprecision::cpp_int;
  const auto kk = static_cast<unsigned>(detail::power(static_cast<Value>(k), k));
  return (cpp_int(1) << kk) * boost::multiprecision::pow(cpp_int(p), static_cast<unsigned>(t));
}

struct BenchRow {
  std::size_t p = 0;
  std::size_t rep = 0;
  std::size_t set_size = 0;
  std::size_t neg = 0;
  std::size_t small = 0;
  std::size_t big = 0;
  bool solvable = false;
  std::uint64_t structured_explored = 0;
  std::string budget;  // 2^(k^k) p^t, decimal
  bool within_budget = false;
  std::optional<std::uint64_t> brute_explored;  // unset when |S| exceeds the brute cap
  std::uint64_t brute_space = 0;                // 2^|S| - 1
  std::size_t total_bits = 0;                   // sum of element bit lengths
  double structured_ms = 0;
  std::optional<double> brute_ms;
  std::string error;
};

using InstanceGenerator = std::function<DisplacementInstance(std::size_t p, std::uint64_t seed)>;

inline std::size_t bit_length(Value v) {
  std::uint64_t m = v < 0 ? static_cast<std::uint64_t>(-(v + 1)) + 1 : static_cast<std::uint64_t>(v);
  std::size_t bits = 1;
  while (m >>= 1) ++bits;
  return bits;
}

inline std::vector<BenchRow> bench_scaling(const InstanceGenerator& gen, std::span<const std::size_t> ps, std::size_t t,
                                           std::size_t k, std::size_t repetitions, std::uint64_t seed,
                                           std::size_t brute_cap = kBruteCap) {
  using clock = std::chrono::steady_clock;
  std::vector<BenchRow> rows;
  for (std::size_t p : ps) {
    for (std::size_t rep = 0; rep < repetitions; ++rep) {
      BenchRow row;
      row.p = p;
      row.rep = rep;
      try {
        const DisplacementInstance inst = gen(p, detail::hash_combine(seed, p * 1000003u + rep));
        row.set_size = inst.elements.size();
        for (const auto& el : inst.elements) row.total_bits += bit_length(el.value);
        auto t0 = clock::now();
        const SolveResult s = structured_solve(inst);
        row.structured_ms = std::chrono::duration<double, std::milli>(clock::now() - t0).count();
        row.neg = s.stats.neg;
        row.small = s.stats.small;
        row.big = s.stats.big;
        row.solvable = s.solvable();
        row.structured_explored = s.stats.subsets_explored;
        const auto budget = structured_budget(k, p, t);
        row.budget = budget.str();
        row.within_budget = boost::multiprecision::cpp_int(row.structured_explored) <= budget;
        row.brute_space = row.set_size >= 64 ? UINT64_MAX : (std::uint64_t{1} << row.set_size) - 1;
        if (row.set_size <= brute_cap) {
          t0 = clock::now();
          const SolveResult b = brute_solve(inst, brute_cap);
          row.brute_ms = std::chrono::duration<double, std::milli>(clock::now() - t0).count();
          row.brute_explored = b.stats.subsets_explored;
          if (b.solvable() != s.solvable()) row.error = "brute and structured solvers disagree";
        }
      } catch (const std::exception& ex) {
        row.error = ex.what();
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

}  // namespace rrlab
