#pragma once

#include <algorithm>
#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rrlab/error.hpp"

namespace rrlab {

using Coord = std::int64_t;
using Value = std::int64_t;

inline constexpr std::size_t kMaxDimension = 8;

// A point of N^k, 2 <= k <= kMaxDimension. Stored inline so points copy
// without allocation; unused trailing slots are always zero.
class Point {
 public:
  Point() = default;

  Point(std::initializer_list<Coord> coords) : Point(std::span<const Coord>(coords.begin(), coords.size())) {}

  explicit Point(std::span<const Coord> coords) {
    if (coords.size() < 2 || coords.size() > kMaxDimension) {
      throw DimensionError("point dimension must be in [2, " + std::to_string(kMaxDimension) + "], got " +
                           std::to_string(coords.size()));
    }
    dim_ = static_cast<std::uint8_t>(coords.size());
    for (std::size_t i = 0; i < coords.size(); ++i) {
      if (coords[i] < 0) throw ValidationError("point coordinates must be nonnegative");
      coords_[i] = coords[i];
    }
  }

  explicit Point(const std::vector<Coord>& coords) : Point(std::span<const Coord>(coords)) {}

  std::size_t dimension() const { return dim_; }
  Coord operator[](std::size_t i) const { return coords_[i]; }
  std::span<const Coord> coords() const { return {coords_.data(), dim_}; }

  friend auto operator<=>(const Point&, const Point&) = default;
  friend bool operator==(const Point&, const Point&) = default;

  std::string to_string() const {
    std::string out = "(";
    for (std::size_t i = 0; i < dim_; ++i) {
      if (i) out += ',';
      out += std::to_string(coords_[i]);
    }
    return out + ")";
  }

 private:
  std::uint8_t dim_ = 0;
  std::array<Coord, kMaxDimension> coords_{};
};

inline Coord max_norm(const Point& p) {
  auto c = p.coords();
  return *std::max_element(c.begin(), c.end());
}

inline Coord min_coord(const Point& p) {
  auto c = p.coords();
  return *std::min_element(c.begin(), c.end());
}

// Dense rank vector: each coordinate replaced by its rank among the distinct
// coordinate values, starting at 0. Canonical representative of an order type.
class OrderSignature {
 public:
  OrderSignature() = default;
  explicit OrderSignature(std::span<const int> ranks) : dim_(static_cast<std::uint8_t>(ranks.size())) {
    if (ranks.size() > kMaxDimension) throw DimensionError("signature dimension too large");
    std::copy(ranks.begin(), ranks.end(), ranks_.begin());
  }

  std::size_t dimension() const { return dim_; }
  std::span<const int> ranks() const { return {ranks_.data(), dim_}; }

  // Number of distinct coordinate values of the class.
  int distinct() const {
    auto r = ranks();
    return r.empty() ? 0 : *std::max_element(r.begin(), r.end()) + 1;
  }

  Point as_point() const {
    std::vector<Coord> c(ranks().begin(), ranks().end());
    return Point(c);
  }

  friend auto operator<=>(const OrderSignature&, const OrderSignature&) = default;
  friend bool operator==(const OrderSignature&, const OrderSignature&) = default;

  std::string to_string() const {
    std::string out = "(";
    for (std::size_t i = 0; i < dim_; ++i) {
      if (i) out += ',';
      out += std::to_string(ranks_[i]);
    }
    return out + ")";
  }

 private:
  std::uint8_t dim_ = 0;
  std::array<int, kMaxDimension> ranks_{};
};

inline OrderSignature order_signature(const Point& p) {
  auto c = p.coords();
  std::array<Coord, kMaxDimension> sorted{};
  std::copy(c.begin(), c.end(), sorted.begin());
  auto last = sorted.begin() + static_cast<std::ptrdiff_t>(c.size());
  std::sort(sorted.begin(), last);
  last = std::unique(sorted.begin(), last);
  std::array<int, kMaxDimension> ranks{};
  for (std::size_t i = 0; i < c.size(); ++i) {
    ranks[i] = static_cast<int>(std::lower_bound(sorted.begin(), last, c[i]) - sorted.begin());
  }
  return OrderSignature(std::span<const int>(ranks.data(), c.size()));
}

inline bool order_equivalent(const Point& x, const Point& y) { return order_signature(x) == order_signature(y); }

// Number of order types of k-tuples: sum over j of surjections k -> j
// (the ordered Bell / Fubini number).
inline std::uint64_t ordered_bell(std::size_t k) {
  // surj[j] = number of surjections from an n-set onto a j-set, built up in n.
  std::vector<std::uint64_t> surj(k + 1, 0);
  surj[0] = 1;
  for (std::size_t n = 1; n <= k; ++n) {
    for (std::size_t j = n; j >= 1; --j) surj[j] = j * (surj[j] + surj[j - 1]);
    surj[0] = 0;
  }
  std::uint64_t total = 0;
  for (std::size_t j = 1; j <= k; ++j) total += surj[j];
  return total;
}

// All dense rank vectors of length k, in lexicographic order.
inline std::vector<OrderSignature> enumerate_order_types(std::size_t k) {
  if (k < 2 || k > kMaxDimension) throw DimensionError("order types need 2 <= k <= " + std::to_string(kMaxDimension));
  std::vector<OrderSignature> out;
  std::array<int, kMaxDimension> ranks{};
  std::array<int, kMaxDimension> used{};  // per-rank occurrence counts
  // Odometer over [0, k-1]^k keeping only vectors whose value set is {0..m-1}.
  while (true) {
    used.fill(0);
    int top = -1;
    for (std::size_t i = 0; i < k; ++i) {
      ++used[static_cast<std::size_t>(ranks[i])];
      top = std::max(top, ranks[i]);
    }
    bool dense = true;
    for (int v = 0; v <= top; ++v) dense = dense && used[static_cast<std::size_t>(v)] > 0;
    if (dense) out.emplace_back(std::span<const int>(ranks.data(), k));

    std::size_t pos = k;
    while (pos > 0) {
      --pos;
      if (++ranks[pos] < static_cast<int>(k)) break;
      ranks[pos] = 0;
      if (pos == 0) return out;
    }
  }
}

// A finite set of nonnegative integers, kept sorted and unique.
class CoordSet {
 public:
  CoordSet() = default;
  CoordSet(std::initializer_list<Coord> values) : CoordSet(std::vector<Coord>(values)) {}
  explicit CoordSet(std::vector<Coord> values) : values_(std::move(values)) {
    std::sort(values_.begin(), values_.end());
    values_.erase(std::unique(values_.begin(), values_.end()), values_.end());
    if (!values_.empty() && values_.front() < 0) throw ValidationError("coordinate sets hold nonnegative integers");
  }

  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }
  Coord operator[](std::size_t i) const { return values_[i]; }
  Coord front() const { return values_.front(); }
  Coord back() const { return values_.back(); }
  auto begin() const { return values_.begin(); }
  auto end() const { return values_.end(); }
  const std::vector<Coord>& values() const { return values_; }
  bool contains(Coord v) const { return std::binary_search(values_.begin(), values_.end(), v); }

  friend bool operator==(const CoordSet&, const CoordSet&) = default;
  friend auto operator<=>(const CoordSet&, const CoordSet&) = default;

 private:
  std::vector<Coord> values_;
};

// A finite set of points of common dimension k, sorted lexicographically.
class Domain {
 public:
  Domain() = default;
  explicit Domain(std::size_t k) : k_(k) { check_k(k); }
  Domain(std::size_t k, std::vector<Point> points) : k_(k), points_(std::move(points)) {
    check_k(k);
    for (const auto& p : points_) {
      if (p.dimension() != k_) {
        throw DimensionError("point " + p.to_string() + " has dimension " + std::to_string(p.dimension()) +
                             ", domain has " + std::to_string(k_));
      }
    }
    std::sort(points_.begin(), points_.end());
    points_.erase(std::unique(points_.begin(), points_.end()), points_.end());
  }

  std::size_t dimension() const { return k_; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  const Point& operator[](std::size_t i) const { return points_[i]; }
  auto begin() const { return points_.begin(); }
  auto end() const { return points_.end(); }
  const std::vector<Point>& points() const { return points_; }

  std::optional<std::size_t> index_of(const Point& p) const {
    auto it = std::lower_bound(points_.begin(), points_.end(), p);
    if (it == points_.end() || *it != p) return std::nullopt;
    return static_cast<std::size_t>(it - points_.begin());
  }
  bool contains(const Point& p) const { return index_of(p).has_value(); }

  bool is_subset_of(const Domain& other) const {
    return std::includes(other.points_.begin(), other.points_.end(), points_.begin(), points_.end());
  }

  Domain united(const Domain& other) const {
    require_same_dimension(other);
    std::vector<Point> out;
    std::set_union(points_.begin(), points_.end(), other.points_.begin(), other.points_.end(), std::back_inserter(out));
    return Domain(k_, std::move(out));
  }

  Domain minus(const Domain& other) const {
    std::vector<Point> out;
    std::set_difference(points_.begin(), points_.end(), other.points_.begin(), other.points_.end(),
                        std::back_inserter(out));
    return Domain(k_, std::move(out));
  }

  template <typename Pred>
  Domain filter(Pred pred) const {
    std::vector<Point> out;
    for (const auto& p : points_) {
      if (pred(p)) out.push_back(p);
    }
    return Domain(k_, std::move(out));
  }

  // Largest max norm over the domain.
  Coord max_norm() const {
    if (points_.empty()) throw ValidationError("max norm of an empty domain");
    Coord best = 0;
    for (const auto& p : points_) best = std::max(best, rrlab::max_norm(p));
    return best;
  }

  void require_same_dimension(const Domain& other) const {
    if (other.k_ != k_) throw DimensionError("mixing domains of dimension " + std::to_string(k_) + " and " +
                                             std::to_string(other.k_));
  }

  friend bool operator==(const Domain&, const Domain&) = default;

 private:
  static void check_k(std::size_t k) {
    if (k < 2 || k > kMaxDimension) {
      throw DimensionError("dimension must be in [2, " + std::to_string(kMaxDimension) + "], got " + std::to_string(k));
    }
  }

  std::size_t k_ = 2;
  std::vector<Point> points_;
};

// All coordinates appearing in the domain.
inline CoordSet field(const Domain& d) {
  std::vector<Coord> values;
  for (const auto& p : d) values.insert(values.end(), p.coords().begin(), p.coords().end());
  return CoordSet(std::move(values));
}

inline Domain cube(const CoordSet& e, std::size_t k) {
  if (e.empty()) throw ValidationError("cube over an empty set");
  Domain probe(k);  // validates k
  std::vector<Point> out;
  std::vector<std::size_t> idx(k, 0);
  std::vector<Coord> coords(k);
  while (true) {
    for (std::size_t i = 0; i < k; ++i) coords[i] = e[idx[i]];
    out.emplace_back(coords);
    std::size_t pos = k;
    while (pos > 0) {
      --pos;
      if (++idx[pos] < e.size()) break;
      idx[pos] = 0;
      if (pos == 0) return Domain(k, std::move(out));
    }
  }
}

inline Domain diag(const CoordSet& e, std::size_t k) {
  if (e.empty()) throw ValidationError("diagonal over an empty set");
  std::vector<Point> out;
  for (Coord v : e) out.emplace_back(std::vector<Coord>(k, v));
  return Domain(k, std::move(out));
}

inline Point diagonal_point(Coord v, std::size_t k) { return Point(std::vector<Coord>(k, v)); }

inline Domain setmax(const Domain& d) {
  const Coord top = d.max_norm();
  return d.filter([top](const Point& p) { return max_norm(p) == top; });
}

// True iff the top layer of d is exactly the top layer of e^k. Requires
// e^k to be contained in d.
inline bool is_capped(const Domain& d, const CoordSet& e) {
  Domain c = cube(e, d.dimension());
  if (!c.is_subset_of(d)) throw ValidationError("cube E^k is not contained in the domain");
  return setmax(d) == setmax(c);
}

}  // namespace rrlab
