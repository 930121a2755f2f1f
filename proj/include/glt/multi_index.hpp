#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "glt/error.hpp"

namespace glt {

using Index = std::int64_t;

/// A d-tuple of positive integers: the number of subdivisions per axis.
///
/// Ordering is lexicographic with the first coordinate most significant, which
/// is also the order used to index every grid and matrix in the library.
class MultiIndex {
 public:
  explicit MultiIndex(std::vector<Index> entries) : entries_(std::move(entries)) {
    if (entries_.empty()) throw ConfigError("MultiIndex: dimension must be at least 1");
    for (Index e : entries_) {
      if (e < 1) throw ConfigError("MultiIndex: entries must be positive, got " + std::to_string(e));
    }
  }
  MultiIndex(std::initializer_list<Index> entries) : MultiIndex(std::vector<Index>(entries)) {}

  static MultiIndex uniform(std::size_t d, Index m) { return MultiIndex(std::vector<Index>(d, m)); }

  std::size_t dim() const noexcept { return entries_.size(); }
  Index operator[](std::size_t k) const { return entries_[k]; }
  std::span<const Index> entries() const noexcept { return entries_; }

  /// N(n) = product of the entries. Throws SizeLimitError on int64 overflow.
  Index total() const {
    Index p = 1;
    for (Index e : entries_) {
      if (p > std::numeric_limits<Index>::max() / e) throw SizeLimitError("MultiIndex: N(n) overflows");
      p *= e;
    }
    return p;
  }

  /// "16x16" style label used in file names and reports.
  std::string label() const {
    std::string s;
    for (std::size_t k = 0; k < entries_.size(); ++k) {
      if (k) s += 'x';
      s += std::to_string(entries_[k]);
    }
    return s;
  }

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
  friend std::strong_ordering operator<=>(const MultiIndex& a, const MultiIndex& b) {
    return std::lexicographical_compare_three_way(a.entries_.begin(), a.entries_.end(), b.entries_.begin(),
                                                  b.entries_.end());
  }

 private:
  std::vector<Index> entries_;
};

inline Index n_total(const MultiIndex& n) { return n.total(); }

/// Lexicographic comparison of two equally sized integer vectors.
inline std::strong_ordering lex_compare(std::span<const Index> a, std::span<const Index> b) {
  return std::lexicographical_compare_three_way(a.begin(), a.end(), b.begin(), b.end());
}

/// Q_{y,l} = y + l * (0,1]^d with integer anchor y and positive integer side l.
struct Hypercube {
  std::vector<Index> anchor;
  Index side = 1;

  std::size_t dim() const noexcept { return anchor.size(); }

  static Hypercube unit(std::size_t d) { return Hypercube{std::vector<Index>(d, 0), 1}; }

  /// Q_self ⊂ Q_other, decided from the (y, l) pairs.
  bool inside(const Hypercube& other) const {
    if (other.dim() != dim()) return false;
    for (std::size_t k = 0; k < dim(); ++k) {
      if (anchor[k] < other.anchor[k]) return false;
      if (anchor[k] + side > other.anchor[k] + other.side) return false;
    }
    return true;
  }

  /// Membership of a point in the half-open cube.
  bool contains(std::span<const double> x) const {
    for (std::size_t k = 0; k < dim(); ++k) {
      const double lo = static_cast<double>(anchor[k]);
      if (!(x[k] > lo && x[k] <= lo + static_cast<double>(side))) return false;
    }
    return true;
  }

  /// The affine map phi_{y,l}: (0,1]^d -> Q_{y,l}.
  std::vector<double> from_reference(std::span<const double> x) const {
    std::vector<double> out(dim());
    for (std::size_t k = 0; k < dim(); ++k) out[k] = static_cast<double>(anchor[k]) + static_cast<double>(side) * x[k];
    return out;
  }

  friend bool operator==(const Hypercube&, const Hypercube&) = default;
};

}  // namespace glt
