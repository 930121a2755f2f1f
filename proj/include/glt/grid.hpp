#pragma once

#include <algorithm>
#include <iomanip>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "glt/domain.hpp"
#include "glt/error.hpp"
#include "glt/multi_index.hpp"

namespace glt {

inline constexpr std::size_t kDefaultGridCap = 20'000'000;

/// The ordered point set Theta_{n,Omega}.
///
/// Points are stored by their integer lattice index i (the point is i/n), flat and
/// lexicographically sorted. Every comparison between grids sharing n is therefore
/// exact integer arithmetic.
class Grid {
 public:
  Grid(MultiIndex n, DomainPtr domain, std::vector<Index> lattice)
      : n_(std::move(n)), domain_(std::move(domain)), lattice_(std::move(lattice)) {
    if (lattice_.size() % n_.dim() != 0) throw DimensionError("Grid: lattice storage not a multiple of d");
  }

  const MultiIndex& n() const noexcept { return n_; }
  const DomainSpec& domain() const noexcept { return *domain_; }
  const DomainPtr& domain_ptr() const noexcept { return domain_; }
  std::size_t space_dim() const noexcept { return n_.dim(); }
  /// d_n^Omega, the number of points.
  std::size_t size() const noexcept { return lattice_.size() / n_.dim(); }
  bool empty() const noexcept { return lattice_.empty(); }

  std::span<const Index> lattice(std::size_t k) const {
    return std::span<const Index>(lattice_).subspan(k * n_.dim(), n_.dim());
  }
  double coord(std::size_t k, std::size_t axis) const {
    return static_cast<double>(lattice_[k * n_.dim() + axis]) / static_cast<double>(n_[axis]);
  }
  std::vector<double> point(std::size_t k) const {
    std::vector<double> p(n_.dim());
    for (std::size_t a = 0; a < n_.dim(); ++a) p[a] = coord(k, a);
    return p;
  }

  /// Position of a lattice index, by binary search over the lex order.
  std::optional<std::size_t> find(std::span<const Index> idx) const {
    std::size_t lo = 0, hi = size();
    while (lo < hi) {
      const std::size_t mid = lo + (hi - lo) / 2;
      const auto c = lex_compare(lattice(mid), idx);
      if (c == 0) return mid;
      if (c < 0)
        lo = mid + 1;
      else
        hi = mid;
    }
    return std::nullopt;
  }

  const std::vector<Index>& raw() const noexcept { return lattice_; }

 private:
  MultiIndex n_;
  DomainPtr domain_;
  std::vector<Index> lattice_;
};

namespace detail {

// Visits every integer vector in the inclusive box in lex order.
template <class Fn>
void for_each_lattice(const std::vector<std::pair<Index, Index>>& ranges, Fn&& fn) {
  for (const auto& r : ranges)
    if (r.first > r.second) return;
  std::vector<Index> i(ranges.size());
  for (std::size_t k = 0; k < ranges.size(); ++k) i[k] = ranges[k].first;
  while (true) {
    fn(std::span<const Index>(i));
    std::size_t k = ranges.size();
    while (k > 0) {
      --k;
      if (i[k] < ranges[k].second) {
        ++i[k];
        break;
      }
      i[k] = ranges[k].first;
      if (k == 0) return;
    }
  }
}

}  // namespace detail

/// Theta_{n,y,l} = {y + i/n : 1 <= i <= l n}, of cardinality l^d N(n).
inline Grid hypercube_grid(const MultiIndex& n, const Hypercube& q, std::size_t cap = kDefaultGridCap) {
  if (q.dim() != n.dim()) throw DimensionError("hypercube_grid: cube and multi-index dimensions differ");
  if (q.side < 1) throw ConfigError("hypercube_grid: side must be positive");
  double count = 1.0;
  for (std::size_t k = 0; k < n.dim(); ++k) count *= static_cast<double>(q.side * n[k]);
  if (count > static_cast<double>(cap))
    throw SizeLimitError("hypercube_grid: " + std::to_string(static_cast<long long>(count)) + " points exceed cap " +
                         std::to_string(cap));
  std::vector<std::pair<Index, Index>> ranges(n.dim());
  for (std::size_t k = 0; k < n.dim(); ++k) ranges[k] = {q.anchor[k] * n[k] + 1, (q.anchor[k] + q.side) * n[k]};
  std::vector<Index> flat;
  flat.reserve(static_cast<std::size_t>(count) * n.dim());
  detail::for_each_lattice(ranges, [&](std::span<const Index> i) { flat.insert(flat.end(), i.begin(), i.end()); });
  return Grid(n, hypercube_domain(q), std::move(flat));
}

/// Theta_{n,Omega} = {p = i/n : the open box of half-widths 1/n around p lies in Omega}.
inline Grid domain_grid(const MultiIndex& n, const DomainPtr& omega, std::size_t cap = kDefaultGridCap) {
  if (omega->dim != n.dim()) throw DimensionError("domain_grid: domain '" + omega->name + "' has dimension " +
                                                  std::to_string(omega->dim) + ", n has " + std::to_string(n.dim()));
  if (omega->lattice_cube) {
    Grid g = hypercube_grid(n, *omega->lattice_cube, cap);
    return Grid(n, omega, g.raw());
  }
  std::vector<std::pair<Index, Index>> ranges;
  if (omega->scan_range) {
    ranges = omega->scan_range(n);
  } else if (omega->bounding_box) {
    ranges = detail::ranges_from_cube(*omega->bounding_box, n);
  } else {
    throw ConfigError("domain_grid: unbounded domain '" + omega->name + "' has no extent data");
  }
  std::vector<double> center(n.dim()), half(n.dim());
  for (std::size_t k = 0; k < n.dim(); ++k) half[k] = 1.0 / static_cast<double>(n[k]);
  std::vector<Index> flat;
  std::size_t count = 0;
  detail::for_each_lattice(ranges, [&](std::span<const Index> i) {
    for (std::size_t k = 0; k < n.dim(); ++k) center[k] = static_cast<double>(i[k]) / static_cast<double>(n[k]);
    if (omega->box_inside(center, half)) {
      if (++count > cap)
        throw SizeLimitError("domain_grid: more than " + std::to_string(cap) + " points in '" + omega->name + "'");
      flat.insert(flat.end(), i.begin(), i.end());
    }
  });
  return Grid(n, omega, std::move(flat));
}

/// Counts Theta_{n,Omega} without storing it.
inline std::size_t domain_grid_size(const MultiIndex& n, const DomainPtr& omega) {
  if (omega->lattice_cube) {
    std::size_t c = 1;
    for (std::size_t k = 0; k < n.dim(); ++k) c *= static_cast<std::size_t>(omega->lattice_cube->side * n[k]);
    return c;
  }
  auto ranges = omega->scan_range ? omega->scan_range(n) : detail::ranges_from_cube(*omega->bounding_box, n);
  std::vector<double> center(n.dim()), half(n.dim());
  for (std::size_t k = 0; k < n.dim(); ++k) half[k] = 1.0 / static_cast<double>(n[k]);
  std::size_t count = 0;
  detail::for_each_lattice(ranges, [&](std::span<const Index> i) {
    for (std::size_t k = 0; k < n.dim(); ++k) center[k] = static_cast<double>(i[k]) / static_cast<double>(n[k]);
    if (omega->box_inside(center, half)) ++count;
  });
  return count;
}

/// One row per point, coordinates only, lex order preserved.
inline void write_csv(std::ostream& os, const Grid& g) {
  for (std::size_t a = 0; a < g.space_dim(); ++a) os << (a ? "," : "") << "x" << (a + 1);
  os << '\n' << std::setprecision(17);
  for (std::size_t k = 0; k < g.size(); ++k) {
    for (std::size_t a = 0; a < g.space_dim(); ++a) os << (a ? "," : "") << g.coord(k, a);
    os << '\n';
  }
}

}  // namespace glt
