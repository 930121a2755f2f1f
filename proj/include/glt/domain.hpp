#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "glt/error.hpp"
#include "glt/multi_index.hpp"

namespace glt {

enum class MeasureSource { analytic, monte_carlo };

/// Lebesgue measure of a domain together with where the number came from.
struct Measure {
  double value = 0.0;
  MeasureSource source = MeasureSource::analytic;
  double std_error = 0.0;       // zero for analytic values
  std::uint64_t samples = 0;    // Monte Carlo only
  std::uint64_t seed = 0;       // Monte Carlo only
};

inline constexpr std::uint64_t kDefaultMonteCarloSamples = 1'000'000;
inline constexpr std::uint64_t kDefaultSeed = 20240611;

using PointPredicate = std::function<bool(std::span<const double>)>;
/// Exact test "open box with this center and these half-widths lies inside the domain".
using BoxPredicate = std::function<bool(std::span<const double> center, std::span<const double> halfwidth)>;
/// Inclusive per-axis lattice index ranges that contain every grid point for a given n.
using ScanRange = std::function<std::vector<std::pair<Index, Index>>(const MultiIndex&)>;
/// Analytic measure of the exhaustion Omega_t, when one is registered.
using ExhaustionMeasure = std::function<std::optional<double>(double t)>;

/// An open set Omega of finite measure.
///
/// The hypothesis that the boundary has zero measure is trusted metadata; nothing
/// here verifies it.
struct DomainSpec {
  std::string name;
  std::size_t dim = 0;
  PointPredicate indicator;
  BoxPredicate box_inside;
  Measure measure;
  bool bounded = true;
  std::optional<Hypercube> bounding_box;
  ScanRange scan_range;
  ExhaustionMeasure exhaustion_measure;
  /// Set for hypercube domains, whose grid is the full lattice block y + i/n, 1 <= i <= l*n.
  std::optional<Hypercube> lattice_cube;
};

using DomainPtr = std::shared_ptr<const DomainSpec>;

namespace detail {

// Grid boxes have rational corners; ties between a box face and the boundary are
// exact in rational arithmetic and must count as "inside" for open boxes.
inline bool tie_le(double a, double b) {
  return a <= b + 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
}

inline std::string format_real(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

inline std::vector<std::pair<Index, Index>> ranges_from_cube(const Hypercube& q, const MultiIndex& n) {
  std::vector<std::pair<Index, Index>> r(q.dim());
  for (std::size_t k = 0; k < q.dim(); ++k) r[k] = {q.anchor[k] * n[k], (q.anchor[k] + q.side) * n[k]};
  return r;
}

}  // namespace detail

/// Monte Carlo estimate of the measure of {indicator} inside the bounding cube.
inline Measure monte_carlo_measure(const PointPredicate& indicator, const Hypercube& box,
                                   std::uint64_t samples = kDefaultMonteCarloSamples,
                                   std::uint64_t seed = kDefaultSeed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> x(box.dim());
  std::uint64_t hits = 0;
  for (std::uint64_t s = 0; s < samples; ++s) {
    for (std::size_t k = 0; k < box.dim(); ++k)
      x[k] = static_cast<double>(box.anchor[k]) + static_cast<double>(box.side) * unit(rng);
    if (indicator(x)) ++hits;
  }
  const double volume = std::pow(static_cast<double>(box.side), static_cast<double>(box.dim()));
  const double p = static_cast<double>(hits) / static_cast<double>(samples);
  Measure m;
  m.value = volume * p;
  m.source = MeasureSource::monte_carlo;
  m.std_error = volume * std::sqrt(p * (1.0 - p) / static_cast<double>(samples));
  m.samples = samples;
  m.seed = seed;
  return m;
}

inline Measure analytic_measure(double v) { return Measure{v, MeasureSource::analytic, 0.0, 0, 0}; }

inline double domain_measure(const DomainSpec& omega) { return omega.measure.value; }

/// Checks the structural invariants shared by all domains.
inline void validate_domain(const DomainSpec& omega) {
  if (omega.dim == 0) throw ConfigError("domain '" + omega.name + "': dimension must be positive");
  if (!omega.indicator || !omega.box_inside) throw ConfigError("domain '" + omega.name + "': predicates missing");
  if (!(omega.measure.value > 0.0) || !std::isfinite(omega.measure.value))
    throw ConfigError("domain '" + omega.name + "': measure must be finite and positive");
  if (omega.bounded && !omega.bounding_box)
    throw ConfigError("domain '" + omega.name + "': bounded domain needs a bounding box");
}

/// Open axis-aligned box prod (lo_k, hi_k).
inline DomainPtr axis_box(std::string name, std::vector<double> lo, std::vector<double> hi) {
  if (lo.size() != hi.size() || lo.empty()) throw ConfigError("axis_box: corner dimensions differ");
  auto d = std::make_shared<DomainSpec>();
  d->name = std::move(name);
  d->dim = lo.size();
  d->indicator = [lo, hi](std::span<const double> x) {
    for (std::size_t k = 0; k < lo.size(); ++k)
      if (!(x[k] > lo[k] && x[k] < hi[k])) return false;
    return true;
  };
  d->box_inside = [lo, hi](std::span<const double> c, std::span<const double> h) {
    for (std::size_t k = 0; k < lo.size(); ++k)
      if (!detail::tie_le(lo[k], c[k] - h[k]) || !detail::tie_le(c[k] + h[k], hi[k])) return false;
    return true;
  };
  double vol = 1.0;
  Hypercube q{std::vector<Index>(lo.size()), 1};
  Index side = 1;
  for (std::size_t k = 0; k < lo.size(); ++k) {
    if (!(hi[k] > lo[k])) throw ConfigError("axis_box: empty extent on axis " + std::to_string(k));
    vol *= hi[k] - lo[k];
    q.anchor[k] = static_cast<Index>(std::floor(lo[k]));
    side = std::max(side, static_cast<Index>(std::ceil(hi[k])) - q.anchor[k]);
  }
  q.side = side;
  d->measure = analytic_measure(vol);
  d->bounded = true;
  d->bounding_box = q;
  d->exhaustion_measure = [lo, hi](double t) -> std::optional<double> {
    double v = 1.0;
    for (std::size_t k = 0; k < lo.size(); ++k) v *= std::max(0.0, std::min(hi[k], t) - std::max(lo[k], -t));
    return v;
  };
  return d;
}

inline DomainPtr unit_square() { return axis_box("unit_square", {0.0, 0.0}, {1.0, 1.0}); }

/// Open disk; a box is inside iff its farthest corner is within the radius.
inline DomainPtr disk(std::string name, double cx, double cy, double radius) {
  if (!(radius > 0.0)) throw ConfigError("disk: radius must be positive");
  auto d = std::make_shared<DomainSpec>();
  d->name = std::move(name);
  d->dim = 2;
  d->indicator = [=](std::span<const double> x) {
    const double dx = x[0] - cx, dy = x[1] - cy;
    return dx * dx + dy * dy < radius * radius;
  };
  d->box_inside = [=](std::span<const double> c, std::span<const double> h) {
    const double fx = std::max(std::abs(c[0] - h[0] - cx), std::abs(c[0] + h[0] - cx));
    const double fy = std::max(std::abs(c[1] - h[1] - cy), std::abs(c[1] + h[1] - cy));
    return detail::tie_le(fx * fx + fy * fy, radius * radius);
  };
  d->measure = analytic_measure(std::numbers::pi * radius * radius);
  const Index ax = static_cast<Index>(std::floor(cx - radius));
  const Index ay = static_cast<Index>(std::floor(cy - radius));
  const Index side = std::max(static_cast<Index>(std::ceil(cx + radius)) - ax, static_cast<Index>(std::ceil(cy + radius)) - ay);
  d->bounded = true;
  d->bounding_box = Hypercube{{ax, ay}, side};
  const double full = d->measure.value;
  const double reach = std::max({std::abs(cx - radius), std::abs(cx + radius), std::abs(cy - radius), std::abs(cy + radius)});
  d->exhaustion_measure = [=](double t) -> std::optional<double> {
    if (t >= reach) return full;
    return std::nullopt;
  };
  return d;
}

/// The profile of the unbounded cusp domain: 1 for x < 1 and x^-2 beyond.
inline double cusp_profile(double x) { return x < 1.0 ? 1.0 : 1.0 / (x * x); }

/// {x > 0, y > 0, y < g(x)} with g the cusp profile; measure 2.
///
/// g is nonincreasing and continuous, so an open box (lo, hi) is inside iff
/// lo >= 0 componentwise and hi_y <= g(hi_x).
inline DomainPtr cusp_domain() {
  auto d = std::make_shared<DomainSpec>();
  d->name = "cusp";
  d->dim = 2;
  d->indicator = [](std::span<const double> p) { return p[0] > 0.0 && p[1] > 0.0 && p[1] < cusp_profile(p[0]); };
  d->box_inside = [](std::span<const double> c, std::span<const double> h) {
    const double lx = c[0] - h[0], ly = c[1] - h[1];
    const double hx = c[0] + h[0], hy = c[1] + h[1];
    if (!detail::tie_le(0.0, lx) || !detail::tie_le(0.0, ly)) return false;
    if (hx < 1.0) return detail::tie_le(hy, 1.0);
    // hy <= 1/hx^2 in product form keeps the comparison free of a division.
    return detail::tie_le(hy * hx * hx, 1.0);
  };
  d->measure = analytic_measure(2.0);
  d->bounded = false;
  d->scan_range = [](const MultiIndex& n) {
    // A grid box has height 2/n_2, so it needs g(x) >= 2/n_2, i.e. x <= sqrt(n_2 / 2).
    const double x_max = std::sqrt(static_cast<double>(n[1]) / 2.0);
    const Index i_max = static_cast<Index>(std::ceil(static_cast<double>(n[0]) * std::max(1.0, x_max))) + 1;
    return std::vector<std::pair<Index, Index>>{{1, i_max}, {1, n[1]}};
  };
  d->exhaustion_measure = [](double t) -> std::optional<double> {
    if (t <= 0.0) return 0.0;
    if (t < 1.0) return t * t;
    return 2.0 - 1.0 / t;
  };
  return d;
}

/// Hypercube Q_{y,l} viewed as a domain; its grid is the full block Theta_{n,y,l}.
inline DomainPtr hypercube_domain(const Hypercube& q) {
  auto d = std::make_shared<DomainSpec>();
  std::string label = "Q_(";
  for (std::size_t k = 0; k < q.dim(); ++k) label += (k ? "," : "") + std::to_string(q.anchor[k]);
  d->name = label + ")_" + std::to_string(q.side);
  d->dim = q.dim();
  d->indicator = [q](std::span<const double> x) { return q.contains(x); };
  d->box_inside = [q](std::span<const double> c, std::span<const double> h) {
    for (std::size_t k = 0; k < q.dim(); ++k) {
      const double lo = static_cast<double>(q.anchor[k]);
      if (!detail::tie_le(lo, c[k] - h[k]) || !detail::tie_le(c[k] + h[k], lo + static_cast<double>(q.side)))
        return false;
    }
    return true;
  };
  d->measure = analytic_measure(std::pow(static_cast<double>(q.side), static_cast<double>(q.dim())));
  d->bounded = true;
  d->bounding_box = q;
  d->lattice_cube = q;
  return d;
}

/// Omega_t = {x in Omega : ||x||_inf < t}.
inline DomainPtr exhaustion_domain(const DomainPtr& omega, double t) {
  if (!(t > 0.0)) throw ConfigError("exhaustion_domain: t must be positive");
  auto d = std::make_shared<DomainSpec>();
  d->name = omega->name + "_t" + detail::format_real(t);
  d->dim = omega->dim;
  auto base = omega;
  d->indicator = [base, t](std::span<const double> x) {
    for (double v : x)
      if (!(std::abs(v) < t)) return false;
    return base->indicator(x);
  };
  d->box_inside = [base, t](std::span<const double> c, std::span<const double> h) {
    for (std::size_t k = 0; k < c.size(); ++k)
      if (!detail::tie_le(-t, c[k] - h[k]) || !detail::tie_le(c[k] + h[k], t)) return false;
    return base->box_inside(c, h);
  };
  d->bounded = true;

  const Index ct = static_cast<Index>(std::ceil(t));
  Hypercube q{std::vector<Index>(omega->dim, -ct), 2 * ct};
  if (omega->bounding_box) {
    const Hypercube& b = *omega->bounding_box;
    Index side = 1;
    for (std::size_t k = 0; k < omega->dim; ++k) {
      q.anchor[k] = std::max(b.anchor[k], -ct);
      side = std::max(side, std::min(b.anchor[k] + b.side, ct) - q.anchor[k]);
    }
    q.side = side;
  }
  d->bounding_box = q;
  d->scan_range = [base, t, q](const MultiIndex& n) {
    auto r = base->scan_range ? base->scan_range(n) : detail::ranges_from_cube(*base->bounding_box, n);
    for (std::size_t k = 0; k < r.size(); ++k) {
      const Index cap = static_cast<Index>(std::floor(t * static_cast<double>(n[k])));
      r[k].first = std::max(r[k].first, -cap);
      r[k].second = std::min(r[k].second, cap);
    }
    return r;
  };
  auto parent_measure = omega->exhaustion_measure;
  d->exhaustion_measure = [parent_measure, t](double s) -> std::optional<double> {
    if (!parent_measure) return std::nullopt;
    return parent_measure(std::min(s, t));
  };
  std::optional<double> exact = parent_measure ? parent_measure(t) : std::nullopt;
  d->measure = exact ? analytic_measure(*exact) : monte_carlo_measure(d->indicator, q);
  return d;
}

/// Omega_1 ∩ Omega_2: a box is inside the intersection iff it is inside both.
inline DomainPtr intersection_domain(const DomainPtr& a, const DomainPtr& b) {
  if (a->dim != b->dim) throw DomainError("intersection_domain: dimensions differ");
  auto d = std::make_shared<DomainSpec>();
  d->name = "(" + a->name + "&" + b->name + ")";
  d->dim = a->dim;
  d->indicator = [a, b](std::span<const double> x) { return a->indicator(x) && b->indicator(x); };
  d->box_inside = [a, b](std::span<const double> c, std::span<const double> h) {
    return a->box_inside(c, h) && b->box_inside(c, h);
  };
  d->bounded = a->bounded || b->bounded;
  const DomainPtr& bb = a->bounded ? a : b;
  d->bounding_box = bb->bounded ? bb->bounding_box : std::nullopt;
  d->scan_range = [bb](const MultiIndex& n) {
    return bb->scan_range ? bb->scan_range(n) : detail::ranges_from_cube(*bb->bounding_box, n);
  };
  if (d->bounded) {
    d->measure = monte_carlo_measure(d->indicator, *d->bounding_box);
  } else {
    throw ConfigError("intersection_domain: needs at least one bounded operand");
  }
  return d;
}

/// Omega_1 ∪ Omega_2.
///
/// Box inclusion in a union is not decidable from the operand predicates alone;
/// a box is accepted when it lies in one operand or when a bisection of it down
/// to `depth` levels puts every piece inside one operand. The resulting grid always
/// contains both operand grids. With an unbounded operand the measure is
/// |A| + |B| - |A ∩ B|, which needs the other operand bounded.
inline DomainPtr union_domain(const DomainPtr& a, const DomainPtr& b, int depth = 8) {
  if (a->dim != b->dim) throw DomainError("union_domain: dimensions differ");
  if (!a->bounded && !b->bounded) throw ConfigError("union_domain: at least one operand must be bounded");
  auto d = std::make_shared<DomainSpec>();
  d->name = "(" + a->name + "|" + b->name + ")";
  d->dim = a->dim;
  d->indicator = [a, b](std::span<const double> x) { return a->indicator(x) || b->indicator(x); };
  auto covered = std::make_shared<std::function<bool(std::vector<double>, std::vector<double>, int)>>();
  // The recursion captures a weak handle so the closure does not own itself.
  std::weak_ptr<std::function<bool(std::vector<double>, std::vector<double>, int)>> self = covered;
  *covered = [a, b, self](std::vector<double> c, std::vector<double> h, int level) -> bool {
    if (a->box_inside(c, h) || b->box_inside(c, h)) return true;
    if (level == 0) return false;
    std::size_t axis = 0;
    for (std::size_t k = 1; k < h.size(); ++k)
      if (h[k] > h[axis]) axis = k;
    h[axis] /= 2.0;
    std::vector<double> left = c, right = c;
    left[axis] -= h[axis];
    right[axis] += h[axis];
    auto rec = self.lock();
    return (*rec)(left, h, level - 1) && (*rec)(right, h, level - 1);
  };
  d->box_inside = [covered, depth](std::span<const double> c, std::span<const double> h) {
    return (*covered)(std::vector<double>(c.begin(), c.end()), std::vector<double>(h.begin(), h.end()), depth);
  };
  auto ranges_of = [](const DomainPtr& o, const MultiIndex& n) {
    return o->scan_range ? o->scan_range(n) : detail::ranges_from_cube(*o->bounding_box, n);
  };
  d->scan_range = [a, b, ranges_of](const MultiIndex& n) {
    auto ra = ranges_of(a, n);
    const auto rb = ranges_of(b, n);
    for (std::size_t k = 0; k < ra.size(); ++k) {
      ra[k].first = std::min(ra[k].first, rb[k].first);
      ra[k].second = std::max(ra[k].second, rb[k].second);
    }
    return ra;
  };
  d->bounded = a->bounded && b->bounded;
  if (d->bounded) {
    const Hypercube& qa = *a->bounding_box;
    const Hypercube& qb = *b->bounding_box;
    Hypercube q{std::vector<Index>(a->dim), 1};
    Index side = 1;
    for (std::size_t k = 0; k < a->dim; ++k) {
      q.anchor[k] = std::min(qa.anchor[k], qb.anchor[k]);
      side = std::max(side, std::max(qa.anchor[k] + qa.side, qb.anchor[k] + qb.side) - q.anchor[k]);
    }
    q.side = side;
    d->bounding_box = q;
    d->measure = monte_carlo_measure(d->indicator, q);
  } else {
    const Hypercube& q = a->bounded ? *a->bounding_box : *b->bounding_box;
    const auto both = [a, b](std::span<const double> x) { return a->indicator(x) && b->indicator(x); };
    Measure cap = monte_carlo_measure(both, q);
    cap.value = a->measure.value + b->measure.value - cap.value;
    cap.std_error = std::hypot(cap.std_error, a->measure.std_error, b->measure.std_error);
    d->measure = cap;
  }
  return d;
}

/// Names accepted by make_domain.
inline std::vector<std::string> domain_names() {
  return {"unit_square", "disk", "cusp", "left_half", "right_half"};
}

/// Built-in registry. "disk" is the disk of radius 1/2 centred in the unit square.
inline DomainPtr make_domain(const std::string& name) {
  if (name == "unit_square") return unit_square();
  if (name == "disk") return disk("disk", 0.5, 0.5, 0.5);
  if (name == "cusp") return cusp_domain();
  if (name == "left_half") return axis_box("left_half", {0.0, 0.0}, {0.625, 1.0});
  if (name == "right_half") return axis_box("right_half", {0.375, 0.0}, {1.0, 1.0});
  throw ConfigError("unknown domain '" + name + "'");
}

}  // namespace glt
