#include <cmath>
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>

#include "glt/domain.hpp"
#include "glt/grid.hpp"
#include "glt/multi_index.hpp"

using namespace glt;

namespace {

// Brute-force oracle for the cusp grid: rational box corners, division-free.
std::size_t cusp_count_oracle(Index m0, Index m1, Index i_limit) {
  std::size_t count = 0;
  for (Index i = 1; i <= i_limit; ++i)
    for (Index j = 1; j <= m1; ++j) {
      // box (i-1)/m0 .. (i+1)/m0 by (j-1)/m1 .. (j+1)/m1
      const Index hx_num = i + 1, hy_num = j + 1;
      bool inside;
      if (hx_num < m0) inside = hy_num <= m1;  // hx < 1
      else inside = hy_num * hx_num * hx_num <= m1 * m0 * m0;  // hy <= 1/hx^2
      if (inside) ++count;
    }
  return count;
}

}  // namespace

TEST(MultiIndex, Total) {
  EXPECT_EQ(n_total(MultiIndex{2, 3}), 6);
  EXPECT_EQ(n_total(MultiIndex{1}), 1);
  EXPECT_EQ(n_total(MultiIndex{4, 4}), 16);
}

TEST(MultiIndex, RejectsInvalid) {
  EXPECT_THROW(MultiIndex(std::vector<Index>{}), ConfigError);
  EXPECT_THROW((MultiIndex{3, 0}), ConfigError);
}

TEST(MultiIndex, LexOrderFirstCoordinateMostSignificant) {
  EXPECT_LT((MultiIndex{1, 9}), (MultiIndex{2, 1}));
  EXPECT_LT((MultiIndex{2, 1}), (MultiIndex{2, 3}));
  EXPECT_EQ((MultiIndex{2, 3}), (MultiIndex{2, 3}));
  EXPECT_EQ((MultiIndex{16, 16}).label(), "16x16");
}

TEST(Hypercube, Containment) {
  const Hypercube small{{1}, 1}, big{{0}, 2};
  EXPECT_TRUE(small.inside(big));
  EXPECT_FALSE(big.inside(small));
  const std::vector<double> right_end{2.0}, left_end{1.0};
  EXPECT_TRUE(small.contains(right_end));
  EXPECT_FALSE(small.contains(left_end));
}

TEST(HypercubeGrid, OneDimensional) {
  auto g = hypercube_grid(MultiIndex{2}, Hypercube::unit(1));
  ASSERT_EQ(g.size(), 2u);
  EXPECT_DOUBLE_EQ(g.coord(0, 0), 0.5);
  EXPECT_DOUBLE_EQ(g.coord(1, 0), 1.0);

  auto shifted = hypercube_grid(MultiIndex{2}, Hypercube{{1}, 2});
  ASSERT_EQ(shifted.size(), 4u);
  const double expected[] = {1.5, 2.0, 2.5, 3.0};
  for (std::size_t k = 0; k < 4; ++k) EXPECT_DOUBLE_EQ(shifted.coord(k, 0), expected[k]);
}

TEST(HypercubeGrid, SinglePointAndCardinality) {
  auto g = hypercube_grid(MultiIndex{1, 1}, Hypercube::unit(2));
  ASSERT_EQ(g.size(), 1u);
  EXPECT_DOUBLE_EQ(g.coord(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(g.coord(0, 1), 1.0);
  EXPECT_EQ(hypercube_grid(MultiIndex{3, 5}, Hypercube{{0, 0}, 2}).size(), 4u * 15u);
}

TEST(HypercubeGrid, CapIsEnforced) {
  EXPECT_THROW(hypercube_grid(MultiIndex{100, 100}, Hypercube::unit(2), 1000), SizeLimitError);
}

TEST(DomainGrid, UnitSquare) {
  auto sq = unit_square();
  auto g = domain_grid(MultiIndex{4, 4}, sq);
  ASSERT_EQ(g.size(), 9u);
  std::size_t k = 0;
  for (int i = 1; i <= 3; ++i)
    for (int j = 1; j <= 3; ++j, ++k) {
      EXPECT_DOUBLE_EQ(g.coord(k, 0), i / 4.0);
      EXPECT_DOUBLE_EQ(g.coord(k, 1), j / 4.0);
    }
  auto g2 = domain_grid(MultiIndex{2, 2}, sq);
  ASSERT_EQ(g2.size(), 1u);
  EXPECT_DOUBLE_EQ(g2.coord(0, 0), 0.5);
}

TEST(DomainGrid, FullCubeInteriorDropsBoundaryLayer) {
  for (Index m : {3, 8, 17}) EXPECT_EQ(domain_grid(MultiIndex{m, m}, unit_square()).size(), std::size_t((m - 1) * (m - 1)));
}

TEST(DomainGrid, CuspMatchesEnumerationOracle) {
  auto cusp = cusp_domain();
  for (Index m : {4, 8, 16, 40}) {
    // The oracle scans a strip far wider than the registered extent.
    EXPECT_EQ(domain_grid(MultiIndex{m, m}, cusp).size(), cusp_count_oracle(m, m, 20 * m)) << "m=" << m;
  }
  EXPECT_EQ(domain_grid(MultiIndex{8, 16}, cusp).size(), cusp_count_oracle(8, 16, 400));
}

TEST(DomainGrid, CuspIsBoundedByMeasure) {
  auto cusp = cusp_domain();
  for (Index m : {8, 16, 32, 64}) {
    const MultiIndex n{m, m};
    EXPECT_LE(static_cast<double>(domain_grid_size(n, cusp)), 2.0 * static_cast<double>(n.total()));
    EXPECT_EQ(domain_grid_size(n, cusp), domain_grid(n, cusp).size());
  }
}

TEST(DomainGrid, PointsAreLexSortedAndInside) {
  for (const auto& name : domain_names()) {
    auto omega = make_domain(name);
    auto g = domain_grid(MultiIndex{16, 16}, omega);
    for (std::size_t k = 0; k < g.size(); ++k) {
      const auto p = g.point(k);
      EXPECT_TRUE(omega->indicator(p)) << name;
      if (k > 0) EXPECT_TRUE(lex_compare(g.lattice(k - 1), g.lattice(k)) < 0) << name;
    }
  }
}

TEST(DomainGrid, DiskUsesFarthestCorner) {
  auto d = make_domain("disk");
  const MultiIndex n{16, 16};
  std::size_t oracle = 0;
  for (int i = 0; i <= 16; ++i)
    for (int j = 0; j <= 16; ++j) {
      // Farthest corner of the box around (i/16, j/16) from (1/2, 1/2) in units of 1/16.
      const int dx = std::abs(i - 8) + 1, dy = std::abs(j - 8) + 1;
      if (dx * dx + dy * dy <= 64) ++oracle;
    }
  EXPECT_EQ(domain_grid(n, d).size(), oracle);
}

TEST(DomainGrid, UnboundedWithoutExtentIsConfigError) {
  auto d = std::make_shared<DomainSpec>(*cusp_domain());
  d->scan_range = nullptr;
  d->bounding_box.reset();
  EXPECT_THROW(domain_grid(MultiIndex{4, 4}, d), ConfigError);
}

TEST(Exhaustion, CuspMeasures) {
  auto cusp = cusp_domain();
  EXPECT_DOUBLE_EQ(domain_measure(*cusp), 2.0);
  EXPECT_DOUBLE_EQ(domain_measure(*exhaustion_domain(cusp, 1.0)), 1.0);
  EXPECT_DOUBLE_EQ(domain_measure(*exhaustion_domain(cusp, 2.0)), 1.5);
  EXPECT_EQ(exhaustion_domain(cusp, 2.0)->measure.source, MeasureSource::analytic);
}

TEST(Exhaustion, CuspAtOneIsUnitSquareGrid) {
  auto cusp = cusp_domain();
  for (Index m : {4, 8, 16}) {
    const MultiIndex n{m, m};
    auto a = domain_grid(n, exhaustion_domain(cusp, 1.0));
    auto b = domain_grid(n, unit_square());
    EXPECT_EQ(a.raw(), b.raw());
  }
}

TEST(Exhaustion, NestedGrids) {
  auto cusp = cusp_domain();
  const MultiIndex n{24, 24};
  auto full = domain_grid(n, cusp);
  std::size_t prev = 0;
  for (double t : {1.0, 2.0, 4.0, 8.0}) {
    auto g = domain_grid(n, exhaustion_domain(cusp, t));
    EXPECT_GE(g.size(), prev);
    prev = g.size();
    for (std::size_t k = 0; k < g.size(); ++k) EXPECT_TRUE(full.find(g.lattice(k)).has_value());
  }
  EXPECT_LE(prev, full.size());
}

TEST(Exhaustion, SaturatesOnBoundedDomain) {
  auto d = make_domain("disk");
  auto e = exhaustion_domain(d, 5.0);
  EXPECT_EQ(domain_grid(MultiIndex{16, 16}, d).raw(), domain_grid(MultiIndex{16, 16}, e).raw());
  EXPECT_NEAR(domain_measure(*e), std::numbers::pi / 4.0, 1e-12);
}

TEST(Exhaustion, RejectsNonPositiveT) { EXPECT_THROW(exhaustion_domain(unit_square(), 0.0), ConfigError); }

TEST(Measure, Registry) {
  EXPECT_DOUBLE_EQ(domain_measure(*unit_square()), 1.0);
  EXPECT_NEAR(domain_measure(*make_domain("disk")), std::numbers::pi / 4.0, 1e-15);
  EXPECT_THROW(make_domain("nope"), ConfigError);
}

TEST(Measure, MonteCarloIsSeededAndAccurate) {
  auto sq = unit_square();
  auto disk = make_domain("disk");
  auto cap = intersection_domain(sq, disk);
  EXPECT_EQ(cap->measure.source, MeasureSource::monte_carlo);
  EXPECT_NEAR(cap->measure.value, std::numbers::pi / 4.0, 5.0 * cap->measure.std_error);
  auto again = intersection_domain(sq, disk);
  EXPECT_EQ(cap->measure.value, again->measure.value);
}

TEST(Measure, DimensionRatioConvergesOnBoundedDomains) {
  for (const auto& name : domain_names()) {
    auto omega = make_domain(name);
    if (!omega->bounded) continue;
    const double target = domain_measure(*omega);
    double prev = 1e9;
    for (Index m : {8, 16, 32, 64}) {
      const MultiIndex n{m, m};
      const double err =
          std::abs(static_cast<double>(domain_grid_size(n, omega)) / static_cast<double>(n.total()) - target);
      EXPECT_LT(err, prev + 1e-3) << name << " m=" << m;
      // Boundary layer of width O(1/m): err * m stays bounded by the perimeter.
      EXPECT_LT(err * static_cast<double>(m), 4.5) << name << " m=" << m;
      prev = err;
    }
    // The disk loses a layer of area ~ 1.3 * pi / m, about 0.063 at m = 64.
    if (name != "disk") EXPECT_LT(prev, 0.05) << name;
  }
}

TEST(Grid, CsvExport) {
  std::ostringstream os;
  write_csv(os, domain_grid(MultiIndex{2, 2}, unit_square()));
  EXPECT_EQ(os.str(), "x1,x2\n0.5,0.5\n");
}

TEST(UnionDomain, UnboundedOperand) {
  // The disk lies inside (0,1)^2, which lies inside the cusp, so the union is the cusp.
  auto cusp = make_domain("cusp"), dsk = make_domain("disk");
  auto u = union_domain(cusp, dsk);
  EXPECT_FALSE(u->bounded);
  EXPECT_NEAR(domain_measure(*u), 2.0, 5.0 * u->measure.std_error + 1e-12);
  for (Index m : {8, 16}) {
    const MultiIndex n{m, m};
    const auto gu = domain_grid(n, u), gc = domain_grid(n, cusp);
    ASSERT_EQ(gu.size(), gc.size());
    for (std::size_t k = 0; k < gc.size(); ++k) EXPECT_EQ(gu.point(k), gc.point(k));
  }
  EXPECT_THROW(union_domain(cusp, cusp), ConfigError);
}
