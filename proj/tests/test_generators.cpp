#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "glt/fourier.hpp"
#include "glt/generators.hpp"
#include "glt/grid.hpp"
#include "glt/selection.hpp"

using namespace glt;

namespace {

std::vector<Index> k1(Index a) { return {a}; }
std::vector<Index> k2(Index a, Index b) { return {a, b}; }

DenseMatrix<double> dense(const SparseMatrix<double>& s) { return DenseMatrix<double>(s); }

}  // namespace

TEST(Fourier, OneDimensionalLaplacian) {
  auto f = [](std::span<const double> t) { return Complex(2.0 - 2.0 * std::cos(t[0]), 0.0); };
  auto tab = fourier_coeffs(f, {2}, {8});
  EXPECT_NEAR(std::abs(tab.at(k1(0)) - 2.0), 0.0, 1e-13);
  EXPECT_NEAR(std::abs(tab.at(k1(1)) + 1.0), 0.0, 1e-13);
  EXPECT_NEAR(std::abs(tab.at(k1(-1)) + 1.0), 0.0, 1e-13);
  EXPECT_EQ(tab.at(k1(2)), Complex(0.0, 0.0));
  EXPECT_EQ(tab.at(k1(-2)), Complex(0.0, 0.0));
  EXPECT_TRUE(tab.conjugate_symmetric(0.0));
}

TEST(Fourier, Constant) {
  auto tab = make_symbol("one_1d").table();
  EXPECT_EQ(tab.at(k1(0)), Complex(1.0, 0.0));
  EXPECT_EQ(tab.nonzeros().size(), 1u);
}

TEST(Fourier, TwoDimensionalLaplacian) {
  auto tab = make_symbol("laplacian_2d").table();
  EXPECT_NEAR(std::abs(tab.at(k2(0, 0)) - 4.0), 0.0, 1e-13);
  for (auto k : {k2(1, 0), k2(-1, 0), k2(0, 1), k2(0, -1)}) EXPECT_NEAR(std::abs(tab.at(k) + 1.0), 0.0, 1e-13);
  for (auto k : {k2(1, 1), k2(-1, 1), k2(1, -1), k2(-1, -1)}) EXPECT_EQ(tab.at(k), Complex(0.0, 0.0));
  EXPECT_EQ(tab.nonzeros().size(), 5u);
}

TEST(Fourier, ShiftIsNotHermitian) {
  auto tab = make_symbol("shift_1d").table();
  EXPECT_NEAR(std::abs(tab.at(k1(1)) - 1.0), 0.0, 1e-13);
  EXPECT_EQ(tab.at(k1(-1)), Complex(0.0, 0.0));
  EXPECT_FALSE(tab.conjugate_symmetric());
}

TEST(Fourier, AliasingIsRejected) {
  auto f = [](std::span<const double>) { return Complex(1.0, 0.0); };
  EXPECT_THROW(fourier_coeffs(f, {3}, {7}), ConfigError);
}

TEST(Fourier, SmoothNonPolynomialConverges) {
  // f = 1 / (2 - cos t) has f_k = r^{|k|} / sqrt(3), r = 2 - sqrt(3).
  auto f = [](std::span<const double> t) { return Complex(1.0 / (2.0 - std::cos(t[0])), 0.0); };
  auto tab = fourier_coeffs(f, {3}, {64});
  const double r = 2.0 - std::sqrt(3.0);
  for (Index k = -3; k <= 3; ++k)
    EXPECT_NEAR(tab.at(k1(k)).real(), std::pow(r, std::abs(static_cast<double>(k))) / std::sqrt(3.0), 1e-12);
}

TEST(Fourier, JsonRoundTrip) {
  auto tab = make_symbol("laplacian_2d").table();
  auto back = fourier_table_from_json(to_json(tab));
  EXPECT_EQ(back.cutoff(), tab.cutoff());
  for (std::size_t s = 0; s < tab.slots(); ++s) EXPECT_EQ(back.slot_value(s), tab.slot_value(s));
  EXPECT_EQ(back.source(), "laplacian_2d");
}

TEST(Fourier, UnknownSymbol) { EXPECT_THROW(make_symbol("bogus"), ConfigError); }

TEST(Toeplitz, Tridiagonal) {
  auto t = dense(toeplitz<double>(MultiIndex{3}, make_symbol("laplacian_1d").table()));
  DenseMatrix<double> expected(3, 3);
  expected << 2, -1, 0, -1, 2, -1, 0, -1, 2;
  EXPECT_EQ(t, expected);
}

TEST(Toeplitz, Identity) {
  auto t = dense(toeplitz<double>(MultiIndex{3}, make_symbol("one_1d").table()));
  EXPECT_EQ(t, DenseMatrix<double>::Identity(3, 3));
}

TEST(Toeplitz, TwoLevelBlockStructure) {
  auto t = dense(toeplitz<double>(MultiIndex{2, 2}, make_symbol("laplacian_2d").table()));
  DenseMatrix<double> expected(4, 4);
  expected << 4, -1, -1, 0, -1, 4, 0, -1, -1, 0, 4, -1, 0, -1, -1, 4;
  EXPECT_EQ(t, expected);
}

TEST(Toeplitz, EntriesAreCoefficientsOfIndexDifference) {
  // Oracle: direct f_{i-j} lookup on explicit multi-indices.
  FourierTable tab({1, 2}, "random");
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (std::size_t s = 0; s < tab.slots(); ++s) tab.set(tab.wave(s), Complex(u(rng), u(rng)));
  const MultiIndex n{3, 4};
  auto t = DenseMatrix<Complex>(toeplitz<Complex>(n, tab));
  for (Index r = 0; r < 12; ++r)
    for (Index c = 0; c < 12; ++c) {
      const std::vector<Index> k{r / 4 - c / 4, r % 4 - c % 4};
      EXPECT_EQ(t(r, c), tab.at(k));
    }
}

TEST(Toeplitz, ComplexTableIntoRealMatrixIsRejected) {
  FourierTable tab({1}, "i e^{i theta}");
  tab.set(k1(1), Complex(0.0, 1.0));
  EXPECT_THROW(toeplitz<double>(MultiIndex{3}, tab), InputError);
  EXPECT_EQ(DenseMatrix<Complex>(toeplitz<Complex>(MultiIndex{3}, tab))(1, 0), Complex(0.0, 1.0));
}

TEST(Toeplitz, RealEvenSymbolGivesExactSymmetry) {
  auto f = [](std::span<const double> t) { return Complex(3.0 + std::cos(t[0]) * std::cos(2.0 * t[1]), 0.0); };
  auto tab = fourier_coeffs(f, {2, 3}, {8, 10});
  auto t = dense(toeplitz<double>(MultiIndex{5, 6}, tab));
  EXPECT_EQ((t - t.transpose()).cwiseAbs().maxCoeff(), 0.0);
}

TEST(DiagSampling, HypercubeGrid) {
  auto g = hypercube_grid(MultiIndex{2}, Hypercube::unit(1));
  auto d = dense(diag_sampling<double>(g, [](std::span<const double> x) { return x[0]; }));
  DenseMatrix<double> expected = DenseMatrix<double>::Zero(2, 2);
  expected(0, 0) = 0.5;
  expected(1, 1) = 1.0;
  EXPECT_EQ(d, expected);
}

TEST(DiagSampling, ConstantAndIndicator) {
  auto g = domain_grid(MultiIndex{4, 4}, unit_square());
  auto one = dense(diag_sampling<double>(g, [](std::span<const double>) { return 1.0; }));
  EXPECT_EQ(one, DenseMatrix<double>::Identity(9, 9));
  auto ind = diag_sampling<double>(g, [](std::span<const double> x) { return x[0] < 0.5 ? 1.0 : 0.0; });
  EXPECT_EQ(DenseMatrix<double>(ind).sum(), 3.0);
  for (Index k = 0; k < 3; ++k) EXPECT_EQ(ind.coeff(k, k), 1.0);
}

TEST(DiagSampling, NonFiniteNamesThePoint) {
  auto g = domain_grid(MultiIndex{4, 4}, unit_square());
  try {
    diag_sampling<double>(g, [](std::span<const double> x) { return 1.0 / (x[0] - 0.5); });
    FAIL() << "expected EvaluationError";
  } catch (const EvaluationError& e) {
    EXPECT_NE(std::string(e.what()).find("0.500000"), std::string::npos) << e.what();
  }
}

TEST(ReducedToeplitz, FivePointLaplacianOnInterior) {
  auto g = domain_grid(MultiIndex{4, 4}, unit_square());
  auto r = dense(reduced_toeplitz<double>(g, make_symbol("laplacian_2d").table()));
  // Oracle: explicit Pi T Pi^T with Pi built from coordinates.
  auto big = hypercube_grid(MultiIndex{4, 4}, Hypercube::unit(2));
  auto t = dense(toeplitz<double>(MultiIndex{4, 4}, make_symbol("laplacian_2d").table()));
  DenseMatrix<double> pi = DenseMatrix<double>::Zero(9, 16);
  for (std::size_t i = 0; i < 9; ++i)
    for (std::size_t j = 0; j < 16; ++j)
      if (g.point(i) == big.point(j)) pi(static_cast<Index>(i), static_cast<Index>(j)) = 1.0;
  EXPECT_EQ(r, pi * t * pi.transpose());
  // Classical stencil of the 3x3 interior lattice.
  for (Index i = 0; i < 9; ++i) EXPECT_EQ(r(i, i), 4.0);
  EXPECT_EQ(r(0, 1), -1.0);
  EXPECT_EQ(r(0, 3), -1.0);
  EXPECT_EQ(r(2, 3), 0.0);
}

TEST(ReducedToeplitz, IdentitySymbol) {
  auto g = domain_grid(MultiIndex{8, 8}, make_domain("disk"));
  auto r = dense(reduced_toeplitz<double>(g, make_symbol("one_2d").table()));
  EXPECT_EQ(r, DenseMatrix<double>::Identity(static_cast<Index>(g.size()), static_cast<Index>(g.size())));
}

TEST(ReducedToeplitz, EqualsRestrictionOfEnclosingToeplitz) {
  for (const auto& name : domain_names()) {
    auto omega = make_domain(name);
    if (!omega->bounded) continue;
    for (Index m : {8, 16}) {
      const MultiIndex n{m, m};
      auto small = share(domain_grid(n, omega));
      auto big = share(hypercube_grid(n, Hypercube::unit(2)));
      auto map = selection_map(small, big);
      for (const auto& sym : {"laplacian_2d", "one_2d"}) {
        auto tab = make_symbol(sym).table();
        auto direct = reduced_toeplitz<double>(*small, tab);
        auto via = restrict(map, toeplitz<double>(n, tab));
        EXPECT_LE(dense(direct - via).cwiseAbs().maxCoeff() + 0.0, 1e-14) << name << " " << sym;
      }
    }
  }
}

TEST(DiagSampling, RestrictionOfDiagonalIsDiagonalOfRestriction) {
  auto a = [](std::span<const double> x) { return std::exp(x[0]) + x[1] * x[1]; };
  const MultiIndex n{16, 16};
  auto small = share(domain_grid(n, make_domain("disk")));
  auto big = share(hypercube_grid(n, Hypercube::unit(2)));
  auto map = selection_map(small, big);
  EXPECT_EQ(dense(restrict(map, diag_sampling<double>(*big, a))), dense(diag_sampling<double>(*small, a)));
}
