#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "glt/model_problem.hpp"
#include "glt/sequence.hpp"

using namespace glt;

namespace {

DenseMatrix<double> dense(const SparseMatrix<double>& s) { return DenseMatrix<double>(s); }

double a_fn(std::span<const double> x) { return 1.0 + x[0] * x[0] + 0.5 * x[1]; }
double b_fn(std::span<const double> x) { return 2.0 + std::sin(3.0 * x[0] + x[1]); }

struct SamplePoint {
  std::vector<double> x, theta;
};

std::vector<SamplePoint> seeded_points(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(0.0, 1.0), ut(-std::numbers::pi, std::numbers::pi);
  std::vector<SamplePoint> out(count);
  for (auto& p : out) {
    p.x = {ux(rng), ux(rng)};
    p.theta = {ut(rng), ut(rng)};
  }
  return out;
}

double max_symbol_gap(const SymbolFn& f, const std::function<Complex(const SamplePoint&)>& g) {
  double gap = 0.0;
  for (const auto& p : seeded_points(1000, 42)) gap = std::max(gap, std::abs(f(p.x, p.theta) - g(p)));
  return gap;
}

}  // namespace

TEST(Sequence, ToeplitzOnHypercubeAndGridCache) {
  auto seq = toeplitz_sequence<double>(make_symbol("laplacian_2d").table(), Hypercube::unit(2));
  const MultiIndex n{4, 4};
  EXPECT_EQ(seq.matrix(n).rows(), 16);
  EXPECT_EQ(seq.grid(n).get(), seq.grid(n).get());
  EXPECT_TRUE(seq.hermitian());
  EXPECT_EQ(seq.provenance()->op, "toeplitz");
}

TEST(Sequence, GeneratorSizeIsChecked) {
  auto grids = grid_cache(unit_square());
  GltSequence<double> bad(grids, [](const MultiIndex&) { return sparse_identity<double>(3); }, SymbolFn::constant(1.0),
                          true, make_provenance("identity"));
  EXPECT_THROW(bad.matrix(MultiIndex{4, 4}), DimensionError);
}

TEST(Sequence, HermitianFlagIsVerifiedAtLeaves) {
  auto grids = grid_cache(unit_square());
  auto gen = [grids](const MultiIndex& n) {
    SparseMatrix<double> m = sparse_identity<double>(grids->get(n)->size());
    m.coeffRef(0, 1) = 1.0;
    return m;
  };
  GltSequence<double> lying(grids, gen, SymbolFn::constant(1.0), true, make_provenance("identity"));
  EXPECT_THROW(lying.matrix(MultiIndex{4, 4}), InputError);
}

TEST(ReducedSequence, ToeplitzRestrictsToReducedToeplitz) {
  auto tab = make_symbol("laplacian_2d").table();
  auto base = toeplitz_sequence<double>(tab, Hypercube::unit(2));
  for (const auto& name : {"unit_square", "disk", "left_half"}) {
    auto omega = make_domain(name);
    auto red = reduced_sequence(base, omega);
    for (Index m : {4, 8, 16}) {
      const MultiIndex n{m, m};
      EXPECT_EQ(dense(red.matrix(n)), dense(reduced_toeplitz<double>(*red.grid(n), tab))) << name;
    }
  }
}

TEST(ReducedSequence, DiagonalAndInteriorDimension) {
  auto base = diag_sequence<double>(a_fn, hypercube_domain(Hypercube::unit(2)));
  auto red = reduced_sequence(base, unit_square());
  for (Index m : {4, 7}) {
    const MultiIndex n{m, m};
    EXPECT_EQ(red.matrix(n).rows(), (m - 1) * (m - 1));
    EXPECT_EQ(dense(red.matrix(n)), dense(diag_sampling<double>(*red.grid(n), a_fn)));
  }
}

TEST(ReducedSequence, ContainmentViolation) {
  auto base = toeplitz_sequence<double>(make_symbol("laplacian_2d").table(), Hypercube::unit(2));
  EXPECT_THROW(reduced_sequence(base, axis_box("wide", {0.0, 0.0}, {1.5, 1.0})), DomainError);
  EXPECT_THROW(reduced_sequence(base, make_domain("cusp")), DomainError);
  auto not_cube = diag_sequence<double>(a_fn, unit_square());
  EXPECT_THROW(reduced_sequence(not_cube, unit_square()), DomainError);
}

TEST(Algebra, AddAndScale) {
  auto omega = unit_square();
  auto a = diag_sequence<double>(a_fn, omega), b = diag_sequence<double>(b_fn, omega);
  const MultiIndex n{8, 8};
  EXPECT_EQ(dense(seq_add(a, b, 1.0, 0.0).matrix(n)), dense(a.matrix(n)));
  auto sum = seq_add(a, b);
  auto oracle = [](std::span<const double> x) { return a_fn(x) + b_fn(x); };
  EXPECT_LE((dense(sum.matrix(n)) - dense(diag_sampling<double>(*sum.grid(n), oracle))).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_TRUE(sum.hermitian());
  EXPECT_EQ(sum.provenance()->op, "add");
  EXPECT_EQ(sum.provenance()->children.size(), 2u);
}

TEST(Algebra, ToeplitzLinearity) {
  auto omega = make_domain("disk");
  auto f = make_symbol("laplacian_2d").table(), g = make_symbol("one_2d").table();
  auto sum = seq_add(unbounded_toeplitz<double>(f, omega), unbounded_toeplitz<double>(g, omega), 2.0, 3.0);
  auto combined = fourier_coeffs(
      [](std::span<const double> t) { return Complex(2.0 * (4.0 - 2.0 * std::cos(t[0]) - 2.0 * std::cos(t[1])) + 3.0); },
      {1, 1}, {4, 4});
  const MultiIndex n{12, 12};
  EXPECT_LE((dense(sum.matrix(n)) - dense(reduced_toeplitz<double>(*sum.grid(n), combined))).cwiseAbs().maxCoeff(),
            1e-13);
}

TEST(Algebra, DomainMismatch) {
  auto a = diag_sequence<double>(a_fn, unit_square());
  auto b = diag_sequence<double>(a_fn, make_domain("disk"));
  EXPECT_THROW(seq_add(a, b), DomainError);
  EXPECT_THROW(seq_mul(a, b), DomainError);
}

TEST(Algebra, Products) {
  auto omega = unit_square();
  auto a = diag_sequence<double>(a_fn, omega), b = diag_sequence<double>(b_fn, omega);
  const MultiIndex n{8, 8};
  auto prod = seq_mul(a, b);
  auto oracle = [](std::span<const double> x) { return a_fn(x) * b_fn(x); };
  EXPECT_EQ(dense(prod.matrix(n)), dense(diag_sampling<double>(*prod.grid(n), oracle)));
  EXPECT_TRUE(prod.hermitian());
  auto t = unbounded_toeplitz<double>(make_symbol("laplacian_2d").table(), omega);
  EXPECT_EQ(dense(seq_mul(identity_sequence<double>(omega), t).matrix(n)), dense(t.matrix(n)));
  EXPECT_FALSE(seq_mul(a, t).hermitian());
}

TEST(Algebra, Adjoint) {
  auto omega = unit_square();
  auto t = unbounded_toeplitz<double>(make_symbol("laplacian_2d").table(), omega);
  const MultiIndex n{8, 8};
  EXPECT_EQ(dense(seq_adjoint(t).matrix(n)), dense(t.matrix(n)));
  auto a = diag_sequence<double>(a_fn, omega);
  auto nonsym = seq_mul(a, t);
  EXPECT_EQ(dense(seq_adjoint(seq_adjoint(nonsym)).matrix(n)), dense(nonsym.matrix(n)));
}

TEST(Algebra, AdjointOfComplexToeplitzIsReflectedConjugate) {
  // (f_{i-j})^* has entries conj(f_{j-i}): the table of conj(f(theta)).
  FourierTable f({1, 1}, "complex");
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (std::size_t s = 0; s < f.slots(); ++s) f.set(f.wave(s), Complex(u(rng), u(rng)));
  FourierTable g({1, 1}, "conj");
  for (std::size_t s = 0; s < f.slots(); ++s) {
    auto k = f.wave(s);
    std::vector<Index> neg{-k[0], -k[1]};
    g.set(k, std::conj(f.at(neg)));
  }
  auto omega = make_domain("disk");
  auto seq = unbounded_toeplitz<Complex>(f, omega);
  auto adj = seq_adjoint(seq);
  const MultiIndex n{8, 8};
  EXPECT_EQ(DenseMatrix<Complex>(adj.matrix(n)), DenseMatrix<Complex>(reduced_toeplitz<Complex>(*adj.grid(n), g)));
  EXPECT_FALSE(seq.hermitian());
}

TEST(Algebra, SymbolHomomorphism) {
  auto omega = unit_square();
  auto a = diag_sequence<double>(a_fn, omega);
  auto t = unbounded_toeplitz<double>(make_symbol("laplacian_2d").table(), omega);
  auto h = [](const SamplePoint& p) { return Complex(4.0 - 2.0 * std::cos(p.theta[0]) - 2.0 * std::cos(p.theta[1])); };
  auto av = [](const SamplePoint& p) { return Complex(a_fn(p.x)); };
  EXPECT_LE(max_symbol_gap(seq_add(a, t, 2.0, -1.5).symbol(), [&](const SamplePoint& p) { return 2.0 * av(p) - 1.5 * h(p); }),
            1e-12);
  EXPECT_LE(max_symbol_gap(seq_mul(a, t).symbol(), [&](const SamplePoint& p) { return av(p) * h(p); }), 1e-12);
  EXPECT_LE(max_symbol_gap(seq_adjoint(seq_mul(a, t)).symbol(), [&](const SamplePoint& p) { return std::conj(av(p) * h(p)); }),
            1e-12);
  EXPECT_LE(max_symbol_gap(seq_pinv(a).symbol(), [&](const SamplePoint& p) { return 1.0 / av(p); }), 1e-12);
}

TEST(Pinv, Examples) {
  DenseMatrix<double> d = DenseMatrix<double>::Zero(2, 2);
  d(0, 0) = 2.0;
  DenseMatrix<double> expected = DenseMatrix<double>::Zero(2, 2);
  expected(0, 0) = 0.5;
  EXPECT_EQ(pinv<double>(d), expected);
  EXPECT_EQ(pinv<double>(DenseMatrix<double>::Identity(5, 5)), (DenseMatrix<double>::Identity(5, 5)));
  auto omega = unit_square();
  auto a = diag_sequence<double>(a_fn, omega);
  const MultiIndex n{8, 8};
  auto inv = seq_pinv(a).matrix(n);
  auto oracle = [](std::span<const double> x) { return 1.0 / a_fn(x); };
  EXPECT_EQ(dense(inv), dense(diag_sampling<double>(*a.grid(n), oracle)));
  EXPECT_THROW(seq_pinv(a, -1.0), ConfigError);
}

TEST(Pinv, MoorePenroseAxiomsOnRankDeficientInput) {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 5; ++trial) {
    DenseMatrix<double> u(20, 6);
    for (Index i = 0; i < u.size(); ++i) u.data()[i] = g(rng);
    const DenseMatrix<double> a = u * u.transpose();  // rank 6, symmetric
    const DenseMatrix<double> p = pinv<double>(a);
    const double scale = a.norm();
    EXPECT_LE((a * p * a - a).cwiseAbs().maxCoeff(), 1e-10 * scale);
    EXPECT_LE((p * a * p - p).cwiseAbs().maxCoeff(), 1e-10 * p.norm());
    EXPECT_LE((a * p - (a * p).transpose()).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(Unbounded, SaturatedEqualsReduced) {
  auto tab = make_symbol("laplacian_2d").table();
  auto disk = make_domain("disk");
  const MultiIndex n{16, 16};
  auto sat = unbounded_toeplitz<double>(tab, disk, 3.0);
  auto full = unbounded_toeplitz<double>(tab, disk);
  EXPECT_EQ(dense(sat.matrix(n)), dense(full.matrix(n)));
  EXPECT_EQ(dense(full.matrix(n)), dense(reduced_toeplitz<double>(*full.grid(n), tab)));
}

TEST(Unbounded, CuspAtOneScattersOnUnitSquare) {
  auto tab = make_symbol("laplacian_2d").table();
  auto cusp = make_domain("cusp");
  const MultiIndex n{8, 8};
  auto seq = unbounded_toeplitz<double>(tab, cusp, 1.0);
  auto m = dense(seq.matrix(n));
  auto big = seq.grid(n);
  auto small = share(domain_grid(n, unit_square()));
  auto map = selection_map(small, big);
  EXPECT_EQ(restrict(map, m), dense(reduced_toeplitz<double>(*small, tab)));
  // Everything outside the selected rows and columns is zero.
  EXPECT_EQ(m.cwiseAbs().sum(), restrict(map, m).cwiseAbs().sum());
  // Tracked symbol: f(theta) 1_{Omega_1}(x).
  const std::vector<double> th{0.3, -1.1}, inside{0.5, 0.5}, outside{1.5, 0.2};
  EXPECT_NEAR(seq.symbol()(inside, th).real(), tab.evaluate(th).real(), 1e-14);
  EXPECT_EQ(seq.symbol()(outside, th), Complex(0.0, 0.0));
  auto inf = unbounded_toeplitz<double>(tab, cusp);
  EXPECT_NEAR(inf.symbol()(outside, th).real(), 4.0 - 2.0 * std::cos(0.3) - 2.0 * std::cos(-1.1), 1e-14);
}

TEST(Unbounded, DiagonalIdentityAndSpectrum) {
  auto cusp = make_domain("cusp");
  const MultiIndex n{8, 8};
  auto one = unbounded_diag<double>([](std::span<const double>) { return 1.0; }, cusp);
  EXPECT_EQ(dense(one.matrix(n)), dense(identity_sequence<double>(cusp).matrix(n)));
  auto a = unbounded_diag<double>(make_coefficient("builtin"), cusp);
  auto ev = sym_eigenvalues(a.matrix(n)).values;
  std::vector<double> samples;
  for (const auto& p : grid_points(*a.grid(n))) samples.push_back(builtin_coefficient(p[0], p[1]));
  std::sort(samples.begin(), samples.end());
  EXPECT_EQ(ev, samples);
  auto bad = unbounded_diag<double>([](std::span<const double> x) { return x[0] > 1.5 ? NAN : 1.0; }, cusp);
  EXPECT_THROW(bad.matrix(n), EvaluationError);
}

TEST(Gacs, IdentitySequence) {
  auto cusp = make_domain("cusp");
  auto id = identity_sequence<double>(cusp);
  const MultiIndex n{16, 16};
  for (double t : {1.0, 2.0, 4.0}) {
    auto r = gacs_decompose(id, t, n);
    EXPECT_EQ(r.certificate.rank_correction, r.certificate.dim_defect);
    EXPECT_TRUE(r.certificate.certified());
    EXPECT_EQ(r.certificate.norm_correction, 0.0);
    // S is a 0/1 diagonal.
    for (int c = 0; c < r.correction.outerSize(); ++c)
      for (SparseMatrix<double>::InnerIterator it(r.correction, c); it; ++it) {
        EXPECT_EQ(it.row(), it.col());
        EXPECT_EQ(it.value(), 1.0);
      }
  }
}

TEST(Gacs, SaturatedExhaustionHasZeroCorrection) {
  auto disk = make_domain("disk");
  auto seq = unbounded_toeplitz<double>(make_symbol("laplacian_2d").table(), disk);
  auto r = gacs_decompose(seq, 2.0, MultiIndex{16, 16});
  EXPECT_EQ(r.correction.nonZeros(), 0);
  EXPECT_EQ(r.certificate.dim_defect, 0u);
  EXPECT_EQ(r.certificate.rank_correction, 0u);
}

TEST(Gacs, ModelOperatorRatesDecrease) {
  auto cusp = make_domain("cusp");
  auto seq = model_sequence(cusp, make_coefficient("builtin"), "a");
  const MultiIndex n{24, 24};
  double prev_m = 2.0, prev_c = 2.0;
  for (double t : {2.0, 4.0, 8.0}) {
    auto r = gacs_decompose(seq, t, n);
    EXPECT_TRUE(r.certificate.certified()) << "t=" << t;
    EXPECT_LE(r.certificate.m_rate(), prev_m);
    EXPECT_LE(r.certificate.c_rate(), prev_c);
    prev_m = r.certificate.m_rate();
    prev_c = r.certificate.c_rate();
    // Decomposition identity A = E(B) + S holds exactly.
    const auto map = selection_map(share(domain_grid(n, exhaustion_domain(cusp, t))), seq.grid(n));
    EXPECT_EQ(dense(seq.matrix(n)), dense(extend(map, r.approximant)) + dense(r.correction));
  }
}

TEST(Gacs, DegenerateExhaustion) {
  auto cusp = make_domain("cusp");
  auto r = gacs_decompose(identity_sequence<double>(cusp), 0.1, MultiIndex{4, 4});
  EXPECT_TRUE(r.certificate.degenerate);
  EXPECT_EQ(r.approximant.rows(), 0);
  EXPECT_EQ(r.certificate.rank_correction, r.certificate.dim);
}

TEST(AcsProfile, Examples) {
  auto omega = unit_square();
  auto a = diag_sequence<double>(a_fn, omega);
  const std::vector<MultiIndex> ns{MultiIndex{4, 4}, MultiIndex{8, 8}, MultiIndex{12, 12}};
  auto same = acs_distance_profile(a, a, ns);
  for (double p : same.p) EXPECT_EQ(p, 0.0);
  auto eps = seq_add(a, identity_sequence<double>(omega), 1.0, 0.25);
  auto prof = acs_distance_profile(eps, a, ns);
  for (double p : prof.p) EXPECT_NEAR(p, 0.25, 1e-14);
  auto wrong = diag_sequence<double>(a_fn, make_domain("disk"));
  EXPECT_THROW(acs_distance_profile(a, wrong, ns), DimensionError);
}

TEST(AcsProfile, RankOnePerturbationDecays) {
  auto omega = unit_square();
  auto grids = grid_cache(omega);
  auto gen = [grids](const MultiIndex& n) {
    const auto s = static_cast<Index>(grids->get(n)->size());
    SparseMatrix<double> m(s, s);
    m.insert(0, 0) = 5.0;
    return m;
  };
  GltSequence<double> z(grids, gen, SymbolFn::constant(0.0), true, make_provenance("zero"));
  auto prof = acs_distance_profile(z, zero_sequence<double>(omega), {MultiIndex{4, 4}, MultiIndex{8, 8}, MultiIndex{16, 16}});
  for (std::size_t i = 0; i < prof.p.size(); ++i) EXPECT_DOUBLE_EQ(prof.p[i], 1.0 / static_cast<double>(prof.dims[i]));
  EXPECT_TRUE(prof.nonincreasing);
}

TEST(Isometry, ZeroAndConstant) {
  auto omega = unit_square();
  auto zero = isometry_check(zero_sequence<double>(omega), {MultiIndex{4, 4}, MultiIndex{8, 8}}, 16);
  EXPECT_EQ(zero.pm, 0.0);
  EXPECT_EQ(zero.gap, 0.0);
  auto eps = seq_add(zero_sequence<double>(omega), identity_sequence<double>(omega), 1.0, 0.3);
  auto r = isometry_check(eps, {MultiIndex{8, 8}}, 16);
  EXPECT_NEAR(r.profile.tail, 0.3, 1e-15);
  EXPECT_NEAR(r.pm, 0.3, 1e-15);
}

TEST(Provenance, JsonTree) {
  auto omega = unit_square();
  auto s = seq_pinv(seq_add(diag_sequence<double>(a_fn, omega, "a"), identity_sequence<double>(omega)));
  auto j = s.provenance()->to_json();
  EXPECT_EQ(j["op"], "pinv");
  EXPECT_EQ(j["children"][0]["op"], "add");
  EXPECT_EQ(j["children"][0]["children"][0]["params"]["function"], "a");
}
