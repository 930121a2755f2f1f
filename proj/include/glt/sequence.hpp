#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <Eigen/Sparse>
#include <nlohmann/json.hpp>

#include "glt/domain.hpp"
#include "glt/error.hpp"
#include "glt/fourier.hpp"
#include "glt/generators.hpp"
#include "glt/grid.hpp"
#include "glt/selection.hpp"
#include "glt/spectral.hpp"

namespace glt {

/// A tracked symbol kappa(x, theta). Symbols are composed as closures; two
/// symbols are compared by evaluating them at sample points.
struct SymbolFn {
  SymbolEval eval;
  std::string description;

  Complex operator()(std::span<const double> x, std::span<const double> theta) const { return eval(x, theta); }

  static SymbolFn space(std::function<Complex(std::span<const double>)> a, std::string desc) {
    return {[a = std::move(a)](std::span<const double> x, std::span<const double>) { return a(x); }, std::move(desc)};
  }
  static SymbolFn frequency(FrequencyFn f, std::string desc) {
    return {[f = std::move(f)](std::span<const double>, std::span<const double> th) { return f(th); }, std::move(desc)};
  }
  static SymbolFn constant(Complex c) {
    return {[c](std::span<const double>, std::span<const double>) { return c; },
            "const(" + detail::format_real(c.real()) + (c.imag() != 0.0 ? "+" + detail::format_real(c.imag()) + "i" : "") + ")"};
  }
};

namespace detail {
inline std::string weighted(Complex c, const std::string& desc) {
  if (c == Complex(1.0, 0.0)) return "(" + desc + ")";
  return SymbolFn::constant(c).description + "*(" + desc + ")";
}
}  // namespace detail

inline SymbolFn symbol_combine(Complex alpha, const SymbolFn& f, Complex beta, const SymbolFn& g) {
  return {[alpha, beta, f = f.eval, g = g.eval](std::span<const double> x, std::span<const double> th) {
            return alpha * f(x, th) + beta * g(x, th);
          },
          detail::weighted(alpha, f.description) + "+" + detail::weighted(beta, g.description)};
}
inline SymbolFn symbol_product(const SymbolFn& f, const SymbolFn& g) {
  return {[f = f.eval, g = g.eval](std::span<const double> x, std::span<const double> th) { return f(x, th) * g(x, th); },
          "(" + f.description + ")*(" + g.description + ")"};
}
inline SymbolFn symbol_conj(const SymbolFn& f) {
  return {[f = f.eval](std::span<const double> x, std::span<const double> th) { return std::conj(f(x, th)); },
          "conj(" + f.description + ")"};
}
/// 1/f, with the Moore-Penrose convention 1/0 = 0.
inline SymbolFn symbol_inverse(const SymbolFn& f) {
  return {[f = f.eval](std::span<const double> x, std::span<const double> th) {
            const Complex v = f(x, th);
            return v == Complex(0.0, 0.0) ? Complex(0.0, 0.0) : Complex(1.0, 0.0) / v;
          },
          "inv(" + f.description + ")"};
}
/// f * 1_Omega(x).
inline SymbolFn symbol_cut(const SymbolFn& f, const DomainPtr& omega) {
  return {[f = f.eval, omega](std::span<const double> x, std::span<const double> th) {
            return omega->indicator(x) ? f(x, th) : Complex(0.0, 0.0);
          },
          "(" + f.description + ")*1[" + omega->name + "]"};
}

/// Construction tree of a sequence, exported as JSON for reproducibility.
struct Provenance {
  std::string op;
  nlohmann::json params = nlohmann::json::object();
  std::vector<std::shared_ptr<const Provenance>> children;

  nlohmann::json to_json() const {
    nlohmann::json j{{"op", op}, {"params", params}};
    j["children"] = nlohmann::json::array();
    for (const auto& c : children) j["children"].push_back(c->to_json());
    return j;
  }
};
using ProvenancePtr = std::shared_ptr<const Provenance>;

inline ProvenancePtr make_provenance(std::string op, nlohmann::json params = nlohmann::json::object(),
                                     std::vector<ProvenancePtr> children = {}) {
  return std::make_shared<const Provenance>(Provenance{std::move(op), std::move(params), std::move(children)});
}

/// Per-domain memo of grids, shared by all sequences built on the same domain.
class GridCache {
 public:
  explicit GridCache(DomainPtr domain) : domain_(std::move(domain)) {}
  const DomainPtr& domain() const noexcept { return domain_; }
  GridPtr get(const MultiIndex& n) const {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = grids_.find(n);
    if (it != grids_.end()) return it->second;
    auto g = share(domain_grid(n, domain_));
    grids_.emplace(n, g);
    return g;
  }

 private:
  DomainPtr domain_;
  mutable std::mutex mutex_;
  mutable std::map<MultiIndex, GridPtr> grids_;
};
using GridCachePtr = std::shared_ptr<GridCache>;

inline GridCachePtr grid_cache(DomainPtr domain) { return std::make_shared<GridCache>(std::move(domain)); }

/// A lazy matrix-sequence n -> A_n on Theta_{n,Omega} with its tracked symbol.
template <class Scalar = double>
class GltSequence {
 public:
  using Matrix = SparseMatrix<Scalar>;
  using Generator = std::function<Matrix(const MultiIndex&)>;

  /// Leaf constructor; a Hermitian flag is checked on every generated matrix.
  GltSequence(GridCachePtr grids, Generator gen, SymbolFn symbol, bool hermitian, ProvenancePtr provenance)
      : GltSequence(std::move(grids), std::move(gen), std::move(symbol), hermitian, std::move(provenance), hermitian) {}

  GltSequence(GridCachePtr grids, Generator gen, SymbolFn symbol, bool hermitian, ProvenancePtr provenance,
              bool verify_hermitian)
      : grids_(std::move(grids)), gen_(std::move(gen)), symbol_(std::move(symbol)), hermitian_(hermitian),
        provenance_(std::move(provenance)), verify_hermitian_(verify_hermitian) {}

  const DomainSpec& domain() const noexcept { return *grids_->domain(); }
  const DomainPtr& domain_ptr() const noexcept { return grids_->domain(); }
  const GridCachePtr& grids() const noexcept { return grids_; }
  GridPtr grid(const MultiIndex& n) const { return grids_->get(n); }
  const SymbolFn& symbol() const noexcept { return symbol_; }
  bool hermitian() const noexcept { return hermitian_; }
  const ProvenancePtr& provenance() const noexcept { return provenance_; }

  /// A_n; its size is checked against d_n^Omega.
  Matrix matrix(const MultiIndex& n) const {
    Matrix m = gen_(n);
    const auto expected = static_cast<Index>(grid(n)->size());
    if (m.rows() != expected || m.cols() != expected)
      throw DimensionError("GltSequence: generator produced " + std::to_string(m.rows()) + "x" +
                           std::to_string(m.cols()) + " on a grid of " + std::to_string(expected) + " points");
    if (verify_hermitian_ && m.nonZeros() > 0) {
      const Matrix adj = m.adjoint();
      const double skew = Matrix(m - adj).nonZeros() ? Matrix(m - adj).coeffs().cwiseAbs().maxCoeff() : 0.0;
      const double scale = m.coeffs().cwiseAbs().maxCoeff();
      if (skew > 1e-12 * std::max(1.0, scale))
        throw InputError("GltSequence: flagged Hermitian but max |A - A^*| = " + std::to_string(skew));
    }
    return m;
  }
  Matrix operator()(const MultiIndex& n) const { return matrix(n); }

 private:
  GridCachePtr grids_;
  Generator gen_;
  SymbolFn symbol_;
  bool hermitian_ = false;
  ProvenancePtr provenance_;
  bool verify_hermitian_ = false;
};

namespace detail {

template <class Scalar>
void require_same_domain(const GltSequence<Scalar>& a, const GltSequence<Scalar>& b, const char* op) {
  if (a.domain_ptr() != b.domain_ptr() && a.domain().name != b.domain().name)
    throw DomainError(std::string(op) + ": domains '" + a.domain().name + "' and '" + b.domain().name + "' differ");
}

inline double threshold_of(const Eigen::VectorXd& sv, double rel_tol) {
  return sv.size() ? rel_tol * sv.maxCoeff() : 0.0;
}

template <class Scalar>
SparseMatrix<Scalar> to_sparse(const DenseMatrix<Scalar>& d) {
  SparseMatrix<Scalar> s = d.sparseView(Scalar(0), 0.0);
  s.makeCompressed();
  return s;
}

template <class Scalar>
bool is_hermitian_flag_compatible(Complex c) {
  return c.imag() == 0.0;
}

}  // namespace detail

/// T_{l n}(f) on the hypercube Q_{y,l}; symbol f(theta).
template <class Scalar = double>
GltSequence<Scalar> toeplitz_sequence(const FourierTable& table, const Hypercube& q) {
  const FourierTable t = table;
  const Index side = q.side;
  auto gen = [t, side](const MultiIndex& n) {
    std::vector<Index> ln(n.entries().begin(), n.entries().end());
    for (auto& v : ln) v *= side;
    return toeplitz<Scalar>(MultiIndex(ln), t);
  };
  return GltSequence<Scalar>(grid_cache(hypercube_domain(q)), gen,
                             SymbolFn::frequency([t](std::span<const double> th) { return t.evaluate(th); }, t.source()),
                             t.conjugate_symmetric(0.0),
                             make_provenance("toeplitz", {{"symbol", t.source()}, {"side", q.side}}));
}

/// D(a) on the domain grid; symbol a(x).
template <class Scalar = double>
GltSequence<Scalar> diag_sequence(std::function<Scalar(std::span<const double>)> a, const DomainPtr& omega,
                                  std::string name = "a") {
  auto grids = grid_cache(omega);
  auto gen = [a, grids](const MultiIndex& n) { return diag_sampling<Scalar>(*grids->get(n), a); };
  return GltSequence<Scalar>(grids, gen,
                             SymbolFn::space([a](std::span<const double> x) { return Complex(a(x)); }, name),
                             !is_complex<Scalar>::value, make_provenance("diag", {{"function", name}}));
}

template <class Scalar = double>
GltSequence<Scalar> identity_sequence(const DomainPtr& omega) {
  auto grids = grid_cache(omega);
  auto gen = [grids](const MultiIndex& n) { return sparse_identity<Scalar>(grids->get(n)->size()); };
  return GltSequence<Scalar>(grids, gen, SymbolFn::constant(1.0), true, make_provenance("identity"));
}

template <class Scalar = double>
GltSequence<Scalar> zero_sequence(const DomainPtr& omega) {
  auto grids = grid_cache(omega);
  auto gen = [grids](const MultiIndex& n) {
    const auto s = static_cast<Index>(grids->get(n)->size());
    return SparseMatrix<Scalar>(s, s);
  };
  return GltSequence<Scalar>(grids, gen, SymbolFn::constant(0.0), true, make_provenance("zero"));
}

/// Restriction of a hypercube sequence to the grid of a bounded domain inside the cube.
template <class Scalar>
GltSequence<Scalar> reduced_sequence(const GltSequence<Scalar>& base, const DomainPtr& omega) {
  if (!base.domain().lattice_cube) throw DomainError("reduced_sequence: base sequence must live on a hypercube");
  const Hypercube& q = *base.domain().lattice_cube;
  if (!omega->bounded || !omega->bounding_box)
    throw DomainError("reduced_sequence: domain '" + omega->name + "' is not bounded");
  if (!omega->bounding_box->inside(q))
    throw DomainError("reduced_sequence: domain '" + omega->name + "' is not contained in " + base.domain().name);
  auto grids = grid_cache(omega);
  auto gen = [base, grids](const MultiIndex& n) {
    return restrict(selection_map(grids->get(n), base.grid(n)), base.matrix(n));
  };
  return GltSequence<Scalar>(grids, gen, base.symbol(), base.hermitian(),
                             make_provenance("restrict", {{"domain", omega->name}}, {base.provenance()}), false);
}

/// Restriction between two domain grids, Omega_small ⊂ Omega_big.
template <class Scalar>
GltSequence<Scalar> restrict_sequence(const GltSequence<Scalar>& base, const DomainPtr& small) {
  auto grids = grid_cache(small);
  auto gen = [base, grids](const MultiIndex& n) {
    return restrict(selection_map(grids->get(n), base.grid(n)), base.matrix(n));
  };
  return GltSequence<Scalar>(grids, gen, base.symbol(), base.hermitian(),
                             make_provenance("restrict", {{"domain", small->name}}, {base.provenance()}), false);
}

/// Extension by zero from Omega_small to Omega_big; symbol f * 1_{Omega_small}.
template <class Scalar>
GltSequence<Scalar> extend_sequence(const GltSequence<Scalar>& base, const DomainPtr& big) {
  auto grids = grid_cache(big);
  auto gen = [base, grids](const MultiIndex& n) {
    return extend(selection_map(base.grid(n), grids->get(n)), base.matrix(n));
  };
  return GltSequence<Scalar>(grids, gen, symbol_cut(base.symbol(), base.domain_ptr()), base.hermitian(),
                             make_provenance("extend", {{"domain", big->name}}, {base.provenance()}), false);
}

template <class Scalar>
GltSequence<Scalar> seq_add(const GltSequence<Scalar>& a, const GltSequence<Scalar>& b, Complex alpha = 1.0,
                            Complex beta = 1.0) {
  detail::require_same_domain(a, b, "seq_add");
  const Scalar sa = scalar_from<Scalar>(alpha), sb = scalar_from<Scalar>(beta);
  auto gen = [a, b, sa, sb](const MultiIndex& n) {
    SparseMatrix<Scalar> m = sa * a.matrix(n) + sb * b.matrix(n);
    return m;
  };
  const bool herm = a.hermitian() && b.hermitian() && alpha.imag() == 0.0 && beta.imag() == 0.0;
  return GltSequence<Scalar>(
      a.grids(), gen, symbol_combine(alpha, a.symbol(), beta, b.symbol()), herm,
      make_provenance("add", {{"alpha", {alpha.real(), alpha.imag()}}, {"beta", {beta.real(), beta.imag()}}},
                      {a.provenance(), b.provenance()}),
      false);
}

template <class Scalar>
GltSequence<Scalar> seq_mul(const GltSequence<Scalar>& a, const GltSequence<Scalar>& b) {
  detail::require_same_domain(a, b, "seq_mul");
  auto gen = [a, b](const MultiIndex& n) {
    SparseMatrix<Scalar> m = a.matrix(n) * b.matrix(n);
    return m;
  };
  // Products of Hermitian matrices are Hermitian only when they commute; the
  // structural case kept here is diagonal times diagonal.
  const bool herm = a.hermitian() && b.hermitian() && a.provenance()->op == "diag" && b.provenance()->op == "diag";
  return GltSequence<Scalar>(a.grids(), gen, symbol_product(a.symbol(), b.symbol()), herm,
                             make_provenance("mul", {}, {a.provenance(), b.provenance()}), false);
}

template <class Scalar>
GltSequence<Scalar> seq_adjoint(const GltSequence<Scalar>& a) {
  auto gen = [a](const MultiIndex& n) {
    SparseMatrix<Scalar> m = a.matrix(n).adjoint();
    return m;
  };
  return GltSequence<Scalar>(a.grids(), gen, symbol_conj(a.symbol()), a.hermitian(),
                             make_provenance("adjoint", {}, {a.provenance()}), false);
}

/// Moore-Penrose pseudo-inverse of a square matrix via SVD; singular values
/// below sv_tol * sigma_1 are treated as zero. Diagonal input is inverted
/// entrywise, which is the same map without round-off.
template <class Scalar>
DenseMatrix<Scalar> pinv(const DenseMatrix<Scalar>& a, double sv_tol = 1e-10) {
  if (a.rows() != a.cols()) throw DimensionError("pinv: matrix is not square");
  if (a.size() == 0) return a;
  if (detail::dense_is_diagonal(a)) {
    double top = 0.0;
    for (Index i = 0; i < a.rows(); ++i) top = std::max(top, static_cast<double>(std::abs(a(i, i))));
    DenseMatrix<Scalar> out = DenseMatrix<Scalar>::Zero(a.rows(), a.cols());
    for (Index i = 0; i < a.rows(); ++i)
      if (std::abs(a(i, i)) > sv_tol * top && a(i, i) != Scalar(0)) out(i, i) = Scalar(1) / a(i, i);
    return out;
  }
  Eigen::BDCSVD<DenseMatrix<Scalar>> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd sv = svd.singularValues();
  const double cut = detail::threshold_of(sv, sv_tol);
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(sv.size());
  for (Index i = 0; i < sv.size(); ++i)
    if (sv[i] > cut && sv[i] > 0.0) inv[i] = 1.0 / sv[i];
  return svd.matrixV() * inv.cast<Scalar>().asDiagonal() * svd.matrixU().adjoint();
}

template <class Scalar>
GltSequence<Scalar> seq_pinv(const GltSequence<Scalar>& a, double sv_tol = 1e-10) {
  if (sv_tol < 0.0) throw ConfigError("seq_pinv: sv_tol must be nonnegative");
  auto gen = [a, sv_tol](const MultiIndex& n) {
    return detail::to_sparse<Scalar>(pinv<Scalar>(DenseMatrix<Scalar>(a.matrix(n)), sv_tol));
  };
  return GltSequence<Scalar>(a.grids(), gen, symbol_inverse(a.symbol()), a.hermitian(),
                             make_provenance("pinv", {{"sv_tol", sv_tol}}, {a.provenance()}), false);
}

inline constexpr double kNoExhaustion = std::numeric_limits<double>::infinity();

/// Unbounded Toeplitz sequence: reduced Toeplitz on Omega_t extended by zero to
/// Omega (symbol f(theta) 1_{Omega_t}(x)); t = infinity uses the whole grid of
/// Omega with symbol f(theta).
template <class Scalar = double>
GltSequence<Scalar> unbounded_toeplitz(const FourierTable& table, const DomainPtr& omega, double t = kNoExhaustion) {
  const FourierTable tab = table;
  auto grids = grid_cache(omega);
  SymbolFn f = SymbolFn::frequency([tab](std::span<const double> th) { return tab.evaluate(th); }, tab.source());
  const bool herm = tab.conjugate_symmetric(0.0);
  if (std::isinf(t)) {
    auto gen = [tab, grids](const MultiIndex& n) { return reduced_toeplitz<Scalar>(*grids->get(n), tab); };
    return GltSequence<Scalar>(grids, gen, f, herm,
                               make_provenance("toeplitz", {{"symbol", tab.source()}, {"domain", omega->name}}));
  }
  auto inner = grid_cache(exhaustion_domain(omega, t));
  auto gen = [tab, grids, inner](const MultiIndex& n) {
    return extend(selection_map(inner->get(n), grids->get(n)), reduced_toeplitz<Scalar>(*inner->get(n), tab));
  };
  return GltSequence<Scalar>(grids, gen, symbol_cut(f, inner->domain()), herm,
                             make_provenance("extend", {{"domain", omega->name}, {"t", t}},
                                             {make_provenance("toeplitz", {{"symbol", tab.source()},
                                                                           {"domain", inner->domain()->name}})}));
}

/// Unbounded diagonal sampling sequence, same construction as unbounded_toeplitz.
template <class Scalar = double>
GltSequence<Scalar> unbounded_diag(std::function<Scalar(std::span<const double>)> a, const DomainPtr& omega,
                                   double t = kNoExhaustion, std::string name = "a") {
  if (std::isinf(t)) return diag_sequence<Scalar>(std::move(a), omega, std::move(name));
  auto grids = grid_cache(omega);
  auto inner = grid_cache(exhaustion_domain(omega, t));
  auto gen = [a, grids, inner](const MultiIndex& n) {
    return extend(selection_map(inner->get(n), grids->get(n)), diag_sampling<Scalar>(*inner->get(n), a));
  };
  SymbolFn s = SymbolFn::space([a](std::span<const double> x) { return Complex(a(x)); }, name);
  return GltSequence<Scalar>(grids, gen, symbol_cut(s, inner->domain()), !is_complex<Scalar>::value,
                             make_provenance("extend", {{"domain", omega->name}, {"t", t}},
                                             {make_provenance("diag", {{"function", name},
                                                                       {"domain", inner->domain()->name}})}));
}

/// Numerical rank: singular values above rel_tol * sigma_1. Only the rows and
/// columns holding nonzeros are decomposed, which leaves the rank unchanged.
template <class Scalar>
std::size_t numerical_rank(const SparseMatrix<Scalar>& s, double rel_tol = 1e-10) {
  std::vector<int> rows, cols;
  {
    std::vector<char> rmark(static_cast<std::size_t>(s.rows()), 0), cmark(static_cast<std::size_t>(s.cols()), 0);
    for (int c = 0; c < s.outerSize(); ++c)
      for (typename SparseMatrix<Scalar>::InnerIterator it(s, c); it; ++it)
        if (it.value() != Scalar(0)) {
          rmark[static_cast<std::size_t>(it.row())] = 1;
          cmark[static_cast<std::size_t>(c)] = 1;
        }
    for (std::size_t i = 0; i < rmark.size(); ++i)
      if (rmark[i]) rows.push_back(static_cast<int>(i));
    for (std::size_t i = 0; i < cmark.size(); ++i)
      if (cmark[i]) cols.push_back(static_cast<int>(i));
  }
  if (rows.empty()) return 0;
  const DenseMatrix<Scalar> full(s);
  const Eigen::VectorXi ri = Eigen::Map<Eigen::VectorXi>(rows.data(), static_cast<Index>(rows.size()));
  const Eigen::VectorXi ci = Eigen::Map<Eigen::VectorXi>(cols.data(), static_cast<Index>(cols.size()));
  const DenseMatrix<Scalar> compact = full(ri, ci);
  Eigen::BDCSVD<DenseMatrix<Scalar>> svd(compact);
  const Eigen::VectorXd sv = svd.singularValues();
  const double cut = detail::threshold_of(sv, rel_tol);
  std::size_t r = 0;
  for (Index i = 0; i < sv.size(); ++i)
    if (sv[i] > cut) ++r;
  return r;
}

/// Bounds recorded for one step of a g.a.c.s.
struct GacsCertificate {
  double t = 0.0;
  std::size_t dim = 0;              // d_n^Omega
  std::size_t dim_defect = 0;       // d_n^Omega - d_n^{Omega_t}
  std::size_t rank_correction = 0;  // rank(S_{n,t})
  double norm_correction = 0.0;     // ||N_{n,t}||_2, zero for this construction
  bool degenerate = false;          // empty Omega_t grid

  double m_rate() const { return dim ? static_cast<double>(dim_defect) / static_cast<double>(dim) : 0.0; }
  double c_rate() const { return dim ? static_cast<double>(rank_correction) / static_cast<double>(dim) : 0.0; }
  double omega_rate() const { return norm_correction; }
  bool certified() const { return degenerate || rank_correction <= 2 * dim_defect; }
};

template <class Scalar>
struct GacsResult {
  SparseMatrix<Scalar> approximant;  // B_{n,t} = R(A_n) on Omega_t
  SparseMatrix<Scalar> correction;   // S_{n,t} = A_n - E(B_{n,t})
  GacsCertificate certificate;
  PermutationCompletion structure;   // Pi completed to a permutation
};

/// Splits A_n = E(R(A_n)) + S along the exhaustion Omega_t and certifies the rank of S.
template <class Scalar>
GacsResult<Scalar> gacs_decompose(const GltSequence<Scalar>& seq, double t, const MultiIndex& n) {
  const auto big = seq.grid(n);
  const auto small = share(domain_grid(n, exhaustion_domain(seq.domain_ptr(), t)));
  const SparseMatrix<Scalar> a = seq.matrix(n);
  const auto map = selection_map(small, big);
  GacsResult<Scalar> out;
  out.certificate.t = t;
  out.certificate.dim = big->size();
  out.certificate.dim_defect = map.defect();
  out.structure = permutation_completion(map);
  out.approximant = restrict(map, a);
  out.correction = a - extend(map, out.approximant);
  out.correction.prune(Scalar(0), 0.0);
  out.certificate.rank_correction = numerical_rank(out.correction);
  out.certificate.degenerate = small->empty();
  return out;
}

/// p(A_n - B_n) over a ladder of n; the value at the largest n stands in for the limsup.
struct AcsProfile {
  std::vector<MultiIndex> n;
  std::vector<std::size_t> dims;
  std::vector<double> p;
  double tail = 0.0;
  bool nonincreasing = true;
};

template <class Scalar>
AcsProfile acs_distance_profile(const GltSequence<Scalar>& a, const GltSequence<Scalar>& b,
                                const std::vector<MultiIndex>& n_list, std::size_t svd_cap = kDefaultSvdCap) {
  AcsProfile prof;
  for (const auto& n : n_list) {
    const SparseMatrix<Scalar> ma = a.matrix(n), mb = b.matrix(n);
    if (ma.rows() != mb.rows())
      throw DimensionError("acs_distance_profile: sizes differ at n = " + n.label() + " (" + std::to_string(ma.rows()) +
                           " vs " + std::to_string(mb.rows()) + ")");
    const SparseMatrix<Scalar> diff = ma - mb;
    prof.n.push_back(n);
    prof.dims.push_back(static_cast<std::size_t>(ma.rows()));
    prof.p.push_back(p_metric(singular_values(diff, svd_cap)));
  }
  for (std::size_t i = 1; i < prof.p.size(); ++i)
    if (prof.p[i] > prof.p[i - 1]) prof.nonincreasing = false;
  prof.tail = prof.p.empty() ? 0.0 : prof.p.back();
  return prof;
}

struct IsometryReport {
  AcsProfile profile;  // p(A_n) per n
  double pm = 0.0;     // p_m(symbol) on the dense sample
  double gap = 0.0;    // |p at the largest n - p_m|
};

/// Compares d_acs(seq, 0) with d_m(symbol, 0) on a midpoint sample of the domain
/// (cells of side 1/dense_m) times a q^d frequency grid.
template <class Scalar>
IsometryReport isometry_check(const GltSequence<Scalar>& seq, const std::vector<MultiIndex>& n_list, Index dense_m = 512,
                              std::size_t q = 1, std::size_t svd_cap = kDefaultSvdCap) {
  IsometryReport r;
  r.profile = acs_distance_profile(seq, zero_sequence<Scalar>(seq.domain_ptr()), n_list, svd_cap);
  const auto space = cell_centers(seq.domain_ptr(), dense_m);
  const auto freq = theta_grid(seq.domain().dim, q);
  r.pm = pm_metric(sample_symbol(seq.symbol().eval, space, freq, SampleValue::modulus));
  r.gap = std::abs(r.profile.tail - r.pm);
  return r;
}

}  // namespace glt
