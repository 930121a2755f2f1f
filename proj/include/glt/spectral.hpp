#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <Eigen/Sparse>

#include "glt/error.hpp"
#include "glt/fourier.hpp"
#include "glt/generators.hpp"
#include "glt/grid.hpp"

namespace glt {

inline constexpr std::size_t kDefaultEigCap = 3000;
inline constexpr std::size_t kDefaultSvdCap = 2000;

enum class SpectrumKind { eigenvalues, singular_values };

/// Sorted spectrum of one matrix: ascending eigenvalues or descending singular values.
struct SpectralMeasure {
  SpectrumKind kind = SpectrumKind::eigenvalues;
  std::vector<double> values;
  std::size_t dim = 0;
};

namespace detail {

template <class Derived>
bool dense_is_diagonal(const Eigen::MatrixBase<Derived>& a) {
  for (Index c = 0; c < a.cols(); ++c)
    for (Index r = 0; r < a.rows(); ++r)
      if (r != c && a(r, c) != typename Derived::Scalar(0)) return false;
  return true;
}

template <class Scalar>
bool sparse_is_diagonal(const SparseMatrix<Scalar>& a) {
  for (int c = 0; c < a.outerSize(); ++c)
    for (typename SparseMatrix<Scalar>::InnerIterator it(a, c); it; ++it)
      if (it.row() != it.col() && it.value() != Scalar(0)) return false;
  return true;
}

template <class Derived>
double max_abs(const Eigen::MatrixBase<Derived>& a) {
  return a.size() == 0 ? 0.0 : static_cast<double>(a.cwiseAbs().maxCoeff());
}

template <class Scalar>
std::vector<double> diagonal_eigenvalues(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& diag) {
  std::vector<double> v(static_cast<std::size_t>(diag.size()));
  for (Index i = 0; i < diag.size(); ++i) v[static_cast<std::size_t>(i)] = std::real(diag[i]);
  std::sort(v.begin(), v.end());
  return v;
}

template <class Scalar>
std::vector<double> diagonal_singular_values(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& diag) {
  std::vector<double> v(static_cast<std::size_t>(diag.size()));
  for (Index i = 0; i < diag.size(); ++i) v[static_cast<std::size_t>(i)] = std::abs(diag[i]);
  std::sort(v.begin(), v.end(), std::greater<>());
  return v;
}

}  // namespace detail

/// max |A - A^*|.
template <class Derived>
double asymmetry(const Eigen::MatrixBase<Derived>& a) {
  if (a.rows() != a.cols()) throw DimensionError("asymmetry: matrix is not square");
  return a.size() == 0 ? 0.0 : static_cast<double>((a - a.adjoint()).cwiseAbs().maxCoeff());
}

/// Full spectrum of a real symmetric or complex Hermitian matrix, ascending.
///
/// Diagonal input is read off directly; everything else goes through a dense
/// self-adjoint solver (Householder tridiagonalisation + implicit QR). The size
/// cap applies to the dense path only.
template <class Derived>
SpectralMeasure sym_eigenvalues(const Eigen::MatrixBase<Derived>& a, std::size_t cap = kDefaultEigCap) {
  using Scalar = typename Derived::Scalar;
  if (a.rows() != a.cols()) throw DimensionError("sym_eigenvalues: matrix is not square");
  const double skew = asymmetry(a);
  if (skew > 1e-12 * std::max(1.0, detail::max_abs(a)))
    throw InputError("sym_eigenvalues: input is not symmetric (max |A - A^*| = " + std::to_string(skew) + ")");
  SpectralMeasure m{SpectrumKind::eigenvalues, {}, static_cast<std::size_t>(a.rows())};
  if (detail::dense_is_diagonal(a)) {
    m.values = detail::diagonal_eigenvalues<Scalar>(a.diagonal());
    return m;
  }
  if (static_cast<std::size_t>(a.rows()) > cap)
    throw SizeLimitError("sym_eigenvalues: dimension " + std::to_string(a.rows()) + " exceeds cap " + std::to_string(cap));
  const DenseMatrix<Scalar> dense = a;
  Eigen::SelfAdjointEigenSolver<DenseMatrix<Scalar>> solver(dense, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw InputError("sym_eigenvalues: solver did not converge");
  const auto& ev = solver.eigenvalues();
  m.values.assign(ev.data(), ev.data() + ev.size());
  std::sort(m.values.begin(), m.values.end());
  return m;
}

template <class Scalar>
SpectralMeasure sym_eigenvalues(const SparseMatrix<Scalar>& a, std::size_t cap = kDefaultEigCap) {
  if (a.rows() != a.cols()) throw DimensionError("sym_eigenvalues: matrix is not square");
  if (detail::sparse_is_diagonal(a)) {
    const SparseMatrix<Scalar> at = a.adjoint();
    const double skew = a.nonZeros() ? SparseMatrix<Scalar>(a - at).coeffs().cwiseAbs().maxCoeff() : 0.0;
    const double scale = a.nonZeros() ? a.coeffs().cwiseAbs().maxCoeff() : 0.0;
    if (skew > 1e-12 * std::max(1.0, scale))
      throw InputError("sym_eigenvalues: input is not symmetric (max |A - A^*| = " + std::to_string(skew) + ")");
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> diag = a.diagonal();
    return SpectralMeasure{SpectrumKind::eigenvalues, detail::diagonal_eigenvalues<Scalar>(diag),
                           static_cast<std::size_t>(a.rows())};
  }
  if (static_cast<std::size_t>(a.rows()) > cap)
    throw SizeLimitError("sym_eigenvalues: dimension " + std::to_string(a.rows()) + " exceeds cap " + std::to_string(cap));
  return sym_eigenvalues(DenseMatrix<Scalar>(a), cap);
}

/// Singular values, descending. Diagonal input bypasses the cap, as above.
template <class Derived>
SpectralMeasure singular_values(const Eigen::MatrixBase<Derived>& a, std::size_t cap = kDefaultSvdCap) {
  using Scalar = typename Derived::Scalar;
  if (a.rows() != a.cols()) throw DimensionError("singular_values: matrix is not square");
  SpectralMeasure m{SpectrumKind::singular_values, {}, static_cast<std::size_t>(a.rows())};
  if (detail::dense_is_diagonal(a)) {
    m.values = detail::diagonal_singular_values<Scalar>(a.diagonal());
    return m;
  }
  if (static_cast<std::size_t>(a.rows()) > cap)
    throw SizeLimitError("singular_values: dimension " + std::to_string(a.rows()) + " exceeds cap " + std::to_string(cap));
  const DenseMatrix<Scalar> dense = a;
  Eigen::BDCSVD<DenseMatrix<Scalar>> svd(dense);
  const auto& sv = svd.singularValues();
  m.values.assign(sv.data(), sv.data() + sv.size());
  std::sort(m.values.begin(), m.values.end(), std::greater<>());
  return m;
}

template <class Scalar>
SpectralMeasure singular_values(const SparseMatrix<Scalar>& a, std::size_t cap = kDefaultSvdCap) {
  if (a.rows() != a.cols()) throw DimensionError("singular_values: matrix is not square");
  if (detail::sparse_is_diagonal(a)) {
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> diag = a.diagonal();
    return SpectralMeasure{SpectrumKind::singular_values, detail::diagonal_singular_values<Scalar>(diag),
                           static_cast<std::size_t>(a.rows())};
  }
  if (static_cast<std::size_t>(a.rows()) > cap)
    throw SizeLimitError("singular_values: dimension " + std::to_string(a.rows()) + " exceeds cap " + std::to_string(cap));
  return singular_values(DenseMatrix<Scalar>(a), cap);
}

/// p(A) = min_{i = 1..d+1} { (i-1)/d + sigma_i } with sigma_{d+1} = 0.
inline double p_metric(const SpectralMeasure& sv) {
  if (sv.kind != SpectrumKind::singular_values) throw InputError("p_metric: needs singular values");
  const std::size_t d = sv.values.size();
  if (d == 0) return 0.0;
  double best = 1.0;  // i = d + 1
  for (std::size_t i = 0; i < d; ++i)
    best = std::min(best, static_cast<double>(i) / static_cast<double>(d) + sv.values[i]);
  return best;
}

/// Fractions of singular values below eps and above big.
inline std::pair<double, double> sv_tail_fractions(const SpectralMeasure& sv, double eps, double big) {
  if (!(eps > 0.0) || !(big > 0.0)) throw ConfigError("sv_tail_fractions: thresholds must be positive");
  if (sv.values.empty()) return {0.0, 0.0};
  std::size_t below = 0, above = 0;
  for (double s : sv.values) {
    if (s < eps) ++below;
    if (s > big) ++above;
  }
  const double d = static_cast<double>(sv.values.size());
  return {static_cast<double>(below) / d, static_cast<double>(above) / d};
}

/// Samples of a symbol kappa(x, theta) on a product of space points and frequency
/// points; every sample stands for a cell of equal normalised weight.
struct SymbolSample {
  std::vector<double> values;
  std::size_t space_points = 0;
  std::size_t freq_points = 0;
};

using SymbolEval = std::function<Complex(std::span<const double> x, std::span<const double> theta)>;

enum class SampleValue { real_part, modulus };

/// Midpoint tensor grid with q points per axis on [-pi, pi]^d.
inline std::vector<std::vector<double>> theta_grid(std::size_t d, std::size_t q) {
  if (q == 0) throw ConfigError("theta_grid: need at least one point per axis");
  std::size_t total = 1;
  for (std::size_t a = 0; a < d; ++a) total *= q;
  std::vector<std::vector<double>> out(total, std::vector<double>(d));
  for (std::size_t s = 0; s < total; ++s) {
    std::size_t r = s;
    for (std::size_t a = d; a-- > 0;) {
      const std::size_t j = r % q;
      r /= q;
      out[s][a] = -std::numbers::pi + 2.0 * std::numbers::pi * (static_cast<double>(j) + 0.5) / static_cast<double>(q);
    }
  }
  return out;
}

inline std::vector<std::vector<double>> grid_points(const Grid& g) {
  std::vector<std::vector<double>> out(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) out[k] = g.point(k);
  return out;
}

/// Centres of the cells of side 1/m lying in the domain (midpoint rule nodes).
inline std::vector<std::vector<double>> cell_centers(const DomainPtr& omega, Index m) {
  // A cell of side 1/m centred at (2i-1)/(2m) is the grid box of Theta_{2m} at odd index.
  const Grid fine = domain_grid(MultiIndex::uniform(omega->dim, 2 * m), omega);
  std::vector<std::vector<double>> out;
  for (std::size_t k = 0; k < fine.size(); ++k) {
    const auto idx = fine.lattice(k);
    if (std::all_of(idx.begin(), idx.end(), [](Index i) { return (i % 2 + 2) % 2 == 1; })) out.push_back(fine.point(k));
  }
  return out;
}

inline SymbolSample sample_symbol(const SymbolEval& kappa, const std::vector<std::vector<double>>& space,
                                  const std::vector<std::vector<double>>& freq,
                                  SampleValue mode = SampleValue::real_part) {
  if (space.empty() || freq.empty()) throw ConfigError("sample_symbol: empty sample grid");
  SymbolSample s;
  s.space_points = space.size();
  s.freq_points = freq.size();
  s.values.reserve(space.size() * freq.size());
  for (const auto& x : space)
    for (const auto& th : freq) {
      const Complex v = kappa(x, th);
      s.values.push_back(mode == SampleValue::real_part ? v.real() : std::abs(v));
    }
  return s;
}

/// p_m on equal-weight cells: with s = |values| sorted descending and M cells,
/// min_{k = 0..M} { k/M + s_{k+1} }, s_{M+1} = 0. This is the exact infimum over
/// unions of sample cells.
inline double pm_metric(const SymbolSample& sample) {
  if (sample.values.empty()) throw ConfigError("pm_metric: empty sample");
  std::vector<double> s(sample.values.size());
  std::transform(sample.values.begin(), sample.values.end(), s.begin(), [](double v) { return std::abs(v); });
  std::sort(s.begin(), s.end(), std::greater<>());
  const double m = static_cast<double>(s.size());
  double best = 1.0;
  for (std::size_t k = 0; k < s.size(); ++k) best = std::min(best, static_cast<double>(k) / m + s[k]);
  return best;
}

/// Wasserstein-1 distance between the empirical measures of two value lists.
///
/// Computed exactly as the integral of |Q_a(u) - Q_b(u)| over u in (0, 1), where
/// Q is the step quantile function; breakpoints are merged with integer
/// arithmetic so lists of different lengths are handled without resampling.
inline double w1_distance(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw ConfigError("w1_distance: empty input");
  if (!std::is_sorted(a.begin(), a.end())) std::sort(a.begin(), a.end());
  if (!std::is_sorted(b.begin(), b.end())) std::sort(b.begin(), b.end());
  const auto la = static_cast<unsigned long long>(a.size());
  const auto lb = static_cast<unsigned long long>(b.size());
  // Breakpoints (ia+1)/la and (ib+1)/lb compared as (ia+1)*lb vs (ib+1)*la.
  std::size_t ia = 0, ib = 0;
  double prev = 0.0, total = 0.0;
  while (ia < a.size() && ib < b.size()) {
    const unsigned long long na = (ia + 1) * lb, nb = (ib + 1) * la;
    const double next = static_cast<double>(std::min(na, nb)) / static_cast<double>(la * lb);
    total += (next - prev) * std::abs(a[ia] - b[ib]);
    prev = next;
    if (na <= nb) ++ia;
    if (nb <= na) ++ib;
  }
  return total;
}

/// Step-quantile resampling at u_k = (k + 1/2)/count of a sorted list.
inline std::vector<double> quantiles(const std::vector<double>& sorted, std::size_t count) {
  std::vector<double> q(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double u = (static_cast<double>(k) + 0.5) / static_cast<double>(count);
    auto idx = static_cast<std::size_t>(u * static_cast<double>(sorted.size()));
    q[k] = sorted[std::min(idx, sorted.size() - 1)];
  }
  return q;
}

inline void write_csv(std::ostream& os, const SpectralMeasure& m) {
  os << "# kind=" << (m.kind == SpectrumKind::eigenvalues ? "eigenvalues" : "singular_values") << ",dim=" << m.dim
     << "\nvalue\n"
     << std::setprecision(17);
  for (double v : m.values) os << v << '\n';
}

inline void write_csv(std::ostream& os, const SymbolSample& s) {
  os << "# space_points=" << s.space_points << ",freq_points=" << s.freq_points << "\nvalue\n" << std::setprecision(17);
  for (double v : s.values) os << v << '\n';
}

}  // namespace glt
