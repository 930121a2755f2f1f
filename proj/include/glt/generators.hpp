#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "glt/error.hpp"
#include "glt/fourier.hpp"
#include "glt/grid.hpp"
#include "glt/multi_index.hpp"

namespace glt {

template <class Scalar>
using SparseMatrix = Eigen::SparseMatrix<Scalar, Eigen::ColMajor, int>;
template <class Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <class T>
struct is_complex : std::false_type {};
template <class T>
struct is_complex<std::complex<T>> : std::true_type {};

/// Converts a complex coefficient to the target scalar; real targets reject a nonzero imaginary part.
template <class Scalar>
Scalar scalar_from(Complex v) {
  if constexpr (is_complex<Scalar>::value) {
    return Scalar(v);
  } else {
    if (v.imag() != 0.0) throw InputError("complex coefficient cannot be stored in a real matrix");
    return static_cast<Scalar>(v.real());
  }
}

/// Multilevel Toeplitz matrix T_n(f) = [f_{i-j}], i, j = 1..n in lex order.
///
/// Built directly from mixed-radix ranks of the multi-indices, without going
/// through a Grid.
template <class Scalar = double>
SparseMatrix<Scalar> toeplitz(const MultiIndex& n, const FourierTable& table) {
  if (table.dim() != n.dim()) throw DimensionError("toeplitz: table and multi-index dimensions differ");
  const auto nz = table.nonzeros();
  const Index size = n.total();
  std::vector<Scalar> values;
  values.reserve(nz.size());
  for (const auto& e : nz) values.push_back(scalar_from<Scalar>(e.second));

  std::vector<Eigen::Triplet<Scalar>> trip;
  trip.reserve(static_cast<std::size_t>(size) * nz.size());
  const std::size_t d = n.dim();
  std::vector<Index> i(d, 0), j(d);
  for (Index row = 0; row < size; ++row) {
    for (std::size_t e = 0; e < nz.size(); ++e) {
      const auto& k = nz[e].first;
      Index col = 0;
      bool inside = true;
      for (std::size_t a = 0; a < d; ++a) {
        j[a] = i[a] - k[a];
        if (j[a] < 0 || j[a] >= n[a]) {
          inside = false;
          break;
        }
        col = col * n[a] + j[a];
      }
      if (inside) trip.emplace_back(static_cast<int>(row), static_cast<int>(col), values[e]);
    }
    for (std::size_t a = d; a-- > 0;) {
      if (++i[a] < n[a]) break;
      i[a] = 0;
    }
  }
  SparseMatrix<Scalar> t(size, size);
  t.setFromTriplets(trip.begin(), trip.end());
  return t;
}

/// Reduced Toeplitz matrix on an arbitrary grid: entry (p, q) = f_{n(p-q)}.
///
/// Equals Pi T Pi^T for any enclosing hypercube without forming the big matrix.
template <class Scalar = double>
SparseMatrix<Scalar> reduced_toeplitz(const Grid& grid, const FourierTable& table) {
  if (table.dim() != grid.space_dim()) throw DimensionError("reduced_toeplitz: table and grid dimensions differ");
  const auto nz = table.nonzeros();
  const std::size_t size = grid.size();
  std::vector<Eigen::Triplet<Scalar>> trip;
  trip.reserve(size * nz.size());
  std::vector<Index> q(grid.space_dim());
  for (std::size_t row = 0; row < size; ++row) {
    const auto p = grid.lattice(row);
    for (const auto& [k, v] : nz) {
      for (std::size_t a = 0; a < q.size(); ++a) q[a] = p[a] - k[a];
      if (auto col = grid.find(q))
        trip.emplace_back(static_cast<int>(row), static_cast<int>(*col), scalar_from<Scalar>(v));
    }
  }
  SparseMatrix<Scalar> t(static_cast<Index>(size), static_cast<Index>(size));
  t.setFromTriplets(trip.begin(), trip.end());
  return t;
}

/// D(a) = diag(a(p)) over the grid points in lex order.
template <class Scalar = double, class Fn>
SparseMatrix<Scalar> diag_sampling(const Grid& grid, Fn&& a) {
  const std::size_t size = grid.size();
  SparseMatrix<Scalar> m(static_cast<Index>(size), static_cast<Index>(size));
  m.reserve(Eigen::VectorXi::Constant(static_cast<Index>(size), 1));
  std::vector<double> p(grid.space_dim());
  for (std::size_t k = 0; k < size; ++k) {
    for (std::size_t ax = 0; ax < p.size(); ++ax) p[ax] = grid.coord(k, ax);
    const Scalar v = static_cast<Scalar>(a(std::span<const double>(p)));
    if (!std::isfinite(std::abs(v))) {
      std::string where;
      for (std::size_t ax = 0; ax < p.size(); ++ax) where += (ax ? "," : "") + std::to_string(p[ax]);
      throw EvaluationError("diag_sampling: non-finite value at (" + where + ")");
    }
    m.insert(static_cast<Index>(k), static_cast<Index>(k)) = v;
  }
  m.makeCompressed();
  return m;
}

/// Identity of the given size as a sparse matrix.
template <class Scalar = double>
SparseMatrix<Scalar> sparse_identity(std::size_t size) {
  SparseMatrix<Scalar> m(static_cast<Index>(size), static_cast<Index>(size));
  m.setIdentity();
  return m;
}

}  // namespace glt
