#pragma once

#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "glt/domain.hpp"
#include "glt/error.hpp"
#include "glt/generators.hpp"
#include "glt/grid.hpp"

namespace glt {

using GridPtr = std::shared_ptr<const Grid>;

inline GridPtr share(Grid g) { return std::make_shared<const Grid>(std::move(g)); }

/// Order-preserving embedding of a small grid into a big grid sharing the same n.
///
/// This is the index form of the selection matrix Pi: row i of Pi has its single
/// one in column positions()[i]. Pi itself is never stored.
class SelectionMap {
 public:
  SelectionMap(GridPtr small, GridPtr big, std::vector<Index> positions)
      : small_(std::move(small)), big_(std::move(big)), positions_(std::move(positions)),
        inverse_(big_->size(), -1) {
    for (std::size_t i = 0; i < positions_.size(); ++i) {
      if (i > 0 && positions_[i] <= positions_[i - 1]) throw ContainmentError("SelectionMap: positions not increasing");
      inverse_[static_cast<std::size_t>(positions_[i])] = static_cast<Index>(i);
    }
  }

  const Grid& small() const noexcept { return *small_; }
  const Grid& big() const noexcept { return *big_; }
  const GridPtr& small_ptr() const noexcept { return small_; }
  const GridPtr& big_ptr() const noexcept { return big_; }
  const std::vector<Index>& positions() const noexcept { return positions_; }
  /// Small-grid index of each big-grid point, -1 when the point is not selected.
  const std::vector<Index>& inverse() const noexcept { return inverse_; }
  std::size_t defect() const noexcept { return big_->size() - small_->size(); }

  Eigen::VectorXi position_vector() const {
    Eigen::VectorXi v(static_cast<Index>(positions_.size()));
    for (std::size_t i = 0; i < positions_.size(); ++i) v[static_cast<Index>(i)] = static_cast<int>(positions_[i]);
    return v;
  }

  /// Pi as a sparse 0/1 matrix; used only for audits of the Gram identities.
  SparseMatrix<double> matrix() const {
    SparseMatrix<double> pi(static_cast<Index>(small_->size()), static_cast<Index>(big_->size()));
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(positions_.size());
    for (std::size_t i = 0; i < positions_.size(); ++i)
      trip.emplace_back(static_cast<int>(i), static_cast<int>(positions_[i]), 1.0);
    pi.setFromTriplets(trip.begin(), trip.end());
    return pi;
  }

 private:
  GridPtr small_;
  GridPtr big_;
  std::vector<Index> positions_;
  std::vector<Index> inverse_;
};

/// Builds the embedding by a merge walk over the two lex-sorted lattices.
inline SelectionMap selection_map(GridPtr small, GridPtr big) {
  if (small->n() != big->n())
    throw ContainmentError("selection_map: grids use different n (" + small->n().label() + " vs " + big->n().label() + ")");
  std::vector<Index> pos;
  pos.reserve(small->size());
  std::size_t j = 0;
  for (std::size_t i = 0; i < small->size(); ++i) {
    const auto p = small->lattice(i);
    while (j < big->size() && lex_compare(big->lattice(j), p) < 0) ++j;
    if (j == big->size() || lex_compare(big->lattice(j), p) != 0) {
      std::string where;
      for (std::size_t a = 0; a < small->space_dim(); ++a) where += (a ? "," : "") + std::to_string(small->coord(i, a));
      throw ContainmentError("selection_map: point (" + where + ") of '" + small->domain().name +
                             "' is not in the grid of '" + big->domain().name + "'");
    }
    pos.push_back(static_cast<Index>(j));
    ++j;
  }
  return SelectionMap(std::move(small), std::move(big), std::move(pos));
}

/// R(A) = Pi A Pi^T: gathers rows and columns at the mapped positions.
template <class Derived>
DenseMatrix<typename Derived::Scalar> restrict(const SelectionMap& map, const Eigen::MatrixBase<Derived>& a) {
  const auto big = static_cast<Index>(map.big().size());
  if (a.rows() != big || a.cols() != big)
    throw DimensionError("restrict: matrix is " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                         ", big grid has " + std::to_string(big) + " points");
  const Eigen::VectorXi pos = map.position_vector();
  return a(pos, pos);
}

template <class Scalar>
SparseMatrix<Scalar> restrict(const SelectionMap& map, const SparseMatrix<Scalar>& a) {
  const auto big = static_cast<Index>(map.big().size());
  if (a.rows() != big || a.cols() != big)
    throw DimensionError("restrict: matrix is " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                         ", big grid has " + std::to_string(big) + " points");
  const auto& inv = map.inverse();
  std::vector<Eigen::Triplet<Scalar>> trip;
  for (int c = 0; c < a.outerSize(); ++c) {
    const Index jc = inv[static_cast<std::size_t>(c)];
    if (jc < 0) continue;
    for (typename SparseMatrix<Scalar>::InnerIterator it(a, c); it; ++it) {
      const Index ir = inv[static_cast<std::size_t>(it.row())];
      if (ir >= 0) trip.emplace_back(static_cast<int>(ir), static_cast<int>(jc), it.value());
    }
  }
  const auto small = static_cast<Index>(map.small().size());
  SparseMatrix<Scalar> out(small, small);
  out.setFromTriplets(trip.begin(), trip.end());
  return out;
}

/// E(B) = Pi^T B Pi: scatters into the big grid, zero elsewhere.
template <class Derived>
DenseMatrix<typename Derived::Scalar> extend(const SelectionMap& map, const Eigen::MatrixBase<Derived>& b) {
  const auto small = static_cast<Index>(map.small().size());
  if (b.rows() != small || b.cols() != small)
    throw DimensionError("extend: matrix is " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()) +
                         ", small grid has " + std::to_string(small) + " points");
  const auto big = static_cast<Index>(map.big().size());
  DenseMatrix<typename Derived::Scalar> out = DenseMatrix<typename Derived::Scalar>::Zero(big, big);
  const Eigen::VectorXi pos = map.position_vector();
  out(pos, pos) = b;
  return out;
}

template <class Scalar>
SparseMatrix<Scalar> extend(const SelectionMap& map, const SparseMatrix<Scalar>& b) {
  const auto small = static_cast<Index>(map.small().size());
  if (b.rows() != small || b.cols() != small)
    throw DimensionError("extend: matrix is " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()) +
                         ", small grid has " + std::to_string(small) + " points");
  const auto& pos = map.positions();
  std::vector<Eigen::Triplet<Scalar>> trip;
  trip.reserve(static_cast<std::size_t>(b.nonZeros()));
  for (int c = 0; c < b.outerSize(); ++c)
    for (typename SparseMatrix<Scalar>::InnerIterator it(b, c); it; ++it)
      trip.emplace_back(static_cast<int>(pos[static_cast<std::size_t>(it.row())]),
                        static_cast<int>(pos[static_cast<std::size_t>(c)]), it.value());
  const auto big = static_cast<Index>(map.big().size());
  SparseMatrix<Scalar> out(big, big);
  out.setFromTriplets(trip.begin(), trip.end());
  return out;
}

/// Completion of Pi to a permutation: selected big-grid indices first, then the
/// complement, both in lex order.
struct PermutationCompletion {
  std::vector<Index> order;
  std::size_t selected = 0;

  Eigen::VectorXi order_vector() const {
    Eigen::VectorXi v(static_cast<Index>(order.size()));
    for (std::size_t i = 0; i < order.size(); ++i) v[static_cast<Index>(i)] = static_cast<int>(order[i]);
    return v;
  }
};

inline PermutationCompletion permutation_completion(const SelectionMap& map) {
  PermutationCompletion pc;
  pc.selected = map.small().size();
  pc.order = map.positions();
  const auto& inv = map.inverse();
  for (std::size_t j = 0; j < inv.size(); ++j)
    if (inv[j] < 0) pc.order.push_back(static_cast<Index>(j));
  return pc;
}

/// P^T M P for the completion P; maps E(B) to blockdiag(B, 0).
template <class Derived>
DenseMatrix<typename Derived::Scalar> permute(const PermutationCompletion& pc, const Eigen::MatrixBase<Derived>& m) {
  if (m.rows() != static_cast<Index>(pc.order.size()) || m.cols() != m.rows())
    throw DimensionError("permute: size does not match the completion");
  const Eigen::VectorXi ord = pc.order_vector();
  return m(ord, ord);
}

struct GramReport {
  bool left = false;                  // Pi Pi^T == I exactly
  std::size_t right_diag_defect = 0;  // rank of S in Pi^T Pi = D(1_small) + S
};

/// Audits the two Gram identities of a selection map.
///
/// The right identity compares diag(Pi^T Pi) with the indicator of the small
/// grid's domain evaluated at big-grid points; the diagonal mismatch count is
/// the rank of the correction S.
inline GramReport gram_identities(const SelectionMap& map) {
  GramReport r;
  const SparseMatrix<double> pi = map.matrix();
  const SparseMatrix<double> left = pi * pi.transpose();
  SparseMatrix<double> eye(left.rows(), left.cols());
  eye.setIdentity();
  r.left = (left.nonZeros() == eye.nonZeros()) && (SparseMatrix<double>(left - eye).coeffs().cwiseAbs().sum() == 0.0);

  const SparseMatrix<double> right = pi.transpose() * pi;
  const Eigen::VectorXd diag = right.diagonal();
  const DomainSpec& small_domain = map.small().domain();
  for (std::size_t j = 0; j < map.big().size(); ++j) {
    const auto p = map.big().point(j);
    const double ind = small_domain.indicator(p) ? 1.0 : 0.0;
    if (diag[static_cast<Index>(j)] != ind) ++r.right_diag_defect;
  }
  return r;
}

template <class Scalar>
struct CommutingSquare {
  DenseMatrix<Scalar> via_union;         // R_{union -> Omega_2} E_{Omega_1 -> union} A
  DenseMatrix<Scalar> via_intersection;  // E_{cap -> Omega_2} R_{Omega_1 -> cap} A
  bool degenerate = false;               // empty intersection grid
};

/// Evaluates both routes of the restriction/extension square between two domains.
template <class Derived>
CommutingSquare<typename Derived::Scalar> commuting_square(const DomainPtr& omega1, const DomainPtr& omega2,
                                                           const MultiIndex& n, const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  auto g1 = share(domain_grid(n, omega1));
  auto g2 = share(domain_grid(n, omega2));
  if (a.rows() != static_cast<Index>(g1->size()) || a.cols() != a.rows())
    throw DimensionError("commuting_square: matrix does not live on the grid of '" + omega1->name + "'");
  auto gcap = share(domain_grid(n, intersection_domain(omega1, omega2)));
  auto gcup = share(domain_grid(n, union_domain(omega1, omega2)));

  CommutingSquare<Scalar> out;
  out.degenerate = gcap->empty();
  const auto e1 = selection_map(g1, gcup);
  const auto r2 = selection_map(g2, gcup);
  out.via_union = restrict(r2, extend(e1, a));
  const auto r1 = selection_map(gcap, g1);
  const auto e2 = selection_map(gcap, g2);
  out.via_intersection = extend(e2, restrict(r1, a));
  return out;
}

/// Audit CSV: one (small_index, big_index) pair per row.
inline void write_csv(std::ostream& os, const SelectionMap& map) {
  os << "small_index,big_index\n";
  for (std::size_t i = 0; i < map.positions().size(); ++i) os << i << ',' << map.positions()[i] << '\n';
}

}  // namespace glt
