// Builds a few sequences on the unit square, combines them and prints the
// tracked symbol next to the provenance tree.
#include <cmath>
#include <iostream>
#include <numbers>

#include "glt/model_problem.hpp"

int main() {
  using namespace glt;
  const auto omega = unit_square();
  const std::function<double(std::span<const double>)> a = [](std::span<const double> x) {
    return builtin_coefficient(x[0], x[1]);
  };
  const auto d = diag_sequence<double>(a, omega, "a");
  const auto t = reduced_sequence(toeplitz_sequence<double>(make_symbol("laplacian_2d").table(), Hypercube::unit(2)), omega);
  const auto prod = seq_mul(d, t);
  const auto mixed = seq_add(prod, seq_pinv(d), 1.0, 0.5);

  const std::array<double, 2> x{0.25, 0.75}, th{std::numbers::pi / 3, -std::numbers::pi / 2};
  std::cout << "symbol:      " << mixed.symbol().description << '\n';
  std::cout << "value:       " << mixed.symbol()(x, th).real() << '\n';
  std::cout << "closed form: " << a(x) * (4.0 - 2.0 * std::cos(th[0]) - 2.0 * std::cos(th[1])) + 0.5 / a(x) << '\n';

  const MultiIndex n{8, 8};
  const auto m = mixed.matrix(n);
  std::cout << "matrix at n = " << n.label() << ": " << m.rows() << " x " << m.cols() << ", " << m.nonZeros()
            << " nonzeros\n";
  std::cout << mixed.provenance()->to_json().dump(2) << '\n';

  // Dimension defect rates of the cusp exhaustion, against L(Omega \ Omega_t) / L(Omega) = 1 / (2t).
  const auto cusp = model_sequence(cusp_domain(), make_coefficient("builtin"), "builtin");
  for (double tt : {1.5, 2.0, 3.0}) {
    const auto c = gacs_decompose(cusp, tt, MultiIndex{48, 48}).certificate;
    std::cout << "t = " << tt << ": m(t) = " << c.m_rate() << ", limit " << 1.0 / (2.0 * tt)
              << ", rank(S) = " << c.rank_correction << " <= " << 2 * c.dim_defect << '\n';
  }
}
