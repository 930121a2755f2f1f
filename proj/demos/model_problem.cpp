// Eigenvalues of the variable-coefficient diffusion operator on the cusp domain
// against samples of its symbol, for a short ladder of grids.
#include <iomanip>
#include <iostream>

#include "glt/model_problem.hpp"

int main() {
  auto opt = glt::default_experiment();
  opt.n_list = {glt::MultiIndex{12, 12}, glt::MultiIndex{16, 16}, glt::MultiIndex{24, 24}};
  opt.t_list = {2.0, 4.0};
  const auto report = glt::run_experiment(opt);

  std::cout << std::setw(8) << "n" << std::setw(6) << "t" << std::setw(7) << "dim" << std::setw(8) << "zeros"
            << std::setw(12) << "W1" << std::setw(12) << "W1/range" << '\n';
  for (const auto& row : report.rows)
    std::cout << std::setw(8) << row.n.label() << std::setw(6) << glt::t_label(row.t) << std::setw(7) << row.dim
              << std::setw(8) << row.zero_count << std::setw(12) << row.w1 << std::setw(12) << row.w1_relative()
              << '\n';
}
