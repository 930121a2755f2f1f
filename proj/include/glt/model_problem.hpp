#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <mutex>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Sparse>

#include "glt/domain.hpp"
#include "glt/error.hpp"
#include "glt/generators.hpp"
#include "glt/grid.hpp"
#include "glt/selection.hpp"
#include "glt/sequence.hpp"
#include "glt/spectral.hpp"

namespace glt {

using SpaceFn = std::function<double(std::span<const double>)>;

/// (10 + x^2 + 2y^2 + sin^2(x+y)) / (1 + x^2 + y^2)
inline double builtin_coefficient(double x, double y) {
  const double s = std::sin(x + y);
  return (10.0 + x * x + 2.0 * y * y + s * s) / (1.0 + x * x + y * y);
}

inline bool cusp_indicator(double x, double y) { return x > 0.0 && y > 0.0 && y < cusp_profile(x); }

inline std::vector<std::string> coefficient_names() { return {"builtin", "one"}; }

inline SpaceFn make_coefficient(const std::string& name) {
  if (name == "builtin") return [](std::span<const double> p) { return builtin_coefficient(p[0], p[1]); };
  if (name == "one") return [](std::span<const double>) { return 1.0; };
  throw ConfigError("unknown coefficient '" + name + "'");
}

/// 4 - 2 cos t1 - 2 cos t2, written with half-angle sines to avoid cancellation near 0.
inline double laplacian_symbol(double t1, double t2) {
  const double s1 = std::sin(0.5 * t1), s2 = std::sin(0.5 * t2);
  return 4.0 * (s1 * s1 + s2 * s2);
}

inline SymbolFn model_symbol(const SpaceFn& a, const std::string& name) {
  return {[a](std::span<const double> x, std::span<const double> th) {
            return Complex(a(x) * laplacian_symbol(th[0], th[1]), 0.0);
          },
          name + "*(4-2cos(t1)-2cos(t2))"};
}

/// Midpoint-coefficient 5-point stencil on Theta_{n,Omega}, h = 1/m, unscaled.
///
/// Diagonal: sum of a at the four half-step midpoints. Off-diagonal to an
/// in-grid neighbour: -a at the shared midpoint. Off-grid neighbours are
/// Dirichlet-eliminated.
inline SparseMatrix<double> assemble(const Grid& grid, const SpaceFn& a) {
  if (grid.space_dim() != 2) throw DimensionError("assemble: the model problem is two-dimensional");
  if (grid.n()[0] != grid.n()[1]) throw ConfigError("assemble: requires a square lattice n = (m, m)");
  const double h = 1.0 / static_cast<double>(grid.n()[0]);
  const std::size_t size = grid.size();
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(size * 5);
  std::array<double, 2> mid{};
  std::array<Index, 2> nb{};
  for (std::size_t k = 0; k < size; ++k) {
    const auto idx = grid.lattice(k);
    const double px = grid.coord(k, 0), py = grid.coord(k, 1);
    double diag = 0.0;
    for (int axis = 0; axis < 2; ++axis) {
      for (int sign = -1; sign <= 1; sign += 2) {
        mid = {px, py};
        mid[static_cast<std::size_t>(axis)] += 0.5 * sign * h;
        const double w = a(std::span<const double>(mid));
        if (!std::isfinite(w))
          throw EvaluationError("assemble: non-finite coefficient at (" + std::to_string(mid[0]) + "," +
                                std::to_string(mid[1]) + ")");
        diag += w;
        nb = {idx[0], idx[1]};
        nb[static_cast<std::size_t>(axis)] += sign;
        if (auto col = grid.find(nb)) trip.emplace_back(static_cast<int>(k), static_cast<int>(*col), -w);
      }
    }
    trip.emplace_back(static_cast<int>(k), static_cast<int>(k), diag);
  }
  SparseMatrix<double> m(static_cast<Index>(size), static_cast<Index>(size));
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

inline SparseMatrix<double> assemble(const MultiIndex& n, const DomainPtr& omega, const SpaceFn& a,
                                     std::size_t cap = kDefaultGridCap) {
  return assemble(domain_grid(n, omega, cap), a);
}

/// The discretized operator as a tracked sequence.
inline GltSequence<double> model_sequence(const DomainPtr& omega, const SpaceFn& a, const std::string& name) {
  auto grids = grid_cache(omega);
  auto gen = [grids, a](const MultiIndex& n) { return assemble(*grids->get(n), a); };
  return GltSequence<double>(grids, gen, model_symbol(a, name), true,
                             make_provenance("discretization", {{"scheme", "fd_midpoint"}, {"coefficient", name}}),
                             false);
}

/// Exact uniform samples of the cusp domain: x uniform on (0,1) or Pareto on
/// [1, inf) with equal probability (each part has area 1), then y uniform on (0, g(x)).
inline std::vector<std::array<double, 2>> sample_cusp(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::array<double, 2>> out;
  out.reserve(count);
  while (out.size() < count) {
    const double branch = u(rng), v = u(rng), w = u(rng);
    const double x = branch < 0.5 ? v : 1.0 / (1.0 - v);
    const double y = w * cusp_profile(x);
    if (cusp_indicator(x, y)) out.push_back({x, y});
  }
  return out;
}

/// Minimum of a over seeded samples of the cusp domain.
inline double sampled_minimum(const SpaceFn& a, std::size_t count = 100'000, std::uint64_t seed = kDefaultSeed) {
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& p : sample_cusp(count, seed)) lo = std::min(lo, a(std::span<const double>(p)));
  return lo;
}

struct ExperimentOptions {
  DomainPtr domain;
  SpaceFn coefficient;
  std::string coefficient_name = "builtin";
  std::vector<MultiIndex> n_list;
  std::vector<double> t_list;
  std::size_t theta_points = 16;  // midpoint frequency samples per axis
  std::size_t eig_cap = kDefaultEigCap;
  std::string output_dir;  // empty: no files
  bool emit_svg = false;
  unsigned jobs = 1;
};

inline ExperimentOptions default_experiment() {
  ExperimentOptions o;
  o.domain = cusp_domain();
  o.coefficient = make_coefficient("builtin");
  o.n_list = {MultiIndex{16, 16}, MultiIndex{24, 24}, MultiIndex{32, 32}, MultiIndex{40, 40}};
  o.t_list = {2.0, 4.0, 8.0};
  return o;
}

struct ExperimentRow {
  MultiIndex n{1};
  double t = kNoExhaustion;  // infinity: the full operator A_n
  std::size_t dim = 0;
  std::size_t dim_defect = 0;
  std::size_t zero_count = 0;
  double zero_fraction = 0.0;
  double w1 = 0.0;
  double symbol_range = 0.0;  // max - min of the symbol samples
  std::vector<double> eigenvalues;      // sorted, length dim
  std::vector<double> symbol_quantiles;  // length dim

  double w1_relative() const { return symbol_range > 0.0 ? w1 / symbol_range : w1; }
};

struct ExperimentReport {
  std::vector<ExperimentRow> rows;  // per n: the t ladder, then t = inf
};

inline std::string t_label(double t) { return std::isinf(t) ? "inf" : detail::format_real(t); }

namespace detail {

inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary);
    if (!os) throw ConfigError("cannot write " + tmp);
    os << content;
  }
  std::filesystem::rename(tmp, path);
}

inline std::string quantile_svg(const ExperimentRow& row) {
  const auto& e = row.eigenvalues;
  const auto& s = row.symbol_quantiles;
  double lo = 0.0, hi = 1.0;
  if (!e.empty()) {
    lo = std::min(e.front(), s.front());
    hi = std::max(e.back(), s.back());
  }
  if (hi <= lo) hi = lo + 1.0;
  const double width = 640, height = 400, pad = 40;
  auto poly = [&](const std::vector<double>& v, const char* color) {
    std::ostringstream os;
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    const std::size_t count = v.size();
    const std::size_t stride = std::max<std::size_t>(1, count / 800);
    for (std::size_t i = 0; i < count; i += stride) {
      const double x = pad + (width - 2 * pad) * (static_cast<double>(i) + 0.5) / static_cast<double>(count);
      const double y = height - pad - (height - 2 * pad) * (v[i] - lo) / (hi - lo);
      os << std::setprecision(6) << x << ',' << y << ' ';
    }
    os << "\"/>\n";
    return os.str();
  };
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<text x=\"" << pad << "\" y=\"24\" font-size=\"14\">n=" << row.n.label() << " t=" << t_label(row.t)
     << " (blue: eigenvalues, red: symbol)</text>\n"
     << poly(s, "red") << poly(e, "blue") << "</svg>\n";
  return os.str();
}

}  // namespace detail

/// w1_summary.csv: n, t, dim, dim_defect, zero_fraction, w1_eigs_vs_symbol.
inline void write_summary_csv(std::ostream& os, const ExperimentReport& report) {
  os << "n,t,dim,dim_defect,zero_fraction,w1_eigs_vs_symbol\n" << std::setprecision(17);
  for (const auto& r : report.rows)
    os << r.n.label() << ',' << t_label(r.t) << ',' << r.dim << ',' << r.dim_defect << ',' << r.zero_fraction << ','
       << r.w1 << '\n';
}

/// Eigenvalues of A_n and of E(B_{n,t}) against matched symbol samples.
///
/// B_{n,t} is the restriction of A_n to Omega_t. The spectrum of E(B_{n,t}) is
/// assembled from eig(B_{n,t}) plus dim_defect exact zeros, which is what the
/// permutation completion gives: P^T E(B) P = blockdiag(B, 0). Symbol samples
/// pair every grid point of Omega with a midpoint frequency grid; the file
/// symbol_samples_* holds their dim quantiles.
inline ExperimentReport run_experiment(const ExperimentOptions& opt) {
  if (opt.n_list.empty()) throw ConfigError("run_experiment: n_list is empty");
  for (double t : opt.t_list)
    if (!(t > 0.0)) throw ConfigError("run_experiment: t values must be positive");
  if (opt.theta_points == 0) throw ConfigError("run_experiment: theta_points must be positive");

  struct Job {
    MultiIndex n;
    double t;
  };
  std::vector<Job> jobs;
  for (const auto& n : opt.n_list) {
    const std::size_t dim = domain_grid_size(n, opt.domain);
    if (dim > opt.eig_cap)
      throw SizeLimitError("run_experiment: n = " + n.label() + " gives dimension " + std::to_string(dim) +
                           " above the eigensolver cap " + std::to_string(opt.eig_cap));
    for (double t : opt.t_list) jobs.push_back({n, t});
    jobs.push_back({n, kNoExhaustion});
  }

  const auto theta = theta_grid(2, opt.theta_points);
  const SymbolFn kappa = model_symbol(opt.coefficient, opt.coefficient_name);
  ExperimentReport report;
  report.rows.resize(jobs.size());

  auto run = [&](std::size_t j) {
    const Job& job = jobs[j];
    const auto big = share(domain_grid(job.n, opt.domain));
    const SparseMatrix<double> a = assemble(*big, opt.coefficient);
    ExperimentRow row;
    row.n = job.n;
    row.t = job.t;
    row.dim = big->size();
    const auto space = grid_points(*big);
    SymbolSample sample;
    if (std::isinf(job.t)) {
      row.eigenvalues = sym_eigenvalues(a, opt.eig_cap).values;
      sample = sample_symbol(kappa.eval, space, theta, SampleValue::real_part);
    } else {
      const auto small = share(domain_grid(job.n, exhaustion_domain(opt.domain, job.t)));
      const auto map = selection_map(small, big);
      row.dim_defect = map.defect();
      row.eigenvalues = sym_eigenvalues(restrict(map, a), opt.eig_cap).values;
      row.eigenvalues.insert(row.eigenvalues.end(), row.dim_defect, 0.0);
      std::sort(row.eigenvalues.begin(), row.eigenvalues.end());
      sample = sample_symbol(symbol_cut(kappa, small->domain_ptr()).eval, space, theta, SampleValue::real_part);
    }
    row.zero_count = static_cast<std::size_t>(std::count(row.eigenvalues.begin(), row.eigenvalues.end(), 0.0));
    row.zero_fraction = row.dim ? static_cast<double>(row.zero_count) / static_cast<double>(row.dim) : 0.0;
    std::sort(sample.values.begin(), sample.values.end());
    row.symbol_range = sample.values.empty() ? 0.0 : sample.values.back() - sample.values.front();
    row.w1 = w1_distance(row.eigenvalues, sample.values);
    row.symbol_quantiles = quantiles(sample.values, row.dim);
    report.rows[j] = std::move(row);
  };

  const unsigned workers = std::max(1u, std::min<unsigned>(opt.jobs, static_cast<unsigned>(jobs.size())));
  if (workers == 1) {
    for (std::size_t j = 0; j < jobs.size(); ++j) run(j);
  } else {
    std::atomic<std::size_t> next{0};
    std::mutex err_mutex;
    std::exception_ptr err;
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t j; (j = next.fetch_add(1)) < jobs.size();) {
          try {
            run(j);
          } catch (...) {
            std::lock_guard<std::mutex> lock(err_mutex);
            if (!err) err = std::current_exception();
          }
        }
      });
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
  }

  if (!opt.output_dir.empty()) {
    namespace fs = std::filesystem;
    const fs::path dir(opt.output_dir);
    fs::create_directories(dir);
    for (const auto& row : report.rows) {
      const std::string tag = row.n.label() + "_" + t_label(row.t);
      std::ostringstream eig, sym;
      eig << "index,value\n" << std::setprecision(17);
      for (std::size_t i = 0; i < row.eigenvalues.size(); ++i) eig << i << ',' << row.eigenvalues[i] << '\n';
      sym << "index,value\n" << std::setprecision(17);
      for (std::size_t i = 0; i < row.symbol_quantiles.size(); ++i) sym << i << ',' << row.symbol_quantiles[i] << '\n';
      detail::write_file_atomic(dir / ("eigenvalues_" + tag + ".csv"), eig.str());
      detail::write_file_atomic(dir / ("symbol_samples_" + tag + ".csv"), sym.str());
      if (opt.emit_svg) detail::write_file_atomic(dir / ("quantiles_" + tag + ".svg"), detail::quantile_svg(row));
    }
    std::ostringstream sum;
    write_summary_csv(sum, report);
    detail::write_file_atomic(dir / "w1_summary.csv", sum.str());
  }
  return report;
}

}  // namespace glt
