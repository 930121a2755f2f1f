#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "glt/acceptance.hpp"
#include "glt/config.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitCap = 3;
constexpr int kExitAcceptance = 4;

struct GlobalFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::size_t> jobs;
  bool emit_svg = false;
};

glt::RunConfig resolve(const GlobalFlags& f) {
  glt::RunConfig cfg = f.config.empty() ? glt::RunConfig{} : glt::load_config(f.config);
  if (f.seed) cfg.seed = *f.seed;
  if (f.out) cfg.output_dir = *f.out;
  if (f.jobs) cfg.jobs = *f.jobs;
  if (f.emit_svg) cfg.emit_svg = true;
  glt::validate(cfg);
  return cfg;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  glt::detail::write_file_atomic(path, text);
}

// n adapted to the symbol's dimension; uniform n = (m, ..., m) carries over.
glt::MultiIndex for_dim(const glt::MultiIndex& n, std::size_t dim) {
  if (n.dim() == dim) return n;
  for (std::size_t k = 1; k < n.dim(); ++k)
    if (n[k] != n[0]) throw glt::ConfigError("n = " + n.label() + " cannot be used for a " + std::to_string(dim) + "-d symbol");
  return glt::MultiIndex::uniform(dim, n[0]);
}

int cmd_dims(const glt::RunConfig& cfg) {
  const auto omega = glt::config_domain(cfg);
  std::cout << "n,dim,ratio,target\n";
  for (const auto& n : cfg.n_list) {
    const auto d = glt::domain_grid_size(n, omega);
    std::cout << n.label() << ',' << d << ',' << static_cast<double>(d) / static_cast<double>(n.total()) << ','
              << glt::domain_measure(*omega) << '\n';
  }
  return 0;
}

int cmd_toeplitz(const glt::RunConfig& cfg) {
  const auto sym = glt::make_symbol(cfg.symbol);
  const auto table = sym.table();
  const bool hermitian = table.conjugate_symmetric();
  std::cout << "n,size,kind,min,max\n";
  for (const auto& n0 : cfg.n_list) {
    const auto n = for_dim(n0, sym.dim);
    glt::SpectralMeasure m;
    if (hermitian)
      m = glt::sym_eigenvalues(glt::toeplitz<double>(n, table), cfg.caps.eig_dim);
    else
      m = glt::singular_values(glt::toeplitz<glt::Complex>(n, table), cfg.caps.svd_dim);
    std::ostringstream csv;
    glt::write_csv(csv, m);
    write_text(std::filesystem::path(cfg.output_dir) / ("toeplitz_" + sym.name + "_" + n.label() + ".csv"), csv.str());
    const auto [lo, hi] = std::minmax_element(m.values.begin(), m.values.end());
    std::cout << n.label() << ',' << m.dim << ',' << (hermitian ? "eigenvalues" : "singular_values") << ','
              << (m.values.empty() ? 0.0 : *lo) << ',' << (m.values.empty() ? 0.0 : *hi) << '\n';
  }
  return 0;
}

int cmd_restrict_check(const glt::RunConfig& cfg) {
  const auto omega = glt::config_domain(cfg);
  if (!omega->bounded) throw glt::ConfigError("restrict-check needs a bounded domain, '" + omega->name + "' is not");
  const auto sym = glt::make_symbol(cfg.symbol);
  if (sym.dim != omega->dim) throw glt::ConfigError("symbol '" + sym.name + "' and domain '" + omega->name + "' differ in dimension");
  const auto table = sym.table();
  const auto& q = *omega->bounding_box;
  bool ok = true;
  std::cout << "n,dim_small,dim_big,defect,gram_left,right_diag_defect,max_abs_diff\n";
  for (const auto& n : cfg.n_list) {
    const auto map = glt::selection_map(glt::share(glt::domain_grid(n, omega)), glt::share(glt::hypercube_grid(n, q)));
    const auto gram = glt::gram_identities(map);
    std::vector<glt::Index> scaled(n.dim());
    for (std::size_t k = 0; k < scaled.size(); ++k) scaled[k] = q.side * n[k];
    const auto via = glt::restrict(map, glt::toeplitz<glt::Complex>(glt::MultiIndex(scaled), table));
    const auto direct = glt::reduced_toeplitz<glt::Complex>(map.small(), table);
    const double diff = glt::detail::max_abs_diff(glt::DenseMatrix<glt::Complex>(via), glt::DenseMatrix<glt::Complex>(direct));
    ok = ok && gram.left && diff == 0.0;
    std::cout << n.label() << ',' << map.small().size() << ',' << map.big().size() << ',' << map.defect() << ','
              << (gram.left ? 1 : 0) << ',' << gram.right_diag_defect << ',' << diff << '\n';
  }
  return ok ? 0 : kExitAcceptance;
}

int cmd_experiment(const glt::RunConfig& cfg) {
  const auto rep = glt::run_experiment(glt::experiment_options(cfg));
  glt::write_summary_csv(std::cout, rep);
  return 0;
}

int cmd_isometry(const glt::RunConfig& cfg, glt::Index dense_m, double scale) {
  const auto omega = glt::config_domain(cfg);
  const auto coef = glt::make_coefficient(cfg.coefficient);
  const std::function<double(std::span<const double>)> a = [coef, scale](std::span<const double> x) {
    return coef(x) / scale;
  };
  const auto seq = glt::diag_sequence<double>(a, omega, cfg.coefficient);
  const auto rep = glt::isometry_check(seq, cfg.n_list, dense_m, 1, cfg.caps.svd_dim);
  std::cout << "n,dim,p,p_m,gap\n";
  for (std::size_t i = 0; i < rep.profile.n.size(); ++i)
    std::cout << rep.profile.n[i].label() << ',' << rep.profile.dims[i] << ',' << rep.profile.p[i] << ',' << rep.pm
              << ',' << std::abs(rep.profile.p[i] - rep.pm) << '\n';
  return 0;
}

int cmd_gacs(const glt::RunConfig& cfg) {
  const auto omega = glt::config_domain(cfg);
  const auto seq = glt::model_sequence(omega, glt::make_coefficient(cfg.coefficient), cfg.coefficient);
  if (cfg.t_list.empty()) throw glt::ConfigError("gacs needs a nonempty t_list");
  bool ok = true;
  std::cout << "n,t,dim,dim_defect,rank_correction,m_rate,c_rate,certified\n";
  for (const auto& n : cfg.n_list)
    for (double t : cfg.t_list) {
      const auto c = glt::gacs_decompose(seq, t, n).certificate;
      ok = ok && c.certified();
      std::cout << n.label() << ',' << t << ',' << c.dim << ',' << c.dim_defect << ',' << c.rank_correction << ','
                << c.m_rate() << ',' << c.c_rate() << ',' << (c.certified() ? 1 : 0) << '\n';
    }
  return ok ? 0 : kExitAcceptance;
}

int cmd_verify(const glt::RunConfig& cfg, const std::vector<int>& only, bool inject) {
  glt::AcceptanceOptions opt;
  opt.seed = cfg.seed;
  opt.jobs = static_cast<unsigned>(cfg.jobs);
  opt.inject_asymmetry = inject;
  const auto results = glt::run_acceptance(opt, [](const glt::CriterionResult& r) { std::cerr << r.line() << std::endl; }, only);
  const auto verdict = glt::verdict_json(results);
  write_text(std::filesystem::path(cfg.output_dir) / "verdict.json", verdict.dump(2) + "\n");
  std::cout << verdict.dump(2) << std::endl;
  return verdict.at("status") == "pass" ? 0 : kExitAcceptance;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GLT calculus toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  GlobalFlags flags;
  app.add_option("--config", flags.config, "JSON run configuration");
  app.add_option("--seed", flags.seed, "seed for random instances");
  app.add_option("--out", flags.out, "output directory");
  app.add_option("--jobs", flags.jobs, "worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--emit-svg", flags.emit_svg, "write quantile SVG plots next to the CSVs");

  auto* dims = app.add_subcommand("dims", "grid sizes d_n against N(n) and the domain measure");
  auto* toeplitz = app.add_subcommand("toeplitz", "spectra of T_n(f) for the configured symbol");
  auto* restrict_check = app.add_subcommand("restrict-check", "reduced Toeplitz against Pi T Pi^T and the Gram identities");
  auto* experiment = app.add_subcommand("experiment", "eigenvalues of the model problem against its symbol");
  auto* isometry = app.add_subcommand("isometry", "p(D_n(a)) against p_m(a)");
  glt::Index dense_m = 512;
  double scale = 1.0;
  isometry->add_option("--dense-m", dense_m, "cells per unit length for p_m")->check(CLI::PositiveNumber);
  isometry->add_option("--scale", scale, "divide the coefficient by this value")->check(CLI::PositiveNumber);
  auto* gacs = app.add_subcommand("gacs", "g.a.c.s. certificates over n_list x t_list");
  auto* verify = app.add_subcommand("verify", "run the acceptance criteria and emit a JSON verdict");
  std::vector<int> only;
  bool inject = false;
  verify->add_option("--only", only, "run only these criteria")->check(CLI::Range(1, glt::kCriterionCount));
  verify->add_flag("--inject-asymmetry", inject, "negative control: perturb a symmetric test matrix");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    const auto cfg = resolve(flags);
    if (dims->parsed()) return cmd_dims(cfg);
    if (toeplitz->parsed()) return cmd_toeplitz(cfg);
    if (restrict_check->parsed()) return cmd_restrict_check(cfg);
    if (experiment->parsed()) return cmd_experiment(cfg);
    if (isometry->parsed()) return cmd_isometry(cfg, dense_m, scale);
    if (gacs->parsed()) return cmd_gacs(cfg);
    if (verify->parsed()) return cmd_verify(cfg, only, inject);
  } catch (const glt::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const glt::SizeLimitError& e) {
    std::cerr << "resource cap exceeded: " << e.what() << '\n';
    return kExitCap;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return EXIT_FAILURE;
  }
  return EXIT_FAILURE;
}
