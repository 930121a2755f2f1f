#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "glt/domain.hpp"
#include "glt/error.hpp"
#include "glt/fourier.hpp"
#include "glt/model_problem.hpp"
#include "glt/multi_index.hpp"

namespace glt {

struct Caps {
  std::size_t eig_dim = kDefaultEigCap;
  std::size_t svd_dim = kDefaultSvdCap;
  std::size_t memory_mb = 4096;
};

/// Everything a CLI run needs. Domains, symbols and coefficients are registry names.
///
/// JSON layout (every key optional, unknown keys rejected):
///
///     {
///       "domain": {"name": "disk", "params": {"cx": 0.5, "cy": 0.5, "radius": 0.5}},
///       "symbol": {"name": "laplacian_2d"},
///       "coefficient": "builtin",
///       "n_list": [16, [24, 24]],
///       "t_list": [2, 4, 8],
///       "seed": 20240611,
///       "output_dir": "glt_out",
///       "theta_points": 16,
///       "jobs": 1,
///       "emit_svg": false,
///       "caps": {"eig_dim": 3000, "svd_dim": 2000, "memory_mb": 4096}
///     }
///
/// A scalar n in n_list means (n, ..., n) in the domain's dimension. "domain" and
/// "symbol" may also be given as a bare name string.
struct RunConfig {
  std::string domain = "cusp";
  nlohmann::json domain_params = nlohmann::json::object();
  std::string symbol = "laplacian_2d";
  std::string coefficient = "builtin";
  std::vector<MultiIndex> n_list{MultiIndex{16, 16}, MultiIndex{24, 24}, MultiIndex{32, 32}, MultiIndex{40, 40}};
  std::vector<double> t_list{2.0, 4.0, 8.0};
  std::uint64_t seed = kDefaultSeed;
  std::string output_dir = "glt_out";
  std::size_t theta_points = 16;
  std::size_t jobs = 1;
  bool emit_svg = false;
  Caps caps;
};

namespace detail {

inline void reject_unknown_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }) == allowed.end())
      throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

inline std::size_t positive_size(const nlohmann::json& j, const std::string& what) {
  if (!j.is_number_integer() || j.get<std::int64_t>() <= 0) throw ConfigError(what + " must be a positive integer");
  return j.get<std::size_t>();
}

inline double param_or(const nlohmann::json& params, const char* key, double fallback) {
  if (!params.contains(key)) return fallback;
  if (!params.at(key).is_number()) throw ConfigError(std::string("domain parameter '") + key + "' must be a number");
  return params.at(key).get<double>();
}

inline void named_entry(const nlohmann::json& j, const std::string& what, std::string& name, nlohmann::json* params) {
  if (j.is_string()) {
    name = j.get<std::string>();
    return;
  }
  if (!j.is_object()) throw ConfigError(what + " must be a name or an object with a name");
  reject_unknown_keys(j, {"name", "params"}, what);
  if (!j.contains("name") || !j.at("name").is_string()) throw ConfigError(what + ": missing string 'name'");
  name = j.at("name").get<std::string>();
  if (j.contains("params")) {
    if (!params) throw ConfigError(what + ": takes no parameters");
    if (!j.at("params").is_object()) throw ConfigError(what + ": 'params' must be an object");
    *params = j.at("params");
  }
}

}  // namespace detail

/// Builds the configured domain. Only "disk" takes parameters (cx, cy, radius).
inline DomainPtr config_domain(const RunConfig& cfg) {
  if (cfg.domain == "disk" && !cfg.domain_params.empty()) {
    detail::reject_unknown_keys(cfg.domain_params, {"cx", "cy", "radius"}, "domain params");
    const double r = detail::param_or(cfg.domain_params, "radius", 0.5);
    if (!(r > 0.0) || !std::isfinite(r)) throw ConfigError("domain params: radius must be positive");
    return disk("disk", detail::param_or(cfg.domain_params, "cx", 0.5), detail::param_or(cfg.domain_params, "cy", 0.5), r);
  }
  if (!cfg.domain_params.empty()) throw ConfigError("domain '" + cfg.domain + "' takes no parameters");
  return make_domain(cfg.domain);
}

/// Checks every invariant of a RunConfig; throws ConfigError naming the first violation.
inline void validate(const RunConfig& cfg) {
  const auto omega = config_domain(cfg);
  make_symbol(cfg.symbol);
  make_coefficient(cfg.coefficient);
  if (cfg.n_list.empty()) throw ConfigError("n_list must not be empty");
  for (std::size_t i = 0; i < cfg.n_list.size(); ++i) {
    if (cfg.n_list[i].dim() != omega->dim)
      throw ConfigError("n_list entry " + cfg.n_list[i].label() + " does not match the dimension of '" + omega->name + "'");
    if (i > 0 && cfg.n_list[i].total() <= cfg.n_list[i - 1].total())
      throw ConfigError("n_list must be strictly increasing in N(n)");
  }
  for (double t : cfg.t_list)
    if (!(t > 0.0) || !std::isfinite(t)) throw ConfigError("t_list entries must be positive and finite");
  if (cfg.caps.eig_dim == 0 || cfg.caps.svd_dim == 0 || cfg.caps.memory_mb == 0)
    throw ConfigError("caps must be positive");
  if (cfg.theta_points == 0) throw ConfigError("theta_points must be positive");
  if (cfg.jobs == 0) throw ConfigError("jobs must be positive");
}

/// Parses and validates. Missing keys keep the RunConfig defaults.
inline RunConfig parse_config(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  detail::reject_unknown_keys(j,
                              {"domain", "symbol", "coefficient", "n_list", "t_list", "seed", "output_dir",
                               "theta_points", "jobs", "emit_svg", "caps"},
                              "config");
  RunConfig cfg;
  if (j.contains("domain")) detail::named_entry(j.at("domain"), "domain", cfg.domain, &cfg.domain_params);
  if (j.contains("symbol")) detail::named_entry(j.at("symbol"), "symbol", cfg.symbol, nullptr);
  if (j.contains("coefficient")) {
    if (!j.at("coefficient").is_string()) throw ConfigError("coefficient must be a name");
    cfg.coefficient = j.at("coefficient").get<std::string>();
  }
  const std::size_t dim = config_domain(cfg)->dim;
  if (j.contains("n_list")) {
    if (!j.at("n_list").is_array()) throw ConfigError("n_list must be an array");
    cfg.n_list.clear();
    for (const auto& e : j.at("n_list")) {
      if (e.is_array()) {
        std::vector<Index> v;
        for (const auto& x : e) v.push_back(static_cast<Index>(detail::positive_size(x, "n_list entries")));
        if (v.empty()) throw ConfigError("n_list entries must not be empty");
        cfg.n_list.emplace_back(std::move(v));
      } else {
        const auto m = static_cast<Index>(detail::positive_size(e, "n_list entries"));
        cfg.n_list.emplace_back(std::vector<Index>(dim, m));
      }
    }
  }
  if (j.contains("t_list")) {
    if (!j.at("t_list").is_array()) throw ConfigError("t_list must be an array");
    cfg.t_list.clear();
    for (const auto& e : j.at("t_list")) {
      if (!e.is_number()) throw ConfigError("t_list entries must be numbers");
      cfg.t_list.push_back(e.get<double>());
    }
  }
  if (j.contains("seed")) {
    const auto& seed = j.at("seed");
    if (!seed.is_number_integer() || (!seed.is_number_unsigned() && seed.get<std::int64_t>() < 0)) throw ConfigError("seed must be a nonnegative integer");
    cfg.seed = j.at("seed").get<std::uint64_t>();
  }
  if (j.contains("output_dir")) {
    if (!j.at("output_dir").is_string()) throw ConfigError("output_dir must be a string");
    cfg.output_dir = j.at("output_dir").get<std::string>();
  }
  if (j.contains("theta_points")) cfg.theta_points = detail::positive_size(j.at("theta_points"), "theta_points");
  if (j.contains("jobs")) cfg.jobs = detail::positive_size(j.at("jobs"), "jobs");
  if (j.contains("emit_svg")) {
    if (!j.at("emit_svg").is_boolean()) throw ConfigError("emit_svg must be a boolean");
    cfg.emit_svg = j.at("emit_svg").get<bool>();
  }
  if (j.contains("caps")) {
    const auto& c = j.at("caps");
    if (!c.is_object()) throw ConfigError("caps must be an object");
    detail::reject_unknown_keys(c, {"eig_dim", "svd_dim", "memory_mb"}, "caps");
    if (c.contains("eig_dim")) cfg.caps.eig_dim = detail::positive_size(c.at("eig_dim"), "caps.eig_dim");
    if (c.contains("svd_dim")) cfg.caps.svd_dim = detail::positive_size(c.at("svd_dim"), "caps.svd_dim");
    if (c.contains("memory_mb")) cfg.caps.memory_mb = detail::positive_size(c.at("memory_mb"), "caps.memory_mb");
  }
  validate(cfg);
  return cfg;
}

inline RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file '" + path.string() + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(is);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config file '" + path.string() + "': " + e.what());
  }
  return parse_config(j);
}

inline nlohmann::json to_json(const RunConfig& cfg) {
  nlohmann::json n_list = nlohmann::json::array();
  for (const auto& n : cfg.n_list) n_list.push_back(std::vector<Index>(n.entries().begin(), n.entries().end()));
  nlohmann::json domain{{"name", cfg.domain}};
  if (!cfg.domain_params.empty()) domain["params"] = cfg.domain_params;
  return {{"domain", domain},
          {"symbol", {{"name", cfg.symbol}}},
          {"coefficient", cfg.coefficient},
          {"n_list", n_list},
          {"t_list", cfg.t_list},
          {"seed", cfg.seed},
          {"output_dir", cfg.output_dir},
          {"theta_points", cfg.theta_points},
          {"jobs", cfg.jobs},
          {"emit_svg", cfg.emit_svg},
          {"caps", {{"eig_dim", cfg.caps.eig_dim}, {"svd_dim", cfg.caps.svd_dim}, {"memory_mb", cfg.caps.memory_mb}}}};
}

/// Worker count that keeps `jobs` dense d x d solves inside the memory budget.
/// Each solve holds about three d x d double matrices.
inline std::size_t effective_jobs(const RunConfig& cfg, std::size_t max_dim) {
  const double per_job = 3.0 * 8.0 * static_cast<double>(max_dim) * static_cast<double>(max_dim);
  const double budget = static_cast<double>(cfg.caps.memory_mb) * 1024.0 * 1024.0;
  const auto fit = per_job > 0.0 ? static_cast<std::size_t>(budget / per_job) : cfg.jobs;
  return std::max<std::size_t>(1, std::min(cfg.jobs, fit));
}

inline ExperimentOptions experiment_options(const RunConfig& cfg) {
  ExperimentOptions opt;
  opt.domain = config_domain(cfg);
  opt.coefficient = make_coefficient(cfg.coefficient);
  opt.coefficient_name = cfg.coefficient;
  opt.n_list = cfg.n_list;
  opt.t_list = cfg.t_list;
  opt.theta_points = cfg.theta_points;
  opt.eig_cap = cfg.caps.eig_dim;
  opt.output_dir = cfg.output_dir;
  opt.emit_svg = cfg.emit_svg;
  std::size_t max_dim = 0;
  for (const auto& n : cfg.n_list) max_dim = std::max(max_dim, domain_grid_size(n, opt.domain));
  opt.jobs = static_cast<unsigned>(effective_jobs(cfg, max_dim));
  return opt;
}

}  // namespace glt
