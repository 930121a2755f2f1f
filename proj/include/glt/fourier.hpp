#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "glt/error.hpp"
#include "glt/multi_index.hpp"

namespace glt {

using Complex = std::complex<double>;
/// A generating function f(theta) on [-pi, pi]^d.
using FrequencyFn = std::function<Complex(std::span<const double>)>;

/// Fourier coefficients f_k for |k_j| <= K_j, stored densely over the box [-K, K].
class FourierTable {
 public:
  FourierTable() = default;
  FourierTable(std::vector<Index> cutoff, std::string source)
      : cutoff_(std::move(cutoff)), source_(std::move(source)) {
    std::size_t count = 1;
    for (Index k : cutoff_) {
      if (k < 0) throw ConfigError("FourierTable: negative cutoff");
      count *= static_cast<std::size_t>(2 * k + 1);
    }
    coeffs_.assign(count, Complex(0.0, 0.0));
  }

  std::size_t dim() const noexcept { return cutoff_.size(); }
  const std::vector<Index>& cutoff() const noexcept { return cutoff_; }
  const std::string& source() const noexcept { return source_; }
  std::size_t slots() const noexcept { return coeffs_.size(); }

  bool in_range(std::span<const Index> k) const {
    for (std::size_t a = 0; a < cutoff_.size(); ++a)
      if (k[a] < -cutoff_[a] || k[a] > cutoff_[a]) return false;
    return true;
  }

  /// f_k, zero outside the stored box.
  Complex at(std::span<const Index> k) const {
    if (!in_range(k)) return Complex(0.0, 0.0);
    return coeffs_[offset(k)];
  }
  void set(std::span<const Index> k, Complex v) {
    if (!in_range(k)) throw DimensionError("FourierTable::set: index outside cutoff");
    coeffs_[offset(k)] = v;
  }

  /// Wave vector stored in a slot.
  std::vector<Index> wave(std::size_t slot) const {
    std::vector<Index> k(cutoff_.size());
    for (std::size_t a = cutoff_.size(); a-- > 0;) {
      const Index width = 2 * cutoff_[a] + 1;
      k[a] = static_cast<Index>(slot % static_cast<std::size_t>(width)) - cutoff_[a];
      slot /= static_cast<std::size_t>(width);
    }
    return k;
  }
  Complex slot_value(std::size_t slot) const { return coeffs_[slot]; }

  /// Nonzero coefficients as (k, f_k) pairs.
  std::vector<std::pair<std::vector<Index>, Complex>> nonzeros() const {
    std::vector<std::pair<std::vector<Index>, Complex>> out;
    for (std::size_t s = 0; s < coeffs_.size(); ++s)
      if (coeffs_[s] != Complex(0.0, 0.0)) out.emplace_back(wave(s), coeffs_[s]);
    return out;
  }

  bool is_real() const {
    for (const Complex& c : coeffs_)
      if (c.imag() != 0.0) return false;
    return true;
  }

  /// f_{-k} == conj(f_k), the condition for T_n(f) to be Hermitian.
  bool conjugate_symmetric(double tol = 1e-12) const {
    std::vector<Index> neg(cutoff_.size());
    for (std::size_t s = 0; s < coeffs_.size(); ++s) {
      auto k = wave(s);
      for (std::size_t a = 0; a < k.size(); ++a) neg[a] = -k[a];
      if (std::abs(at(neg) - std::conj(coeffs_[s])) > tol) return false;
    }
    return true;
  }

  /// Evaluates the trigonometric polynomial sum_k f_k e^{i k.theta}.
  Complex evaluate(std::span<const double> theta) const {
    Complex sum(0.0, 0.0);
    for (std::size_t s = 0; s < coeffs_.size(); ++s) {
      if (coeffs_[s] == Complex(0.0, 0.0)) continue;
      auto k = wave(s);
      double phase = 0.0;
      for (std::size_t a = 0; a < k.size(); ++a) phase += static_cast<double>(k[a]) * theta[a];
      sum += coeffs_[s] * Complex(std::cos(phase), std::sin(phase));
    }
    return sum;
  }

 private:
  std::size_t offset(std::span<const Index> k) const {
    std::size_t off = 0;
    for (std::size_t a = 0; a < cutoff_.size(); ++a)
      off = off * static_cast<std::size_t>(2 * cutoff_[a] + 1) + static_cast<std::size_t>(k[a] + cutoff_[a]);
    return off;
  }

  std::vector<Index> cutoff_;
  std::string source_;
  std::vector<Complex> coeffs_;
};

/// Fourier coefficients by the trapezoid rule on the periodic grid
/// theta_j = -pi + 2 pi j / Q. Exact for trigonometric polynomials of degree
/// <= cutoff when Q >= 2 cutoff + 2; other inputs carry an O(Q^-2) error for
/// smooth periodic f.
///
/// Values below 1e-14 of the largest coefficient are quadrature round-off and
/// are stored as exact zeros.
inline FourierTable fourier_coeffs(const FrequencyFn& f, std::vector<Index> cutoff, std::vector<Index> quad_points,
                                   std::string source = "") {
  if (cutoff.size() != quad_points.size() || cutoff.empty())
    throw ConfigError("fourier_coeffs: cutoff and quadrature dimensions differ");
  for (std::size_t a = 0; a < cutoff.size(); ++a) {
    if (quad_points[a] < 2 * cutoff[a] + 2)
      throw ConfigError("fourier_coeffs: quadrature size " + std::to_string(quad_points[a]) + " on axis " +
                        std::to_string(a) + " aliases cutoff " + std::to_string(cutoff[a]));
  }
  const std::size_t d = cutoff.size();
  FourierTable table(cutoff, std::move(source));

  std::size_t nodes = 1;
  for (Index q : quad_points) nodes *= static_cast<std::size_t>(q);
  std::vector<Complex> samples(nodes);
  std::vector<double> theta(d);
  std::vector<std::vector<double>> axis(d);
  for (std::size_t a = 0; a < d; ++a) {
    axis[a].resize(static_cast<std::size_t>(quad_points[a]));
    for (Index j = 0; j < quad_points[a]; ++j)
      axis[a][static_cast<std::size_t>(j)] =
          -std::numbers::pi + 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(quad_points[a]);
  }
  std::vector<std::size_t> node(d);
  for (std::size_t s = 0; s < nodes; ++s) {
    std::size_t r = s;
    for (std::size_t a = d; a-- > 0;) {
      node[a] = r % static_cast<std::size_t>(quad_points[a]);
      r /= static_cast<std::size_t>(quad_points[a]);
    }
    for (std::size_t a = 0; a < d; ++a) theta[a] = axis[a][node[a]];
    samples[s] = f(theta);
  }

  double largest = 0.0;
  std::vector<Complex> raw(table.slots());
  for (std::size_t slot = 0; slot < table.slots(); ++slot) {
    const auto k = table.wave(slot);
    Complex acc(0.0, 0.0);
    for (std::size_t s = 0; s < nodes; ++s) {
      std::size_t r = s;
      double phase = 0.0;
      for (std::size_t a = d; a-- > 0;) {
        const std::size_t j = r % static_cast<std::size_t>(quad_points[a]);
        r /= static_cast<std::size_t>(quad_points[a]);
        phase += static_cast<double>(k[a]) * axis[a][j];
      }
      acc += samples[s] * Complex(std::cos(phase), -std::sin(phase));
    }
    raw[slot] = acc / static_cast<double>(nodes);
    largest = std::max(largest, std::abs(raw[slot]));
  }
  const double floor = 1e-14 * largest;
  // Real f: make f_{-k} = conj(f_k) hold bit-exactly so T_n(f) is exactly Hermitian.
  bool hermitian = true;
  for (std::size_t slot = 0; slot < raw.size() && hermitian; ++slot)
    hermitian = std::abs(raw[slot] - std::conj(raw[raw.size() - 1 - slot])) <= 1e-13 * std::max(1.0, largest);
  if (hermitian) {
    for (std::size_t slot = 0; slot < raw.size(); ++slot) {
      const std::size_t mirror = raw.size() - 1 - slot;
      if (slot > mirror) break;
      const Complex avg = 0.5 * (raw[slot] + std::conj(raw[mirror]));
      raw[slot] = avg;
      raw[mirror] = std::conj(avg);
    }
  }
  for (std::size_t slot = 0; slot < table.slots(); ++slot) {
    Complex v = raw[slot];
    if (std::abs(v.real()) <= floor) v.real(0.0);
    if (std::abs(v.imag()) <= floor) v.imag(0.0);
    table.set(table.wave(slot), v);
  }
  return table;
}

/// JSON form: {"source": ..., "cutoff": [...], "coeffs": [{"k": [...], "value": [re, im]}, ...]}.
/// Only nonzero coefficients are listed.
inline nlohmann::json to_json(const FourierTable& t) {
  nlohmann::json j;
  j["source"] = t.source();
  j["cutoff"] = t.cutoff();
  j["coeffs"] = nlohmann::json::array();
  for (const auto& [k, v] : t.nonzeros()) j["coeffs"].push_back({{"k", k}, {"value", {v.real(), v.imag()}}});
  return j;
}

inline FourierTable fourier_table_from_json(const nlohmann::json& j) {
  FourierTable t(j.at("cutoff").get<std::vector<Index>>(), j.value("source", std::string()));
  for (const auto& e : j.at("coeffs")) {
    auto k = e.at("k").get<std::vector<Index>>();
    const auto& v = e.at("value");
    t.set(k, Complex(v.at(0).get<double>(), v.at(1).get<double>()));
  }
  return t;
}

/// A registered generating function together with the data needed to tabulate it.
struct FrequencySymbol {
  std::string name;
  std::size_t dim = 1;
  FrequencyFn fn;
  std::vector<Index> cutoff;  // trigonometric degree per axis

  FourierTable table() const {
    std::vector<Index> quad(cutoff.size());
    for (std::size_t a = 0; a < cutoff.size(); ++a) quad[a] = 2 * cutoff[a] + 2;
    return fourier_coeffs(fn, cutoff, quad, name);
  }
};

inline std::vector<std::string> symbol_names() {
  return {"laplacian_1d", "laplacian_2d", "shift_1d", "one_1d", "one_2d"};
}

/// Trigonometric-polynomial registry.
inline FrequencySymbol make_symbol(const std::string& name) {
  if (name == "laplacian_1d")
    return {name, 1, [](std::span<const double> t) { return Complex(2.0 - 2.0 * std::cos(t[0]), 0.0); }, {1}};
  if (name == "laplacian_2d")
    return {name, 2,
            [](std::span<const double> t) { return Complex(4.0 - 2.0 * std::cos(t[0]) - 2.0 * std::cos(t[1]), 0.0); },
            {1, 1}};
  if (name == "shift_1d")
    return {name, 1, [](std::span<const double> t) { return Complex(std::cos(t[0]), std::sin(t[0])); }, {1}};
  if (name == "one_1d") return {name, 1, [](std::span<const double>) { return Complex(1.0, 0.0); }, {0}};
  if (name == "one_2d") return {name, 2, [](std::span<const double>) { return Complex(1.0, 0.0); }, {0, 0}};
  throw ConfigError("unknown symbol '" + name + "'");
}

}  // namespace glt
