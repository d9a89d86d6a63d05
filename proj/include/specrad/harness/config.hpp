#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "specrad/errors.hpp"
#include "specrad/ident.hpp"
#include "specrad/matrix.hpp"
#include "specrad/system.hpp"

namespace specrad::harness {

struct SystemSpec {
  Matrix a{{1.2, 0.1}, {0.0, 1.0}};
  Matrix b{{0.0}, {1.0}};
  double sigma_w = 0.1;
  double sigma_u = 0.1;
  std::optional<Vector> x0;

  LtiSystem build() const { return LtiSystem(a, b, sigma_w, sigma_u); }
};

struct Fig1Config {
  std::vector<std::size_t> n_grid{100, 200, 300, 400, 500, 600, 700, 800, 900, 1000};
  double delta = 0.1;
  std::size_t runs = 10;
};

// 20 log-spaced integers from 3 to 1000.
inline std::vector<std::size_t> default_nq_grid() {
  std::vector<std::size_t> grid;
  constexpr int points = 20;
  for (int k = 0; k < points; ++k) {
    const double v = 3.0 * std::pow(1000.0 / 3.0, static_cast<double>(k) / (points - 1));
    const auto r = static_cast<std::size_t>(std::llround(v));
    if (grid.empty() || r > grid.back()) grid.push_back(r);
  }
  return grid;
}

struct Fig2Config {
  std::vector<std::size_t> nq_grid = default_nq_grid();
  double delta = 0.01;
  double delta_q = 0.01;
  double epsilon = 0.1;
  double rho_hat = 1.15;
  double q = 0.75;
  std::size_t runs = 400;
};

struct EstimateConfig {
  std::size_t trajectories = 1000;
  Method method = Method::pooled;
  double delta = 0.1;
  bool noiseless = false;
};

struct PlanConfig {
  double epsilon = 0.1;
  double delta = 0.01;
  double delta_q = 0.01;
  double q = 0.75;
  std::optional<std::size_t> n_samples;  // channel samples for the trajectory planner
};

/// Everything an experiment run needs. Defaults reproduce the reference
/// two-state experiments.
struct ExperimentConfig {
  SystemSpec system;
  std::size_t horizon = 5;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  std::string out_dir = "out";
  Fig1Config fig1;
  Fig2Config fig2;
  EstimateConfig estimate;
  PlanConfig plan;

  void validate() const;
};

namespace detail {

inline void check_probability(double v, const std::string& field) {
  if (!(v > 0.0 && v < 1.0)) throw ConfigError("config field '" + field + "' must lie in (0, 1)");
}

inline void check_grid(const std::vector<std::size_t>& g, const std::string& field) {
  if (g.empty()) throw ConfigError("config field '" + field + "' must be a nonempty grid");
  for (std::size_t i = 1; i < g.size(); ++i) {
    if (g[i] <= g[i - 1]) throw ConfigError("config field '" + field + "' must be sorted strictly ascending");
  }
  if (g.front() == 0) throw ConfigError("config field '" + field + "' must contain positive counts");
}

inline Matrix matrix_from_json(const nlohmann::json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) throw ConfigError("config field '" + field + "' must be a nonempty array of rows");
  const std::size_t rows = j.size();
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  std::vector<double> entries;
  for (const auto& row : j) {
    if (!row.is_array() || row.size() != cols) throw ConfigError("config field '" + field + "' has ragged rows");
    for (const auto& v : row) {
      if (!v.is_number()) throw ConfigError("config field '" + field + "' must hold numbers");
      entries.push_back(v.get<double>());
    }
  }
  try {
    return Matrix(rows, cols, std::move(entries));
  } catch (const Error& e) {
    throw ConfigError("config field '" + field + "': " + e.what());
  }
}

template <typename T>
void read_field(const nlohmann::json& obj, const char* key, T& out, const std::string& path) {
  if (!obj.contains(key) || obj.at(key).is_null()) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("config field '" + path + key + "' has the wrong type");
  }
}

inline Method parse_method(const std::string& s) {
  if (s == "pooled") return Method::pooled;
  if (s == "multi_trajectory") return Method::multi_trajectory;
  throw ConfigError("config field 'estimate.method' must be 'pooled' or 'multi_trajectory'");
}

}  // namespace detail

inline void ExperimentConfig::validate() const {
  using detail::check_grid;
  using detail::check_probability;
  try {
    (void)system.build();
  } catch (const Error& e) {
    throw ConfigError(std::string("config field 'system': ") + e.what());
  }
  if (system.x0 && system.x0->size() != system.a.rows()) {
    throw ConfigError("config field 'system.x0' must have one entry per state");
  }
  if (threads == 0) throw ConfigError("config field 'threads' must be >= 1");
  check_grid(fig1.n_grid, "fig1.N_grid");
  check_probability(fig1.delta, "fig1.delta");
  if (fig1.runs == 0) throw ConfigError("config field 'fig1.runs' must be >= 1");
  check_grid(fig2.nq_grid, "fig2.Nq_grid");
  check_probability(fig2.delta, "fig2.delta");
  check_probability(fig2.delta_q, "fig2.delta_q");
  check_probability(fig2.q, "fig2.q");
  if (!(fig2.epsilon >= 0.0)) throw ConfigError("config field 'fig2.epsilon' must be >= 0");
  if (!(fig2.rho_hat >= 0.0)) throw ConfigError("config field 'fig2.rho_hat' must be >= 0");
  if (fig2.runs == 0) throw ConfigError("config field 'fig2.runs' must be >= 1");
  if (estimate.trajectories == 0) throw ConfigError("config field 'estimate.N' must be >= 1");
  check_probability(estimate.delta, "estimate.delta");
  check_probability(plan.delta, "plan.delta");
  check_probability(plan.delta_q, "plan.delta_q");
  check_probability(plan.q, "plan.q");
  if (!(plan.epsilon > 0.0)) throw ConfigError("config field 'plan.epsilon' must be > 0");
}

/// Parses a JSON config; absent fields keep their defaults.
inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  using detail::read_field;
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  ExperimentConfig c;
  if (j.contains("system")) {
    const auto& s = j.at("system");
    if (s.contains("A")) c.system.a = detail::matrix_from_json(s.at("A"), "system.A");
    if (s.contains("B")) c.system.b = detail::matrix_from_json(s.at("B"), "system.B");
    read_field(s, "sigma_w", c.system.sigma_w, "system.");
    read_field(s, "sigma_u", c.system.sigma_u, "system.");
    if (s.contains("x0") && !s.at("x0").is_null()) {
      Vector x0;
      read_field(s, "x0", x0, "system.");
      c.system.x0 = x0;
    }
  }
  read_field(j, "T", c.horizon, "");
  read_field(j, "seed", c.seed, "");
  read_field(j, "threads", c.threads, "");
  read_field(j, "out_dir", c.out_dir, "");
  if (j.contains("fig1")) {
    const auto& f = j.at("fig1");
    read_field(f, "N_grid", c.fig1.n_grid, "fig1.");
    read_field(f, "delta", c.fig1.delta, "fig1.");
    read_field(f, "runs", c.fig1.runs, "fig1.");
  }
  if (j.contains("fig2")) {
    const auto& f = j.at("fig2");
    read_field(f, "Nq_grid", c.fig2.nq_grid, "fig2.");
    read_field(f, "delta", c.fig2.delta, "fig2.");
    read_field(f, "delta_q", c.fig2.delta_q, "fig2.");
    read_field(f, "epsilon", c.fig2.epsilon, "fig2.");
    read_field(f, "rho_hat", c.fig2.rho_hat, "fig2.");
    read_field(f, "q", c.fig2.q, "fig2.");
    read_field(f, "runs", c.fig2.runs, "fig2.");
  }
  if (j.contains("estimate")) {
    const auto& e = j.at("estimate");
    read_field(e, "N", c.estimate.trajectories, "estimate.");
    std::string method = to_string(c.estimate.method);
    read_field(e, "method", method, "estimate.");
    c.estimate.method = detail::parse_method(method);
    read_field(e, "delta", c.estimate.delta, "estimate.");
    read_field(e, "noiseless", c.estimate.noiseless, "estimate.");
  }
  if (j.contains("plan")) {
    const auto& p = j.at("plan");
    read_field(p, "epsilon", c.plan.epsilon, "plan.");
    read_field(p, "delta", c.plan.delta, "plan.");
    read_field(p, "delta_q", c.plan.delta_q, "plan.");
    read_field(p, "q", c.plan.q, "plan.");
    if (p.contains("N_q") && !p.at("N_q").is_null()) {
      std::size_t nq = 0;
      read_field(p, "N_q", nq, "plan.");
      c.plan.n_samples = nq;
    }
  }
  c.validate();
  return c;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

inline nlohmann::json config_to_json(const ExperimentConfig& c) {
  auto rows = [](const Matrix& m) {
    nlohmann::json out = nlohmann::json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
      nlohmann::json row = nlohmann::json::array();
      for (std::size_t k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
      out.push_back(row);
    }
    return out;
  };
  nlohmann::json j;
  j["system"] = {{"A", rows(c.system.a)},
                 {"B", rows(c.system.b)},
                 {"sigma_w", c.system.sigma_w},
                 {"sigma_u", c.system.sigma_u},
                 {"x0", c.system.x0 ? nlohmann::json(*c.system.x0) : nlohmann::json(nullptr)}};
  j["T"] = c.horizon;
  j["seed"] = c.seed;
  j["threads"] = c.threads;
  j["out_dir"] = c.out_dir;
  j["fig1"] = {{"N_grid", c.fig1.n_grid}, {"delta", c.fig1.delta}, {"runs", c.fig1.runs}};
  j["fig2"] = {{"Nq_grid", c.fig2.nq_grid}, {"delta", c.fig2.delta},     {"delta_q", c.fig2.delta_q},
               {"epsilon", c.fig2.epsilon}, {"rho_hat", c.fig2.rho_hat}, {"q", c.fig2.q},
               {"runs", c.fig2.runs}};
  j["estimate"] = {{"N", c.estimate.trajectories},
                   {"method", to_string(c.estimate.method)},
                   {"delta", c.estimate.delta},
                   {"noiseless", c.estimate.noiseless}};
  j["plan"] = {{"epsilon", c.plan.epsilon},
               {"delta", c.plan.delta},
               {"delta_q", c.plan.delta_q},
               {"q", c.plan.q},
               {"N_q", c.plan.n_samples ? nlohmann::json(*c.plan.n_samples) : nlohmann::json(nullptr)}};
  return j;
}

}  // namespace specrad::harness
