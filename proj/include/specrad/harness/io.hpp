#pragma once

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "specrad/errors.hpp"
#include "specrad/ident.hpp"
#include "specrad/simkit.hpp"
#include "specrad/stabtest.hpp"

namespace specrad::harness {

// printf-style %.*g; used for every number written to CSV.
inline std::string format_g(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

inline std::string fmt9(double v) { return format_g(v, 9); }

/**
 * Trajectory CSV.
 *
 *   traj_id,t,u0,...,u{p-1},x0,...,x{n-1}
 *
 * One row per state x_0..x_{T+1}; row t carries u_t, and the final row
 * (t = T+1) leaves the input cells empty. Values use 17 significant digits
 * so a write/read cycle is lossless.
 */
inline void write_trajectories_csv(std::ostream& out, const std::vector<Trajectory>& trajs) {
  if (trajs.empty()) throw DomainError("write_trajectories_csv: no trajectories");
  const std::size_t p = trajs.front().inputs.front().size();
  const std::size_t n = trajs.front().states.front().size();
  out << "traj_id,t";
  for (std::size_t k = 0; k < p; ++k) out << ",u" << k;
  for (std::size_t k = 0; k < n; ++k) out << ",x" << k;
  out << '\n';
  for (std::size_t i = 0; i < trajs.size(); ++i) {
    const Trajectory& tr = trajs[i];
    for (std::size_t t = 0; t < tr.states.size(); ++t) {
      out << i << ',' << t;
      for (std::size_t k = 0; k < p; ++k) {
        out << ',';
        if (t < tr.inputs.size()) out << format_g(tr.inputs[t][k], 17);
      }
      for (std::size_t k = 0; k < n; ++k) out << ',' << format_g(tr.states[t][k], 17);
      out << '\n';
    }
  }
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

inline double parse_double(const std::string& s, std::size_t line_no) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw DomainError("trajectory CSV line " + std::to_string(line_no) + ": bad number '" + s + "'");
  }
}

}  // namespace detail

inline std::vector<Trajectory> read_trajectories_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DomainError("trajectory CSV: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = detail::split_csv_line(line);
  if (header.size() < 3 || header[0] != "traj_id" || header[1] != "t") {
    throw DomainError("trajectory CSV: header must start with traj_id,t");
  }
  std::size_t p = 0, n = 0;
  for (std::size_t k = 2; k < header.size(); ++k) {
    const std::string want_u = "u" + std::to_string(p);
    const std::string want_x = "x" + std::to_string(n);
    if (n == 0 && header[k] == want_u) {
      ++p;
    } else if (header[k] == want_x) {
      ++n;
    } else {
      throw DomainError("trajectory CSV: unexpected column '" + header[k] + "'");
    }
  }
  if (n == 0) throw DomainError("trajectory CSV: no state columns");

  std::vector<Trajectory> trajs;
  std::vector<bool> open_input;  // last row of the current trajectory had an input
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = detail::split_csv_line(line);
    if (cells.size() != 2 + p + n) {
      throw DomainError("trajectory CSV line " + std::to_string(line_no) + ": wrong number of cells");
    }
    const auto id = static_cast<std::size_t>(detail::parse_double(cells[0], line_no));
    const auto t = static_cast<std::size_t>(detail::parse_double(cells[1], line_no));
    if (id == trajs.size()) {
      if (t != 0) throw DomainError("trajectory CSV line " + std::to_string(line_no) + ": trajectory must start at t=0");
      trajs.emplace_back();
      open_input.push_back(true);
    } else if (id + 1 != trajs.size()) {
      throw DomainError("trajectory CSV line " + std::to_string(line_no) + ": traj_id out of order");
    }
    Trajectory& tr = trajs.back();
    if (t != tr.states.size()) throw DomainError("trajectory CSV line " + std::to_string(line_no) + ": t out of order");
    if (!open_input.back()) {
      throw DomainError("trajectory CSV line " + std::to_string(line_no) + ": row after the final state");
    }
    const bool has_input = p == 0 || !cells[2].empty();
    if (has_input) {
      Vector u(p);
      for (std::size_t k = 0; k < p; ++k) u[k] = detail::parse_double(cells[2 + k], line_no);
      tr.inputs.push_back(std::move(u));
    }
    open_input.back() = has_input;
    Vector x(n);
    for (std::size_t k = 0; k < n; ++k) x[k] = detail::parse_double(cells[2 + p + k], line_no);
    tr.states.push_back(std::move(x));
  }
  for (std::size_t i = 0; i < trajs.size(); ++i) {
    Trajectory& tr = trajs[i];
    // With p > 0 the final row has no input; with p == 0 every row looks open.
    if (p == 0 && !tr.inputs.empty()) tr.inputs.pop_back();
    if (tr.inputs.empty() || tr.states.size() != tr.inputs.size() + 1) {
      throw DomainError("trajectory CSV: trajectory " + std::to_string(i) + " is incomplete");
    }
  }
  if (trajs.empty()) throw DomainError("trajectory CSV: no rows");
  return trajs;
}

/// Reception bits separated by whitespace or commas.
inline ChannelTrace read_gammas(std::istream& in) {
  ChannelTrace trace;
  char c = 0;
  while (in.get(c)) {
    if (c == '0' || c == '1') {
      trace.gammas.push_back(static_cast<std::uint8_t>(c - '0'));
    } else if (c != ',' && c != ' ' && c != '\n' && c != '\r' && c != '\t') {
      throw DomainError(std::string("gamma input: unexpected character '") + c + "'");
    }
  }
  if (trace.gammas.empty()) throw DomainError("gamma input: no bits");
  return trace;
}

inline nlohmann::json number_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

inline nlohmann::json number_or_null(const std::optional<double>& v) {
  return v ? number_or_null(*v) : nlohmann::json(nullptr);
}

/// Report JSON; an infinite bound is written as null.
inline nlohmann::json to_json(const RhoEstimateReport& r) {
  nlohmann::json aux;
  aux["f1"] = number_or_null(r.aux.f1);
  aux["f3"] = number_or_null(r.aux.f3);
  aux["C"] = number_or_null(r.aux.c_value);
  aux["lambda_max_E_phiinv_Et"] = number_or_null(r.aux.lambda_max_e_phi_inv_e);
  aux["lambda_min_sigma"] = number_or_null(r.aux.lambda_min_sigma);
  aux["norm_A_hat"] = number_or_null(r.aux.norm_a_hat);
  aux["norm_A"] = number_or_null(r.aux.norm_a);
  return {{"rho_hat", r.rho_hat},       {"bound", number_or_null(r.bound)}, {"delta", r.delta},
          {"method", to_string(r.method)}, {"sample_count", r.sample_count}, {"aux", aux}};
}

inline nlohmann::json to_json(const StabVerdict& v) {
  return {{"outcome", to_string(v.outcome)},
          {"q_hat", v.q_hat},
          {"f5", v.f5},
          {"rho_hat", v.rho_hat},
          {"epsilon", v.epsilon},
          {"thresholds",
           {{"holds_rhs", number_or_null(v.thresholds.holds_rhs)},
            {"does_not_hold_rhs", number_or_null(v.thresholds.not_holds_rhs)}}}};
}

}  // namespace specrad::harness
