#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>

#include "specrad/errors.hpp"
#include "specrad/simkit.hpp"

namespace specrad {

struct ChannelEstimate {
  double q_hat = 0.0;
  double f5 = 0.0;
  std::size_t n_samples = 0;
  double delta_q = 0.0;
};

// Fraction of received packets, computed as an exact count ratio.
inline double estimate_q(const ChannelTrace& trace) {
  if (trace.gammas.empty()) throw DomainError("estimate_q: empty trace");
  std::size_t ones = 0;
  for (auto g : trace.gammas) {
    if (g > 1) throw DomainError("estimate_q: trace entries must be 0 or 1");
    ones += g;
  }
  return static_cast<double>(ones) / static_cast<double>(trace.gammas.size());
}

// Hoeffding radius sqrt(log(2/delta_q) / (2 N_q)).
inline double bound_f5(std::size_t n_samples, double delta_q) {
  if (n_samples == 0) throw DomainError("bound_f5: N_q must be >= 1");
  if (!(delta_q > 0.0 && delta_q < 1.0)) throw DomainError("bound_f5: delta_q must lie in (0, 1)");
  return std::sqrt(std::log(2.0 / delta_q) / (2.0 * static_cast<double>(n_samples)));
}

inline ChannelEstimate estimate_channel(const ChannelTrace& trace, double delta_q) {
  return {estimate_q(trace), bound_f5(trace.size(), delta_q), trace.size(), delta_q};
}

}  // namespace specrad
