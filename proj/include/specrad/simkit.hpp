#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "specrad/errors.hpp"
#include "specrad/matrix.hpp"
#include "specrad/parallel.hpp"
#include "specrad/rng.hpp"
#include "specrad/system.hpp"

namespace specrad {

// Inputs u_0..u_T and states x_0..x_{T+1} of one experiment.
struct Trajectory {
  std::vector<Vector> inputs;
  std::vector<Vector> states;
  // w_0..w_T, present only when SimOptions::record_noise is set.
  std::optional<std::vector<Vector>> noises;

  std::size_t horizon() const { return inputs.empty() ? 0 : inputs.size() - 1; }

  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

// One regression sample (u, x, x_+).
struct DataTuple {
  Vector u;
  Vector x;
  Vector x_plus;
  // Injected noise x_+ - A x - B u, when the source trajectory recorded it.
  std::optional<Vector> noise;
};

// Packet reception indicators gamma_0..gamma_{N_q-1}; 1 = received.
struct ChannelTrace {
  std::vector<std::uint8_t> gammas;

  std::size_t size() const { return gammas.size(); }
};

struct SimOptions {
  // Initial state; zero when unset.
  std::optional<Vector> x0;
  // Keep w_t alongside the trajectory (test mode).
  bool record_noise = false;
  // Force w_t = 0. Random draws still happen so inputs match the noisy run.
  bool noiseless = false;
};

namespace detail {

inline void axpy_into(Vector& y, const Matrix& m, const Vector& x) {
  for (std::size_t i = 0; i < m.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < m.cols(); ++j) s += m(i, j) * x[j];
    y[i] += s;
  }
}

inline Trajectory simulate_substream(const LtiSystem& sys, std::size_t horizon, RngSeed seed,
                                     std::uint32_t substream, const SimOptions& opts) {
  const std::size_t n = sys.state_dim();
  const std::size_t p = sys.input_dim();
  PhiloxStream rng(seed, substream);

  Trajectory traj;
  traj.inputs.reserve(horizon + 1);
  traj.states.reserve(horizon + 2);
  Vector x = opts.x0.value_or(Vector(n, 0.0));
  if (x.size() != n) throw DimensionError("simulate: x0 has wrong dimension");
  traj.states.push_back(x);
  if (opts.record_noise) traj.noises.emplace();

  for (std::size_t t = 0; t <= horizon; ++t) {
    Vector u(p), w(n);
    for (double& v : u) v = sys.sigma_u() * rng.normal();
    for (double& v : w) v = sys.sigma_w() * rng.normal();
    if (opts.noiseless) std::fill(w.begin(), w.end(), 0.0);

    Vector next = w;
    axpy_into(next, sys.A(), x);
    axpy_into(next, sys.B(), u);
    traj.inputs.push_back(std::move(u));
    if (opts.record_noise) traj.noises->push_back(std::move(w));
    traj.states.push_back(next);
    x = std::move(next);
  }
  return traj;
}

}  // namespace detail

/// Deterministic recursion x_{t+1} = A x_t + B u_t + w_t for given inputs and
/// noises (w may be empty for w = 0).
inline Trajectory propagate(const LtiSystem& sys, std::vector<Vector> inputs, const std::vector<Vector>& noises = {},
                            std::optional<Vector> x0 = std::nullopt) {
  const std::size_t n = sys.state_dim();
  if (!noises.empty() && noises.size() != inputs.size()) throw DimensionError("propagate: noise count mismatch");
  Trajectory traj;
  Vector x = x0.value_or(Vector(n, 0.0));
  traj.states.push_back(x);
  for (std::size_t t = 0; t < inputs.size(); ++t) {
    if (inputs[t].size() != sys.input_dim()) throw DimensionError("propagate: input has wrong dimension");
    Vector next = noises.empty() ? Vector(n, 0.0) : noises[t];
    detail::axpy_into(next, sys.A(), x);
    detail::axpy_into(next, sys.B(), inputs[t]);
    traj.states.push_back(next);
    x = std::move(next);
  }
  traj.inputs = std::move(inputs);
  if (!noises.empty()) traj.noises = noises;
  return traj;
}

/// One trajectory of length T+1 driven by N(0, sigma_u^2 I) inputs, starting
/// from x_0 = 0 unless opts.x0 says otherwise. Fully determined by `seed`.
inline Trajectory simulate_trajectory(const LtiSystem& sys, std::size_t horizon, RngSeed seed,
                                      const SimOptions& opts = {}) {
  return detail::simulate_substream(sys, horizon, seed, 0, opts);
}

/// N independent trajectories; trajectory i draws from substream i of `seed`,
/// so index 0 reproduces simulate_trajectory(sys, T, seed). The result does
/// not depend on `threads`.
inline std::vector<Trajectory> simulate_ensemble(const LtiSystem& sys, std::size_t horizon, std::size_t count,
                                                 RngSeed seed, const SimOptions& opts = {},
                                                 std::size_t threads = 1) {
  if (count == 0) throw DomainError("simulate_ensemble: N must be >= 1");
  if (count > UINT32_MAX) throw DomainError("simulate_ensemble: N exceeds substream range");
  std::vector<Trajectory> out(count);
  parallel_for(count, threads, [&](std::size_t i) {
    out[i] = detail::simulate_substream(sys, horizon, seed, static_cast<std::uint32_t>(i), opts);
  });
  return out;
}

namespace detail {

inline DataTuple tuple_at(const Trajectory& tr, std::size_t t) {
  DataTuple d{tr.inputs[t], tr.states[t], tr.states[t + 1], std::nullopt};
  if (tr.noises) d.noise = (*tr.noises)[t];
  return d;
}

inline void require_trajectories(std::span<const Trajectory> trajs, const char* what) {
  if (trajs.empty()) throw DomainError(std::string(what) + ": no trajectories");
  for (const auto& tr : trajs) {
    if (tr.inputs.empty() || tr.states.size() != tr.inputs.size() + 1) {
      throw DomainError(std::string(what) + ": malformed trajectory");
    }
  }
}

}  // namespace detail

/// Every (u_t, x_t, x_{t+1}) of every trajectory, trajectory-major.
inline std::vector<DataTuple> pool_tuples(std::span<const Trajectory> trajs) {
  detail::require_trajectories(trajs, "pool_tuples");
  std::vector<DataTuple> out;
  for (const auto& tr : trajs)
    for (std::size_t t = 0; t < tr.inputs.size(); ++t) out.push_back(detail::tuple_at(tr, t));
  return out;
}

/// (u_T, x_T, x_{T+1}) of each trajectory.
inline std::vector<DataTuple> last_tuples(std::span<const Trajectory> trajs) {
  detail::require_trajectories(trajs, "last_tuples");
  std::vector<DataTuple> out;
  out.reserve(trajs.size());
  for (const auto& tr : trajs) out.push_back(detail::tuple_at(tr, tr.inputs.size() - 1));
  return out;
}

/// N_q i.i.d. Bernoulli(q) reception bits.
inline ChannelTrace simulate_channel(double q, std::size_t length, RngSeed seed) {
  if (!(q > 0.0 && q < 1.0)) throw DomainError("simulate_channel: q must lie in (0, 1)");
  if (length == 0) throw DomainError("simulate_channel: N_q must be >= 1");
  PhiloxStream rng(seed);
  ChannelTrace trace;
  trace.gammas.resize(length);
  for (auto& g : trace.gammas) g = rng.bernoulli(q) ? 1 : 0;
  return trace;
}

}  // namespace specrad
