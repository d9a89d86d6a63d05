#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>

#include "specrad/channel.hpp"
#include "specrad/errors.hpp"
#include "specrad/ident.hpp"
#include "specrad/matops.hpp"
#include "specrad/simkit.hpp"
#include "specrad/system.hpp"

namespace specrad {

enum class Outcome { holds, does_not_hold, undetermined };

inline const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::holds:
      return "holds";
    case Outcome::does_not_hold:
      return "does_not_hold";
    case Outcome::undetermined:
      return "undetermined";
  }
  return "?";
}

// Right-hand sides of the two branches; empty when the branch guard
// (q_hat - f5 < 1, resp. q_hat + f5 < 1) fails.
struct BranchThresholds {
  std::optional<double> holds_rhs;      // sqrt(1 / (1 - q_hat + f5))
  std::optional<double> not_holds_rhs;  // sqrt(1 / (1 - q_hat - f5))
};

struct StabVerdict {
  Outcome outcome = Outcome::undetermined;
  double q_hat = 0.0;
  double f5 = 0.0;
  double rho_hat = 0.0;
  double epsilon = 0.0;
  BranchThresholds thresholds;
};

/**
 * Three-way decision on q > 1 - 1/rho(A)^2 from channel and spectral
 * estimates. Branches are tried in order with strict comparisons; a tie
 * in either comparison yields undetermined.
 */
inline StabVerdict decide_stabilizability(double q_hat, double f5, double rho_hat, double epsilon) {
  StabVerdict v{Outcome::undetermined, q_hat, f5, rho_hat, epsilon, {}};
  if (q_hat - f5 < 1.0) v.thresholds.holds_rhs = std::sqrt(1.0 / (1.0 - q_hat + f5));
  if (q_hat + f5 < 1.0) v.thresholds.not_holds_rhs = std::sqrt(1.0 / (1.0 - q_hat - f5));

  if (v.thresholds.holds_rhs && rho_hat + epsilon < *v.thresholds.holds_rhs) {
    v.outcome = Outcome::holds;
  } else if (v.thresholds.not_holds_rhs && rho_hat - epsilon > *v.thresholds.not_holds_rhs) {
    v.outcome = Outcome::does_not_hold;
  }
  return v;
}

inline StabVerdict stabilizability_test(double rho_hat, double epsilon, const ChannelTrace& trace, double delta_q) {
  if (!(rho_hat >= 0.0) || !std::isfinite(rho_hat)) throw DomainError("stabilizability_test: rho_hat must be >= 0");
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw DomainError("stabilizability_test: epsilon must be >= 0");
  const ChannelEstimate ch = estimate_channel(trace, delta_q);
  return decide_stabilizability(ch.q_hat, ch.f5, rho_hat, epsilon);
}

// 1 - 1/rho^2: the reception rate must exceed this for stabilizability.
inline double stab_margin_rhs(double rho) {
  if (!(rho > 0.0)) throw DomainError("stab_margin_rhs: rho must be > 0");
  return 1.0 - 1.0 / (rho * rho);
}

// Oracle-mode ground truth for the channel/system pair.
struct SystemTruth {
  double q = 0.0;
  double rho = 0.0;
  double norm_bound = 0.0;  // upper bound on ||A||; used by the trajectory planner
};

struct VerdictConditions {
  bool cond_nq1 = false;  // f5 < (1 - q) / 2
  bool cond_nq2 = false;  // f5 < |1 - q - 1/rho^2| / 2
  bool cond_eps = false;  // epsilon <= epsilon_headroom
  double f5 = 0.0;
  double epsilon_headroom = 0.0;
  double tspp = 0.0;  // (1-delta)(1-delta_q) when all hold, else 0

  bool all() const { return cond_nq1 && cond_nq2 && cond_eps; }
};

namespace detail {

inline void require_truth(double q, double rho, const char* what) {
  if (!(q > 0.0 && q < 1.0)) throw DomainError(std::string(what) + ": q must lie in (0, 1)");
  if (!(rho > 0.0)) throw DomainError(std::string(what) + ": rho must be > 0");
  if (std::abs(q - stab_margin_rhs(rho)) <= 1e-12) {
    throw DomainError(std::string(what) + ": q equals 1 - 1/rho^2; the test cannot decide the boundary case");
  }
}

}  // namespace detail

/// Largest admissible epsilon:
/// 1/2 max{ sqrt(1/(1-q+2f5)) - rho, rho - sqrt(1/(1-q-2f5)) },
/// with the second argument dropped (-inf) when 1 - q - 2 f5 <= 0.
inline double epsilon_headroom(double q, double rho, double f5) {
  const double first = std::sqrt(1.0 / (1.0 - q + 2.0 * f5)) - rho;
  const double inner = 1.0 - q - 2.0 * f5;
  const double second = inner > 0.0 ? rho - std::sqrt(1.0 / inner) : -std::numeric_limits<double>::infinity();
  return 0.5 * std::max(first, second);
}

/// Oracle-mode check of the sample conditions under which the three-way test
/// is correct with probability (1 - delta)(1 - delta_q).
inline VerdictConditions verdict_conditions(const SystemTruth& truth, std::size_t n_samples, double delta,
                                             double delta_q, double epsilon) {
  detail::require_truth(truth.q, truth.rho, "verdict_conditions");
  detail::require_probability(delta, "verdict_conditions: delta");
  if (!(epsilon >= 0.0)) throw DomainError("verdict_conditions: epsilon must be >= 0");
  VerdictConditions c;
  c.f5 = bound_f5(n_samples, delta_q);
  c.cond_nq1 = c.f5 < 0.5 * (1.0 - truth.q);
  c.cond_nq2 = c.f5 < 0.5 * std::abs(1.0 - truth.q - 1.0 / (truth.rho * truth.rho));
  c.epsilon_headroom = epsilon_headroom(truth.q, truth.rho, c.f5);
  c.cond_eps = epsilon <= c.epsilon_headroom;
  c.tspp = c.all() ? (1.0 - delta) * (1.0 - delta_q) : 0.0;
  return c;
}

/// Channel sample count strictly above
/// max{2|1-q-1/rho^2|^{-2}, 2(1-q)^{-2}} log(2/delta_q).
inline std::uint64_t sample_complexity_nq(double q, double rho, double delta_q) {
  detail::require_truth(q, rho, "sample_complexity_nq");
  detail::require_probability(delta_q, "sample_complexity_nq: delta_q");
  const double margin = std::abs(1.0 - q - 1.0 / (rho * rho));
  const double log_term = std::log(2.0 / delta_q);
  const double bound = std::max(2.0 / (margin * margin) * log_term, 2.0 / ((1.0 - q) * (1.0 - q)) * log_term);
  return detail::strictly_above(bound);
}

struct TestSamplePlan {
  std::uint64_t trajectories = 0;
  double epsilon = 0.0;  // accuracy demanded of the spectral-radius estimate
  double b = 0.0;
  double n1 = 0.0;
  double floor_n = 0.0;
};

/// Oracle-mode trajectory count for the multi-trajectory estimator so that the
/// three-way test is correct with probability (1-delta)(1-delta_q). epsilon
/// follows from N_q unless `epsilon_override` is given.
inline TestSamplePlan sample_complexity_n_for_test(const LtiSystem& sys, std::size_t horizon, double q,
                                                   std::size_t n_samples, double delta, double delta_q,
                                                   std::optional<double> epsilon_override = std::nullopt,
                                                   const OracleOverrides& ov = {}) {
  const double rho = spectral_radius(sys.A());
  const std::uint64_t nq_min = sample_complexity_nq(q, rho, delta_q);
  if (n_samples < nq_min) {
    throw PreconditionError("sample_complexity_n_for_test: N_q = " + std::to_string(n_samples) +
                            " is below the channel sample floor " + std::to_string(nq_min));
  }
  const OracleParams op = oracle_params(sys, horizon, ov);
  TestSamplePlan plan;
  plan.epsilon = epsilon_override.value_or(epsilon_headroom(q, rho, bound_f5(n_samples, delta_q)));
  const double reach = 2.0 * (1.0 - 1.0 / static_cast<double>(op.n)) * op.norm_a;
  plan.b = plan.epsilon - reach;
  if (!(plan.b > 0.0)) {
    throw InfeasibleError("sample_complexity_n_for_test: epsilon = " + std::to_string(plan.epsilon) +
                          " does not exceed 2(1-1/n)||A|| = " + std::to_string(reach) +
                          ", so b <= 0 and no trajectory count is guaranteed");
  }
  const RhoSamplePlan rp = plan_rho_samples(op, plan.epsilon, delta);
  plan.trajectories = rp.count;
  plan.n1 = rp.n1;
  plan.floor_n = rp.floor_n;
  return plan;
}

}  // namespace specrad
