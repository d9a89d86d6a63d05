#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>

#include "specrad/errors.hpp"
#include "specrad/matops.hpp"
#include "specrad/matrix.hpp"
#include "specrad/simkit.hpp"
#include "specrad/system.hpp"

namespace specrad {

// Regressor Gram matrix is numerically singular; carries it so callers can
// still evaluate the (infinite) data-dependent bound.
class SingularDesignError : public Error {
 public:
  SingularDesignError(const std::string& what, Matrix gram) : Error(what), gram_(std::move(gram)) {}
  const Matrix& gram() const { return gram_; }

 private:
  Matrix gram_;
};

// Least-squares fit of x_+ ~ A x + B u.
struct LsEstimate {
  Matrix a_hat;
  Matrix b_hat;
  Matrix gram;  // sum of [x; u][x; u]^T
  std::size_t sample_count = 0;

  std::size_t state_dim() const { return a_hat.rows(); }
  std::size_t input_dim() const { return b_hat.cols(); }
};

enum class Method {
  pooled,            // every tuple of every trajectory; data-dependent bound
  multi_trajectory,  // last tuple of each trajectory; data-independent bound
};

inline const char* to_string(Method m) { return m == Method::pooled ? "pooled" : "multi_trajectory"; }

// Intermediate quantities behind a reported bound.
struct RhoBoundAux {
  std::optional<double> f1;
  std::optional<double> f3;
  std::optional<double> c_value;
  std::optional<double> lambda_max_e_phi_inv_e;
  std::optional<double> lambda_min_sigma;
  std::optional<double> norm_a_hat;
  std::optional<double> norm_a;
};

struct RhoEstimateReport {
  double rho_hat = 0.0;
  double bound = std::numeric_limits<double>::infinity();
  double delta = 0.0;
  Method method = Method::pooled;
  std::size_t sample_count = 0;
  RhoBoundAux aux;
};

// Relative eigenvalue floor below which the Gram matrix counts as singular
// (condition number beyond 1e12).
inline constexpr double kGramConditionLimit = 1e12;

namespace detail {

inline void require_probability(double p, const char* name) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError(std::string(name) + " must lie in (0, 1)");
}

inline bool gram_is_singular(const EigExtremes& ex) {
  return !(ex.max > 0.0) || ex.min * kGramConditionLimit < ex.max;
}

}  // namespace detail

/// Solves min sum ||x_+ - A x - B u||^2 through the normal equations in the
/// stacked regressor z = [x; u].
inline LsEstimate least_squares(std::span<const DataTuple> tuples) {
  if (tuples.empty()) throw DomainError("least_squares: no data");
  const std::size_t n = tuples.front().x.size();
  const std::size_t p = tuples.front().u.size();
  if (n == 0) throw DimensionError("least_squares: empty state vector");
  const std::size_t d = n + p;

  Matrix gram(d, d);
  Matrix cross(n, d);
  Vector z(d);
  for (const DataTuple& s : tuples) {
    if (s.x.size() != n || s.x_plus.size() != n || s.u.size() != p) {
      throw DimensionError("least_squares: inconsistent tuple dimensions");
    }
    std::copy(s.x.begin(), s.x.end(), z.begin());
    std::copy(s.u.begin(), s.u.end(), z.begin() + static_cast<std::ptrdiff_t>(n));
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) gram(i, j) += z[i] * z[j];
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < d; ++j) cross(i, j) += s.x_plus[i] * z[j];
  }
  if (!gram.all_finite() || !cross.all_finite()) throw DomainError("least_squares: non-finite data");

  const EigExtremes ex = sym_eig_extremes(gram);
  if (detail::gram_is_singular(ex)) {
    throw SingularDesignError("least_squares: regressor Gram matrix is singular (condition beyond 1e12)", gram);
  }
  const Matrix theta = cross * spd_inverse(gram);
  return {theta.block(0, 0, n, n), theta.block(0, n, n, p), gram, tuples.size()};
}

/// sigma_w^2 (sqrt(n+p) + sqrt(n) + sqrt(2 log(1/delta)))^2.
inline double bound_C(std::size_t n, std::size_t p, double delta, double sigma_w) {
  if (n == 0) throw DomainError("bound_C: n must be >= 1");
  detail::require_probability(delta, "bound_C: delta");
  if (!(sigma_w >= 0.0)) throw DomainError("bound_C: sigma_w must be >= 0");
  const double root = std::sqrt(static_cast<double>(n + p)) + std::sqrt(static_cast<double>(n)) +
                      std::sqrt(2.0 * std::log(1.0 / delta));
  return sigma_w * sigma_w * root * root;
}

/// lambda_max(E Phi^{-1} E^T) with E = [I_n, 0]; +infinity for singular Phi.
inline double lambda_max_state_block_inverse(const Matrix& gram, std::size_t n) {
  gram.require_square("lambda_max_state_block_inverse");
  if (n == 0 || n > gram.rows()) throw DimensionError("lambda_max_state_block_inverse: bad state dimension");
  if (detail::gram_is_singular(sym_eig_extremes(gram))) return std::numeric_limits<double>::infinity();
  return sym_eig_extremes(spd_inverse(gram).block(0, 0, n, n)).max;
}

/// Norm bound on A_hat - A from the regressor Gram matrix:
/// f1 = C(n,p,delta)^{1/2} * lambda_max(E Phi^{-1} E^T)^{1/2}, +infinity
/// when Phi is singular.
inline double bound_f1_from_gram(const Matrix& gram, std::size_t n, double delta, double sigma_w) {
  const std::size_t p = gram.rows() - n;
  const double c = bound_C(n, p, delta, sigma_w);
  const double lam = lambda_max_state_block_inverse(gram, n);
  if (std::isinf(lam)) return lam;
  return std::sqrt(c * lam);
}

inline double bound_f1(const LsEstimate& est, double delta, double sigma_w) {
  return bound_f1_from_gram(est.gram, est.state_dim(), delta, sigma_w);
}

/// (2 * norm + err)^{1 - 1/n} * err^{1/n}: turns a matrix error radius `err`
/// into a spectral-radius error radius.
inline double spectral_radius_error_bound(double norm, double err, std::size_t n) {
  if (n == 0) throw DomainError("spectral_radius_error_bound: n must be >= 1");
  if (!(err >= 0.0) || !(norm >= 0.0)) throw DomainError("spectral_radius_error_bound: negative input");
  if (std::isinf(err)) return err;
  const double inv_n = 1.0 / static_cast<double>(n);
  return detail::real_pow(2.0 * norm + err, 1.0 - inv_n) * detail::real_pow(err, inv_n);
}

/// rho(A_hat) with the data-dependent certificate f2; requires M >= n + p.
inline RhoEstimateReport rho_bound_data_dependent(const LsEstimate& est, double delta, double sigma_w) {
  const std::size_t n = est.state_dim();
  const std::size_t p = est.input_dim();
  detail::require_probability(delta, "rho_bound_data_dependent: delta");
  if (est.sample_count < n + p) {
    throw PreconditionError("rho_bound_data_dependent: need M >= n+p = " + std::to_string(n + p) + " samples, got " +
                            std::to_string(est.sample_count));
  }
  RhoEstimateReport r;
  r.rho_hat = spectral_radius(est.a_hat);
  r.delta = delta;
  r.method = Method::pooled;
  r.sample_count = est.sample_count;
  r.aux.c_value = bound_C(n, p, delta, sigma_w);
  r.aux.lambda_max_e_phi_inv_e = lambda_max_state_block_inverse(est.gram, n);
  r.aux.f1 = bound_f1(est, delta, sigma_w);
  r.aux.norm_a_hat = spectral_norm(est.a_hat);
  r.bound = spectral_radius_error_bound(*r.aux.norm_a_hat, *r.aux.f1, n);
  return r;
}

// System quantities the data-independent bound consumes. Any upper bound on
// ||A|| and lower bound on lambda_min(Sigma) is admissible.
struct OracleParams {
  std::size_t n = 1;
  std::size_t p = 0;
  double sigma_w = 0.0;
  double lambda_min_sigma = 0.0;
  double norm_a = 0.0;
};

struct OracleOverrides {
  std::optional<double> norm_a_upper;
  std::optional<double> lambda_min_sigma_lower;
};

inline OracleParams oracle_params(const LtiSystem& sys, std::size_t horizon, const OracleOverrides& ov = {}) {
  OracleParams op;
  op.n = sys.state_dim();
  op.p = sys.input_dim();
  op.sigma_w = sys.sigma_w();
  op.lambda_min_sigma = ov.lambda_min_sigma_lower.value_or(sym_eig_extremes(gramian_sigma(sys, horizon)).min);
  op.norm_a = ov.norm_a_upper.value_or(spectral_norm(sys.A()));
  return op;
}

/// 8(n+p) + 16 log(4/delta): trajectory-count floor of the multi-trajectory bound.
inline double min_trajectories(std::size_t n, std::size_t p, double delta) {
  detail::require_probability(delta, "min_trajectories: delta");
  return 8.0 * static_cast<double>(n + p) + 16.0 * std::log(4.0 / delta);
}

/// f3 = 16 sigma_w lambda_min(Sigma)^{-1/2} sqrt((n+2p) log(36/delta) / N).
inline double bound_f3(const OracleParams& op, std::size_t trajectories, double delta) {
  detail::require_probability(delta, "bound_f3: delta");
  const double floor_n = min_trajectories(op.n, op.p, delta);
  if (static_cast<double>(trajectories) < floor_n) {
    throw PreconditionError("bound_f3: need N >= 8(n+p)+16 log(4/delta) = " + std::to_string(floor_n) +
                            " (minimum admissible N = " + std::to_string(static_cast<long long>(std::ceil(floor_n))) +
                            "), got " + std::to_string(trajectories));
  }
  if (!(op.lambda_min_sigma > 0.0)) {
    throw DegenerateExcitationError("bound_f3: lambda_min(Sigma) must be > 0");
  }
  if (!(op.sigma_w >= 0.0)) throw DomainError("bound_f3: sigma_w must be >= 0");
  const double dim = static_cast<double>(op.n + 2 * op.p);
  return 16.0 * op.sigma_w / std::sqrt(op.lambda_min_sigma) *
         std::sqrt(dim * std::log(36.0 / delta) / static_cast<double>(trajectories));
}

inline double bound_f3(const LtiSystem& sys, std::size_t horizon, std::size_t trajectories, double delta) {
  return bound_f3(oracle_params(sys, horizon), trajectories, delta);
}

/// f4 = (2||A|| + f3)^{1-1/n} f3^{1/n}.
inline double rho_bound_data_independent(const OracleParams& op, std::size_t trajectories, double delta) {
  return spectral_radius_error_bound(op.norm_a, bound_f3(op, trajectories, delta), op.n);
}

inline double rho_bound_data_independent(const LtiSystem& sys, std::size_t horizon, std::size_t trajectories,
                                         double delta, const OracleOverrides& ov = {}) {
  return rho_bound_data_independent(oracle_params(sys, horizon, ov), trajectories, delta);
}

/// Least squares followed by rho(A_hat). Pooled estimates carry f2; for
/// multi_trajectory the bound stays +infinity until
/// attach_data_independent_bound supplies f4.
inline RhoEstimateReport estimate_rho(std::span<const DataTuple> tuples, double delta, Method method,
                                      double sigma_w) {
  detail::require_probability(delta, "estimate_rho: delta");
  const LsEstimate est = least_squares(tuples);
  if (method == Method::pooled) return rho_bound_data_dependent(est, delta, sigma_w);
  RhoEstimateReport r;
  r.rho_hat = spectral_radius(est.a_hat);
  r.delta = delta;
  r.method = Method::multi_trajectory;
  r.sample_count = est.sample_count;
  r.aux.norm_a_hat = spectral_norm(est.a_hat);
  return r;
}

inline void attach_data_independent_bound(RhoEstimateReport& report, const OracleParams& op) {
  report.aux.lambda_min_sigma = op.lambda_min_sigma;
  report.aux.norm_a = op.norm_a;
  report.aux.f3 = bound_f3(op, report.sample_count, report.delta);
  report.bound = spectral_radius_error_bound(op.norm_a, *report.aux.f3, op.n);
}

struct RhoSamplePlan {
  std::uint64_t count = 0;  // smallest integer N strictly above both floors
  double n1 = 0.0;          // accuracy-driven term
  double floor_n = 0.0;     // 8(n+p) + 16 log(4/delta)
  double b = 0.0;           // epsilon - 2(1-1/n)||A||
};

namespace detail {

inline std::uint64_t strictly_above(double x) { return static_cast<std::uint64_t>(std::floor(x)) + 1; }

}  // namespace detail

/// Trajectory count after which |rho(A) - rho(A_hat)| <= epsilon holds with
/// probability 1 - delta. Requires b = epsilon - 2(1-1/n)||A|| > 0.
inline RhoSamplePlan plan_rho_samples(const OracleParams& op, double epsilon, double delta) {
  detail::require_probability(delta, "sample_complexity_rho: delta");
  const double n = static_cast<double>(op.n);
  const double reach = 2.0 * (1.0 - 1.0 / n) * op.norm_a;
  RhoSamplePlan plan;
  plan.b = epsilon - reach;
  if (!(plan.b > 0.0)) {
    throw InfeasibleError("sample_complexity_rho: b = epsilon - 2(1-1/n)||A|| = " + std::to_string(plan.b) +
                          " <= 0; the sample-complexity guarantee needs epsilon > " + std::to_string(reach));
  }
  if (!(op.lambda_min_sigma > 0.0)) {
    throw DegenerateExcitationError("sample_complexity_rho: lambda_min(Sigma) must be > 0");
  }
  plan.n1 = 256.0 * op.sigma_w * op.sigma_w * static_cast<double>(op.n + 2 * op.p) /
            (plan.b * plan.b * op.lambda_min_sigma) * std::log(36.0 / delta);
  plan.floor_n = min_trajectories(op.n, op.p, delta);
  plan.count = detail::strictly_above(std::max(plan.n1, plan.floor_n));
  return plan;
}

inline std::uint64_t sample_complexity_rho(const LtiSystem& sys, std::size_t horizon, double epsilon, double delta,
                                           const OracleOverrides& ov = {}) {
  return plan_rho_samples(oracle_params(sys, horizon, ov), epsilon, delta).count;
}

}  // namespace specrad
