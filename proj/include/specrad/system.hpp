#pragma once

#include <string>
#include <utility>

#include "specrad/errors.hpp"
#include "specrad/matrix.hpp"

namespace specrad {

/**
 * Ground-truth model x_{t+1} = A x_t + B u_t + w_t with
 * w_t ~ N(0, sigma_w^2 I) and excitation inputs u_t ~ N(0, sigma_u^2 I).
 */
class LtiSystem {
 public:
  LtiSystem(Matrix a, Matrix b, double sigma_w, double sigma_u)
      : a_(std::move(a)), b_(std::move(b)), sigma_w_(sigma_w), sigma_u_(sigma_u) {
    a_.require_square("LtiSystem A");
    if (a_.rows() == 0) throw DimensionError("LtiSystem: A must be at least 1x1");
    if (b_.rows() != a_.rows()) {
      throw DimensionError("LtiSystem: B has " + std::to_string(b_.rows()) + " rows, A is " + a_.shape());
    }
    if (!(sigma_w_ > 0.0) || !std::isfinite(sigma_w_)) throw DomainError("LtiSystem: sigma_w must be > 0");
    if (!(sigma_u_ > 0.0) || !std::isfinite(sigma_u_)) throw DomainError("LtiSystem: sigma_u must be > 0");
  }

  const Matrix& A() const { return a_; }
  const Matrix& B() const { return b_; }
  double sigma_w() const { return sigma_w_; }
  double sigma_u() const { return sigma_u_; }
  std::size_t state_dim() const { return a_.rows(); }
  std::size_t input_dim() const { return b_.cols(); }

 private:
  Matrix a_;
  Matrix b_;
  double sigma_w_;
  double sigma_u_;
};

// The two-state example system used throughout the experiments.
inline LtiSystem reference_system() {
  return LtiSystem(Matrix{{1.2, 0.1}, {0.0, 1.0}}, Matrix{{0.0}, {1.0}}, 0.1, 0.1);
}

}  // namespace specrad
