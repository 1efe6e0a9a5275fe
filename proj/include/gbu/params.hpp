#pragma once

#include <cmath>
#include <string>

#include "gbu/error.hpp"

namespace gbu {

/// Exponents of the scaling group of u_t = Δ_p u + |∇u|^q.
///
/// With beta = 1/(q-p+1), the map v -> eps^kappa v(x/eps, (y-eps)/eps, t/eps^theta)
/// sends solutions to solutions; every term of the residual is multiplied by
/// eps^residual_exp.
struct ScalingExponents {
  double kappa = 0.0;         // (q-p)/(q-p+1), space-profile exponent of u
  double beta = 0.0;          // 1/(q-p+1), gradient-profile exponent
  double time_exp = 0.0;      // (2q-p)/(q-p+1)
  double sigma_max = 0.0;     // 1/(2(q-p+1)), upper bound for the J-functional sigma
  double residual_exp = 0.0;  // kappa - time_exp = -q/(q-p+1)
};

/// Validated (p, q, mu). Construct through validate_params().
class PdeParams {
 public:
  double p() const noexcept { return p_; }
  double q() const noexcept { return q_; }
  double mu() const noexcept { return mu_; }
  const ScalingExponents& exponents() const noexcept { return exps_; }

  /// Diagnostics built on u_y >= mu/2 need a strictly positive slope.
  bool supports_nondegenerate_diagnostics() const noexcept { return mu_ > 0.0; }

  /// Same (p, q) with a different boundary slope.
  PdeParams with_mu(double mu) const;

  friend PdeParams validate_params(double p, double q, double mu);

 private:
  PdeParams(double p, double q, double mu);

  double p_;
  double q_;
  double mu_;
  ScalingExponents exps_;
};

inline ScalingExponents scaling_exponents(double p, double q) {
  const double d = q - p + 1.0;
  ScalingExponents e;
  e.kappa = (q - p) / d;
  e.beta = 1.0 / d;
  e.time_exp = (2.0 * q - p) / d;
  e.sigma_max = 0.5 / d;
  e.residual_exp = -q / d;
  return e;
}

inline ScalingExponents scaling_exponents(const PdeParams& params) { return params.exponents(); }

inline PdeParams::PdeParams(double p, double q, double mu)
    : p_(p), q_(q), mu_(mu), exps_(scaling_exponents(p, q)) {}

inline PdeParams validate_params(double p, double q, double mu) {
  if (!std::isfinite(p) || !std::isfinite(q) || !std::isfinite(mu)) {
    throw HypothesisViolation("p, q and mu must be finite");
  }
  if (!(p > 2.0)) {
    throw HypothesisViolation("p must exceed 2 (got p=" + std::to_string(p) + ")");
  }
  if (!(q > p)) {
    throw HypothesisViolation("q must exceed p (got p=" + std::to_string(p) +
                              ", q=" + std::to_string(q) + ")");
  }
  if (mu < 0.0) {
    throw HypothesisViolation("mu must be non-negative (got mu=" + std::to_string(mu) + ")");
  }
  return PdeParams(p, q, mu);
}

inline PdeParams PdeParams::with_mu(double mu) const { return validate_params(p_, q_, mu); }

/// A point of the rescaled frame together with the rescaled value.
struct RescaledPoint {
  double x = 0.0;
  double y = 0.0;
  double t = 0.0;
  double value = 0.0;
};

/// Pull (x, y, t) back to the reference frame (x/eps, (y-eps)/eps, t/eps^theta)
/// and scale the reference value by eps^kappa. Evaluating a reference function
/// at the returned point and multiplying by eps^kappa gives the rescaled one.
inline RescaledPoint rescale_point(double x, double y, double t, double value, double eps,
                                   const ScalingExponents& exps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    throw Error("rescale_point: eps must be positive");
  }
  RescaledPoint r;
  r.x = x / eps;
  r.y = (y - eps) / eps;
  r.t = t / std::pow(eps, exps.time_exp);
  r.value = std::pow(eps, exps.kappa) * value;
  return r;
}

/// Factor by which every term of the PDE residual is multiplied under rescaling.
inline double residual_amplification(double eps, const ScalingExponents& exps) {
  return std::pow(eps, exps.residual_exp);
}

}  // namespace gbu
