#pragma once

#include <optional>

#include "rnconv/normal.hpp"

namespace rnc {

// Below this distance from v = 1 the family is evaluated on its v = 1 branch;
// the defining roots diverge there while the branches join continuously.
inline constexpr double kVarianceNearOne = 1e-6;

// Beyond this |mu| the CDF is clamped to 0 or 1 (double precision underflow).
inline constexpr double kMuClamp = 40.0;

/// Unique solution beta < mu/(1-v) of
///   N(x)/N_{mu,v}(x) = (1 - Phi(x)) / (1 - Phi_{mu,v}(x)),   0 < v < 1.
double beta_root(double mu, double v);

/// Unique solution alpha > mu/(1-v) of
///   N(x)/N_{mu,v}(x) = Phi(x) / Phi_{mu,v}(x),   v > 1.
double alpha_root(double mu, double v);

/// I_{mu,v}(x) = sqrt(2 sqrt(v)/(1+v)) e^{-mu^2/(4(1+v))} Phi_{mu/(1+v), 2v/(1+v)}(x).
/// Pass x = +inf for the limit value.
double i_term(double mu, double v, double x);
double i_term_infinity(double mu, double v);

// Parameter pair (mu, v >= 0) with the branch root cached at construction.
class RNParams {
 public:
  RNParams(double mu, double v);

  double mu() const { return mu_; }
  double v() const { return v_; }
  bool has_root() const { return root_.has_value(); }
  double root() const { return *root_; }

 private:
  double mu_;
  double v_;
  std::optional<double> root_;  // alpha if v > 1, beta if v < 1
};

/// Rayleigh-normal CDF Z_v(mu). Z_0 = Phi; Z_1 is the Rayleigh CDF with scale sqrt(2).
double z_cdf(double mu, double v);

/// sqrt(1 - Z_v(mu)) evaluated without cancellation (the attained supremum of the
/// continuous fidelity against N_{mu,v}).
double optimal_root_fidelity(double mu, double v);

/// mu with z_cdf(mu, v) = p, by monotone bisection. Throws DomainError unless 0 < p < 1.
double z_quantile(double p, double v);

// The function A_{mu,v} attaining the supremum in the defining variational problem.
// Continuous, increasing, Phi <= A <= 1; its derivative is a scaled Gaussian density
// on each side of the breakpoint.
class OptimizerFunction {
 public:
  explicit OptimizerFunction(const RNParams& params);

  double value(double x) const;    // A(x)
  double density(double x) const;  // dA/dx
  double log_density(double x) const;

  // Branch switch point; -inf when the function is a single Gaussian CDF.
  double breakpoint() const { return breakpoint_; }
  const RNParams& params() const { return params_; }

 private:
  RNParams params_;
  double breakpoint_;
  double log_scale_ = 0.0;  // log of the affine factor applied to the N_{mu,v} piece
  enum class Branch { StdBelow, StdAbove, StdEverywhere, ShiftedEverywhere } branch_;
};

OptimizerFunction optimizer_function(const RNParams& params);

/// Adaptive quadrature of the continuous fidelity integral(sqrt(A'(x) N_g(x)) dx),
/// split at the breakpoint. Absolute error target 1e-9; throws QuadratureError when
/// refinement fails.
double continuous_fidelity(const OptimizerFunction& a, const GaussParams& g);

}  // namespace rnc
