#pragma once

#include <optional>
#include <string>

#include "taxruin/model.hpp"
#include "taxruin/tax.hpp"

namespace taxruin {

/// Analytic large-u limit. `value` is +infinity exactly when the finiteness
/// condition recorded in `condition` fails.
struct Prediction {
  double value = 0.0;
  bool finite = true;
  /// Identity the value came from, e.g. "tax-cramer/constant".
  std::string formula;
  /// Finiteness condition in words, empty when none applies.
  std::string condition;
  /// Echo of the inputs.
  std::string inputs;
};

/// Integral over [0, inf) of exp(-alpha * hhat_gamma(t)); +infinity when it
/// diverges. Closed forms for Constant and Example41, quadrature for Table.
double ruin_integral(const TaxPolicy& policy, double alpha);

/// Quadrature route to the same integral for any policy: finite pieces
/// between rate kinks, then a log-substituted tail. Divergence is declared when
/// the local power-law exponent alpha * t * (1 - rate(t)) at a far probe point
/// is <= 1 + 1e-6.
double ruin_integral_quadrature(const TaxPolicy& policy, double alpha);

/// Integral over [0, inf) of exp(-alpha hhat_gamma(t)) * discounted_depth_tax(t, phi).
double tax_numerator_quadrature(const TaxPolicy& policy, double alpha, double phi);

/// lim exp(alpha u) P(tau^Gamma_u < inf). `upsilon` overrides the Cramer
/// constant (required for TwoSided, which otherwise throws NeedsEmpiricalUpsilon).
Prediction predict_ruin_constant(const ModelSpec& model, const TaxPolicy& policy,
                                 std::optional<double> upsilon = std::nullopt);

/// lim P(tau^gamma_u < inf) / P(tau_u < inf) = kappa_hat(0, alpha) / kappa_hat(0, alpha (1 - gamma)).
Prediction predict_ruin_ratio(const ModelSpec& model, double gamma);

/// Limiting Gerber-Shiu function
/// alpha (kappa(delta, lambda - alpha) - kappa(delta, -eta)) / (q (eta + lambda - alpha)).
Prediction predict_edpf(const ModelSpec& model, double penalty_lambda, double eta, double penalty_delta);

/// Limiting expected discounted tax paid up to ruin, given ruin.
Prediction predict_tax_value(const ModelSpec& model, const TaxPolicy& policy, double delta);

/// Limiting density of (depth y, overshoot x, undershoot v) given ruin, CL only:
/// (alpha / q) e^{alpha y} 1{v >= y} lambda mu e^{-mu (v + x)}.
double predict_joint_density(const ModelSpec& model, double y, double x, double v);

/// Closed-form marginal CDFs of the CL joint limit.
struct JointLimitMarginals {
  double alpha;
  double q;
  double lambda;
  double mu;

  /// Same as predict_joint_density, without re-deriving the constants.
  double density(double y, double x, double v) const;
  double depth_cdf(double y) const;
  double overshoot_cdf(double x) const;
  double undershoot_cdf(double v) const;
  /// Integral of predict_joint_density over the whole orthant.
  double total_mass() const;
};

JointLimitMarginals joint_limit_marginals(const ModelSpec& model);

/// |kappa(0,0) - alpha lambda / (mu (mu - alpha))|: the killing rate against
/// the constant that normalises the joint limit (CL only).
double q_consistency(const ModelSpec& model);

}  // namespace taxruin
