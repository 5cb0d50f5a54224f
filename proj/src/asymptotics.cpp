#include "taxruin/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "taxruin/errors.hpp"
#include "taxruin/numerics.hpp"

namespace taxruin {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Relative slack on the power-law divergence boundaries (alpha * beta = 1 or 2).
constexpr double kBoundarySlack = 1e-6;
constexpr double kQuadTol = 1e-12;

std::string describe(const ModelSpec& m) {
  std::ostringstream os;
  os.precision(17);
  os << to_string(m.kind);
  switch (m.kind) {
    case ModelKind::CL:
      os << "(c=" << m.premium << ", lambda=" << m.claim_rate << ", mu=" << m.claim_mean_inv << ")";
      break;
    case ModelKind::TwoSided:
      os << "(c=" << m.premium << ", lambda=" << m.claim_rate << ", mu=" << m.claim_mean_inv
         << ", lambda_down=" << m.down_rate << ", mu_down=" << m.down_mean_inv << ")";
      break;
    case ModelKind::BMDrift:
      os << "(p=" << m.drift << ", sigma=" << m.volatility << ")";
      break;
  }
  return os.str();
}

std::string describe(const TaxPolicy& p) {
  std::ostringstream os;
  os.precision(17);
  os << to_string(p.kind());
  switch (p.kind()) {
    case PolicyKind::Constant:
      os << "(gamma=" << p.gamma() << ")";
      break;
    case PolicyKind::Example41:
      os << "(beta=" << p.beta() << ")";
      break;
    case PolicyKind::Table:
      os << "(" << p.rates().size() << " pieces)";
      break;
  }
  return os.str();
}

Prediction infinite(std::string formula, std::string condition, std::string inputs) {
  return {kInf, false, std::move(formula), std::move(condition), std::move(inputs)};
}

// Far probe for the tail exponent: well past every kink and the natural scale.
double probe_point(const TaxPolicy& policy, double alpha) {
  double scale = 1.0 / alpha;
  for (double k : policy.kinks()) scale = std::max(scale, k);
  return 1e8 * scale;
}

// Integral of f over [0, inf): Gauss-Kronrod between kinks, then t = a e^s
// on the tail so power-law and exponential tails both decay exponentially in s.
double integrate_half_line(const TaxPolicy& policy, double alpha, const numerics::ScalarFn& f) {
  std::vector<double> points{0.0};
  for (double k : policy.kinks()) {
    if (k > points.back()) points.push_back(k);
  }
  const double anchor = std::max(points.back(), 1.0 / alpha);
  if (anchor > points.back()) points.push_back(anchor);

  numerics::ExactSum total;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    total.add(numerics::integrate(f, points[i], points[i + 1], kQuadTol));
  }
  const double a = points.back();
  auto tail = [&](double s) {
    const double t = a * std::exp(s);
    if (!std::isfinite(t)) return 0.0;
    const double v = f(t) * t;
    return std::isfinite(v) ? v : 0.0;
  };
  total.add(numerics::integrate(tail, 0.0, kInf, kQuadTol));
  return total.value();
}

void require_spectrally_positive(const ModelSpec& model, const char* what) {
  if (!model.spectrally_positive()) {
    throw UnsupportedModel(std::string(what) + ": needs a spectrally positive model (CL or BMDrift)");
  }
}

}  // namespace

double ruin_integral_quadrature(const TaxPolicy& policy, double alpha) {
  if (!(alpha > 0.0)) throw DomainError("ruin_integral: alpha must be positive");
  const double p = alpha * tail_exponent(policy, probe_point(policy, alpha));
  if (p <= 1.0 + kBoundarySlack) return kInf;
  return integrate_half_line(policy, alpha, [&](double t) { return std::exp(-alpha * hhat_gamma(policy, t)); });
}

double ruin_integral(const TaxPolicy& policy, double alpha) {
  if (!(alpha > 0.0)) throw DomainError("ruin_integral: alpha must be positive");
  switch (policy.kind()) {
    case PolicyKind::Constant:
      return policy.gamma() < 1.0 ? 1.0 / (alpha * (1.0 - policy.gamma())) : kInf;
    case PolicyKind::Example41: {
      const double ab = alpha * policy.beta();
      if (ab <= 1.0 + kBoundarySlack) return kInf;
      return (ab - 1.0 + std::exp(-ab)) / (alpha * (ab - 1.0));
    }
    case PolicyKind::Table:
      return ruin_integral_quadrature(policy, alpha);
  }
  return kInf;
}

double tax_numerator_quadrature(const TaxPolicy& policy, double alpha, double phi) {
  if (!(alpha > 0.0)) throw DomainError("tax_numerator: alpha must be positive");
  const double far = probe_point(policy, alpha);
  const double p = alpha * tail_exponent(policy, far);
  // Undiscounted tax grows linearly when the far rate is positive.
  const double needed = (phi == 0.0 && policy.rate_at(far) > 0.0) ? 2.0 : 1.0;
  if (p <= needed * (1.0 + kBoundarySlack)) return kInf;
  return integrate_half_line(policy, alpha, [&](double t) {
    return std::exp(-alpha * hhat_gamma(policy, t)) * discounted_depth_tax(policy, t, phi);
  });
}

Prediction predict_ruin_constant(const ModelSpec& model, const TaxPolicy& policy,
                                 std::optional<double> upsilon) {
  const std::string inputs = describe(model) + ", " + describe(policy);
  const double alpha = lundberg_root(model);
  if (!upsilon) upsilon = cramer_upsilon(model);
  if (!upsilon) {
    throw NeedsEmpiricalUpsilon("predict_ruin_constant: no closed-form Cramer constant for " + describe(model));
  }
  const LadderExponents ladder(model);

  if (policy.kind() == PolicyKind::Constant) {
    const double gamma = policy.gamma();
    if (gamma >= 1.0) {
      return infinite("tax-cramer/constant", "gamma < 1 (reflected process ruins surely)", inputs);
    }
    const double value = *upsilon * ladder.kappa_hat(0.0, alpha) / ladder.kappa_hat(0.0, alpha * (1.0 - gamma));
    return {value, true, "tax-cramer/constant", "gamma < 1", inputs};
  }

  require_spectrally_positive(model, "predict_ruin_constant");
  const double k_hat = ladder.kappa_hat(0.0, alpha);
  if (policy.kind() == PolicyKind::Example41) {
    const double ab = alpha * policy.beta();
    if (ab <= 1.0 + kBoundarySlack) return infinite("tax-cramer/example41", "alpha*beta > 1", inputs);
    return {*upsilon * (ab - 1.0 + std::exp(-ab)) / (ab - 1.0), true, "tax-cramer/example41", "alpha*beta > 1",
            inputs};
  }
  const double integral = ruin_integral_quadrature(policy, alpha);
  if (std::isinf(integral)) {
    return infinite("tax-cramer/quadrature", "integral of exp(-alpha Hhat) finite", inputs);
  }
  return {*upsilon * k_hat * integral, true, "tax-cramer/quadrature", "integral of exp(-alpha Hhat) finite",
          inputs};
}

Prediction predict_ruin_ratio(const ModelSpec& model, double gamma) {
  if (!(gamma >= 0.0 && gamma < 1.0)) throw ParameterError("predict_ruin_ratio: gamma must lie in [0, 1)");
  const double alpha = lundberg_root(model);
  const LadderExponents ladder(model);
  const double value = ladder.kappa_hat(0.0, alpha) / ladder.kappa_hat(0.0, alpha * (1.0 - gamma));
  std::ostringstream in;
  in.precision(17);
  in << describe(model) << ", gamma=" << gamma;
  return {value, true, "tax-cramer/ratio", "gamma < 1", in.str()};
}

Prediction predict_edpf(const ModelSpec& model, double penalty_lambda, double eta, double penalty_delta) {
  if (!(penalty_lambda >= 0.0) || !(penalty_delta >= 0.0)) {
    throw ParameterError("predict_edpf: penalty lambda and delta must be nonnegative");
  }
  const double alpha = lundberg_root(model);
  if (!(eta <= alpha)) throw ParameterError("predict_edpf: eta must not exceed alpha");
  const double shift = eta + penalty_lambda - alpha;
  if (shift == 0.0) throw ParameterError("predict_edpf: eta + lambda - alpha must be nonzero");
  const LadderExponents ladder(model);
  const double q = ladder.killing_rate();
  const double value =
      alpha * (ladder.kappa(penalty_delta, penalty_lambda - alpha) - ladder.kappa(penalty_delta, -eta)) / (q * shift);
  std::ostringstream in;
  in.precision(17);
  in << describe(model) << ", lambda=" << penalty_lambda << ", eta=" << eta << ", delta=" << penalty_delta;
  return {value, true, "edpf", "eta <= alpha, eta + lambda - alpha != 0", in.str()};
}

Prediction predict_tax_value(const ModelSpec& model, const TaxPolicy& policy, double delta) {
  if (!(delta >= 0.0)) throw ParameterError("predict_tax_value: delta must be nonnegative");
  require_spectrally_positive(model, "predict_tax_value");
  std::ostringstream in;
  in.precision(17);
  in << describe(model) << ", " << describe(policy) << ", delta=" << delta;
  const double alpha = lundberg_root(model);
  const double phi = phi_hat(model, delta);

  switch (policy.kind()) {
    case PolicyKind::Constant: {
      const double gamma = policy.gamma();
      if (gamma >= 1.0) return infinite("tax-value/constant", "gamma < 1", in.str());
      return {gamma / (alpha * (1.0 - gamma) + phi), true, "tax-value/constant", "gamma < 1", in.str()};
    }
    case PolicyKind::Example41:
      if (delta == 0.0) {
        const double ab = alpha * policy.beta();
        if (ab <= 2.0 * (1.0 + kBoundarySlack)) return infinite("tax-value/example41", "alpha*beta > 2", in.str());
        const double b = policy.beta();
        const double value =
            alpha * b * b * std::exp(-ab) / ((ab - 1.0) * (ab - 2.0) * (ab - 1.0 + std::exp(-ab)));
        return {value, true, "tax-value/example41", "alpha*beta > 2", in.str()};
      }
      break;
    case PolicyKind::Table:
      break;
  }
  const double denominator = ruin_integral_quadrature(policy, alpha);
  const char* cond = "integrals of exp(-alpha Hhat) and of exp(-alpha Hhat) * tax finite";
  if (std::isinf(denominator)) return infinite("tax-value/quadrature", cond, in.str());
  const double numerator = tax_numerator_quadrature(policy, alpha, phi);
  if (std::isinf(numerator)) return infinite("tax-value/quadrature", cond, in.str());
  return {numerator / denominator, true, "tax-value/quadrature", cond, in.str()};
}

double predict_joint_density(const ModelSpec& model, double y, double x, double v) {
  if (model.kind != ModelKind::CL) throw UnsupportedModel("predict_joint_density: CL models only");
  return joint_limit_marginals(model).density(y, x, v);
}

double JointLimitMarginals::density(double y, double x, double v) const {
  if (y < 0.0 || x < 0.0 || v < 0.0 || v < y) return 0.0;
  return alpha / q * std::exp(alpha * y) * lambda * mu * std::exp(-mu * (v + x));
}

JointLimitMarginals joint_limit_marginals(const ModelSpec& model) {
  if (model.kind != ModelKind::CL) throw UnsupportedModel("joint limit law: CL models only");
  const LadderExponents ladder(model);
  return {lundberg_root(model), ladder.killing_rate(), model.claim_rate, model.claim_mean_inv};
}

double JointLimitMarginals::depth_cdf(double y) const {
  if (y <= 0.0) return 0.0;
  // Density (alpha lambda / (q mu)) e^{-(mu - alpha) y}.
  const double rate = mu - alpha;
  return alpha * lambda / (q * mu * rate) * -std::expm1(-rate * y);
}

double JointLimitMarginals::overshoot_cdf(double x) const {
  if (x <= 0.0) return 0.0;
  return total_mass() * -std::expm1(-mu * x);
}

double JointLimitMarginals::undershoot_cdf(double v) const {
  if (v <= 0.0) return 0.0;
  // Density (lambda / q) (e^{alpha v} - 1) e^{-mu v}.
  const double rate = mu - alpha;
  return lambda / q * (-std::expm1(-rate * v) / rate + std::expm1(-mu * v) / mu);
}

double JointLimitMarginals::total_mass() const { return alpha * lambda / (q * mu * (mu - alpha)); }

double q_consistency(const ModelSpec& model) {
  if (model.kind != ModelKind::CL) throw UnsupportedModel("q_consistency: CL models only");
  const double alpha = lundberg_root(model);
  const double mu = model.claim_mean_inv;
  return std::abs(LadderExponents(model).killing_rate() - alpha * model.claim_rate / (mu * (mu - alpha)));
}

}  // namespace taxruin
