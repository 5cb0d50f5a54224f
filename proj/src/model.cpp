#include "taxruin/model.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "taxruin/errors.hpp"
#include "taxruin/numerics.hpp"

namespace taxruin {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw ParameterError(std::string(name) + " must be positive and finite");
  }
}

void require_nonnegative(double value, const char* name) {
  if (!(value >= 0.0) || !std::isfinite(value)) {
    throw ParameterError(std::string(name) + " must be nonnegative and finite");
  }
}

// psi(-theta), the exponent of the dual process -X.
double dual_exponent(const ModelSpec& m, double theta) { return laplace_exponent(m, -theta); }
double dual_exponent_derivative(const ModelSpec& m, double theta) {
  return -laplace_exponent_derivative(m, -theta);
}

// Offset that keeps bracket ends strictly inside a pole.
double inside(double pole, double toward, double scale) {
  const double eps = 1e-13 * std::max(scale, 1.0);
  return toward > pole ? pole + eps : pole - eps;
}

// Smallest power-of-two multiple of `start` at which f turns positive.
double expand_until_positive(const numerics::ScalarFn& f, double start) {
  double hi = std::max(start, 1e-3);
  for (int i = 0; i < 2000 && !(f(hi) > 0.0); ++i) hi *= 2.0;
  if (!(f(hi) > 0.0)) throw Error("root bracket expansion failed");
  return hi;
}

}  // namespace

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::CL:
      return "CL";
    case ModelKind::TwoSided:
      return "TwoSided";
    case ModelKind::BMDrift:
      return "BMDrift";
  }
  return "?";
}

ModelSpec ModelSpec::cl(double c, double lambda, double mu) {
  require_positive(c, "premium rate c");
  require_nonnegative(lambda, "claim intensity lambda");
  require_positive(mu, "claim rate mu");
  ModelSpec m;
  m.kind = ModelKind::CL;
  m.premium = c;
  m.claim_rate = lambda;
  m.claim_mean_inv = mu;
  return m;
}

ModelSpec ModelSpec::two_sided(double c, double lambda, double mu, double lambda_down,
                               double mu_down) {
  require_nonnegative(lambda_down, "downward jump intensity");
  if (lambda_down == 0.0) return cl(c, lambda, mu);
  ModelSpec m = cl(c, lambda, mu);
  require_positive(mu_down, "downward jump rate");
  m.kind = ModelKind::TwoSided;
  m.down_rate = lambda_down;
  m.down_mean_inv = mu_down;
  return m;
}

ModelSpec ModelSpec::bm_drift(double p, double sigma) {
  if (!std::isfinite(p)) throw ParameterError("drift p must be finite");
  require_nonnegative(sigma, "volatility sigma");
  ModelSpec m;
  m.kind = ModelKind::BMDrift;
  m.drift = p;
  m.volatility = sigma;
  return m;
}

ExponentDomain exponent_domain(const ModelSpec& m) {
  switch (m.kind) {
    case ModelKind::CL:
      return {-kInf, m.claim_mean_inv};
    case ModelKind::TwoSided:
      return {-m.down_mean_inv, m.claim_mean_inv};
    case ModelKind::BMDrift:
      return {-kInf, kInf};
  }
  return {-kInf, kInf};
}

namespace {

double psi_rational(const ModelSpec& m, double theta) {
  switch (m.kind) {
    case ModelKind::BMDrift:
      return 0.5 * m.volatility * m.volatility * theta * theta - m.drift * theta;
    case ModelKind::CL:
      return -m.premium * theta + m.claim_rate * theta / (m.claim_mean_inv - theta);
    case ModelKind::TwoSided:
      return -m.premium * theta + m.claim_rate * theta / (m.claim_mean_inv - theta) -
             m.down_rate * theta / (m.down_mean_inv + theta);
  }
  return 0.0;
}

double psi_rational_derivative(const ModelSpec& m, double theta) {
  switch (m.kind) {
    case ModelKind::BMDrift:
      return m.volatility * m.volatility * theta - m.drift;
    case ModelKind::CL: {
      const double d = m.claim_mean_inv - theta;
      return -m.premium + m.claim_rate * m.claim_mean_inv / (d * d);
    }
    case ModelKind::TwoSided: {
      const double d = m.claim_mean_inv - theta;
      const double e = m.down_mean_inv + theta;
      return -m.premium + m.claim_rate * m.claim_mean_inv / (d * d) -
             m.down_rate * m.down_mean_inv / (e * e);
    }
  }
  return 0.0;
}

}  // namespace

double laplace_exponent(const ModelSpec& m, double theta) {
  if (!exponent_domain(m).contains(theta)) {
    std::ostringstream os;
    os << "laplace_exponent: theta=" << theta << " outside the domain of " << to_string(m.kind);
    throw DomainError(os.str());
  }
  return psi_rational(m, theta);
}

double laplace_exponent_derivative(const ModelSpec& m, double theta) {
  if (!exponent_domain(m).contains(theta)) {
    throw DomainError("laplace_exponent_derivative: theta outside the domain");
  }
  return psi_rational_derivative(m, theta);
}

double mean_drift(const ModelSpec& m) {
  switch (m.kind) {
    case ModelKind::BMDrift:
      return -m.drift;
    case ModelKind::CL:
      return m.claim_rate / m.claim_mean_inv - m.premium;
    case ModelKind::TwoSided:
      return m.claim_rate / m.claim_mean_inv - m.down_rate / m.down_mean_inv - m.premium;
  }
  return 0.0;
}

double lundberg_root(const ModelSpec& m) {
  if (!has_net_profit(m)) {
    throw NoPositiveRoot("lundberg_root: E[X_1] >= 0, Cramer condition unobtainable");
  }
  if (m.kind == ModelKind::BMDrift) {
    if (m.volatility == 0.0) throw NoPositiveRoot("lundberg_root: degenerate BMDrift (sigma = 0)");
    const double s2 = m.volatility * m.volatility;
    // psi(theta) = theta (s2 theta / 2 - p): solve on the bracket (p/s2, 4p/s2).
    auto f = [&](double t) { return laplace_exponent(m, t); };
    auto df = [&](double t) { return laplace_exponent_derivative(m, t); };
    return numerics::find_root(f, df, m.drift / s2, 4.0 * m.drift / s2);
  }
  if (m.claim_rate == 0.0) throw NoPositiveRoot("lundberg_root: no upward jumps");

  // psi is convex, negative just right of 0 and explodes at the pole mu. Its
  // minimiser separates the trivial root 0 from alpha.
  const double pole = m.claim_mean_inv;
  auto dpsi = [&](double t) { return laplace_exponent_derivative(m, t); };
  auto ddpsi = [&](double t) {
    const double d = m.claim_mean_inv - t;
    double v = 2.0 * m.claim_rate * m.claim_mean_inv / (d * d * d);
    if (m.kind == ModelKind::TwoSided) {
      const double e = m.down_mean_inv + t;
      v += 2.0 * m.down_rate * m.down_mean_inv / (e * e * e);
    }
    return v;
  };
  const double hi = inside(pole, 0.0, pole);
  const double minimiser = numerics::find_root(dpsi, ddpsi, 0.0, hi);
  auto f = [&](double t) { return laplace_exponent(m, t); };
  return numerics::find_root(f, dpsi, minimiser, hi);
}

ModelSpec esscher_tilt(const ModelSpec& m, double alpha) {
  if (!exponent_domain(m).contains(alpha)) throw DomainError("esscher_tilt: alpha outside the exponent domain");
  if (alpha == 0.0) return m;
  switch (m.kind) {
    case ModelKind::BMDrift:
      return ModelSpec::bm_drift(m.drift - alpha * m.volatility * m.volatility, m.volatility);
    case ModelKind::CL: {
      const double mu_q = m.claim_mean_inv - alpha;
      return ModelSpec::cl(m.premium, m.claim_rate * m.claim_mean_inv / mu_q, mu_q);
    }
    case ModelKind::TwoSided: {
      const double mu_q = m.claim_mean_inv - alpha;
      const double mu_down_q = m.down_mean_inv + alpha;
      return ModelSpec::two_sided(m.premium, m.claim_rate * m.claim_mean_inv / mu_q, mu_q,
                                  m.down_rate * m.down_mean_inv / mu_down_q, mu_down_q);
    }
  }
  return m;
}

double phi_hat(const ModelSpec& m, double a) {
  if (m.kind == ModelKind::TwoSided) {
    throw UnsupportedModel("phi_hat: TwoSided models need ladder_exponents");
  }
  if (!(a >= 0.0)) throw DomainError("phi_hat: a must be nonnegative");
  auto f = [&](double t) { return dual_exponent(m, t) - a; };
  auto df = [&](double t) { return dual_exponent_derivative(m, t); };
  // Right inverse: start from the minimiser of psi(-theta) on [0, inf).
  double lo = 0.0;
  if (df(0.0) < 0.0) {
    const double hi = expand_until_positive(df, 1.0);
    lo = numerics::find_root(df, 0.0, hi);
  } else if (a == 0.0) {
    return 0.0;
  }
  if (f(lo) == 0.0) return lo;
  const double hi = expand_until_positive(f, std::max(2.0 * lo, 1.0));
  return numerics::find_root(f, df, lo, hi);
}

namespace {

// Roots of a - psi(-theta) for the two-sided model. psi(-theta) is convex on
// (-mu, mu_down) with poles at both ends, and the cleared numerator is a cubic
// with leading coefficient c, so there is exactly one more root beyond mu_down.
CharacteristicRoots two_sided_roots(const ModelSpec& m, double a) {
  const double mu = m.claim_mean_inv;
  const double mu_down = m.down_mean_inv;
  // Rational continuation: the far root lies outside the exponent domain.
  auto h = [&](double t) { return a - psi_rational(m, -t); };
  auto dh = [&](double t) { return psi_rational_derivative(m, -t); };
  auto dpsi_hat = [&](double t) { return -psi_rational_derivative(m, -t); };

  CharacteristicRoots r;
  const double left = inside(-mu, 0.0, mu);
  const double right = inside(mu_down, 0.0, mu_down);
  const double minimiser = numerics::find_root(dpsi_hat, left, right);
  if (!(h(minimiser) > 0.0)) throw FactorizationError("characteristic equation has no interior real roots");
  r.ascending_root = numerics::find_root(h, dh, left, minimiser);
  r.phi_hat = a == 0.0 && minimiser < 0.0 ? 0.0 : numerics::find_root(h, dh, minimiser, right);

  // Beyond the pole: h(mu_down+) = +inf, h(+inf) = -inf.
  const double beyond = inside(mu_down, 2.0 * mu_down, mu_down);
  auto neg_h = [&](double t) { return -h(t); };
  double hi = beyond;
  for (int i = 0; i < 200 && !(neg_h(hi) > 0.0); ++i) hi = mu_down + (hi - mu_down + 1.0) * 2.0;
  if (!(neg_h(hi) > 0.0)) throw FactorizationError("could not bracket the root beyond mu_down");
  r.far_root = numerics::find_root(h, dh, beyond, hi);
  return r;
}

}  // namespace

LadderExponents::LadderExponents(const ModelSpec& model) : model_(model) {
  if (!has_net_profit(model_)) {
    throw NoPositiveRoot("ladder_exponents: model needs E[X_1] < 0");
  }
  if (model_.kind == ModelKind::BMDrift && model_.volatility == 0.0) {
    throw UnsupportedModel("ladder_exponents: degenerate BMDrift (sigma = 0)");
  }
  try {
    killing_rate_ = kappa(0.0, 0.0);
    // Factored form must reproduce a - psi(-theta); spot-check away from poles.
    for (double a : {0.0, 1.0}) {
      for (double theta : {-0.25, 0.25}) {
        const ExponentDomain dom = exponent_domain(model_);
        const double t = theta * std::min({1.0, model_.claim_mean_inv, model_.down_mean_inv});
        if (!dom.contains(-t)) continue;
        const double lhs = kappa(a, t) * kappa_hat(a, -t);
        const double rhs = a - dual_exponent(model_, t);
        if (std::abs(lhs - rhs) > 1e-8 * std::max(1.0, std::abs(rhs))) {
          throw FactorizationError("ladder factorization residual too large");
        }
      }
    }
  } catch (const FactorizationError&) {
    throw;
  } catch (const Error& e) {
    throw FactorizationError(std::string("ladder factorization failed: ") + e.what());
  }
  if (model_.kind == ModelKind::BMDrift) ascending_drift_ = 0.5 * model_.volatility * model_.volatility;
}

CharacteristicRoots LadderExponents::roots(double a) const {
  if (!(a >= 0.0)) throw DomainError("ladder exponents need a >= 0");
  CharacteristicRoots r;
  switch (model_.kind) {
    case ModelKind::CL: {
      r.phi_hat = phi_hat(model_, a);
      // Cleared numerator: -c theta^2 + (a - c mu + lambda) theta + a mu.
      const double c = model_.premium;
      r.ascending_root = (a - c * model_.claim_mean_inv + model_.claim_rate) / c - r.phi_hat;
      return r;
    }
    case ModelKind::BMDrift: {
      r.phi_hat = phi_hat(model_, a);
      const double s2 = model_.volatility * model_.volatility;
      r.ascending_root = -2.0 * model_.drift / s2 - r.phi_hat;
      return r;
    }
    case ModelKind::TwoSided:
      return two_sided_roots(model_, a);
  }
  return r;
}

double LadderExponents::kappa(double a, double theta) const {
  const CharacteristicRoots r = roots(a);
  switch (model_.kind) {
    case ModelKind::BMDrift:
      return 0.5 * model_.volatility * model_.volatility * (theta - r.ascending_root);
    case ModelKind::CL:
    case ModelKind::TwoSided:
      if (!(theta > -model_.claim_mean_inv)) throw DomainError("kappa: theta at or below -mu");
      return model_.premium * (theta - r.ascending_root) / (model_.claim_mean_inv + theta);
  }
  return 0.0;
}

double LadderExponents::kappa_hat(double a, double b) const {
  const CharacteristicRoots r = roots(a);
  if (model_.kind != ModelKind::TwoSided) return r.phi_hat + b;
  if (!(b > -model_.down_mean_inv)) throw DomainError("kappa_hat: b at or below -mu_down");
  return (r.phi_hat + b) * (*r.far_root + b) / (model_.down_mean_inv + b);
}

std::string_view LadderExponents::normalization() const {
  return model_.kind == ModelKind::TwoSided ? "rational split, kappa_hat(a,b)=(phi+b)(r3+b)/(mu_down+b)"
                                            : "descending local time = |inf X|";
}

LadderExponents ladder_exponents(const ModelSpec& model) { return LadderExponents(model); }

std::optional<double> cramer_upsilon(const ModelSpec& m) {
  switch (m.kind) {
    case ModelKind::CL:
      return m.claim_rate / (m.premium * m.claim_mean_inv);
    case ModelKind::BMDrift:
      return 1.0;
    case ModelKind::TwoSided:
      return std::nullopt;
  }
  return std::nullopt;
}

}  // namespace taxruin
