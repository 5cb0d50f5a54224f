#include "taxruin/tax.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "taxruin/errors.hpp"
#include "taxruin/numerics.hpp"

namespace taxruin {
namespace {

void require_rate(double r) {
  if (!(r >= 0.0 && r <= 1.0)) throw ParameterError("tax rates must lie in [0, 1]");
}

// (1 - exp(-k x)) / k, continuous at k = 0.
double exp_integral(double k, double x) {
  if (k == 0.0) return x;
  return -std::expm1(-k * x) / k;
}

// Integral of exp(-k x) over [a, b].
double exp_integral(double k, double a, double b) {
  if (k == 0.0) return b - a;
  return std::exp(-k * a) * exp_integral(k, b - a);
}

}  // namespace

std::string_view to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::Constant:
      return "constant";
    case PolicyKind::Example41:
      return "example41";
    case PolicyKind::Table:
      return "table";
  }
  return "?";
}

TaxPolicy TaxPolicy::constant(double gamma) {
  require_rate(gamma);
  TaxPolicy p;
  p.kind_ = PolicyKind::Constant;
  p.gamma_ = gamma;
  return p;
}

TaxPolicy TaxPolicy::example41(double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw ParameterError("example41: beta must be positive");
  TaxPolicy p;
  p.kind_ = PolicyKind::Example41;
  p.beta_ = beta;
  return p;
}

TaxPolicy TaxPolicy::table(std::vector<double> breakpoints, std::vector<double> rates) {
  if (rates.empty()) throw ParameterError("table policy needs at least one rate");
  if (rates.size() == breakpoints.size() + 1) {
    breakpoints.insert(breakpoints.begin(), 0.0);
  } else if (rates.size() != breakpoints.size() || breakpoints.front() != 0.0) {
    throw ParameterError(
        "table policy: give one rate per breakpoint starting at depth 0, or one more rate than breakpoints");
  }
  for (std::size_t i = 1; i < breakpoints.size(); ++i) {
    if (!(breakpoints[i] > breakpoints[i - 1]) || !std::isfinite(breakpoints[i])) {
      throw ParameterError("table policy: breakpoints must be finite and strictly increasing");
    }
  }
  for (double r : rates) require_rate(r);
  TaxPolicy p;
  p.kind_ = PolicyKind::Table;
  p.breakpoints_ = std::move(breakpoints);
  p.rates_ = std::move(rates);
  return p;
}

double TaxPolicy::rate_at(double depth) const {
  switch (kind_) {
    case PolicyKind::Constant:
      return gamma_;
    case PolicyKind::Example41:
      return depth <= beta_ ? 0.0 : 1.0 - beta_ / depth;
    case PolicyKind::Table: {
      const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), depth);
      const auto idx = it == breakpoints_.begin() ? 0 : static_cast<std::size_t>(it - breakpoints_.begin()) - 1;
      return rates_[idx];
    }
  }
  return 0.0;
}

double TaxPolicy::sup_rate() const {
  switch (kind_) {
    case PolicyKind::Constant:
      return gamma_;
    case PolicyKind::Example41:
      return 1.0;
    case PolicyKind::Table:
      return *std::max_element(rates_.begin(), rates_.end());
  }
  return 1.0;
}

std::vector<double> TaxPolicy::kinks() const {
  switch (kind_) {
    case PolicyKind::Constant:
      return {};
    case PolicyKind::Example41:
      return {beta_};
    case PolicyKind::Table:
      return {breakpoints_.begin() + 1, breakpoints_.end()};
  }
  return {};
}

double depth_tax(const TaxPolicy& policy, double d0, double d1) {
  if (d1 <= d0) return 0.0;
  switch (policy.kind()) {
    case PolicyKind::Constant:
      return policy.gamma() * (d1 - d0);
    case PolicyKind::Example41: {
      const double beta = policy.beta();
      const double a = std::max(d0, beta);
      const double b = std::max(d1, beta);
      if (b <= a) return 0.0;
      // (b - a) - beta log(b / a), written to avoid cancellation for short pieces.
      return (b - a) - beta * std::log1p((b - a) / a);
    }
    case PolicyKind::Table: {
      const auto& bp = policy.breakpoints();
      const auto& rates = policy.rates();
      double total = 0.0;
      for (std::size_t i = 0; i < bp.size(); ++i) {
        const double lo = std::max(d0, bp[i]);
        const double hi = i + 1 < bp.size() ? std::min(d1, bp[i + 1]) : d1;
        if (hi > lo) total += rates[i] * (hi - lo);
      }
      return total;
    }
  }
  return 0.0;
}

double hhat_gamma(const TaxPolicy& policy, double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("hhat_gamma: t must be finite and nonnegative");
  // Integrate 1 - rate directly; t - depth_tax(0, t) cancels for large t.
  switch (policy.kind()) {
    case PolicyKind::Constant:
      return (1.0 - policy.gamma()) * t;
    case PolicyKind::Example41: {
      const double beta = policy.beta();
      return t <= beta ? t : beta + beta * std::log(t / beta);
    }
    case PolicyKind::Table: {
      const auto& bp = policy.breakpoints();
      const auto& rates = policy.rates();
      double total = 0.0;
      for (std::size_t i = 0; i < bp.size(); ++i) {
        const double hi = i + 1 < bp.size() ? std::min(t, bp[i + 1]) : t;
        if (hi > bp[i]) total += (1.0 - rates[i]) * (hi - bp[i]);
      }
      return total;
    }
  }
  return 0.0;
}

double discounted_depth_tax(const TaxPolicy& policy, double t, double phi) {
  if (!(phi >= 0.0)) throw DomainError("discounted_depth_tax: phi must be nonnegative");
  if (t <= 0.0) return 0.0;
  if (phi == 0.0) return depth_tax(policy, 0.0, t);
  switch (policy.kind()) {
    case PolicyKind::Constant:
      return policy.gamma() * exp_integral(phi, t);
    case PolicyKind::Table: {
      const auto& bp = policy.breakpoints();
      const auto& rates = policy.rates();
      double total = 0.0;
      for (std::size_t i = 0; i < bp.size() && bp[i] < t; ++i) {
        const double hi = i + 1 < bp.size() ? std::min(t, bp[i + 1]) : t;
        total += rates[i] * exp_integral(phi, bp[i], hi);
      }
      return total;
    }
    case PolicyKind::Example41: {
      const double beta = policy.beta();
      if (t <= beta) return 0.0;
      auto f = [&](double r) { return (1.0 - beta / r) * std::exp(-phi * r); };
      return numerics::integrate(f, beta, t, 1e-13);
    }
  }
  return 0.0;
}

double tail_exponent(const TaxPolicy& policy, double t) { return t * (1.0 - policy.rate_at(t)); }

SegmentTax segment_tax(const TaxPolicy& policy, double delta, double s0, double d0, double c,
                       double dt) {
  SegmentTax out;
  if (!(dt > 0.0) || !(c > 0.0)) return out;
  const double span = c * dt;
  out.tax_paid = depth_tax(policy, d0, d0 + span);
  if (delta == 0.0) {
    out.discounted_tax = out.tax_paid;
    return out;
  }
  // Depth x = c (s - s0): discounted = exp(-delta s0) * int_0^span exp(-k x) rate(d0 + x) dx.
  const double k = delta / c;
  const double front = std::exp(-delta * s0);
  double inner = 0.0;
  switch (policy.kind()) {
    case PolicyKind::Constant:
      inner = policy.gamma() * exp_integral(k, span);
      break;
    case PolicyKind::Table: {
      const auto& bp = policy.breakpoints();
      const auto& rates = policy.rates();
      for (std::size_t i = 0; i < bp.size(); ++i) {
        const double lo = std::max(0.0, bp[i] - d0);
        const double hi = i + 1 < bp.size() ? std::min(span, bp[i + 1] - d0) : span;
        if (hi > lo) inner += rates[i] * exp_integral(k, lo, hi);
      }
      break;
    }
    case PolicyKind::Example41: {
      const double beta = policy.beta();
      const double lo = std::max(0.0, beta - d0);
      if (span > lo) {
        auto f = [&](double x) { return (1.0 - beta / (d0 + x)) * std::exp(-k * x); };
        inner = numerics::integrate(f, lo, span, 1e-13);
      }
      break;
    }
  }
  out.discounted_tax = front * inner;
  return out;
}

}  // namespace taxruin
