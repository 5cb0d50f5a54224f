#pragma once

#include <string_view>
#include <vector>

namespace taxruin {

enum class PolicyKind { Constant, Example41, Table };

std::string_view to_string(PolicyKind kind);

/// Loss-carried-forward tax rate as a function of the running-minimum depth
/// d = |inf_{s<=t} X_s|. Rates always lie in [0, 1].
///
///  - Constant: gamma.
///  - Example41: 0 for d <= beta, 1 - beta/d beyond (approaches 1).
///  - Table: piecewise constant, rates[i] on [breakpoints[i], breakpoints[i+1]).
class TaxPolicy {
 public:
  static TaxPolicy constant(double gamma);
  static TaxPolicy example41(double beta);
  /// Either breakpoints.size() == rates.size() with breakpoints[0] == 0, or
  /// rates.size() == breakpoints.size() + 1 with rates[0] applying on [0, breakpoints[0]).
  static TaxPolicy table(std::vector<double> breakpoints, std::vector<double> rates);

  PolicyKind kind() const { return kind_; }
  double gamma() const { return gamma_; }
  double beta() const { return beta_; }
  /// Left ends of the pieces; starts with 0.
  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::vector<double>& rates() const { return rates_; }

  double rate_at(double depth) const;
  double sup_rate() const;
  bool bounded_away_from_one() const { return sup_rate() < 1.0; }
  /// Depths where the rate is not smooth (for quadrature splitting).
  std::vector<double> kinks() const;

  bool operator==(const TaxPolicy&) const = default;

 private:
  PolicyKind kind_ = PolicyKind::Constant;
  double gamma_ = 0.0;
  double beta_ = 0.0;
  std::vector<double> breakpoints_;
  std::vector<double> rates_;
};

inline double rate_at(const TaxPolicy& policy, double depth) { return policy.rate_at(depth); }

/// Integral of rate(d) over depths [d0, d1]: tax paid while the minimum
/// moves from depth d0 to d1.
double depth_tax(const TaxPolicy& policy, double d0, double d1);

/// The taxed descending ladder height under |inf X| local time:
/// integral over [0, t] of (1 - rate(s)).
double hhat_gamma(const TaxPolicy& policy, double t);

/// Integral over [0, t] of rate(r) exp(-phi r) dr.
double discounted_depth_tax(const TaxPolicy& policy, double t, double phi);

/// t * (1 - rate(t)): the local power-law exponent of exp(-hhat_gamma) is
/// alpha times this quantity.
double tail_exponent(const TaxPolicy& policy, double t);

struct SegmentTax {
  double tax_paid = 0.0;
  double discounted_tax = 0.0;
};

/// Tax over a segment on which the process sits at its running minimum and
/// descends linearly: depth(s) = d0 + c (s - s0) for s in [s0, s0 + dt].
/// Discounting is exp(-delta s) in absolute time.
SegmentTax segment_tax(const TaxPolicy& policy, double delta, double s0, double d0, double c,
                       double dt);

}  // namespace taxruin
