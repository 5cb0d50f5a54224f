#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

namespace taxruin::numerics {

using ScalarFn = std::function<double(double)>;

/// Bracketed root of a continuous function.
///
/// Newton steps from `derivative` are taken while they stay inside the
/// current bracket; otherwise the bracket is bisected. Without a derivative
/// this is plain bisection. Requires f(lo) and f(hi) to have opposite signs
/// (a zero at either end is returned as is). Stops when the bracket or the
/// Newton step falls below rel_tol * |x| (with a 1e-300 floor for roots at 0).
double find_root(const ScalarFn& f, const ScalarFn& derivative, double lo, double hi,
                 double rel_tol = 1e-12, int max_iter = 200);

inline double find_root(const ScalarFn& f, double lo, double hi, double rel_tol = 1e-12,
                        int max_iter = 200) {
  return find_root(f, ScalarFn{}, lo, hi, rel_tol, max_iter);
}

/// Adaptive Gauss-Kronrod (7/15) integral over [a, b]; b may be +infinity.
/// `tol` is relative to the L1 norm of f on the interval.
double integrate(const ScalarFn& f, double a, double b, double tol = 1e-12);

/// Same, also reporting the Kronrod error estimate.
double integrate(const ScalarFn& f, double a, double b, double tol, double* error_estimate);

/// Exactly rounded running sum (Shewchuk expansion, as in Python's math.fsum).
///
/// The value of a sum depends only on the multiset of added terms, never on
/// their order or on how partial sums were merged.
class ExactSum {
 public:
  ExactSum() = default;

  void add(double x);
  void merge(const ExactSum& other);
  double value() const;
  bool operator==(const ExactSum& other) const { return value() == other.value(); }

 private:
  std::vector<double> partials_;
  // Non-finite inputs bypass the expansion.
  double special_ = 0.0;
};

}  // namespace taxruin::numerics
