#include "taxruin/numerics.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "taxruin/errors.hpp"

namespace taxruin::numerics {

double find_root(const ScalarFn& f, const ScalarFn& derivative, double lo, double hi,
                 double rel_tol, int max_iter) {
  if (lo > hi) std::swap(lo, hi);
  double f_lo = f(lo);
  double f_hi = f(hi);
  if (f_lo == 0.0) return lo;
  if (f_hi == 0.0) return hi;
  if (std::signbit(f_lo) == std::signbit(f_hi)) {
    throw Error("find_root: bracket does not straddle a sign change");
  }

  double x = 0.5 * (lo + hi);
  for (int iter = 0; iter < max_iter; ++iter) {
    const double fx = f(x);
    if (fx == 0.0) return x;
    if (std::signbit(fx) == std::signbit(f_lo)) {
      lo = x;
      f_lo = fx;
    } else {
      hi = x;
    }
    const double tol = rel_tol * std::max(std::abs(x), 1e-300);
    if (hi - lo <= tol) return 0.5 * (lo + hi);

    double next = 0.5 * (lo + hi);
    if (derivative) {
      const double d = derivative(x);
      if (d != 0.0 && std::isfinite(d)) {
        const double newton = x - fx / d;
        if (newton > lo && newton < hi) {
          if (std::abs(newton - x) <= tol) return newton;
          next = newton;
        }
      }
    }
    x = next;
  }
  throw Error("find_root: no convergence within iteration limit");
}

double integrate(const ScalarFn& f, double a, double b, double tol, double* error_estimate) {
  using Integrator = boost::math::quadrature::gauss_kronrod<double, 15>;
  double err = 0.0;
  double value = 0.0;
  if (a == b) {
    value = 0.0;
  } else {
    value = Integrator::integrate(f, a, b, 30, std::max(tol, 1e-15), &err);
  }
  if (error_estimate) *error_estimate = err;
  return value;
}

double integrate(const ScalarFn& f, double a, double b, double tol) {
  return integrate(f, a, b, tol, nullptr);
}

void ExactSum::add(double x) {
  if (!std::isfinite(x)) {
    special_ += x;
    return;
  }
  std::size_t i = 0;
  for (double y : partials_) {
    if (std::abs(x) < std::abs(y)) std::swap(x, y);
    const double hi = x + y;
    const double lo = y - (hi - x);
    if (lo != 0.0) partials_[i++] = lo;
    x = hi;
  }
  partials_.resize(i);
  partials_.push_back(x);
}

void ExactSum::merge(const ExactSum& other) {
  for (double p : other.partials_) add(p);
  special_ += other.special_;
}

double ExactSum::value() const {
  if (special_ != 0.0 || std::isnan(special_)) return special_;
  if (partials_.empty()) return 0.0;
  // Round-half-even correction from msum.
  auto n = partials_.size();
  double hi = partials_[--n];
  double lo = 0.0;
  while (n > 0) {
    const double x = hi;
    const double y = partials_[--n];
    hi = x + y;
    const double yr = hi - x;
    lo = y - yr;
    if (lo != 0.0) break;
  }
  if (n > 0 && ((lo < 0.0 && partials_[n - 1] < 0.0) || (lo > 0.0 && partials_[n - 1] > 0.0))) {
    const double y = lo * 2.0;
    const double x = hi + y;
    const double yr = x - hi;
    if (y == yr) hi = x;
  }
  return hi;
}

}  // namespace taxruin::numerics
