#pragma once

#include <cmath>
#include <algorithm>
#include <cstddef>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "error.hpp"

namespace regen {

// Neumaier compensated accumulator.
class CompensatedSum {
public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  CompensatedSum& operator+=(double x) {
    add(x);
    return *this;
  }
  double value() const { return sum_ + comp_; }

private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

struct QuadratureConfig {
  double abs_tol = 1e-10;
  int max_refinements = 15;

  void validate() const {
    detail::require(abs_tol > 0.0, "quadrature abs_tol must be positive");
    detail::require(max_refinements > 0, "quadrature max_refinements must be positive");
  }
};

namespace detail {
// Boost's rules stop on error <= tol * L1; convert an absolute target into that form.
inline double relative_target(double abs_tol, double l1) {
  return std::max(abs_tol / std::max(l1, abs_tol), 1e-15);
}
}  // namespace detail

// Adaptive 31-point Gauss-Kronrod on [lo, hi]. Integrands handed in here are
// expected to be bounded (singularities removed by substitution first).
template <class F>
double integrate(F&& f, double lo, double hi, const QuadratureConfig& cfg, double* err = nullptr) {
  if (!(hi > lo)) return 0.0;
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  double e = 0.0, l1 = 0.0;
  double v = GK::integrate(f, lo, hi, 0, 0.0, &e, &l1);
  if (e > cfg.abs_tol)
    v = GK::integrate(f, lo, hi, unsigned(cfg.max_refinements), detail::relative_target(cfg.abs_tol, l1), &e);
  if (err) *err = e;
  return v;
}

// Double-exponential rule on [lo, hi]; tolerates algebraic or log endpoint behaviour.
// The rule grows its node table lazily, so nested integrals must use distinct Level values.
template <int Level = 0, class F>
double integrate_endpoint(F&& f, double lo, double hi, const QuadratureConfig& cfg, double* err = nullptr) {
  if (!(hi > lo)) return 0.0;
  static thread_local boost::math::quadrature::tanh_sinh<double> rule(15);
  using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
  double e = 0.0, l1 = 0.0;
  GK::integrate(f, lo, hi, 0, 0.0, &e, &l1);
  const double v = rule.integrate(f, lo, hi, detail::relative_target(cfg.abs_tol, l1), &e);
  if (err) *err = e;
  return v;
}

// 1 / (Gamma(b) Gamma(1-b)) by the reflection formula.
inline double reflection_norm(double b) { return std::sin(std::numbers::pi * b) / std::numbers::pi; }

}  // namespace regen
