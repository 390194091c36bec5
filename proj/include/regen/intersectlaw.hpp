#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "error.hpp"
#include "numerics.hpp"
#include "stablesets.hpp"

namespace regen::intersectlaw {

using stablesets::IntersectionSpec;

namespace pd {
// Normalized integral of (c+y)^(b1-1) y^(b2-1) (1-y)^(-b12) over (0,1), c = a/x >= 0.
// On (0,1/2] put u = y^b12: the integrand becomes (y/(c+y))^(1-b1)(1-y)^(-b12)/b12.
// On [1/2,1) put w = (1-y)^(1-b12): it becomes (c+y)^(b1-1) y^(b2-1)/(1-b12).
template <int Level>
double pd_integral(double c, double beta1, double beta2, const QuadratureConfig& cfg) {
  const double b12 = beta1 + beta2 - 1.0;
  const double e1 = 1.0 - beta1;
  const double pa = 1.0 / b12;
  const double pb = 1.0 / (1.0 - b12);
  auto lower = [&](double u) {
    const double y = std::pow(u, pa);
    if (y <= 0.0) return c > 0.0 ? 0.0 : 1.0;
    return std::pow(y / (c + y), e1) * std::pow(1.0 - y, -b12);
  };
  auto upper = [&](double w) {
    const double y = 1.0 - std::pow(w, pb);
    return std::pow(c + y, beta1 - 1.0) * std::pow(y, beta2 - 1.0);
  };
  const double ia = pa * integrate_endpoint<Level>(lower, 0.0, std::pow(0.5, b12), cfg);
  const double ib = pb * integrate_endpoint<Level>(upper, 0.0, std::pow(0.5, 1.0 - b12), cfg);
  return std::clamp(reflection_norm(b12) * (ia + ib), 0.0, 1.0);
}
}  // namespace pd

// P(D <= x | a) for the first intersection of the beta1 set and the beta2 set shifted by a.
inline double intersection_cdf(double x, double a, double beta1, double beta2,
                               const QuadratureConfig& cfg = {}) {
  const IntersectionSpec spec{a, beta1, beta2};
  spec.validate();
  cfg.validate();
  detail::require_positive(x, "x");
  return pd::pd_integral<1>(a / x, beta1, beta2, cfg);
}

// |P_D^{b1,b2}(x|1) - int_0^x p_B^{b1}(y|1) P_D^{b2,b1}(x-y|y) dy|.
inline double recursion_residual(double x, double beta1, double beta2, const QuadratureConfig& cfg = {}) {
  IntersectionSpec{1.0, beta1, beta2}.validate();
  cfg.validate();
  detail::require_positive(x, "x");
  QuadratureConfig inner = cfg;
  inner.abs_tol = std::max(cfg.abs_tol * 1e-2, 1e-15);
  const double cn = reflection_norm(beta1);
  const double half = 0.5 * x;

  // P_D(x-y | y) depends on c = y/(x-y) only.
  auto rhs_integrand = [&](double y) {
    return cn * pd::pd_integral<1>(y / (x - y), beta2, beta1, inner) / (1.0 + y);
  };
  // [0, x/2]: u = y^(1-b1) absorbs y^-b1.
  const double p1 = 1.0 / (1.0 - beta1);
  auto lower = [&](double u) {
    const double y = std::pow(u, p1);
    return p1 * rhs_integrand(y);
  };
  // [x/2, x]: w = (x-y)^(1-b2) smooths the z^(1-b2) onset of P_D near z = 0.
  const double p2 = 1.0 / (1.0 - beta2);
  auto upper = [&](double w) {
    const double z = std::pow(w, p2);
    if (z <= 0.0) return 0.0;
    const double y = x - z;
    return p2 * std::pow(z, beta2) * rhs_integrand(y) * std::pow(y, -beta1);
  };
  const double rhs = integrate_endpoint<0>(lower, 0.0, std::pow(half, 1.0 - beta1), cfg) +
                     integrate_endpoint<0>(upper, 0.0, std::pow(half, 1.0 - beta2), cfg);
  const double lhs = pd::pd_integral<1>(1.0 / x, beta1, beta2, inner);
  return std::fabs(lhs - rhs);
}

inline double beta_star(std::span<const double> betas) {
  detail::require(!betas.empty(), "beta_star: empty beta list");
  double s = 0.0;
  for (double b : betas) {
    detail::require_unit_open(b, "beta");
    s += b;
  }
  return s - double(betas.size() - 1);
}

// max{l : l < 1/(1-beta)}, i.e. the largest l with l*beta - (l-1) > 0.
inline int ell_beta(double beta) {
  detail::require_unit_open(beta, "beta");
  int l = 1;
  while (double(l + 1) * beta - double(l) > 1e-12) ++l;
  return l;
}

// P(V <= x) on [0,1] for the first point of an l-fold intersection of randomly shifted sets.
inline double shift_cdf_V(double x, std::span<const double> betas) {
  const double bs = beta_star(betas);
  if (!(bs > 0.0)) throw NonIntersectingRegime("beta* = " + std::to_string(bs) + " <= 0");
  detail::require(x >= 0.0 && x <= 1.0, "shift_cdf_V: x must lie in [0,1]");
  double lg = 0.0;
  for (double b : betas) lg += std::lgamma(b) + std::lgamma(2.0 - b);
  lg -= std::lgamma(bs) + std::lgamma(2.0 - bs);
  if (x == 0.0) return 0.0;
  return std::pow(x, 1.0 - bs) * std::exp(lg);
}

}  // namespace regen::intersectlaw
