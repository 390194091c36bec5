#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "error.hpp"
#include "numerics.hpp"

namespace regen::renewalkit {

// F(n) = n^-beta (F(0) = F(1) = 1), so the minimal step is 2.
struct RenewalLaw {
  double beta = 0.75;

  void validate() const { detail::require_unit_open(beta, "beta"); }

  double tail(std::int64_t n) const { return n <= 1 ? 1.0 : std::pow(double(n), -beta); }

  // p_n = F(n-1) - F(n), written to avoid cancellation at large n.
  double mass(std::int64_t n) const {
    if (n <= 1) return 0.0;
    if (n == 2) return 1.0 - tail(2);
    const double x = double(n);
    return std::pow(x, -beta) * std::expm1(-beta * std::log1p(-1.0 / x));
  }

  std::vector<double> masses(std::size_t n_max) const {
    std::vector<double> p(n_max + 1, 0.0);
    for (std::size_t k = 1; k <= n_max; ++k) p[k] = mass(std::int64_t(k));
    return p;
  }
};

namespace detail_dot {

// sum_i a[i] b[i]: four-lane blocks of 256, blocks merged with compensation.
inline double dot(const double* a, const double* b, std::size_t len) {
  constexpr std::size_t block = 256;
  CompensatedSum total;
  std::size_t i = 0;
  while (i < len) {
    const std::size_t end = std::min(len, i + block);
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    for (; i + 4 <= end; i += 4) {
      s0 += a[i] * b[i];
      s1 += a[i + 1] * b[i + 1];
      s2 += a[i + 2] * b[i + 2];
      s3 += a[i + 3] * b[i + 3];
    }
    for (; i < end; ++i) s0 += a[i] * b[i];
    total.add((s0 + s1) + (s2 + s3));
  }
  return total.value();
}

}  // namespace detail_dot

// u(0) = 1, u(n) = sum_{k=1}^n w_k u(n-k). `rev` holds w reversed: rev[n_max - k] = w_k.
inline std::vector<double> renewal_recursion(std::span<const double> w, std::size_t n_max) {
  std::vector<double> rev(n_max + 1, 0.0);
  for (std::size_t k = 1; k <= n_max; ++k) rev[n_max - k] = w[k];
  std::vector<double> u(n_max + 1, 0.0);
  u[0] = 1.0;
  for (std::size_t n = 1; n <= n_max; ++n)
    u[n] = detail_dot::dot(u.data(), rev.data() + (n_max - n), n);
  return u;
}

inline std::vector<double> renewal_mass_function(const RenewalLaw& law, std::size_t n_max) {
  law.validate();
  detail::require(n_max >= 1, "renewal_mass_function: n_max must be >= 1");
  return renewal_recursion(law.masses(n_max), n_max);
}

// Inverts u = 1 + sum_k p_k u(n-k): p(n) = u(n) - sum_{k=1}^{n-1} p(k) u(n-k).
inline std::vector<double> deconvolve_first_passage(std::span<const double> u) {
  const std::size_t n_max = u.size() - 1;
  std::vector<double> urev(n_max + 1, 0.0);
  for (std::size_t k = 0; k <= n_max; ++k) urev[n_max - k] = u[k];
  std::vector<double> p(n_max + 1, 0.0);
  for (std::size_t n = 1; n <= n_max; ++n) {
    // sum_{k=1}^{n-1} p[k] u[n-k]; u[n-k] = urev[n_max - n + k]
    const double conv = n > 1 ? detail_dot::dot(p.data() + 1, urev.data() + (n_max - n + 1), n - 1) : 0.0;
    p[n] = u[n] - conv;
  }
  return p;
}

struct IntersectionRenewal {
  std::vector<double> u_star;
  std::vector<double> p_star;
  std::vector<double> F_bar_star;
  std::vector<double> cum_p_star;  // sum_{k<=n} p*(k)
};

inline IntersectionRenewal intersection_renewal(std::span<const std::vector<double>> u_lists) {
  detail::require(!u_lists.empty(), "intersection_renewal: empty list");
  const std::size_t len = u_lists.front().size();
  detail::require(len >= 2, "intersection_renewal: arrays need at least two entries");
  for (const auto& u : u_lists) detail::require(u.size() == len, "intersection_renewal: length mismatch");
  IntersectionRenewal out;
  out.u_star.assign(len, 1.0);
  for (const auto& u : u_lists)
    for (std::size_t n = 0; n < len; ++n) out.u_star[n] *= u[n];
  out.p_star = deconvolve_first_passage(out.u_star);
  out.F_bar_star.assign(len, 1.0);
  out.cum_p_star.assign(len, 0.0);
  CompensatedSum cum;
  for (std::size_t n = 1; n < len; ++n) {
    cum.add(out.p_star[n]);
    out.cum_p_star[n] = cum.value();
    out.F_bar_star[n] = 1.0 - out.cum_p_star[n];
  }
  return out;
}

struct FirstRenewalCdf {
  std::vector<double> cdf;  // P(T <= t), t = 0..n_max
  double deficit = 0.0;     // mass beyond n_max
};

// First common renewal of chain 2 (started at 0) and chain 1 (started at -offset).
// q(t) = u1(t+offset) u2(t) is the joint renewal mass at t; first-entrance
// decomposition q(t) = sum_{s<=t} f(s) u1(t-s) u2(t-s) gives f by deconvolution.
inline FirstRenewalCdf first_simultaneous_renewal_cdf(const RenewalLaw& law1, const RenewalLaw& law2,
                                                      std::size_t offset, std::size_t n_max) {
  law1.validate();
  law2.validate();
  detail::require(offset <= n_max, "first_simultaneous_renewal_cdf: offset must be <= n_max");
  const auto u1 = renewal_mass_function(law1, n_max + offset);
  const auto u2 = renewal_mass_function(law2, std::max<std::size_t>(n_max, 1));
  std::vector<double> ustar_rev(n_max + 1);
  for (std::size_t k = 0; k <= n_max; ++k) ustar_rev[n_max - k] = u1[k] * u2[k];
  std::vector<double> f(n_max + 1, 0.0);
  for (std::size_t t = 0; t <= n_max; ++t) {
    const double q = u1[t + offset] * u2[t];
    // sum_{s<t} f[s] u*(t-s); u*(t-s) = ustar_rev[n_max - t + s]
    const double conv = t > 0 ? detail_dot::dot(f.data(), ustar_rev.data() + (n_max - t), t) : 0.0;
    f[t] = std::max(0.0, q - conv);
  }
  FirstRenewalCdf out;
  out.cdf.resize(n_max + 1);
  CompensatedSum cum;
  for (std::size_t t = 0; t <= n_max; ++t) {
    cum.add(f[t]);
    out.cdf[t] = std::min(1.0, cum.value());
  }
  out.deficit = 1.0 - out.cdf.back();
  return out;
}

// max over 2 <= n <= n_max of n p_n / F(n), together with the sup over n >= tail_from.
struct DoneyBound {
  double max_all = 0.0;
  double max_tail = 0.0;
};

inline DoneyBound doney_ratio(const RenewalLaw& law, std::int64_t n_max, std::int64_t tail_from = 100) {
  law.validate();
  DoneyBound out;
  for (std::int64_t n = 2; n <= n_max; ++n) {
    const double r = double(n) * law.mass(n) / law.tail(n);
    out.max_all = std::max(out.max_all, r);
    if (n >= tail_from) out.max_tail = std::max(out.max_tail, r);
  }
  return out;
}

// u(n) Gamma(beta) Gamma(1-beta) n^(1-beta).
inline double renewal_ratio(double u_n, double beta, std::size_t n) {
  return u_n * std::tgamma(beta) * std::tgamma(1.0 - beta) * std::pow(double(n), 1.0 - beta);
}

// U(n) = sum_{k<=n} u(k) against n^beta / (Gamma(1-beta) Gamma(1+beta)).
inline double cumulative_renewal_ratio(std::span<const double> u, double beta, std::size_t n) {
  CompensatedSum s;
  for (std::size_t k = 0; k <= n; ++k) s.add(u[k]);
  return s.value() * std::tgamma(1.0 - beta) * std::tgamma(1.0 + beta) / std::pow(double(n), beta);
}

// F*(n) / (n^-beta* L*), L* = prod Gamma(b_q)Gamma(1-b_q) / (Gamma(b*)Gamma(1-b*)).
inline double intersection_tail_ratio(double F_bar_star_n, std::span<const double> betas, std::size_t n) {
  double bs = 1.0 - double(betas.size());
  double lstar = 1.0;
  for (double b : betas) {
    bs += b;
    lstar *= std::tgamma(b) * std::tgamma(1.0 - b);
  }
  detail::require(bs > 0.0, "intersection_tail_ratio: beta* must be positive");
  lstar /= std::tgamma(bs) * std::tgamma(1.0 - bs);
  return F_bar_star_n / (std::pow(double(n), -bs) * lstar);
}

}  // namespace regen::renewalkit
