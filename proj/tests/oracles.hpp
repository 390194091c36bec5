#pragma once

// Reference computations used only by the tests. Each one takes a different route
// from the library code it checks.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

namespace oracle {

using ld = long double;

// Return-time law: P(Y > k) = 1 for k <= 1, k^-beta beyond.
inline ld tail(std::int64_t k, ld beta) { return k <= 1 ? 1.0L : std::pow(ld(k), -beta); }
inline ld mass(std::int64_t k, ld beta) { return tail(k - 1, beta) - tail(k, beta); }

// u(n) = P(n is a renewal epoch), by the textbook double loop in long double.
inline std::vector<ld> renewal_u(ld beta, std::size_t n_max) {
  std::vector<ld> u(n_max + 1, 0.0L);
  u[0] = 1.0L;
  for (std::size_t n = 1; n <= n_max; ++n)
    for (std::size_t k = 1; k <= n; ++k) u[n] += mass(std::int64_t(k), beta) * u[n - k];
  return u;
}

// Law of the first common renewal of chain 2 (started at 0) and chain 1 (started at
// -offset), by forward propagation of the joint law of the two next-renewal epochs.
// Returns P(T = t) for t = 0..n_max. Cost O(n_max^3).
inline std::vector<ld> first_common_renewal(ld beta1, ld beta2, std::size_t offset, std::size_t n_max) {
  const std::size_t N = n_max + 1;  // epochs 0..n_max; index N means "beyond n_max"
  std::vector<ld> p1(N + offset + 1), p2(N + 1);
  for (std::size_t k = 0; k < p1.size(); ++k) p1[k] = mass(std::int64_t(k), beta1);
  for (std::size_t k = 0; k < p2.size(); ++k) p2[k] = mass(std::int64_t(k), beta2);
  // Chain 1: first epoch >= offset, measured from 0.
  const auto u1 = renewal_u(beta1, offset);
  std::vector<ld> r1(N + 1, 0.0L);
  if (offset == 0) {
    r1[0] = 1.0L;
  } else {
    for (std::size_t j = 0; j < N; ++j)
      for (std::size_t s = 0; s < offset; ++s) r1[j] += u1[s] * p1[offset + j - s];
    ld acc = 0.0L;
    for (std::size_t j = 0; j < N; ++j) acc += r1[j];
    r1[N] = 1.0L - acc;
  }
  // joint[i][j] = P(next epoch of chain 1 is i, of chain 2 is j), both >= t.
  std::vector<std::vector<ld>> joint(N + 1, std::vector<ld>(N + 1, 0.0L));
  for (std::size_t i = 0; i <= N; ++i) joint[i][0] = r1[i];
  auto spread = [&](const std::vector<ld>& p, std::size_t from, std::size_t y) {
    return from + y < N ? p[y] : 0.0L;
  };
  std::vector<ld> f(N, 0.0L);
  for (std::size_t t = 0; t < N; ++t) {
    f[t] = joint[t][t];
    joint[t][t] = 0.0L;
    // Renew whichever chain sits at t; the other one is strictly later.
    for (std::size_t j = t + 1; j <= N; ++j) {
      const ld m = joint[t][j];
      if (m == 0.0L) continue;
      joint[t][j] = 0.0L;
      ld placed = 0.0L;
      for (std::size_t y = 2; t + y < N; ++y) {
        const ld q = m * spread(p1, t, y);
        joint[t + y][j] += q;
        placed += q;
      }
      joint[N][j] += m - placed;
    }
    for (std::size_t i = t + 1; i <= N; ++i) {
      const ld m = joint[i][t];
      if (m == 0.0L) continue;
      joint[i][t] = 0.0L;
      ld placed = 0.0L;
      for (std::size_t y = 2; t + y < N; ++y) {
        const ld q = m * spread(p2, t, y);
        joint[i][t + y] += q;
        placed += q;
      }
      joint[i][N] += m - placed;
    }
  }
  return f;
}

// Gauss hypergeometric series 2F1(a,b;c;z) for 0 <= z < 1.
inline ld hyp2f1(ld a, ld b, ld c, ld z) {
  ld term = 1.0L, sum = 1.0L;
  for (int k = 0; k < 200000; ++k) {
    term *= (a + k) * (b + k) / ((c + k) * (k + 1)) * z;
    sum += term;
    if (std::fabs(term) < 1e-22L * std::fabs(sum)) break;
  }
  return sum;
}

// P(D <= x | a) through the Euler integral of 2F1 and a Pfaff transformation:
// sin(pi b12)/pi B(b2, 1-b12) (1+c)^(b1-1) 2F1(1-b1, 1-b12; 2-b1; 1/(1+c)), c = a/x.
inline double intersection_cdf(double x, double a, double b1, double b2) {
  const ld c = ld(a) / ld(x);
  const ld b12 = ld(b1) + ld(b2) - 1.0L;
  const ld pi = std::numbers::pi_v<ld>;
  const ld beta_fn = std::exp(std::lgamma(ld(b2)) + std::lgamma(1.0L - b12) - std::lgamma(2.0L - ld(b1)));
  return double(std::sin(pi * b12) / pi * beta_fn * std::pow(1.0L + c, ld(b1) - 1.0L) *
                hyp2f1(1.0L - b1, 1.0L - b12, 2.0L - b1, 1.0L / (1.0L + c)));
}

// Overshoot CDF by integrating the density with y = x s^(4/(1-beta)) and composite Simpson.
// The integrand becomes C x r s^3/(x+y) with y = x s^r, r = 4/(1-beta) >= 4, smooth enough for Simpson.
inline double overshoot_cdf(double b, double x, double beta) {
  const ld r = 4.0L / (1.0L - beta);
  const ld top = std::pow(ld(b) / ld(x), 1.0L / r);
  const ld cn = std::sin(std::numbers::pi_v<ld> * beta) / std::numbers::pi_v<ld>;
  const int m = 20000;
  const ld h = top / m;
  auto g = [&](ld s) {
    const ld y = ld(x) * std::pow(s, r);
    return cn * ld(x) * r * std::pow(s, 3.0L) / (ld(x) + y);
  };
  ld sum = g(0.0L) + g(top);
  for (int i = 1; i < m; ++i) sum += (i % 2 ? 4.0L : 2.0L) * g(i * h);
  return double(sum * h / 3.0L);
}

inline double phi_closed_form(double beta) { return std::numbers::pi / std::tan(std::numbers::pi * beta); }

}  // namespace oracle
