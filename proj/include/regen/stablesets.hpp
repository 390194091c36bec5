#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <boost/math/special_functions/beta.hpp>

#include "error.hpp"
#include "numerics.hpp"
#include "randkit.hpp"

namespace regen::stablesets {

using randkit::RngStream;
using GridIndex = std::int64_t;

// Points k in {0..resolution}, read as k/resolution.
class GridSet {
public:
  GridSet() = default;

  GridSet(GridIndex resolution, std::vector<GridIndex> points)
      : resolution_(resolution), points_(std::move(points)) {
    detail::require(resolution_ >= 1, "GridSet resolution must be >= 1");
    for (std::size_t i = 0; i < points_.size(); ++i) {
      detail::require(points_[i] >= 0 && points_[i] <= resolution_, "GridSet point out of range");
      detail::require(i == 0 || points_[i - 1] < points_[i], "GridSet points must be strictly ascending");
    }
  }

  static GridSet full(GridIndex resolution) {
    std::vector<GridIndex> pts(std::size_t(resolution) + 1);
    for (GridIndex k = 0; k <= resolution; ++k) pts[std::size_t(k)] = k;
    return GridSet(resolution, std::move(pts));
  }

  GridIndex resolution() const { return resolution_; }
  const std::vector<GridIndex>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  bool contains(GridIndex k) const { return std::binary_search(points_.begin(), points_.end(), k); }

  bool operator==(const GridSet&) const = default;

private:
  GridIndex resolution_ = 1;
  std::vector<GridIndex> points_;
};

struct OvershootLaw {
  double x;
  double beta;
  void validate() const {
    detail::require_positive(x, "overshoot level x");
    detail::require_unit_open(beta, "beta");
  }
};

struct IntersectionSpec {
  double a = 1.0;
  double beta1 = 0.75;
  double beta2 = 0.75;

  double beta12() const { return beta1 + beta2 - 1.0; }

  // Throws ValidationError when malformed, NonIntersectingRegime when beta12 <= 0.
  void validate() const {
    detail::require_positive(a, "shift a");
    detail::require_unit_open(beta1, "beta1");
    detail::require_unit_open(beta2, "beta2");
    if (!(beta12() > 0.0))
      throw NonIntersectingRegime("beta1 + beta2 - 1 = " + std::to_string(beta12()) + " <= 0");
  }
};

inline double overshoot_density(double y, double x, double beta) {
  detail::require_positive(y, "y");
  OvershootLaw{x, beta}.validate();
  return reflection_norm(beta) * std::pow(x / y, beta) / (x + y);
}

// Under z = b/(x+b) the overshoot law is Beta(1-beta, beta).
inline double overshoot_cdf(double b, double x, double beta) {
  OvershootLaw{x, beta}.validate();
  detail::require(b >= 0.0, "overshoot_cdf: b must be non-negative");
  if (b == 0.0) return 0.0;
  if (std::isinf(b)) return 1.0;
  if (b > x) return boost::math::ibetac(beta, 1.0 - beta, x / (x + b));
  return boost::math::ibeta(1.0 - beta, beta, b / (x + b));
}

// B_{x,beta} = x * Z/(1-Z), Z ~ Beta(1-beta, beta), written as a gamma ratio.
inline double sample_overshoot_unchecked(RngStream& rng, double x, double beta) {
  for (;;) {
    const double g1 = randkit::sample_gamma(rng, 1.0 - beta);
    const double g2 = randkit::sample_gamma(rng, beta);
    if (g1 > 0.0 && g2 > 0.0) return x * (g1 / g2);
  }
}

inline double sample_overshoot(RngStream& rng, double x, double beta) {
  OvershootLaw{x, beta}.validate();
  return sample_overshoot_unchecked(rng, x, beta);
}

// phi(beta) = int y^-b ln y/(1+y) / int y^-b/(1+y) over (0, inf).
// Fold (1,inf) onto (0,1) by y -> 1/y, then u = y^(1-b) resp. u = y^b.
inline double phi(double beta, double quad_tol = 1e-12) {
  detail::require_unit_open(beta, "beta");
  detail::require(quad_tol > 0.0, "quad_tol must be positive");
  QuadratureConfig cfg{quad_tol, 30};
  const double p = 1.0 / (1.0 - beta), q = 1.0 / beta;
  // ln u/(1+u^r) = ln u - ln u u^r/(1+u^r); the first piece integrates to -1.
  auto smooth = [](double u, double r) {
    if (u <= 0.0) return 0.0;
    const double y = std::pow(u, r);
    return std::log(u) * y / (1.0 + y);
  };
  auto num_a = [&](double u) { return -p * smooth(u, p); };
  auto num_b = [&](double u) { return -q * smooth(u, q); };
  auto den_a = [&](double u) { return 1.0 / (1.0 + std::pow(u, p)); };
  auto den_b = [&](double u) { return 1.0 / (1.0 + std::pow(u, q)); };
  // ln y = p ln u on the first branch, q ln u on the second; dy y^-b = p du, dy y^(b-1) = q du.
  const double num = p * (integrate_endpoint(num_a, 0.0, 1.0, cfg) - p) - q * (integrate_endpoint(num_b, 0.0, 1.0, cfg) - q);
  const double den = p * integrate_endpoint(den_a, 0.0, 1.0, cfg) + q * integrate_endpoint(den_b, 0.0, 1.0, cfg);
  return num / den;
}

struct FirstIntersection {
  double value = 0.0;    // sum of A_1..A_N
  double deficit = 0.0;  // last accepted term A_N, a proxy for the omitted tail
  std::uint32_t steps = 0;
};

inline constexpr std::uint32_t kMaxOvershootSteps = 1u << 20;

// D = sum_{n>=1} A_n, A_0 = a, odd steps overshoot by the beta1 set, even by beta2.
inline FirstIntersection sample_first_intersection(RngStream& rng, const IntersectionSpec& spec,
                                                   double rel_tol = 1e-9) {
  spec.validate();
  detail::require(rel_tol > 0.0 && rel_tol < 1.0, "rel_tol must lie in (0,1)");
  FirstIntersection out;
  double gap = spec.a;
  CompensatedSum total;
  for (std::uint32_t n = 1;; ++n) {
    const double beta = (n % 2 == 1) ? spec.beta1 : spec.beta2;
    const double step = sample_overshoot_unchecked(rng, gap, beta);
    total.add(step);
    out.steps = n;
    out.deficit = step;
    if (step < rel_tol * (spec.a + total.value())) break;
    if (n >= kMaxOvershootSteps)
      throw std::runtime_error("sample_first_intersection: overshoot series did not terminate");
    gap = step;
  }
  out.value = total.value();
  return out;
}

// Appends s, s+Y1, s+Y1+Y2, ... while < limit.
inline void append_renewal_points(RngStream& rng, GridIndex start, GridIndex limit,
                                  const randkit::ReturnTimeSampler& steps, std::vector<GridIndex>& out) {
  GridIndex s = start;
  while (s < limit) {
    out.push_back(s);
    const std::uint64_t y = steps(rng);
    if (y >= std::uint64_t(limit - s)) break;
    s += GridIndex(y);
  }
}

inline GridSet sample_regenerative_set(RngStream& rng, double beta, GridIndex resolution) {
  detail::require_unit_open(beta, "beta");
  detail::require(resolution >= 1, "resolution must be >= 1");
  std::vector<GridIndex> pts;
  append_renewal_points(rng, 0, resolution + 1, randkit::ReturnTimeSampler(beta), pts);
  return GridSet(resolution, std::move(pts));
}

inline GridSet intersect_sets(std::span<const GridSet> sets) {
  detail::require(!sets.empty(), "intersect_sets: empty list (caller supplies the full grid)");
  const GridIndex n = sets.front().resolution();
  for (const auto& s : sets)
    detail::require(s.resolution() == n, "intersect_sets: resolution mismatch");
  std::vector<GridIndex> acc = sets.front().points();
  std::vector<GridIndex> tmp;
  for (std::size_t i = 1; i < sets.size() && !acc.empty(); ++i) {
    tmp.clear();
    std::set_intersection(acc.begin(), acc.end(), sets[i].points().begin(), sets[i].points().end(),
                          std::back_inserter(tmp));
    acc.swap(tmp);
  }
  return GridSet(n, std::move(acc));
}

}  // namespace regen::stablesets
