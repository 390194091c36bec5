#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "error.hpp"

namespace regen::stats {

class EmpiricalDistribution {
public:
  explicit EmpiricalDistribution(std::vector<double> samples) : samples_(std::move(samples)) {
    detail::require(!samples_.empty(), "ecdf: empty sample");
    for (double s : samples_) detail::require(!std::isnan(s), "ecdf: NaN sample");
    std::sort(samples_.begin(), samples_.end());
  }

  std::size_t count() const { return samples_.size(); }
  const std::vector<double>& samples() const { return samples_; }

  // Right-continuous: fraction of samples <= x.
  double operator()(double x) const {
    return double(std::upper_bound(samples_.begin(), samples_.end(), x) - samples_.begin()) / double(count());
  }
  double survival(double x) const { return 1.0 - (*this)(x); }

  double quantile(double p) const {
    detail::require(p >= 0.0 && p <= 1.0, "quantile level must lie in [0,1]");
    const double h = p * double(count() - 1);
    const std::size_t i = std::size_t(std::floor(h));
    if (i + 1 >= count()) return samples_.back();
    return samples_[i] + (h - double(i)) * (samples_[i + 1] - samples_[i]);
  }
  double median() const { return quantile(0.5); }

private:
  std::vector<double> samples_;
};

inline EmpiricalDistribution ecdf(std::vector<double> samples) {
  return EmpiricalDistribution(std::move(samples));
}

inline double ks_one_sample(const EmpiricalDistribution& dist, const std::function<double(double)>& cdf) {
  const auto& x = dist.samples();
  const double n = double(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    detail::require(f >= 0.0 && f <= 1.0, "ks_one_sample: cdf value outside [0,1]");
    d = std::max({d, double(i + 1) / n - f, f - double(i) / n});
  }
  return d;
}

inline double ks_two_sample(const EmpiricalDistribution& a, const EmpiricalDistribution& b) {
  const auto& x = a.samples();
  const auto& y = b.samples();
  const double m = double(x.size()), n = double(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double t = std::min(x[i], y[j]);
    while (i < x.size() && x[i] <= t) ++i;
    while (j < y.size() && y[j] <= t) ++j;
    d = std::max(d, std::fabs(double(i) / m - double(j) / n));
  }
  return d;
}

// c(sig) = sqrt(-ln(sig/2)/2), the asymptotic Kolmogorov critical constant.
inline double ks_critical_constant(double significance = 0.01) {
  detail::require(significance > 0.0 && significance < 1.0, "significance must lie in (0,1)");
  return std::sqrt(-0.5 * std::log(0.5 * significance));
}

inline double ks_critical_two_sample(std::size_t m, std::size_t n, double significance = 0.01) {
  return ks_critical_constant(significance) * std::sqrt(double(m + n) / (double(m) * double(n)));
}

inline double ks_critical_one_sample(std::size_t n, double significance = 0.01) {
  return ks_critical_constant(significance) / std::sqrt(double(n));
}

struct Interval {
  double low;
  double high;
  bool contains(double v) const { return v >= low && v <= high; }
};

inline constexpr double kZ99 = 2.5758293035489004;

// Wilson score interval for a binomial proportion.
inline Interval wilson_interval(std::size_t successes, std::size_t trials, double z = kZ99) {
  detail::require(trials > 0, "wilson_interval: no trials");
  detail::require(successes <= trials, "wilson_interval: successes exceed trials");
  const double n = double(trials);
  const double p = double(successes) / n;
  const double z2 = z * z;
  const double den = 1.0 + z2 / n;
  const double centre = (p + z2 / (2.0 * n)) / den;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / den;
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

struct TailRatio {
  double estimate;
  double ci_low;
  double ci_high;
};

inline TailRatio tail_ratio(const EmpiricalDistribution& dist, double alpha, double x) {
  detail::require_positive(alpha, "alpha");
  detail::require_positive(x, "x");
  const auto& s = dist.samples();
  const std::size_t above = std::size_t(s.end() - std::upper_bound(s.begin(), s.end(), x));
  const double scale = std::pow(x, alpha);
  const Interval ci = wilson_interval(above, s.size());
  return {scale * double(above) / double(s.size()), scale * ci.low, scale * ci.high};
}

// Least-squares slope of y on x.
inline double ols_slope(std::span<const double> x, std::span<const double> y) {
  detail::require(x.size() == y.size() && x.size() >= 2, "ols_slope: need >= 2 paired points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= double(x.size());
  my /= double(y.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  detail::require(sxx > 0.0, "ols_slope: degenerate abscissae");
  return sxy / sxx;
}

inline double median_of(std::vector<double> v) {
  detail::require(!v.empty(), "median_of: empty input");
  return ecdf(std::move(v)).median();
}

}  // namespace regen::stats
