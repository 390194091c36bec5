#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "error.hpp"
#include "intersectlaw.hpp"
#include "numerics.hpp"
#include "parallel.hpp"
#include "randkit.hpp"
#include "stablesets.hpp"
#include "stats.hpp"
#include "supmeasure.hpp"

namespace regen::idprocess {

using randkit::RngStream;
using stablesets::GridIndex;
using stablesets::GridSet;
using supmeasure::OpenInterval;

struct LawSpec {
  double alpha = 1.0;
  double beta = 0.7;
  double a = 1.0;
  double z0 = 1.0;

  void validate() const {
    detail::require_positive(alpha, "alpha");
    detail::require_unit_open(beta, "beta");
    detail::require_positive(a, "a");
    detail::require_positive(z0, "z0");
  }
};

// F(k) = P(return time > k): 1 for k <= 1, k^-beta beyond.
inline double return_tail(std::int64_t k, double beta) {
  return k <= 1 ? 1.0 : std::pow(double(k), -beta);
}

// b_n^alpha = sum_{k=0}^n F(k-1) = 2 + sum_{j=1}^{n-1} j^-beta for n >= 1.
inline double wandering_weight(std::int64_t n, double beta) {
  detail::require(n >= 0, "wandering_weight: n must be non-negative");
  detail::require_unit_open(beta, "beta");
  if (n == 0) return 1.0;
  CompensatedSum s;
  s.add(2.0);
  for (std::int64_t j = n - 1; j >= 1; --j) s.add(std::pow(double(j), -beta));
  return s.value();
}

// mu_n visit sets: first visit sigma with weight F(sigma-1)/b_n^alpha, then renewal steps.
class VisitSampler {
public:
  VisitSampler(GridIndex n, double beta) : n_(n), beta_(beta), steps_(beta) {
    detail::require(n >= 1, "visit sampler: n must be >= 1");
    detail::require_unit_open(beta, "beta");
    cum_.resize(std::size_t(n) + 1);
    CompensatedSum s;
    for (GridIndex k = 0; k <= n; ++k) {
      s.add(return_tail(k - 1, beta));
      cum_[std::size_t(k)] = s.value();
    }
  }

  GridIndex n() const { return n_; }
  double beta() const { return beta_; }
  double normalizer() const { return cum_.back(); }
  double sigma_probability(GridIndex s) const {
    detail::require(s >= 0 && s <= n_, "sigma out of range");
    return return_tail(s - 1, beta_) / normalizer();
  }

  GridIndex sample_sigma(RngStream& rng) const {
    const double target = rng.uniform() * normalizer();
    const auto it = std::upper_bound(cum_.begin(), cum_.end(), target);
    return std::min(GridIndex(it - cum_.begin()), n_);
  }

  void sample_into(RngStream& rng, std::vector<GridIndex>& out) const {
    const GridIndex sigma = sample_sigma(rng);
    stablesets::append_renewal_points(rng, sigma, n_ + 1, steps_, out);
  }

  GridSet sample(RngStream& rng) const {
    std::vector<GridIndex> pts;
    sample_into(rng, pts);
    return GridSet(n_, std::move(pts));
  }

private:
  GridIndex n_;
  double beta_;
  randkit::ReturnTimeSampler steps_;
  std::vector<double> cum_;
};

inline GridSet sample_visit_set(RngStream& rng, GridIndex n, double beta) {
  return VisitSampler(n, beta).sample(rng);
}

// G(x) = a^{1/alpha} x^{-1/alpha} below the cutoff a z0^-alpha, else 0.
inline double G_transform(double x, const LawSpec& spec) {
  spec.validate();
  detail::require_positive(x, "G_transform: x");
  if (x >= spec.a * std::pow(spec.z0, -spec.alpha)) return 0.0;
  return std::pow(spec.a / x, 1.0 / spec.alpha);
}

struct ProcessPath {
  GridIndex n = 0;
  double bn_alpha = 1.0;  // b_n^alpha
  double bn = 1.0;        // b_n
  std::vector<double> values;
  std::vector<double> weights;
  std::vector<int> epsilons;
  std::vector<std::size_t> offsets;
  std::vector<GridIndex> points;
  double truncation_diag = 0.0;

  std::size_t set_count() const { return weights.size(); }
  GridSet contributing_set(std::size_t j) const {
    detail::require(j < set_count(), "contributing_set: index out of range");
    return GridSet(n, std::vector<GridIndex>(points.begin() + std::ptrdiff_t(offsets[j]),
                                             points.begin() + std::ptrdiff_t(offsets[j + 1])));
  }
};

inline void validate_trunc(int ell_trunc, double beta) {
  const int lb = intersectlaw::ell_beta(beta);
  detail::require(ell_trunc >= lb + 1, "ell_trunc must be >= ell_beta + 1 = " + std::to_string(lb + 1));
}

// X_k = sum_j eps_j G(Gamma_j / (2 b_n^alpha)) 1{k in set_j}; draws per j: arrival, sign, set.
// Stops early once the weights hit the G cutoff (all later ones vanish too).
inline ProcessPath simulate_process(RngStream& rng, const VisitSampler& sampler, const LawSpec& spec,
                                    int ell_trunc) {
  spec.validate();
  detail::require(sampler.beta() == spec.beta, "visit sampler built for a different beta");
  validate_trunc(ell_trunc, spec.beta);
  ProcessPath p;
  p.n = sampler.n();
  p.bn_alpha = sampler.normalizer();
  p.bn = std::pow(p.bn_alpha, 1.0 / spec.alpha);
  p.values.assign(std::size_t(p.n) + 1, 0.0);
  p.offsets.push_back(0);
  const double cutoff = spec.a * std::pow(spec.z0, -spec.alpha);
  const double two_b = 2.0 * p.bn_alpha;
  double g = 0.0;
  bool exhausted = false;
  for (int j = 0; j < ell_trunc; ++j) {
    g += randkit::sample_exponential(rng);
    if (g / two_b >= cutoff) {
      exhausted = true;
      break;
    }
    const double w = std::pow(spec.a * two_b / g, 1.0 / spec.alpha);
    const int eps = rng.uniform() < 0.5 ? -1 : 1;
    const std::size_t before = p.points.size();
    sampler.sample_into(rng, p.points);
    for (std::size_t i = before; i < p.points.size(); ++i) p.values[std::size_t(p.points[i])] += eps * w;
    p.weights.push_back(w);
    p.epsilons.push_back(eps);
    p.offsets.push_back(p.points.size());
  }
  if (!exhausted) {
    g += randkit::sample_exponential(rng);
    const double x = g / two_b;
    const double w = x >= cutoff ? 0.0 : std::pow(spec.a / x, 1.0 / spec.alpha);
    p.truncation_diag = double(intersectlaw::ell_beta(spec.beta)) * w;
  }
  return p;
}

inline ProcessPath simulate_process(RngStream& rng, GridIndex n, const LawSpec& spec, int ell_trunc) {
  return simulate_process(rng, VisitSampler(n, spec.beta), spec, ell_trunc);
}

// max X_k over k with k/n in the open interval.
inline double sup_measure_Mn(const ProcessPath& path, OpenInterval iv) {
  detail::require(iv.lo < iv.hi, "sup_measure_Mn: empty interval");
  const double n = double(path.n);
  const GridIndex kmin = std::max<GridIndex>(0, GridIndex(std::floor(iv.lo * n)) + 1);
  const GridIndex kmax = std::min<GridIndex>(path.n, GridIndex(std::ceil(iv.hi * n)) - 1);
  detail::require(kmin <= kmax, "sup_measure_Mn: interval contains no grid point k/n");
  return *std::max_element(path.values.begin() + kmin, path.values.begin() + kmax + 1);
}

// Grid points covered by more than ell_beta of the path's sets.
inline std::size_t coverage_excess(const ProcessPath& path, int ell_beta) {
  std::vector<std::uint16_t> c(std::size_t(path.n) + 1, 0);
  for (auto k : path.points) ++c[std::size_t(k)];
  return std::size_t(std::count_if(c.begin(), c.end(), [&](auto v) { return v > ell_beta; }));
}

enum StreamTag : std::uint64_t {
  kTagLimitPath = 0x201,
  kTagLimitEta = 0x202,
  kTagSimVisit = 0x203,
  kTagSigma = 0x204,
};

struct LimitRow {
  GridIndex n;
  OpenInterval interval;
  double ks;
  double threshold;
  double max_truncation_diag;  // process side
  double max_eta_tail_bound;   // reference side
};

struct LimitConfig {
  LawSpec spec;
  std::vector<GridIndex> n_list = {100, 1000, 10000};
  std::vector<OpenInterval> intervals = {{0.0, 1.0}};
  std::size_t reps = 1000;
  int ell_trunc = 64;
  GridIndex eta_resolution = 10000;

  void validate() const {
    spec.validate();
    validate_trunc(ell_trunc, spec.beta);
    detail::require(reps >= 1000, "limit_experiment: reps must be >= 1e3");
    detail::require(!n_list.empty() && !intervals.empty(), "limit_experiment: empty horizon or interval list");
    for (auto n : n_list) detail::require(n >= 2, "limit_experiment: horizons must be >= 2");
    for (auto iv : intervals)
      detail::require(iv.lo >= 0.0 && iv.hi <= 1.0 && iv.lo < iv.hi, "limit_experiment: intervals must lie in (0,1)");
  }
};

// KS between M_n(I)/b_n and a^{1/alpha} eta(I) for every (n, I).
inline std::vector<LimitRow> limit_experiment(const LimitConfig& cfg, std::uint64_t seed, unsigned threads) {
  cfg.validate();
  const auto& spec = cfg.spec;
  const std::size_t m = cfg.intervals.size();
  const supmeasure::EtaConfig ecfg{spec.alpha, spec.beta, cfg.ell_trunc, cfg.eta_resolution, 1.0};
  const double scale = std::pow(spec.a, 1.0 / spec.alpha);

  struct EtaRep {
    std::vector<double> sups;
    double tail;
  };
  const randkit::ReturnTimeSampler steps(spec.beta);
  const auto eta_reps = run_replicates<EtaRep>(cfg.reps, threads, [&](std::size_t r) {
    RngStream rng(seed, randkit::substream_id(kTagLimitEta, r));
    const supmeasure::EtaRealization eta(rng, ecfg, steps);
    EtaRep out{std::vector<double>(m), eta.tail_bound()};
    for (std::size_t i = 0; i < m; ++i) out.sups[i] = scale * eta.sup(cfg.intervals[i]).value;
    return out;
  });
  double eta_tail = 0.0;
  for (const auto& e : eta_reps) eta_tail = std::max(eta_tail, e.tail);

  std::vector<LimitRow> rows;
  for (std::size_t h = 0; h < cfg.n_list.size(); ++h) {
    const GridIndex n = cfg.n_list[h];
    const VisitSampler sampler(n, spec.beta);
    const auto paths = run_replicates<EtaRep>(cfg.reps, threads, [&](std::size_t r) {
      RngStream rng(seed, randkit::substream_id(kTagLimitPath + (h << 8), r));
      const ProcessPath p = simulate_process(rng, sampler, spec, cfg.ell_trunc);
      EtaRep out{std::vector<double>(m), p.truncation_diag};
      for (std::size_t i = 0; i < m; ++i) out.sups[i] = sup_measure_Mn(p, cfg.intervals[i]) / p.bn;
      return out;
    });
    double trunc = 0.0;
    for (const auto& p : paths) trunc = std::max(trunc, p.tail);
    for (std::size_t i = 0; i < m; ++i) {
      std::vector<double> a, b;
      for (const auto& p : paths) a.push_back(p.sups[i]);
      for (const auto& e : eta_reps) b.push_back(e.sups[i]);
      rows.push_back({n, cfg.intervals[i], stats::ks_two_sample(stats::ecdf(std::move(a)), stats::ecdf(std::move(b))),
                      stats::ks_critical_two_sample(cfg.reps, cfg.reps), trunc, eta_tail});
    }
  }
  return rows;
}

struct SimultaneousVisitResult {
  double ks = 0.0;
  std::size_t attempts = 0;
  std::vector<double> samples;
};

// n^-1 (first common visit of two independent mu_n visit sets), conditioned on existing,
// against the normalized shift law.
inline SimultaneousVisitResult simultaneous_visit_experiment(GridIndex n, double beta, std::size_t accepted,
                                                             std::uint64_t seed, unsigned threads) {
  const double betas[] = {beta, beta};
  const double bs = intersectlaw::beta_star(betas);
  if (!(bs > 0.0)) throw NonIntersectingRegime("two chains need beta > 1/2");
  const VisitSampler sampler(n, beta);
  struct Draw {
    double value;
    std::size_t tries;
  };
  const auto draws = run_replicates<Draw>(accepted, threads, [&](std::size_t r) {
    RngStream rng(seed, randkit::substream_id(kTagSimVisit, r));
    std::vector<GridIndex> a, b;
    for (std::size_t tries = 1;; ++tries) {
      a.clear();
      b.clear();
      sampler.sample_into(rng, a);
      sampler.sample_into(rng, b);
      std::size_t i = 0, j = 0;
      while (i < a.size() && j < b.size()) {
        if (a[i] == b[j]) return Draw{double(a[i]) / double(n), tries};
        if (a[i] < b[j]) ++i; else ++j;
      }
    }
  });
  SimultaneousVisitResult out;
  for (const auto& d : draws) {
    out.samples.push_back(d.value);
    out.attempts += d.tries;
  }
  const double norm = intersectlaw::shift_cdf_V(1.0, betas);
  out.ks = stats::ks_one_sample(stats::ecdf(out.samples), [&](double x) {
    return intersectlaw::shift_cdf_V(std::clamp(x, 0.0, 1.0), betas) / norm;
  });
  return out;
}

// KS of sigma/n against v^(1-beta).
inline double first_visit_ks(GridIndex n, double beta, std::size_t reps, std::uint64_t seed, unsigned threads) {
  const VisitSampler sampler(n, beta);
  auto s = run_replicates<double>(reps, threads, [&](std::size_t r) {
    RngStream rng(seed, randkit::substream_id(kTagSigma, r));
    return double(sampler.sample_sigma(rng)) / double(n);
  });
  return stats::ks_one_sample(stats::ecdf(std::move(s)),
                              [&](double v) { return std::pow(std::clamp(v, 0.0, 1.0), 1.0 - beta); });
}

}  // namespace regen::idprocess
