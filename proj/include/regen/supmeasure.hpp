#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "error.hpp"
#include "intersectlaw.hpp"
#include "parallel.hpp"
#include "randkit.hpp"
#include "stablesets.hpp"
#include "stats.hpp"

namespace regen::supmeasure {

using randkit::RngStream;
using stablesets::GridIndex;

struct EtaConfig {
  double alpha = 1.0;
  double beta = 0.7;
  int ell_trunc = 64;
  GridIndex resolution = 10000;
  // Simulated window [0, T]; the shifts V_j have density proportional to v^-beta on it.
  double window = 1.0;

  double hurst() const { return (1.0 - beta) / alpha; }
  GridIndex cells() const { return GridIndex(std::llround(window * double(resolution))); }

  void validate() const {
    detail::require_positive(alpha, "alpha");
    detail::require_unit_open(beta, "beta");
    const int lb = intersectlaw::ell_beta(beta);
    detail::require(ell_trunc >= lb + 1, "ell_trunc must be >= ell_beta + 1 = " + std::to_string(lb + 1));
    detail::require(resolution >= 100, "resolution must be >= 100");
    detail::require(window >= 1.0 && window <= 64.0, "window must lie in [1, 64]");
  }
};

struct OpenInterval {
  double lo;
  double hi;
};

struct EtaSup {
  double value = 0.0;
  double error_bound = 0.0;
  double coincidence_slack = 0.0;  // largest weight sum beyond the ell_beta largest, over the cells used
};

// Cell k stands for [k/n, (k+1)/n). A set occupies the cell of each of its points.
class EtaRealization {
public:
  EtaRealization(RngStream& rng, const EtaConfig& cfg)
      : EtaRealization(rng, cfg, randkit::ReturnTimeSampler(cfg.beta)) {}

  // `steps` must be built for cfg.beta; sharing it across replicates avoids rebuilding its table.
  EtaRealization(RngStream& rng, const EtaConfig& cfg, const randkit::ReturnTimeSampler& steps) : cfg_(cfg) {
    cfg.validate();
    detail::require(steps.beta() == cfg.beta, "return-time sampler built for a different beta");
    ell_beta_ = intersectlaw::ell_beta(cfg.beta);
    const GridIndex n_cells = cfg.cells();
    const double inv_alpha = 1.0 / cfg.alpha;
    const double v_pow = 1.0 / (1.0 - cfg.beta);
    const double scale = std::pow(cfg.window, cfg.hurst());
    const double res = double(cfg.resolution);

    const std::size_t L = std::size_t(cfg.ell_trunc);
    weights_.reserve(L);
    shifts_.reserve(L);
    offsets_.reserve(L + 1);
    offsets_.push_back(0);
    // Mean renewal count on the window is about n^beta / (Gamma(1-beta) Gamma(1+beta)).
    const double mean_pts = std::pow(double(n_cells), cfg.beta) / (std::tgamma(1.0 - cfg.beta) * std::tgamma(1.0 + cfg.beta));
    points_.reserve(std::size_t(double(L) * (8.0 + 1.5 * mean_pts)));
    value_.assign(std::size_t(n_cells), 0.0);
    top_.assign(std::size_t(n_cells), 0.0);
    count_.assign(std::size_t(n_cells), 0);
    const auto lb = std::uint16_t(ell_beta_);
    double g = 0.0;
    for (std::size_t j = 0; j < L; ++j) {
      g += randkit::sample_exponential(rng);
      const double w = scale * std::pow(g, -inv_alpha);
      weights_.push_back(w);
      const double v = cfg.window * std::pow(rng.uniform(), v_pow);
      shifts_.push_back(v);
      const GridIndex start = std::min(GridIndex(v * res), n_cells - 1);
      const std::size_t before = points_.size();
      stablesets::append_renewal_points(rng, start, n_cells, steps, points_);
      offsets_.push_back(points_.size());
      // Sets arrive in decreasing weight order, so the first ell_beta hits of a cell are its largest.
      for (std::size_t i = before; i < points_.size(); ++i) {
        const auto k = std::size_t(points_[i]);
        value_[k] += w;
        const auto c = ++count_[k];
        if (c <= lb) top_[k] += w;
        else if (c == lb + 1) ++coincidence_count_;
      }
    }
    g += randkit::sample_exponential(rng);
    first_omitted_ = scale * std::pow(g, -inv_alpha);
    tail_bound_ = double(ell_beta_) * first_omitted_;
  }

  const EtaConfig& config() const { return cfg_; }
  double alpha() const { return cfg_.alpha; }
  double beta() const { return cfg_.beta; }
  GridIndex resolution() const { return cfg_.resolution; }
  GridIndex cells() const { return GridIndex(value_.size()); }
  int ell_beta() const { return ell_beta_; }

  const std::vector<double>& weights() const { return weights_; }
  const std::vector<double>& shifts() const { return shifts_; }
  std::size_t set_count() const { return weights_.size(); }
  std::span<const GridIndex> shifted_set(std::size_t j) const {
    detail::require(j < set_count(), "shifted_set: index out of range");
    return {points_.data() + offsets_[j], offsets_[j + 1] - offsets_[j]};
  }

  double tail_bound() const { return tail_bound_; }
  double first_omitted_weight() const { return first_omitted_; }
  std::size_t coincidence_count() const { return coincidence_count_; }
  double coverage_excess_fraction() const { return double(coincidence_count_) / double(value_.size()); }

  double eta_value(GridIndex k) const {
    detail::require(k >= 0 && k < cells(), "eta_value: grid index out of range");
    return value_[std::size_t(k)];
  }
  int coverage(GridIndex k) const {
    detail::require(k >= 0 && k < cells(), "coverage: grid index out of range");
    return count_[std::size_t(k)];
  }

  EtaSup sup(OpenInterval iv) const {
    const double res = double(cfg_.resolution);
    detail::require(iv.lo >= 0.0 && iv.hi <= cfg_.window && iv.lo < iv.hi,
                    "eta_sup: interval must be an open sub-interval of the window");
    detail::require(iv.hi - iv.lo >= 2.0 / res, "eta_sup: interval shorter than 2/resolution");
    const auto first = std::size_t(std::floor(iv.lo * res));
    const auto last = std::min(std::size_t(std::ceil(iv.hi * res)), value_.size());
    EtaSup out;
    out.error_bound = tail_bound_;
    for (std::size_t k = first; k < last; ++k) {
      out.value = std::max(out.value, value_[k]);
      out.coincidence_slack = std::max(out.coincidence_slack, value_[k] - top_[k]);
    }
    return out;
  }

  // Gamma_1^{-1/alpha} + (ell_beta - 1) Gamma_2^{-1/alpha} + tail_bound.
  double sandwich_upper() const {
    const double w2 = weights_.size() > 1 ? weights_[1] : 0.0;
    return weights_.front() + double(ell_beta_ - 1) * w2 + tail_bound_;
  }

private:
  EtaConfig cfg_;
  int ell_beta_ = 1;
  std::vector<double> weights_;
  std::vector<double> shifts_;
  std::vector<std::size_t> offsets_;
  std::vector<GridIndex> points_;
  double tail_bound_ = 0.0;
  double first_omitted_ = 0.0;
  std::size_t coincidence_count_ = 0;
  std::vector<double> value_;
  std::vector<double> top_;
  std::vector<std::uint16_t> count_;
};

inline EtaRealization simulate_eta(RngStream& rng, double alpha, double beta, int ell_trunc,
                                   GridIndex resolution) {
  return EtaRealization(rng, EtaConfig{alpha, beta, ell_trunc, resolution, 1.0});
}

inline double eta_value(const EtaRealization& r, GridIndex k) { return r.eta_value(k); }
inline EtaSup eta_sup(const EtaRealization& r, OpenInterval iv) { return r.sup(iv); }

// Stream tags keep experiments that share a seed on disjoint substreams.
enum StreamTag : std::uint64_t {
  kTagEtaTail = 0x101,
  kTagSelfSimA = 0x102,
  kTagSelfSimB = 0x103,
  kTagStationA = 0x104,
  kTagStationB = 0x105,
  kTagInterp = 0x106,
  kTagInterpRef = 0x107,
  kTagShiftLaw = 0x108,
};

// reps x intervals matrix of eta sups, row-major, replicate r on substream (tag, r).
inline std::vector<double> sample_eta_sups(const EtaConfig& cfg, std::span<const OpenInterval> intervals,
                                           std::size_t reps, std::uint64_t seed, std::uint64_t tag,
                                           unsigned threads) {
  cfg.validate();
  detail::require(!intervals.empty(), "sample_eta_sups: no intervals");
  const std::size_t m = intervals.size();
  const randkit::ReturnTimeSampler steps(cfg.beta);
  auto rows = run_replicates<std::vector<double>>(reps, threads, [&](std::size_t r) {
    RngStream rng(seed, randkit::substream_id(tag, r));
    const EtaRealization eta(rng, cfg, steps);
    std::vector<double> row(m);
    for (std::size_t i = 0; i < m; ++i) row[i] = eta.sup(intervals[i]).value;
    return row;
  });
  std::vector<double> out(reps * m);
  for (std::size_t r = 0; r < reps; ++r)
    std::copy(rows[r].begin(), rows[r].end(), out.begin() + std::ptrdiff_t(r * m));
  return out;
}

inline std::vector<double> column(const std::vector<double>& mat, std::size_t cols, std::size_t c,
                                  double scale = 1.0) {
  std::vector<double> out(mat.size() / cols);
  for (std::size_t r = 0; r < out.size(); ++r) out[r] = scale * mat[r * cols + c];
  return out;
}

struct TailRow {
  double x;
  double estimate;
  double ci_low;
  double ci_high;
  double lower_curve;  // x^alpha (1 - exp(-x^-alpha)), the Gamma_1 term alone
};

struct TailDiagnostics {
  double max_tail_bound = 0.0;
  double max_coincidence_slack = 0.0;
  std::size_t lower_violations = 0;
  std::size_t upper_violations = 0;             // strict sandwich, no slack
  std::size_t upper_violations_with_slack = 0;  // sandwich plus coincidence slack
  std::size_t replicates_with_coincidence = 0;
  double mean_coverage_excess = 0.0;
};

struct TailTable {
  std::vector<TailRow> rows;
  TailDiagnostics diag;
  std::vector<double> samples;  // eta((0,1)) per replicate
};

inline TailTable eta_tail_experiment(const EtaConfig& cfg, std::span<const double> x_grid, std::size_t reps,
                                     std::uint64_t seed, unsigned threads) {
  cfg.validate();
  detail::require(cfg.window == 1.0, "eta_tail_experiment runs on the unit window");
  detail::require(reps >= 10000, "eta_tail_experiment: reps must be >= 1e4");
  detail::require(!x_grid.empty(), "eta_tail_experiment: empty x grid");
  for (double x : x_grid) detail::require_positive(x, "x");

  struct Rep {
    double value, tail, slack, excess;
    bool lower_ok, upper_ok, upper_slack_ok;
  };
  const randkit::ReturnTimeSampler steps(cfg.beta);
  const auto reps_out = run_replicates<Rep>(reps, threads, [&](std::size_t r) {
    RngStream rng(seed, randkit::substream_id(kTagEtaTail, r));
    const EtaRealization eta(rng, cfg, steps);
    const EtaSup s = eta.sup({0.0, 1.0});
    const double upper = eta.sandwich_upper();
    return Rep{s.value,
               eta.tail_bound(),
               s.coincidence_slack,
               eta.coverage_excess_fraction(),
               s.value >= eta.weights().front(),
               s.value <= upper,
               s.value <= upper + s.coincidence_slack};
  });

  TailTable out;
  out.samples.reserve(reps);
  CompensatedSum excess;
  for (const auto& r : reps_out) {
    out.samples.push_back(r.value);
    out.diag.max_tail_bound = std::max(out.diag.max_tail_bound, r.tail);
    out.diag.max_coincidence_slack = std::max(out.diag.max_coincidence_slack, r.slack);
    out.diag.lower_violations += !r.lower_ok;
    out.diag.upper_violations += !r.upper_ok;
    out.diag.upper_violations_with_slack += !r.upper_slack_ok;
    out.diag.replicates_with_coincidence += r.slack > 0.0;
    excess.add(r.excess);
  }
  out.diag.mean_coverage_excess = excess.value() / double(reps);
  const auto dist = stats::ecdf(out.samples);
  for (double x : x_grid) {
    const auto t = stats::tail_ratio(dist, cfg.alpha, x);
    const double xa = std::pow(x, cfg.alpha);
    out.rows.push_back({x, t.estimate, t.ci_low, t.ci_high, xa * -std::expm1(-1.0 / xa)});
  }
  return out;
}

struct KsResult {
  double ks = 0.0;
  double threshold = 0.0;  // two-sample 99% critical value
};

// KS between eta((0,a)) and a^H eta((0,1)) on independent replicate sets.
inline KsResult selfsimilarity_experiment(const EtaConfig& cfg, double scale_a, std::size_t reps,
                                          std::uint64_t seed, unsigned threads) {
  cfg.validate();
  detail::require(scale_a > 0.0 && scale_a <= 1.0, "scale_a must lie in (0,1]");
  detail::require(reps >= 10000, "selfsimilarity_experiment: reps must be >= 1e4");
  const OpenInterval ia[] = {{0.0, scale_a}};
  const OpenInterval ib[] = {{0.0, 1.0}};
  auto a = sample_eta_sups(cfg, ia, reps, seed, kTagSelfSimA, threads);
  auto b = sample_eta_sups(cfg, ib, reps, seed, kTagSelfSimB, threads);
  const double h = std::pow(scale_a, cfg.hurst());
  for (double& v : b) v *= h;
  return {stats::ks_two_sample(stats::ecdf(std::move(a)), stats::ecdf(std::move(b))),
          stats::ks_critical_two_sample(reps, reps)};
}

// Smallest integer window containing (t0, t0+s).
inline double stationarity_window(double t0, double s) { return std::max(1.0, std::ceil(t0 + s)); }

// KS between eta((t0, t0+s)) and eta((0, s)).
inline KsResult stationarity_experiment(EtaConfig cfg, double t0, double s, std::size_t reps,
                                        std::uint64_t seed, unsigned threads) {
  detail::require(t0 >= 0.0, "t0 must be non-negative");
  detail::require_positive(s, "s");
  detail::require(t0 + s <= cfg.window, "t0 + s must lie within the simulated window");
  cfg.validate();
  detail::require(reps >= 10000, "stationarity_experiment: reps must be >= 1e4");
  const OpenInterval ia[] = {{t0, t0 + s}};
  const OpenInterval ib[] = {{0.0, s}};
  auto a = sample_eta_sups(cfg, ia, reps, seed, kTagStationA, threads);
  auto b = sample_eta_sups(cfg, ib, reps, seed, kTagStationB, threads);
  return {stats::ks_two_sample(stats::ecdf(std::move(a)), stats::ecdf(std::move(b))),
          stats::ks_critical_two_sample(reps, reps)};
}

// Slope of log median eta((0,a)) against log a.
inline double scaling_exponent(const EtaConfig& cfg, std::span<const double> a_grid, std::size_t reps,
                               std::uint64_t seed, unsigned threads) {
  detail::require(a_grid.size() >= 2, "scaling_exponent: need at least two scales");
  std::vector<OpenInterval> iv;
  for (double a : a_grid) {
    detail::require(a > 0.0 && a <= cfg.window, "scale outside the window");
    iv.push_back({0.0, a});
  }
  const auto mat = sample_eta_sups(cfg, iv, reps, seed, kTagSelfSimA, threads);
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < a_grid.size(); ++i) {
    lx.push_back(std::log(a_grid[i]));
    ly.push_back(std::log(stats::median_of(column(mat, iv.size(), i))));
  }
  return stats::ols_slope(lx, ly);
}

// Sum_{j<=terms} Gamma_j^{-1/alpha}: the totally skewed alpha-stable law by its series.
inline std::vector<double> stable_series_samples(double alpha, std::size_t terms, std::size_t reps,
                                                 std::uint64_t seed, unsigned threads) {
  detail::require(alpha > 0.0 && alpha < 1.0, "stable series needs alpha in (0,1)");
  return run_replicates<double>(reps, threads, [&](std::size_t r) {
    RngStream rng(seed, randkit::substream_id(kTagInterpRef, r));
    double g = 0.0;
    CompensatedSum s;
    for (std::size_t j = 0; j < terms; ++j) {
      g += randkit::sample_exponential(rng);
      s.add(std::pow(g, -1.0 / alpha));
    }
    return s.value();
  });
}

struct InterpolationRow {
  double beta;
  double ks_frechet;
  double ks_stable;
  double median;
};

inline std::vector<InterpolationRow> interpolation_check(const EtaConfig& base, std::span<const double> beta_grid,
                                                         std::size_t reps, std::uint64_t seed, unsigned threads,
                                                         std::size_t stable_terms = 4096) {
  detail::require(base.alpha > 0.0 && base.alpha < 1.0, "interpolation_check needs alpha in (0,1)");
  detail::require(!beta_grid.empty(), "interpolation_check: empty beta grid");
  const auto ref = stats::ecdf(stable_series_samples(base.alpha, stable_terms, reps, seed, threads));
  const double alpha = base.alpha;
  std::vector<InterpolationRow> rows;
  for (std::size_t i = 0; i < beta_grid.size(); ++i) {
    EtaConfig cfg = base;
    cfg.beta = beta_grid[i];
    cfg.window = 1.0;
    cfg.ell_trunc = std::max(cfg.ell_trunc, intersectlaw::ell_beta(cfg.beta) + 1);
    const OpenInterval unit[] = {{0.0, 1.0}};
    const auto d = stats::ecdf(sample_eta_sups(cfg, unit, reps, seed, kTagInterp + (i << 8), threads));
    rows.push_back({cfg.beta,
                    stats::ks_one_sample(d, [alpha](double x) { return x > 0.0 ? std::exp(-std::pow(x, -alpha)) : 0.0; }),
                    stats::ks_two_sample(d, ref), d.median()});
  }
  return rows;
}

struct ShiftLawResult {
  double ks = 0.0;
  std::size_t attempts = 0;
  std::vector<double> samples;
};

// First point in [0,1] of (V_1+R_1) cap (V_2+R_2), conditioned on existing, against the
// normalized shift law x^(1-beta*).
inline ShiftLawResult shift_law_experiment(double beta, GridIndex resolution, std::size_t accepted,
                                           std::uint64_t seed, unsigned threads) {
  detail::require_unit_open(beta, "beta");
  detail::require(resolution >= 100, "resolution must be >= 100");
  const double betas[] = {beta, beta};
  const double bs = intersectlaw::beta_star(betas);
  if (!(bs > 0.0)) throw NonIntersectingRegime("2-fold intersection needs beta > 1/2");
  struct Draw {
    double value;
    std::size_t tries;
  };
  const randkit::ReturnTimeSampler steps(beta);
  const double v_pow = 1.0 / (1.0 - beta), res = double(resolution);
  const GridIndex cells = resolution;
  const auto draws = run_replicates<Draw>(accepted, threads, [&](std::size_t r) {
    RngStream rng(seed, randkit::substream_id(kTagShiftLaw, r));
    std::vector<GridIndex> a, b;
    for (std::size_t tries = 1;; ++tries) {
      a.clear();
      b.clear();
      const GridIndex sa = std::min(GridIndex(std::pow(rng.uniform(), v_pow) * res), cells - 1);
      stablesets::append_renewal_points(rng, sa, cells, steps, a);
      const GridIndex sb = std::min(GridIndex(std::pow(rng.uniform(), v_pow) * res), cells - 1);
      stablesets::append_renewal_points(rng, sb, cells, steps, b);
      std::size_t i = 0, j = 0;
      while (i < a.size() && j < b.size()) {
        if (a[i] == b[j]) return Draw{double(a[i]) / res, tries};
        if (a[i] < b[j]) ++i; else ++j;
      }
    }
  });
  ShiftLawResult out;
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

}  // namespace regen::supmeasure
