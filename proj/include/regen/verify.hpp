#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "idprocess.hpp"
#include "intersectlaw.hpp"
#include "parallel.hpp"
#include "randkit.hpp"
#include "renewalkit.hpp"
#include "stablesets.hpp"
#include "stats.hpp"
#include "supmeasure.hpp"

namespace regen::verify {

using randkit::RngStream;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// A measured value and its acceptance band [lo, hi]. Non-gating metrics are reported only.
struct Metric {
  std::string name;
  double value = 0.0;
  double lo = -kInf;
  double hi = kInf;
  bool gating = true;

  bool pass() const { return value >= lo && value <= hi; }
};

struct Criterion {
  int id = 0;
  std::string title;
  std::vector<Metric> metrics;

  bool pass() const {
    for (const auto& m : metrics)
      if (m.gating && !m.pass()) return false;
    return true;
  }
};

struct Options {
  std::uint64_t seed = 7;
  unsigned threads = default_threads();
};

namespace tags {
inline constexpr std::uint64_t kOvershoot = 0x401;
inline constexpr std::uint64_t kIntersection = 0x402;
inline constexpr std::uint64_t kPoolA = 0x403;
inline constexpr std::uint64_t kPoolB = 0x404;
inline constexpr std::uint64_t kSeeds = 0x405;
inline constexpr std::uint64_t kThreads = 0x406;
}  // namespace tags

namespace detail_v {

inline Metric at_most(std::string name, double v, double hi) { return {std::move(name), v, -kInf, hi, true}; }
inline Metric at_least(std::string name, double v, double lo) { return {std::move(name), v, lo, kInf, true}; }
inline Metric within(std::string name, double v, double lo, double hi) { return {std::move(name), v, lo, hi, true}; }
inline Metric flag(std::string name, bool ok) { return {std::move(name), ok ? 1.0 : 0.0, 1.0, 1.0, true}; }
inline Metric info(std::string name, double v) { return {std::move(name), v, -kInf, kInf, false}; }

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

inline int sign(double v, double tol) { return v > tol ? 1 : (v < -tol ? -1 : 0); }

}  // namespace detail_v

inline Criterion overshoot_law(const Options& o) {
  using namespace detail_v;
  Criterion c{1, "overshoot sampler vs analytic law", {}};
  const auto t0 = std::chrono::steady_clock::now();
  RngStream rng(o.seed, randkit::substream_id(tags::kOvershoot, 0));
  std::vector<double> s(100000);
  for (auto& v : s) v = stablesets::sample_overshoot(rng, 1.0, 0.7);
  const double ks = stats::ks_one_sample(stats::ecdf(std::move(s)),
                                         [](double b) { return b > 0.0 ? stablesets::overshoot_cdf(b, 1.0, 0.7) : 0.0; });
  const double elapsed = seconds_since(t0);
  c.metrics.push_back(at_most("ks_1e5_beta0.7", ks, 0.01));
  c.metrics.push_back(flag("runtime_under_5s_single_thread", elapsed < 5.0));
  return c;
}

inline Criterion first_intersection_law(const Options& o) {
  using namespace detail_v;
  Criterion c{2, "first-intersection CDF vs iterated-overshoot Monte Carlo", {}};
  const auto t0 = std::chrono::steady_clock::now();
  const stablesets::IntersectionSpec spec{1.0, 0.75, 0.75};
  auto draws = run_replicates<double>(1000000, o.threads, [&](std::size_t r) {
    RngStream rng(o.seed, randkit::substream_id(tags::kIntersection, r));
    return stablesets::sample_first_intersection(rng, spec, 1e-9).value;
  });
  const auto dist = stats::ecdf(std::move(draws));
  const double elapsed = seconds_since(t0);
  double worst = 0.0;
  for (double x : {0.25, 0.5, 1.0, 2.0, 4.0}) {
    const double d = std::fabs(intersectlaw::intersection_cdf(x, 1.0, 0.75, 0.75) - dist(x));
    c.metrics.push_back(info("abs_diff_x" + std::to_string(x).substr(0, 4), d));
    worst = std::max(worst, d);
  }
  c.metrics.push_back(at_most("sup_abs_diff_1e6", worst, 0.005));
  c.metrics.push_back(flag("runtime_under_60s", elapsed < 60.0));
  return c;
}

inline Criterion recursion_identity(const Options&) {
  using namespace detail_v;
  Criterion c{3, "recursion residual on the (x, beta1, beta2) grid", {}};
  double worst = 0.0;
  int points = 0;
  for (double b1 : {0.6, 0.75, 0.9})
    for (double b2 : {0.6, 0.75, 0.9}) {
      if (b1 + b2 - 1.0 <= 0.0) continue;
      for (double x : {0.1, 0.25, 0.5, 1.0, 2.0, 5.0, 20.0}) {
        worst = std::max(worst, intersectlaw::recursion_residual(x, b1, b2, {1e-10, 15}));
        ++points;
      }
    }
  c.metrics.push_back(info("grid_points", points));
  c.metrics.push_back(at_most("max_residual", worst, 1e-6));
  return c;
}

inline Criterion dp_oracle(const Options&) {
  using namespace detail_v;
  Criterion c{4, "discrete first common renewal vs continuum law", {}};
  constexpr std::size_t n = 2000, offset = 600;
  const renewalkit::RenewalLaw law{0.75};
  const auto dp = renewalkit::first_simultaneous_renewal_cdf(law, law, offset, 2 * n);
  for (double x : {0.5, 1.0, 2.0}) {
    const auto t = std::size_t(std::llround(x * double(n)));
    const double d = std::fabs(dp.cdf[t] - intersectlaw::intersection_cdf(x, 0.3, 0.75, 0.75));
    c.metrics.push_back(at_most("abs_diff_x" + std::to_string(x).substr(0, 3), d, 0.02));
  }
  c.metrics.push_back(info("dp_deficit", dp.deficit));
  return c;
}

inline Criterion shift_law(const Options& o) {
  using namespace detail_v;
  Criterion c{5, "2-fold shift law of the first intersection point", {}};
  const auto r = supmeasure::shift_law_experiment(0.8, 10000, 10000, o.seed, o.threads);
  c.metrics.push_back(at_most("ks_1e4_accepted", r.ks, 0.03));
  c.metrics.push_back(info("acceptance_rate", 10000.0 / double(r.attempts)));
  return c;
}

inline Criterion phi_dichotomy(const Options&) {
  using namespace detail_v;
  Criterion c{6, "phi dichotomy and monotonicity", {}};
  c.metrics.push_back(at_most("abs_phi_half", std::fabs(stablesets::phi(0.5)), 1e-8));
  int mismatches = 0;
  for (int i = 1; i <= 9; ++i)
    for (int j = 1; j <= 9; ++j) {
      const double b1 = i / 10.0, b2 = j / 10.0;
      const int lhs = sign(stablesets::phi(b1) - stablesets::phi(1.0 - b2), 1e-9);
      const int rhs = sign(1.0 - b1 - b2, 1e-12);
      mismatches += lhs != rhs;
    }
  c.metrics.push_back(at_most("sign_mismatches_9x9", mismatches, 0.0));
  int rises = 0;
  double prev = kInf;
  for (int k = 1; k <= 19; ++k) {
    const double v = stablesets::phi(0.05 * k);
    rises += !(v < prev);
    prev = v;
  }
  c.metrics.push_back(at_most("non_decreasing_steps", rises, 0.0));
  return c;
}

inline Criterion eta_tail(const Options& o) {
  using namespace detail_v;
  Criterion c{7, "tail of eta((0,1)) and per-replicate sandwich", {}};
  const supmeasure::EtaConfig cfg{1.0, 0.6, 64, 10000, 1.0};
  const double xs[] = {50.0};
  const auto t = supmeasure::eta_tail_experiment(cfg, xs, 1000000, o.seed, o.threads);
  const auto& row = t.rows.front();
  c.metrics.push_back(within("tail_ratio_x50", row.estimate, 0.9, 1.1));
  c.metrics.push_back(info("ci_low", row.ci_low));
  c.metrics.push_back(info("ci_high", row.ci_high));
  c.metrics.push_back(at_most("lower_sandwich_violations", double(t.diag.lower_violations), 0.0));
  c.metrics.push_back(at_most("upper_sandwich_violations", double(t.diag.upper_violations), 0.0));
  c.metrics.push_back(info("upper_violations_with_coincidence_slack", double(t.diag.upper_violations_with_slack)));
  c.metrics.push_back(info("replicates_with_coincidence", double(t.diag.replicates_with_coincidence)));
  c.metrics.push_back(info("max_tail_bound", t.diag.max_tail_bound));
  c.metrics.push_back(info("mean_coverage_excess_fraction", t.diag.mean_coverage_excess));
  return c;
}

inline Criterion invariance(const Options& o) {
  using namespace detail_v;
  Criterion c{8, "self-similarity, stationarity and scaling exponent", {}};
  const supmeasure::EtaConfig cfg{1.0, 0.7, 64, 10000, 1.0};
  constexpr std::size_t reps = 100000;
  // Pool A feeds eta((0,a)) for every a; pool B is an independent draw of eta((0,1)) and eta((1/2,1)).
  const supmeasure::OpenInterval ia[] = {{0.0, 0.125}, {0.0, 0.25}, {0.0, 0.5}, {0.0, 1.0}};
  const supmeasure::OpenInterval ib[] = {{0.0, 1.0}, {0.5, 1.0}};
  const auto a = supmeasure::sample_eta_sups(cfg, ia, reps, o.seed, tags::kPoolA, o.threads);
  const auto b = supmeasure::sample_eta_sups(cfg, ib, reps, o.seed, tags::kPoolB, o.threads);
  const double h = cfg.hurst();
  const auto half = stats::ecdf(supmeasure::column(a, 4, 2));
  const double ks_self = stats::ks_two_sample(half, stats::ecdf(supmeasure::column(b, 2, 0, std::pow(0.5, h))));
  const double ks_stat = stats::ks_two_sample(stats::ecdf(supmeasure::column(b, 2, 1)), half);
  std::vector<double> lx, ly;
  const double scales[] = {0.125, 0.25, 0.5, 1.0};
  for (std::size_t i = 0; i < 4; ++i) {
    lx.push_back(std::log(scales[i]));
    ly.push_back(std::log(stats::median_of(supmeasure::column(a, 4, i))));
  }
  const double slope = stats::ols_slope(lx, ly);
  c.metrics.push_back(at_most("ks_selfsimilarity_a0.5", ks_self, 0.02));
  c.metrics.push_back(at_most("ks_stationarity_t0.5_s0.5", ks_stat, 0.02));
  c.metrics.push_back(within("log_median_slope", slope, h - 0.05, h + 0.05));
  c.metrics.push_back(info("hurst", h));
  c.metrics.push_back(info("ks_two_sample_threshold", stats::ks_critical_two_sample(reps, reps)));
  return c;
}

inline Criterion limit_theorem(const Options& o) {
  using namespace detail_v;
  Criterion c{9, "limit theorem M_n / b_n vs a^(1/alpha) eta", {}};
  idprocess::LimitConfig cfg;
  cfg.spec = {1.0, 0.7, 1.0, 1.0};
  cfg.n_list = {100, 1000, 10000};
  cfg.intervals = {{0.0, 1.0}, {0.0, 0.5}, {0.5, 1.0}};
  cfg.reps = 1000;
  const std::size_t rows = cfg.n_list.size() * cfg.intervals.size();
  std::vector<std::vector<double>> ks(rows), ks2(rows);
  double max_change = 0.0;
  for (std::uint64_t i = 0; i < 5; ++i) {
    const std::uint64_t s = RngStream(o.seed, randkit::substream_id(tags::kSeeds, i)).next_u64();
    cfg.ell_trunc = 64;
    const auto base = idprocess::limit_experiment(cfg, s, o.threads);
    cfg.ell_trunc = 128;
    const auto dbl = idprocess::limit_experiment(cfg, s, o.threads);
    for (std::size_t r = 0; r < rows; ++r) {
      ks[r].push_back(base[r].ks);
      ks2[r].push_back(dbl[r].ks);
      max_change = std::max(max_change, std::fabs(base[r].ks - dbl[r].ks));
    }
  }
  // Row order is horizon-major: row = h * intervals + i.
  auto med = [&](std::size_t h, std::size_t i) { return stats::median_of(ks[h * 3 + i]); };
  const double m100 = med(0, 0), m1000 = med(1, 0), m10000 = med(2, 0);
  c.metrics.push_back(info("median_ks_n100", m100));
  c.metrics.push_back(info("median_ks_n1000", m1000));
  c.metrics.push_back(flag("median_ks_non_increasing", m1000 <= m100 && m10000 <= m1000));
  c.metrics.push_back(at_most("median_ks_n10000", m10000, 0.08));
  c.metrics.push_back(at_most("median_ks_n10000_first_half", med(2, 1), 0.08));
  c.metrics.push_back(at_most("median_ks_n10000_second_half", med(2, 2), 0.08));
  c.metrics.push_back(at_most("max_ks_change_trunc_64_to_128", max_change, 0.01));
  double med_change = 0.0;
  for (std::size_t r = 0; r < rows; ++r)
    med_change = std::max(med_change, std::fabs(stats::median_of(ks[r]) - stats::median_of(ks2[r])));
  c.metrics.push_back(info("max_median_ks_change_trunc", med_change));
  return c;
}

inline Criterion visit_laws(const Options& o) {
  using namespace detail_v;
  Criterion c{10, "first visit and first simultaneous visit laws", {}};
  c.metrics.push_back(at_most("ks_first_visit_n1e4_beta0.7", idprocess::first_visit_ks(10000, 0.7, 100000, o.seed, o.threads), 0.02));
  const auto sv = idprocess::simultaneous_visit_experiment(10000, 0.8, 10000, o.seed, o.threads);
  c.metrics.push_back(at_most("ks_simultaneous_visit_beta0.8", sv.ks, 0.03));
  c.metrics.push_back(info("simultaneous_visit_acceptance_rate", 10000.0 / double(sv.attempts)));
  return c;
}

inline Criterion renewal_asymptotics(const Options&) {
  using namespace detail_v;
  Criterion c{11, "renewal mass asymptotics and intersection tail", {}};
  constexpr std::size_t n = 100000;
  std::vector<std::vector<double>> u08;
  for (double b : {0.6, 0.8}) {
    auto u = renewalkit::renewal_mass_function(renewalkit::RenewalLaw{b}, n);
    const std::string tag = b == 0.6 ? "0.6" : "0.8";
    c.metrics.push_back(within("u_ratio_beta" + tag + "_n1e5", renewalkit::renewal_ratio(u[n], b, n), 0.95, 1.05));
    const double r1 = renewalkit::renewal_ratio(u[1000], b, 1000);
    const double r2 = renewalkit::renewal_ratio(u[10000], b, 10000);
    const double r3 = renewalkit::renewal_ratio(u[n], b, n);
    const double den = r1 + r3 - 2.0 * r2;
    c.metrics.push_back(info("u_ratio_beta" + tag + "_richardson_limit", den != 0.0 ? (r1 * r3 - r2 * r2) / den : r3));
    if (b == 0.8) u08 = {u, u};
  }
  const auto ir = renewalkit::intersection_renewal(u08);
  const double betas[] = {0.8, 0.8};
  c.metrics.push_back(within("Fbar_star_ratio_n1e5", renewalkit::intersection_tail_ratio(ir.F_bar_star[n], betas, n), 0.9, 1.1));
  double drift = 0.0;
  for (std::size_t k = 0; k <= n; ++k) drift = std::max(drift, std::fabs(ir.cum_p_star[k] + ir.F_bar_star[k] - 1.0));
  c.metrics.push_back(at_most("conservation_max_error", drift, std::numeric_limits<double>::epsilon()));
  return c;
}

inline Criterion normalization(const Options&) {
  using namespace detail_v;
  Criterion c{12, "wandering-weight normalization", {}};
  const double w = idprocess::wandering_weight(1000000, 0.5);
  c.metrics.push_back(within("ratio_n1e6_beta0.5", w * 0.5 / std::pow(1e6, 0.5), 0.98, 1.02));
  c.metrics.push_back(flag("b0_alpha_equals_1", idprocess::wandering_weight(0, 0.5) == 1.0));
  c.metrics.push_back(flag("b1_alpha_equals_2", idprocess::wandering_weight(1, 0.5) == 2.0));
  return c;
}

// In-process half of the reproducibility contract: the same replicates under 1 and 8 workers.
inline Criterion thread_invariance(const Options& o) {
  using namespace detail_v;
  Criterion c{13, "thread-count invariance of replicate output", {}};
  auto run = [&](unsigned threads) {
    const supmeasure::EtaConfig cfg{1.0, 0.6, 64, 10000, 1.0};
    const double xs[] = {5.0};
    auto a = supmeasure::eta_tail_experiment(cfg, xs, 10000, o.seed ^ tags::kThreads, threads).samples;
    const stablesets::IntersectionSpec spec{1.0, 0.75, 0.75};
    auto b = run_replicates<double>(10000, threads, [&](std::size_t r) {
      RngStream rng(o.seed, randkit::substream_id(tags::kThreads, r));
      return stablesets::sample_first_intersection(rng, spec).value;
    });
    a.insert(a.end(), b.begin(), b.end());
    return a;
  };
  const auto one = run(1), eight = run(8);
  const bool same = one.size() == eight.size() &&
                    std::memcmp(one.data(), eight.data(), one.size() * sizeof(double)) == 0;
  c.metrics.push_back(flag("bit_identical_threads_1_vs_8", same));
  return c;
}

using CriterionFn = Criterion (*)(const Options&);

inline const std::vector<CriterionFn>& all_criteria() {
  static const std::vector<CriterionFn> fns = {
      overshoot_law,  first_intersection_law, recursion_identity, dp_oracle,     shift_law,
      phi_dichotomy,  eta_tail,               invariance,         limit_theorem, visit_laws,
      renewal_asymptotics, normalization,     thread_invariance};
  return fns;
}

// Runs the selected criteria (all when `only` is empty) in id order.
inline std::vector<Criterion> run_all(const Options& o, const std::vector<int>& only = {},
                                      const std::function<void(const Criterion&)>& on_done = {}) {
  std::vector<Criterion> out;
  const auto& fns = all_criteria();
  for (std::size_t i = 0; i < fns.size(); ++i) {
    const int id = int(i) + 1;
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    out.push_back(fns[i](o));
    if (on_done) on_done(out.back());
  }
  return out;
}

}  // namespace regen::verify
