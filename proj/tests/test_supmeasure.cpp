#include <gtest/gtest.h>

#include <regen/supmeasure.hpp>

using namespace regen;
using namespace regen::supmeasure;

namespace {
EtaRealization draw(std::uint64_t seed, EtaConfig cfg) {
  RngStream rng(seed, 0);
  return EtaRealization(rng, cfg);
}
}  // namespace

TEST(Eta, CellValuesEqualWeightSumsOverCoveringSets) {
  const EtaConfig cfg{1.0, 0.7, 16, 2000, 1.0};
  const auto eta = draw(3, cfg);
  std::vector<double> ref(std::size_t(eta.cells()), 0.0);
  std::vector<int> cover(ref.size(), 0);
  for (std::size_t j = 0; j < eta.set_count(); ++j)
    for (auto k : eta.shifted_set(j)) {
      ref[std::size_t(k)] += eta.weights()[j];
      ++cover[std::size_t(k)];
    }
  for (GridIndex k = 0; k < eta.cells(); ++k) {
    ASSERT_NEAR(eta.eta_value(k), ref[std::size_t(k)], 1e-12 * (1.0 + ref[std::size_t(k)]));
    ASSERT_EQ(eta.coverage(k), cover[std::size_t(k)]);
  }
}

TEST(Eta, WeightsShiftsAndTailBound) {
  const EtaConfig cfg{0.8, 0.6, 32, 1000, 2.0};
  const auto eta = draw(4, cfg);
  ASSERT_EQ(eta.set_count(), 32u);
  EXPECT_TRUE(std::is_sorted(eta.weights().rbegin(), eta.weights().rend()));
  for (std::size_t j = 0; j < eta.set_count(); ++j) {
    EXPECT_GE(eta.shifts()[j], 0.0);
    EXPECT_LE(eta.shifts()[j], 2.0);
    const auto s = eta.shifted_set(j);
    ASSERT_FALSE(s.empty());
    EXPECT_EQ(s.front(), std::min<GridIndex>(GridIndex(eta.shifts()[j] * 1000), eta.cells() - 1));
  }
  EXPECT_LT(eta.first_omitted_weight(), eta.weights().back());
  EXPECT_DOUBLE_EQ(eta.tail_bound(), eta.ell_beta() * eta.first_omitted_weight());
}

TEST(Eta, SupIsMaxOverCellsAndRespectsLowerSandwich) {
  const EtaConfig cfg{1.0, 0.6, 24, 1000, 1.0};
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto eta = draw(seed, cfg);
    double brute = 0.0;
    for (GridIndex k = 250; k < 750; ++k) brute = std::max(brute, eta.eta_value(k));
    const auto s = eta.sup({0.25, 0.75});
    EXPECT_DOUBLE_EQ(s.value, brute);
    const auto whole = eta.sup({0.0, 1.0});
    EXPECT_GE(whole.value, eta.weights().front());
    EXPECT_LE(whole.value, eta.sandwich_upper() + whole.coincidence_slack + 1e-12);
  }
}

TEST(Eta, ReproducibleForSeed) {
  const EtaConfig cfg{1.0, 0.7, 16, 1000, 1.0};
  const auto a = draw(9, cfg), b = draw(9, cfg), c = draw(10, cfg);
  EXPECT_EQ(a.weights(), b.weights());
  EXPECT_EQ(a.sup({0, 1}).value, b.sup({0, 1}).value);
  EXPECT_NE(a.weights(), c.weights());
}

TEST(Eta, Validation) {
  RngStream rng(1, 0);
  EXPECT_THROW(EtaRealization(rng, EtaConfig{1.0, 0.7, 3, 1000, 1.0}), ValidationError);  // ell_trunc < ell_beta + 1
  EXPECT_THROW(EtaRealization(rng, EtaConfig{1.0, 0.7, 8, 50, 1.0}), ValidationError);
  EXPECT_THROW(EtaRealization(rng, EtaConfig{0.0, 0.7, 8, 1000, 1.0}), ValidationError);
  EXPECT_THROW(EtaRealization(rng, EtaConfig{1.0, 0.7, 8, 1000, 0.5}), ValidationError);
  const auto eta = draw(1, EtaConfig{1.0, 0.7, 8, 1000, 1.0});
  EXPECT_THROW(eta.sup({0.5, 0.5}), ValidationError);
  EXPECT_THROW(eta.sup({0.0, 1.5}), ValidationError);
}

TEST(EtaExperiments, TailTableIsThreadInvariantAndSane) {
  const EtaConfig cfg{1.0, 0.6, 32, 1000, 1.0};
  const double xs[] = {2.0, 10.0};
  const auto a = eta_tail_experiment(cfg, xs, 10000, 5, 1);
  const auto b = eta_tail_experiment(cfg, xs, 10000, 5, 4);
  EXPECT_EQ(a.samples, b.samples);
  EXPECT_EQ(a.diag.lower_violations, 0u);
  EXPECT_EQ(a.diag.upper_violations_with_slack, 0u);
  for (const auto& r : a.rows) {
    EXPECT_LE(r.ci_low, r.estimate);
    EXPECT_GE(r.ci_high, r.estimate);
    EXPECT_GT(r.estimate, 0.5 * r.lower_curve);
  }
  EXPECT_THROW(eta_tail_experiment(cfg, xs, 100, 5, 1), ValidationError);
}

TEST(EtaExperiments, SelfSimilarityAndStationarity) {
  const EtaConfig cfg{1.0, 0.7, 32, 2000, 1.0};
  const auto ss = selfsimilarity_experiment(cfg, 0.5, 10000, 3, 1);
  EXPECT_LT(ss.ks, 0.03);
  EtaConfig w = cfg;
  w.window = stationarity_window(0.5, 0.5);
  EXPECT_EQ(w.window, 1.0);
  EXPECT_EQ(stationarity_window(1.2, 0.5), 2.0);
  const auto st = stationarity_experiment(w, 0.5, 0.5, 10000, 3, 1);
  EXPECT_LT(st.ks, 0.05);
}

TEST(EtaExperiments, ScalingExponentNearHurst) {
  const EtaConfig cfg{1.0, 0.7, 32, 2000, 1.0};
  const double a[] = {0.125, 0.25, 0.5, 1.0};
  EXPECT_NEAR(scaling_exponent(cfg, a, 10000, 2, 1), cfg.hurst(), 0.05);
}

TEST(EtaExperiments, FrechetEndpointForSmallBeta) {
  // For beta <= 1/2 no two sets meet, so eta((0,1)) is the largest weight: Frechet(alpha).
  const EtaConfig base{0.5, 0.3, 16, 1000, 1.0};
  const double grid[] = {0.3};
  const auto rows = interpolation_check(base, grid, 100000, 1, 1, 512);
  EXPECT_LT(rows[0].ks_frechet, 0.02);
  EXPECT_GT(rows[0].ks_stable, rows[0].ks_frechet);
}

TEST(Eta, HurstExponent) {
  EXPECT_DOUBLE_EQ((EtaConfig{1.0, 0.5, 64, 10000, 1.0}.hurst()), 0.5);
  EXPECT_DOUBLE_EQ((EtaConfig{2.0, 0.6, 64, 10000, 1.0}.hurst()), 0.2);
}

TEST(EtaExperiments, TruncationStability) {
  // Common random numbers: the first 64 sets of a 128-term realization are the 64-term realization.
  // Extra sets only move the sup through grid cells shared by more than ell_beta sets, so the
  // change shrinks as the grid refines.
  auto change = [](double beta, GridIndex res) {
    EtaConfig c64{1.0, beta, 64, res, 1.0}, c128 = c64;
    c128.ell_trunc = 128;
    const OpenInterval unit[] = {{0.0, 1.0}};
    const auto a = sample_eta_sups(c64, unit, 20000, 3, kTagEtaTail, 1);
    const auto b = sample_eta_sups(c128, unit, 20000, 3, kTagEtaTail, 1);
    return stats::ks_two_sample(stats::ecdf(a), stats::ecdf(b));
  };
  const double coarse = change(0.6, 1000), fine = change(0.6, 10000);
  EXPECT_LT(fine, coarse);
  EXPECT_LE(fine, 0.005);
}

TEST(EtaExperiments, DegenerateShiftsGiveIdenticalLaws) {
  const EtaConfig cfg{1.0, 0.7, 32, 1000, 1.0};
  const auto ss = selfsimilarity_experiment(cfg, 1.0, 10000, 6, 1);
  EXPECT_LE(ss.ks, ss.threshold);
  const auto st = stationarity_experiment(cfg, 0.0, 0.5, 10000, 6, 1);
  EXPECT_LE(st.ks, st.threshold);
}

TEST(EtaExperiments, StableEndpointApproachedAsBetaGrowsToOne) {
  const EtaConfig base{0.5, 0.8, 32, 1000, 1.0};
  const double grid[] = {0.8, 0.95};
  const auto rows = interpolation_check(base, grid, 5000, 2, 1, 1024);
  EXPECT_LT(rows[1].ks_stable, rows[0].ks_stable);
  EXPECT_GT(rows[1].median, rows[0].median);
}

TEST(Eta, CoverageExcessShrinksWithResolution) {
  // Cells hit by more than ell_beta sets are a lattice artefact; their fraction falls as the grid refines.
  auto excess = [](GridIndex res) {
    double s = 0.0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
      RngStream rng(seed, 0);
      s += EtaRealization(rng, EtaConfig{1.0, 0.6, 64, res, 1.0}).coverage_excess_fraction();
    }
    return s / 200.0;
  };
  const double e3 = excess(1000), e4 = excess(10000), e5 = excess(100000);
  EXPECT_LT(e4, e3);
  EXPECT_LT(e5, e4);
}
