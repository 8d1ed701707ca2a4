#include <gtest/gtest.h>

#include <cmath>

#include "kernmem/kernmem.hpp"

using namespace kernmem;

// ---- theory: values from 40-digit arbitrary precision ---------------------

TEST(Theory, CapacityBoundsGolden) {
  EXPECT_NEAR(capacity_bound_gaussian(100, 0.25).log_value, 4.562475017959372885, 1e-12);
  EXPECT_NEAR(capacity_bound_gaussian(50, 0.0).log_value, 7.860761813099359213, 1e-12);
  EXPECT_NEAR(capacity_bound_gaussian(100, 0.0).log_value, 14.28404860823934554, 1e-12);
  EXPECT_NEAR(capacity_bound_sphere(100, 0.4).log_value, 13.32450416297333953, 1e-12);
  EXPECT_NEAR(capacity_bound_bipolar(100, 0.5, 0.05).log_value, 10.70192259149633653, 1e-12);
  EXPECT_NEAR(svp_capacity(2), 1.763222834351896710, 1e-13);
  EXPECT_NEAR(svp_capacity(100), 17.47707772385204157, 1e-12);
}

TEST(Theory, LogSpaceSurvivesLargeN) {
  const auto p = capacity_bound_gaussian(8000, 0.0);
  EXPECT_TRUE(std::isfinite(p.log_value));
  EXPECT_TRUE(std::isinf(p.value()));
  EXPECT_NEAR(p.log10_value(), p.log_value / std::log(10.0), 1e-9);
}

TEST(Theory, BoundsDecreaseWithNoiseAndGrowWithN) {
  double prev = 1e300;
  for (double s2 = 0.0; s2 < 0.45; s2 += 0.05) {
    const double v = capacity_bound_gaussian(200, s2).log_value;
    EXPECT_LT(v, prev);
    prev = v;
  }
  for (int n = 30; n < 300; n += 30) {
    EXPECT_LT(capacity_bound_bipolar(n, 0.5, 0.02).log_value, capacity_bound_bipolar(n + 30, 0.5, 0.02).log_value);
  }
}

TEST(Theory, NoiseLevelsFromRadius) {
  EXPECT_DOUBLE_EQ(sigma_max_sq(5.0, 100), 0.25);
  EXPECT_DOUBLE_EQ(rho_max(5.0, 100), 0.0625);
  EXPECT_DOUBLE_EQ(capacity_bound_gaussian_from_radius(100, 5.0).log_value,
                   capacity_bound_gaussian(100, 0.25).log_value);
}

TEST(Theory, DomainErrors) {
  EXPECT_THROW(capacity_bound_gaussian(100, 0.5), DomainError);
  EXPECT_THROW(capacity_bound_sphere(100, 0.75), DomainError);
  EXPECT_THROW(capacity_bound_bipolar(100, 0.5, 0.2), DomainError);
  EXPECT_THROW(capacity_bound_bipolar(100, 0.0, 0.0), DomainError);
  EXPECT_THROW(svp_capacity(1), DomainError);
  EXPECT_THROW(erfc_inverse_bound_check(0.2), DomainError);
  EXPECT_FALSE(capacity_bound_gaussian(10, 0.1).flags.empty());
}

TEST(Theory, ErfcInverseBound) {
  const auto a = erfc_inverse_bound_check(1.0);
  EXPECT_NEAR(a.exact, 6.357311131773994125, 1e-12);
  EXPECT_NEAR(a.bound, 4.818029094698722057, 1e-12);
  const auto b = erfc_inverse_bound_check(3.0);
  EXPECT_NEAR(b.exact / 45268.33416486893494, 1.0, 1e-12);
  EXPECT_NEAR(b.bound / 43087.02693492474875, 1.0, 1e-12);
  for (double x = 0.6; x < 20.0; x += 0.37) {
    const auto c = erfc_inverse_bound_check(x);
    EXPECT_LE(c.bound, c.exact);
  }
}

TEST(Theory, SvpCapacityBelowN) {
  for (int n = 4; n < 2000; n *= 2) {
    EXPECT_LT(svp_capacity(n), n);
    EXPECT_GT(svp_capacity(n), 0.0);
  }
}

// ---- experiment helpers ---------------------------------------------------

TEST(ExperimentHelpers, ZeroCrossing) {
  EXPECT_DOUBLE_EQ(zero_crossing({0, 1, 2}, {2, 1, -1}), 1.5);
  EXPECT_DOUBLE_EQ(zero_crossing({0, 1}, {-1, -2}), 0.0);
  EXPECT_TRUE(std::isnan(zero_crossing({0, 1}, {1, 2})));
}

TEST(ExperimentHelpers, LinearFit) {
  EXPECT_NEAR(linear_fit_r2({1, 2, 3, 4}, {3, 5, 7, 9}), 1.0, 1e-15);
  EXPECT_LT(linear_fit_r2({1, 2, 3, 4}, {1, 3, 1, 3}), 0.3);
}

TEST(ExperimentHelpers, MeanSem) {
  const auto ms = mean_sem({1, 2, 3, 4});
  EXPECT_DOUBLE_EQ(ms.mean, 2.5);
  EXPECT_NEAR(ms.sem, std::sqrt(5.0 / 3.0) / 2.0, 1e-15);
}

// ---- experiments at toy scale ---------------------------------------------

TEST(Experiments, ReportsAreReproducibleAndParallelSafe) {
  SvpConfig cfg;
  cfg.n = 30;
  cfg.m_grid = {3, 60};
  cfg.trials = 6;
  auto a = exp_svp_fraction(cfg);
  cfg.jobs = 3;
  auto b = exp_svp_fraction(cfg);
  ASSERT_EQ(a.rows.size(), b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    EXPECT_EQ(a.rows[i].mean, b.rows[i].mean);
    EXPECT_EQ(a.rows[i].extra, b.rows[i].extra);
  }
  EXPECT_EQ(report_to_csv(a), report_to_csv(b));
}

TEST(Experiments, MarginToyScaleOrdering) {
  MarginConfig cfg;
  cfg.n = 12;
  cfg.loads = {0.05, 0.2};
  cfg.trials = 3;
  cfg.sbp_lr = 1e-3;
  const auto rep = exp_margin_vs_load(cfg);
  EXPECT_EQ(rep.rows.size(), 8u);
  const auto hm = rep.series("hard-margin");
  const auto heb = rep.series("hebbian-pairs");
  for (std::size_t i = 0; i < hm.size(); ++i) EXPECT_GE(hm[i]->mean, heb[i]->mean);
  cfg.rules = {"nonsense"};
  EXPECT_THROW(exp_margin_vs_load(cfg), DomainError);
}

TEST(Experiments, CapacityTrivialRadius) {
  CapacityConfig cfg;
  cfg.n_values = {5};
  cfg.radius = 100.0;
  cfg.trials = 5;
  const auto rep = exp_capacity_gaussian(cfg);
  EXPECT_EQ(rep.rows[0].mean, 1.0);  // the second pattern always collides
  EXPECT_TRUE(std::isnan(rep.extra(rep.rows[0], "log_bound")));
}

TEST(Experiments, CapacityCollisionCap) {
  EXPECT_THROW(sample_until_collision(50, 0.01, 100, 1), ConvergenceError);
}

TEST(Experiments, NoiseRecoveryMonotone) {
  NoiseConfig cfg;
  cfg.n = 50;
  cfg.m = 5;
  cfg.r = 3.0;
  cfg.trials = 200;
  const auto rep = exp_noise_recovery(cfg);
  EXPECT_EQ(rep.rows.front().mean, 1.0);
  for (std::size_t i = 1; i < rep.rows.size(); ++i) EXPECT_LE(rep.rows[i].mean, rep.rows[i - 1].mean + 0.08);
}

TEST(Experiments, HopfieldPinvStoresEverything) {
  HopfieldConfig cfg;
  cfg.n = 30;
  cfg.m_grid = {5, 20};
  cfg.rule = "pinv";
  cfg.flip_count = 1;
  cfg.trials = 3;
  const auto rep = exp_hopfield_capacity(cfg);
  for (const auto& row : rep.rows) EXPECT_EQ(rep.extra(row, "fixed_point_fraction"), 1.0);
  cfg.rule = "other";
  EXPECT_THROW(exp_hopfield_capacity(cfg), DomainError);
}

TEST(Experiments, SdmScanWithoutMonteCarlo) {
  SdmScanConfig cfg;
  cfg.n_in = 20;
  cfg.b_values = {0.8};
  cfg.angle_fractions = {0.0, 0.5};
  cfg.mc_samples = 0;
  const auto rep = exp_sdm_kernel_scan(cfg);
  ASSERT_EQ(rep.rows.size(), 2u);
  EXPECT_GT(rep.rows[0].mean, rep.rows[1].mean);
  EXPECT_TRUE(std::isnan(rep.extra(rep.rows[0], "mc")));
}
