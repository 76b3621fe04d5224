#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <vector>

#include "oracles.hpp"
#include "smt/memory_test.hpp"
#include "smt/power_harness.hpp"

namespace {

using smt::Alpha;
using smt::BoxSpec;
using smt::FieldSpec;
using smt::LatticePoint;
using smt::RngStream;
using smt::TestConfig;

TEST(SmallHalfWidthTest, FloorOfPower) {
  EXPECT_EQ(smt::small_half_width(100, 0.65), 19);
  EXPECT_EQ(smt::small_half_width(4, 0.5), 2);
  EXPECT_EQ(smt::small_half_width(1, 0.3), 1);
  EXPECT_EQ(smt::small_half_width(80, 0.70), 21);
  EXPECT_EQ(smt::small_half_width(1000, 0.70), 125);
  EXPECT_EQ(smt::small_half_width(1000, 1.0 / 3.0), 10);
}

TEST(BoxTest, OriginBox) {
  EXPECT_EQ(smt::origin_box(2, 2).size(), 25u);
  EXPECT_EQ(smt::origin_box(1, 3).size(), 27u);
  for (std::int64_t n = 1; n < 5; ++n) {
    for (std::size_t d = 1; d < 5; ++d) {
      const auto box = smt::origin_box(n, d);
      EXPECT_TRUE(box.contains(LatticePoint::origin(d)));
      EXPECT_EQ(box.half_width, n);
    }
  }
  EXPECT_THROW(smt::origin_box(0, 2), std::domain_error);
}

TEST(BoxTest, ShiftedBox) {
  const auto box = smt::shifted_box(100, 0.65, 2);
  EXPECT_EQ(box.center, LatticePoint({219, 0}));  // 2n + floor(n^rho) = 200 + 19
  EXPECT_EQ(box.half_width, 19);

  const auto line = smt::shifted_box(4, 0.5, 1);
  EXPECT_EQ(line.center, LatticePoint({10}));
  std::vector<std::int64_t> pts;
  line.region().for_each_point([&](const LatticePoint& p) { pts.push_back(p[0]); });
  EXPECT_EQ(pts, (std::vector<std::int64_t>{8, 9, 10, 11, 12}));
}

TEST(BoxTest, BoxesAreDisjointWithGapN) {
  for (std::int64_t n = 1; n <= 50; ++n) {
    for (double rho : {0.3, 0.65, 0.9}) {
      const auto big = smt::origin_box(n, 1);
      const auto small = smt::shifted_box(n, rho, 1);
      std::set<std::int64_t> big_pts;
      big.region().for_each_point([&](const LatticePoint& p) { big_pts.insert(p[0]); });
      std::int64_t min_small = small.center[0];
      small.region().for_each_point([&](const LatticePoint& p) {
        EXPECT_FALSE(big_pts.count(p[0]));
        min_small = std::min(min_small, p[0]);
      });
      EXPECT_EQ(min_small - *big_pts.rbegin(), n);
    }
  }
  // Full enumeration in d = 2 for small n.
  for (std::int64_t n = 1; n <= 8; ++n) {
    const auto big = smt::oracle::enumerate_cube({0, 0}, n);
    const auto small_box = smt::shifted_box(n, 0.65, 2);
    const auto small = smt::oracle::enumerate_cube(small_box.center.coords, small_box.half_width);
    std::set<std::vector<std::int64_t>> seen(big.begin(), big.end());
    for (const auto& p : small) EXPECT_FALSE(seen.count(p));
  }
}

// |X| = 1 on {-1, 0, 1} and 2 on the shifted box {2, 3, 4}.
TEST(ComputeStatisticTest, HandBuiltLine) {
  for (double a : {0.5, 1.0, 1.5}) {
    const Alpha alpha(a);
    const auto spec = FieldSpec::iid(alpha, 1);
    const BoxSpec big = smt::origin_box(1, 1);
    const BoxSpec small = smt::shifted_box(1, 0.5, 1);
    ASSERT_EQ(small.center, LatticePoint({3}));
    const auto r = smt::FieldRealization::from_latent(
        spec, {big, small}, {{big.region(), {1.0, -1.0, 1.0}}, {small.region(), {-2.0, 2.0, 2.0}}});
    const auto result = smt::compute_statistic(r, TestConfig{alpha, 1, 1, 0.5, 0.1});
    EXPECT_DOUBLE_EQ(result.u_n, std::pow(3.0, -1.0 / a));
    EXPECT_DOUBLE_EQ(result.v_n, 2.0 * std::pow(3.0, -1.0 / a));
    EXPECT_DOUBLE_EQ(result.t_n, 0.5);
    EXPECT_EQ(result.reject, 0.5 < smt::critical_value(alpha, 0.1));
  }
}

TEST(ComputeStatisticTest, ZeroSmallMaximumIsAnError) {
  const Alpha alpha(1.0);
  const BoxSpec big = smt::origin_box(1, 1);
  const BoxSpec small = smt::shifted_box(1, 0.5, 1);
  const auto r = smt::FieldRealization::from_latent(
      FieldSpec::iid(alpha, 1), {big, small}, {{big.region(), {1.0, 1.0, 1.0}}, {small.region(), {0.0, 0.0, 0.0}}});
  EXPECT_THROW(smt::compute_statistic(r, TestConfig{alpha, 1, 1, 0.5, 0.1}), std::runtime_error);
}

TEST(ComputeStatisticTest, ScaleInvariance) {
  RngStream seeds(55, 0);
  for (auto spec : {FieldSpec::iid(Alpha(0.8), 2), FieldSpec::subgaussian(Alpha(1.6), 2),
                    FieldSpec::effective_dim_ma1(Alpha(1.2))}) {
    const TestConfig cfg{spec.alpha(), spec.dim(), 20, 0.65, 0.1};
    const auto r = smt::realize(spec, RngStream(1, seeds.next_u64()),
                                {smt::origin_box(cfg.n, cfg.dim), smt::shifted_box(cfg.n, cfg.rho, cfg.dim)});
    const auto base = smt::compute_statistic(r, cfg);
    for (double c : {1e-8, 0.37, 3.0, 1e9}) {
      const auto scaled = smt::compute_statistic(r.scaled(c), cfg);
      EXPECT_NEAR(scaled.t_n, base.t_n, 1e-12 * base.t_n);
      EXPECT_EQ(scaled.reject, base.reject);
      EXPECT_NEAR(scaled.u_n, c * base.u_n, 1e-12 * c * base.u_n);
    }
  }
}

TEST(ComputeStatisticTest, SubGaussianMixingCancelsExactly) {
  for (double a : {0.7, 1.3, 1.7}) {
    const auto spec = FieldSpec::subgaussian(Alpha(a), 2);
    const TestConfig cfg{spec.alpha(), 2, 30, 0.65, 0.1};
    for (std::uint64_t rep = 0; rep < 5; ++rep) {
      const auto r = smt::realize(spec, smt::replication_stream(3, cfg, rep),
                                  {smt::origin_box(cfg.n, 2), smt::shifted_box(cfg.n, cfg.rho, 2)});
      const auto sampled = smt::compute_statistic(r, cfg);
      const auto forced = smt::compute_statistic(r.with_mixing_variable(1.0), cfg);
      EXPECT_EQ(sampled.t_n, forced.t_n);
      EXPECT_EQ(sampled.reject, forced.reject);
    }
  }
}

TEST(ComputeStatisticTest, DecisionConsistencyOverRandomConfigs) {
  RngStream pick(99, 1);
  for (int i = 0; i < 200; ++i) {
    const Alpha alpha(0.05 + 1.9 * pick.uniform());
    const double beta = 0.01 + 0.98 * pick.uniform();
    const double rho = 0.05 + 0.9 * pick.uniform();
    const std::int64_t n = 1 + static_cast<std::int64_t>(pick.next_u64() % 15);
    const std::size_t d = 1 + pick.next_u64() % 3;
    const TestConfig cfg{alpha, d, n, rho, beta};
    const auto result = smt::run_replication(FieldSpec::iid(alpha, d), cfg, RngStream(7, i));
    EXPECT_EQ(result.reject, result.t_n < smt::critical_value(alpha, beta));
    EXPECT_EQ(result.tau_beta, smt::critical_value(alpha, beta));
    EXPECT_NEAR(result.t_n, result.u_n / result.v_n, 1e-12 * result.t_n);
    EXPECT_GT(result.u_n, 0.0);
    EXPECT_GT(result.v_n, 0.0);
  }
}

TEST(ComputeStatisticTest, RejectsMismatchedConfig) {
  const auto spec = FieldSpec::iid(Alpha(1.0), 2);
  const auto r = smt::realize(spec, RngStream(1, 1), {smt::origin_box(5, 2), smt::shifted_box(5, 0.65, 2)});
  EXPECT_THROW(smt::compute_statistic(r, TestConfig{Alpha(1.1), 2, 5, 0.65, 0.1}), std::invalid_argument);
  EXPECT_THROW(smt::compute_statistic(r, TestConfig{Alpha(1.0), 2, 5, 1.0, 0.1}), std::domain_error);
  EXPECT_THROW(smt::compute_statistic(r, TestConfig{Alpha(1.0), 2, 5, 0.65, 0.0}), std::domain_error);
  // Support does not cover a larger origin box.
  EXPECT_THROW(smt::compute_statistic(r, TestConfig{Alpha(1.0), 2, 6, 0.65, 0.1}), std::out_of_range);
}

// Moderate-size version of the null-limit checks; the full n = 100, 2000
// replication versions run in the acceptance suite.
TEST(NullLimitTest, UnAndTnFollowLimitLaws) {
  const Alpha alpha(1.2);
  const TestConfig cfg{alpha, 2, 40, 0.65, 0.1};
  const auto results = smt::statistic_sample(FieldSpec::iid(alpha, 2), cfg, 1000, 2718);
  std::vector<double> u, t;
  for (const auto& r : results) {
    u.push_back(r.u_n);
    t.push_back(r.t_n);
  }
  const smt::LimitLaw law(alpha, 1.0);
  EXPECT_LT(smt::ks_distance(u, [&](double y) { return smt::block_max_limit_cdf(law, y); }), 0.06);
  EXPECT_LT(smt::ks_distance(t, [&](double x) { return smt::null_cdf_T(alpha, x); }), 0.06);
}

}  // namespace
