#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "mlmc/diagnostics.hpp"
#include "mlmc/errors.hpp"
#include "mlmc/rng.hpp"
#include "mlmc/statistics.hpp"

namespace mlmc {
namespace {

TEST(ConfidenceInterval, RadiusFactors) {
  EXPECT_NEAR(interval_radius_factor(0.9, CiMethod::kClt), 1.6448536269514722, 1e-12);
  EXPECT_NEAR(interval_radius_factor(0.9, CiMethod::kChebyshev), 3.162277660168379, 1e-12);
  EXPECT_NEAR(interval_radius_factor(0.95, CiMethod::kClt), 1.959963984540054, 1e-12);
  // The rounded multipliers 1.64 and 3.16 quoted for 90% intervals.
  EXPECT_NEAR(interval_radius_factor(0.9, CiMethod::kClt), 1.64, 0.005);
  EXPECT_NEAR(interval_radius_factor(0.9, CiMethod::kChebyshev), 3.16, 0.005);
}

TEST(ConfidenceInterval, ChebyshevToCltRatio) {
  const double ratio = interval_radius_factor(0.9, CiMethod::kChebyshev) /
                       interval_radius_factor(0.9, CiMethod::kClt);
  EXPECT_NEAR(ratio, 1.9225283079013298, 1e-12);
  EXPECT_NEAR(ratio, 3.1623 / 1.6449, 5e-5);
}

TEST(ConfidenceInterval, Bounds) {
  const auto ci = confidence_interval(2.0, 0.5, 0.9, CiMethod::kClt);
  EXPECT_DOUBLE_EQ(ci.lo, 2.0 - 0.5 * 1.6448536269514722);
  EXPECT_DOUBLE_EQ(ci.hi, 2.0 + 0.5 * 1.6448536269514722);
  const auto point = confidence_interval(3.0, 0.0, 0.9, CiMethod::kChebyshev);
  EXPECT_EQ(point.lo, 3.0);
  EXPECT_EQ(point.hi, 3.0);
  EXPECT_THROW(confidence_interval(0.0, -1.0, 0.9, CiMethod::kClt), std::invalid_argument);
  EXPECT_THROW(confidence_interval(0.0, 1.0, 1.0, CiMethod::kClt), std::invalid_argument);
}

TEST(ConfidenceInterval, MethodNames) {
  EXPECT_EQ(parse_ci_method("clt"), CiMethod::kClt);
  EXPECT_EQ(parse_ci_method(to_string(CiMethod::kChebyshev)), CiMethod::kChebyshev);
  EXPECT_THROW(parse_ci_method("bootstrap"), std::invalid_argument);
}

TEST(Ks, NormalStatisticOfASmallSample) {
  // scipy.stats.kstest([-1, 0, 0.5, 2], 'norm')
  const std::vector<double> xs = {-1.0, 0.0, 0.5, 2.0};
  EXPECT_NEAR(ks_normal_statistic(xs, 0.0, 1.0), 0.25, 1e-12);
}

TEST(Ks, NormalStatisticRejectsZeroSpread) {
  const std::vector<double> xs = {1.0, 1.0};
  EXPECT_THROW(ks_normal_statistic(xs, 1.0, 0.0), DegenerateStatisticsError);
}

TEST(Ks, TwoSampleWithTies) {
  // scipy.stats.ks_2samp([1, 2, 2, 3], [2, 2, 4])
  const std::vector<double> a = {1.0, 2.0, 2.0, 3.0};
  const std::vector<double> b = {2.0, 2.0, 4.0};
  EXPECT_NEAR(ks_two_sample(a, b), 0.3333333333333333, 1e-12);
  EXPECT_EQ(ks_two_sample(a, a), 0.0);
}

TEST(Ks, TwoSampleIsSymmetric) {
  GaussianStream normals(RngStreamKey{2, 0, 0, 0, 0});
  std::vector<double> a(300), b(500);
  for (auto& v : a) v = normals.next();
  for (auto& v : b) v = 0.2 + normals.next();
  EXPECT_EQ(ks_two_sample(a, b), ks_two_sample(b, a));
}

TEST(Ks, PilotNullQuantilesAreOrdered) {
  // Estimating both parameters shrinks the statistic (Lilliefors); the
  // known-parameter asymptotic 1% value is 1.628 / sqrt(n).
  const std::int64_t n = 500;
  const double both = ks_normal_null_quantile(n, 0.99, KsNull::kEstimatedMeanAndVariance, 2000, 1);
  const double mean_only = ks_normal_null_quantile(n, 0.99, KsNull::kEstimatedMean, 2000, 1);
  EXPECT_LT(both, mean_only);
  EXPECT_LT(mean_only, 1.628 / std::sqrt(n));
  // Lilliefors asymptotic 1% value 1.035 / sqrt(n).
  EXPECT_NEAR(both * std::sqrt(n), 1.035, 0.1);
  // Two-sample asymptotic 1% value 1.628 sqrt(2 / n).
  const double two = ks_two_sample_null_quantile(n, n, 0.99, 2000, 1);
  EXPECT_NEAR(two / std::sqrt(2.0 / n), 1.628, 0.15);
}

TEST(Bracket, ExactTimeIntegrals) {
  const std::vector<std::tuple<std::int64_t, int, double>> cases = {
      {4, 2, 1.0 / 16}, {3, 3, 1.0 / 9}, {8, 4, 3.0 / 64}};
  for (const auto& [n, m, expected] : cases) {
    const auto check = bracket_expectation_check(n, m, 1.0, 1.0, BracketKind::kTime);
    EXPECT_DOUBLE_EQ(check.estimate, expected);
    EXPECT_DOUBLE_EQ(check.target, expected);
    EXPECT_EQ(check.std_error, 0.0);
  }
}

// Exact rational value of int_0^t (eta_{mn}(s) - eta_n(s)) ds for
// t = k T / n, in units of (T / (mn))^2: each coarse interval contributes
// 0 + 1 + ... + (m-1).
TEST(Bracket, ClosedSumAtGridPoints) {
  for (std::int64_t n : {1, 2, 5, 16, 33}) {
    for (int m : {2, 3, 4, 7}) {
      for (std::int64_t k = 1; k <= n; ++k) {
        const double horizon = 2.0;
        const double t = horizon * static_cast<double>(k) / static_cast<double>(n);
        const std::int64_t units = k * m * (m - 1) / 2;
        const double delta = horizon / static_cast<double>(n * m);
        const auto check = bracket_expectation_check(n, m, horizon, t, BracketKind::kTime);
        EXPECT_NEAR(check.estimate, static_cast<double>(units) * delta * delta,
                    1e-15 * (1.0 + check.estimate));
        EXPECT_NEAR(check.estimate, check.target, 1e-14);
      }
    }
  }
}

TEST(Bracket, OffGridTimeIntegral) {
  // n = 2, m = 2, T = 1, t = 0.85: fine intervals of 0.25 with integrand
  // 0, 0.25, 0, 0.25 (the last one only on [0.75, 0.85]) -> 0.0625 + 0.025.
  const auto check = bracket_expectation_check(2, 2, 1.0, 0.85, BracketKind::kTime);
  EXPECT_NEAR(check.estimate, 0.0625 + 0.025, 1e-15);
}

TEST(Bracket, RejectsTimesOutsideTheHorizon) {
  EXPECT_THROW(bracket_expectation_check(4, 2, 1.0, 1.5, BracketKind::kTime),
               std::invalid_argument);
  EXPECT_THROW(bracket_expectation_check(4, 2, 1.0, 0.0, BracketKind::kTime),
               std::invalid_argument);
}

TEST(Bracket, BrownianCaseOnACoarseGrid) {
  const auto check =
      bracket_expectation_check(32, 2, 1.0, 1.0, BracketKind::kBrownian, 20000, 3);
  EXPECT_DOUBLE_EQ(check.target, 0.25);
  EXPECT_NEAR(check.estimate, check.target, 4 * check.std_error);
}

TEST(BerryEsseen, SyntheticSingleLevel) {
  MlmcPlan plan;
  plan.n = 1;
  plan.alpha = 1.0;
  // s^2 = variance / N = 1, rho = third / N^{3/2} = 0.01.
  const std::vector<LevelStats> stats = {{0, 4, 0.0, 4.0, 0.08, 4}};
  const auto report = berry_esseen(stats, plan);
  EXPECT_DOUBLE_EQ(report.s_n2, 1.0);
  EXPECT_DOUBLE_EQ(report.rho_n, 0.01);
  EXPECT_DOUBLE_EQ(report.bound, 0.06);
}

TEST(BerryEsseen, ScalingIdentities) {
  const auto plan = plan_bak(16, 2, 1.0, 1.0);
  std::vector<LevelStats> stats;
  for (int l = 0; l <= plan.levels; ++l) {
    stats.push_back({l, plan.sample_sizes[l], 0.0, 0.5 / (l + 1), 0.3 / (l + 1), 1});
  }
  const double base = berry_esseen(stats, plan).bound;
  auto doubled = stats;
  for (auto& s : doubled) s.third_abs_moment *= 2;
  EXPECT_NEAR(berry_esseen(doubled, plan).bound, 2 * base, 1e-14 * base);
  auto scaled = stats;
  for (auto& s : scaled) s.variance *= 3;
  EXPECT_NEAR(berry_esseen(scaled, plan).bound, base * std::pow(3.0, -1.5),
              1e-14 * base);
}

TEST(BerryEsseen, DegenerateVariances) {
  const auto plan = plan_bak(4, 2, 1.0, 1.0);
  std::vector<LevelStats> stats;
  for (int l = 0; l <= plan.levels; ++l) {
    stats.push_back({l, plan.sample_sizes[l], 1.0, 0.0, 0.0, 1});
  }
  EXPECT_THROW(berry_esseen(stats, plan), DegenerateStatisticsError);
}

TEST(CltExperiment, DegenerateModel) {
  const auto model = make_gbm(1.0, 0.0, 0.0, 1.0);
  const auto exp = run_clt_experiment(model, identity_payoff(), plan_bak(4, 2, 1.0, 1.0),
                                      100, 1.0, 7);
  EXPECT_TRUE(exp.degenerate);
  EXPECT_EQ(exp.ks_statistic, 0.0);
  EXPECT_EQ(exp.standardized_errors.size(), 100u);
  for (double e : exp.standardized_errors) EXPECT_EQ(e, 0.0);
}

TEST(CltExperiment, NeedsTruthAndReplications) {
  const auto model = make_gbm(1.0, 0.0, 1.0, 1.0);
  const auto plan = plan_bak(4, 2, 1.0, 1.0);
  EXPECT_THROW(run_clt_experiment(model, identity_payoff(), plan, 100, std::nullopt, 1),
               std::invalid_argument);
  EXPECT_THROW(run_clt_experiment(model, identity_payoff(), plan, 99, 1.0, 1),
               std::invalid_argument);
}

TEST(CltExperiment, HalfRateRemovesTheBias) {
  const auto model = make_gbm(1.0, 0.0, 1.0, 1.0);
  const auto plan = plan_bak(16, 2, 0.5, 1.0);
  const auto exp = run_clt_experiment(model, identity_payoff(), plan, 500, 1.0, 11);
  EXPECT_NEAR(exp.sample_mean, 0.0, 4 * std::sqrt(exp.sample_variance / 500));
  EXPECT_LE(exp.ks_statistic, 1.0);
  EXPECT_GE(exp.ks_statistic, 0.0);
}

TEST(Coverage, DegenerateModelAlwaysCovers) {
  const auto model = make_gbm(1.0, 0.0, 0.0, 1.0);
  EXPECT_EQ(coverage_experiment(model, identity_payoff(), plan_bak(4, 2, 1.0, 1.0), 100,
                                1.0, 0.9, CiMethod::kClt, 1),
            1.0);
}

TEST(Coverage, FromReplicates) {
  const std::vector<ReplicateSummary> reps = {{0.0, 1.0}, {2.0, 1.0}, {5.0, 1.0}, {1.0, 0.0}};
  // Intervals of radius 1.645: [-1.6, 1.6], [0.4, 3.6], [3.4, 6.6], [1, 1].
  EXPECT_DOUBLE_EQ(coverage_from_replicates(reps, 1.0, 0.9, CiMethod::kClt), 0.75);
  EXPECT_DOUBLE_EQ(coverage_from_replicates(reps, 4.0, 0.9, CiMethod::kChebyshev), 0.5);
}

}  // namespace
}  // namespace mlmc
