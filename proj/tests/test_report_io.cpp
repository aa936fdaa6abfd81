#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "mlmc/report_io.hpp"

namespace mlmc {
namespace {

using json = nlohmann::ordered_json;

TEST(FormatNumber, ShortestRoundTrip) {
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(2.0), "2");
  EXPECT_EQ(format_number(-1.5e-300), "-1.5e-300");
  EXPECT_EQ(format_number(std::numeric_limits<double>::quiet_NaN()), "nan");
  EXPECT_EQ(format_number(-std::numeric_limits<double>::infinity()), "-inf");
  const double awkward = 1.0 / 3.0;
  EXPECT_EQ(std::stod(format_number(awkward)), awkward);
}

EstimateReport sample_report() {
  const auto model = make_gbm(1.0, 0.05, 0.2, 1.0);
  return estimate(model, identity_payoff(), plan_bak(8, 2, 1.0, 1.0), 4);
}

TEST(Json, ReportRoundTripIsIdempotent) {
  const auto report = sample_report();
  const std::string first = to_json(report).dump(2);
  const auto parsed = report_from_json(json::parse(first));
  const std::string second = to_json(parsed).dump(2);
  EXPECT_EQ(first, second);
  EXPECT_EQ(parsed.estimate, report.estimate);
  EXPECT_EQ(parsed.plan.sample_sizes, report.plan.sample_sizes);
}

TEST(Json, PlanRoundTrip) {
  BakOptions options;
  options.level0_rule = Level0Rule::kWeighted;
  options.weights = {1.0, 0.5, 2.0};
  const auto plan = plan_bak(27, 3, 0.75, 1.0, options);
  const auto back = plan_from_json(json::parse(to_json(plan).dump()));
  EXPECT_EQ(to_json(back).dump(), to_json(plan).dump());
  const auto giles = plan_giles(16, 2, 1.0, 1.0, 1.5);
  EXPECT_EQ(to_json(plan_from_json(to_json(giles))).dump(), to_json(giles).dump());
}

TEST(Json, ReportFieldsInOrder) {
  const auto j = to_json(sample_report());
  std::vector<std::string> keys;
  for (const auto& item : j.items()) keys.push_back(item.key());
  EXPECT_EQ(keys, (std::vector<std::string>{
                      "estimate", "standard_error", "confidence_interval",
                      "level_stats", "total_cost", "plan", "bias_proxy", "seed",
                      "replication"}));
}

TEST(Json, RejectsUnknownEnumerations) {
  auto j = to_json(plan_bak(16, 2, 1.0, 1.0));
  j["allocator"] = "adaptive";
  EXPECT_THROW(plan_from_json(j), std::invalid_argument);
}

TEST(Csv, LevelStatsRows) {
  const std::vector<LevelStats> stats = {{0, 10, 1.5, 0.25, 0.125, 10},
                                         {1, 4, -0.5, 2.0, 3.0, 12}};
  std::ostringstream out;
  write_level_stats_csv(out, stats);
  EXPECT_EQ(out.str(),
            "level,count,mean,variance,third_abs_moment,cost\n"
            "0,10,1.5,0.25,0.125,10\n"
            "1,4,-0.5,2,3,12\n");
}

TEST(Csv, SingleColumn) {
  const std::vector<double> values = {0.1, -2.0};
  std::ostringstream out;
  write_column_csv(out, "value", values);
  EXPECT_EQ(out.str(), "value\n0.1\n-2\n");
}

}  // namespace
}  // namespace mlmc
