#include "mlmc/report_io.hpp"

#include <charconv>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace mlmc {

using json = nlohmann::ordered_json;

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

namespace {

Allocator parse_allocator(const std::string& text) {
  if (text == "bak") return Allocator::kBak;
  if (text == "giles") return Allocator::kGiles;
  throw std::invalid_argument("unknown allocator: " + text);
}

Level0Rule parse_level0_rule(const std::string& text) {
  if (text == "log-power") return Level0Rule::kLogPower;
  if (text == "weighted") return Level0Rule::kWeighted;
  throw std::invalid_argument("unknown level-0 rule: " + text);
}

}  // namespace

json to_json(const MlmcPlan& plan) {
  json j;
  j["allocator"] = std::string(to_string(plan.allocator));
  j["m"] = plan.m;
  j["n"] = plan.n;
  j["alpha"] = plan.alpha;
  j["T"] = plan.horizon;
  j["L"] = plan.levels;
  j["weights"] = plan.weights;
  j["a0"] = plan.a0;
  j["beta0"] = plan.beta0;
  j["level0_rule"] = std::string(to_string(plan.level0_rule));
  j["c2"] = plan.c2;
  j["sample_sizes"] = plan.sample_sizes;
  return j;
}

MlmcPlan plan_from_json(const json& j) {
  MlmcPlan plan;
  plan.allocator = parse_allocator(j.at("allocator").get<std::string>());
  plan.m = j.at("m").get<int>();
  plan.n = j.at("n").get<std::int64_t>();
  plan.alpha = j.at("alpha").get<double>();
  plan.horizon = j.at("T").get<double>();
  plan.levels = j.at("L").get<int>();
  plan.weights = j.at("weights").get<std::vector<double>>();
  plan.a0 = j.at("a0").get<double>();
  plan.beta0 = j.at("beta0").get<double>();
  plan.level0_rule = parse_level0_rule(j.at("level0_rule").get<std::string>());
  plan.c2 = j.at("c2").get<double>();
  plan.sample_sizes = j.at("sample_sizes").get<std::vector<std::int64_t>>();
  return plan;
}

json to_json(const LevelStats& stats) {
  json j;
  j["level"] = stats.level;
  j["count"] = stats.count;
  j["mean"] = stats.mean;
  j["variance"] = stats.variance;
  j["third_abs_moment"] = stats.third_abs_moment;
  j["cost"] = stats.cost;
  return j;
}

json to_json(const ConfidenceInterval& ci) {
  json j;
  j["lo"] = ci.lo;
  j["hi"] = ci.hi;
  j["level"] = ci.level;
  j["method"] = std::string(to_string(ci.method));
  return j;
}

json to_json(const EstimateReport& report) {
  json j;
  j["estimate"] = report.estimate;
  j["standard_error"] = report.standard_error;
  j["confidence_interval"] = to_json(report.confidence_interval);
  json levels = json::array();
  for (const auto& s : report.level_stats) {
    levels.push_back(to_json(s));
  }
  j["level_stats"] = std::move(levels);
  j["total_cost"] = report.total_cost;
  j["plan"] = to_json(report.plan);
  j["bias_proxy"] = report.bias_proxy;
  j["seed"] = report.seed;
  j["replication"] = report.replication;
  return j;
}

EstimateReport report_from_json(const json& j) {
  EstimateReport report;
  report.estimate = j.at("estimate").get<double>();
  report.standard_error = j.at("standard_error").get<double>();
  const auto& ci = j.at("confidence_interval");
  report.confidence_interval = {ci.at("lo").get<double>(),
                                ci.at("hi").get<double>(),
                                ci.at("level").get<double>(),
                                parse_ci_method(ci.at("method").get<std::string>())};
  for (const auto& s : j.at("level_stats")) {
    LevelStats stats;
    stats.level = s.at("level").get<int>();
    stats.count = s.at("count").get<std::int64_t>();
    stats.mean = s.at("mean").get<double>();
    stats.variance = s.at("variance").get<double>();
    stats.third_abs_moment = s.at("third_abs_moment").get<double>();
    stats.cost = s.at("cost").get<std::int64_t>();
    report.level_stats.push_back(stats);
  }
  report.total_cost = j.at("total_cost").get<std::int64_t>();
  report.plan = plan_from_json(j.at("plan"));
  report.bias_proxy = j.at("bias_proxy").get<double>();
  report.seed = j.at("seed").get<std::uint64_t>();
  report.replication = j.at("replication").get<std::uint32_t>();
  return report;
}

json to_json(const LimitVariance& result) {
  json j;
  j["sigma2"] = result.sigma2;
  j["std_error"] = result.std_error;
  j["mean"] = result.mean;
  j["samples"] = result.samples;
  return j;
}

json to_json(const BerryEsseenReport& report) {
  json j;
  j["s_n2"] = report.s_n2;
  j["rho_n"] = report.rho_n;
  j["bound"] = report.bound;
  return j;
}

json to_json(const BracketCheck& check) {
  json j;
  j["estimate"] = check.estimate;
  j["target"] = check.target;
  j["std_error"] = check.std_error;
  return j;
}

json to_json(const CltExperiment& experiment) {
  json j;
  j["replications"] = experiment.replications;
  j["plan"] = to_json(experiment.plan);
  j["ks_statistic"] = experiment.ks_statistic;
  j["sample_mean"] = experiment.sample_mean;
  j["sample_variance"] = experiment.sample_variance;
  j["reference_variance"] = experiment.reference_variance;
  j["ks_null"] = experiment.ks_null == KsNull::kEstimatedMean
                     ? "estimated-mean"
                     : "estimated-mean-and-variance";
  j["degenerate"] = experiment.degenerate;
  return j;
}

void write_level_stats_csv(std::ostream& out,
                           std::span<const LevelStats> stats) {
  out << "level,count,mean,variance,third_abs_moment,cost\n";
  for (const auto& s : stats) {
    out << s.level << ',' << s.count << ',' << format_number(s.mean) << ','
        << format_number(s.variance) << ','
        << format_number(s.third_abs_moment) << ',' << s.cost << '\n';
  }
}

void write_column_csv(std::ostream& out, const std::string& column,
                      std::span<const double> values) {
  out << column << '\n';
  for (double v : values) {
    out << format_number(v) << '\n';
  }
}

}  // namespace mlmc
