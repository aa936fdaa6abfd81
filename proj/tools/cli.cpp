#include "cli.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mlmc/diagnostics.hpp"
#include "mlmc/errors.hpp"
#include "mlmc/limit_law.hpp"
#include "mlmc/mlmc.hpp"
#include "mlmc/report_io.hpp"
#include "mlmc/statistics.hpp"

namespace mlmc::cli {
namespace {

using json = nlohmann::ordered_json;

struct CommonOptions {
  std::uint64_t seed = 0;
  unsigned threads = 0;
  bool deterministic_reduction = false;
  std::string format = "json";
  std::string out_path;
  bool verbose = false;
};

struct ModelOptions {
  std::string model = "gbm";
  double x0 = 1.0;
  double mu = 0.0;
  double vol = 1.0;
  double horizon = 1.0;
  std::string payoff = "identity";
  double strike = 1.0;
  std::optional<double> true_value;
};

struct PlanOptions {
  std::int64_t n = 16;
  int m = 2;
  double alpha = 1.0;
  std::string allocator = "bak";
  std::optional<double> c2;
  double beta0 = 1.9;
  double a0 = 1.0;
  std::string level0 = "log-power";
  std::vector<double> weights;
};

void add_common(CLI::App* app, CommonOptions& o) {
  app->add_option("--seed", o.seed, "Master seed")->capture_default_str();
  app->add_option("--threads", o.threads, "Worker threads, 0 = all available")
      ->capture_default_str();
  app->add_flag("--deterministic-reduction", o.deterministic_reduction,
                "Require byte-identical output for any worker count "
                "(always honoured; sums use a fixed pairwise tree)");
  app->add_option("--format", o.format, "Output format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  app->add_option("--out", o.out_path, "Write output here instead of stdout");
  app->add_flag("--verbose", o.verbose, "One log line per level on stderr");
}

void add_model(CLI::App* app, ModelOptions& o) {
  app->add_option("--model", o.model, "Built-in model")
      ->check(CLI::IsMember({"gbm"}))
      ->capture_default_str();
  app->add_option("--x0", o.x0, "Initial state")->capture_default_str();
  app->add_option("--mu", o.mu, "Drift rate")->capture_default_str();
  app->add_option("--vol", o.vol, "Volatility")->capture_default_str();
  app->add_option("--T", o.horizon, "Horizon")->capture_default_str();
  app->add_option("--payoff", o.payoff, "Payoff")
      ->check(CLI::IsMember({"identity", "call"}))
      ->capture_default_str();
  app->add_option("--strike", o.strike, "Call strike")->capture_default_str();
  app->add_option("--true-value", o.true_value,
                  "Reference value of E f(X_T) (default: closed form)");
}

void add_plan(CLI::App* app, PlanOptions& o, bool with_n = true) {
  if (with_n) {
    app->add_option("--n", o.n, "Finest step count, a power of m")
        ->capture_default_str();
  }
  app->add_option("--m", o.m, "Refinement factor")->capture_default_str();
  app->add_option("--alpha", o.alpha, "Weak-error rate in [1/2, 1]")
      ->capture_default_str();
  app->add_option("--allocator", o.allocator, "Sample-size allocation")
      ->check(CLI::IsMember({"bak", "giles"}))
      ->capture_default_str();
  app->add_option("--c2", o.c2, "Variance constant (giles)");
  app->add_option("--beta0", o.beta0, "N_0 = n^{2 alpha} (log n)^beta0 (bak)")
      ->capture_default_str();
  app->add_option("--a0", o.a0, "Level-0 weight for --level0 weighted (bak)")
      ->capture_default_str();
  app->add_option("--level0", o.level0, "Level-0 sample rule (bak)")
      ->check(CLI::IsMember({"log-power", "weighted"}))
      ->capture_default_str();
  app->add_option("--weights", o.weights, "a_1,...,a_L (bak; default all 1)")
      ->delimiter(',');
}

MlmcPlan build_plan(const PlanOptions& o, std::int64_t n, double horizon) {
  if (o.allocator == "giles") {
    if (!o.c2) {
      throw std::invalid_argument("giles allocation needs --c2");
    }
    return plan_giles(n, o.m, o.alpha, horizon, *o.c2);
  }
  BakOptions options;
  options.weights = o.weights;
  options.a0 = o.a0;
  options.beta0 = o.beta0;
  options.level0_rule =
      o.level0 == "weighted" ? Level0Rule::kWeighted : Level0Rule::kLogPower;
  return plan_bak(n, o.m, o.alpha, horizon, options);
}

SdeModeld build_model(const ModelOptions& o) {
  return make_gbm(o.x0, o.mu, o.vol, o.horizon);
}

Payoffd build_payoff(const ModelOptions& o) {
  if (o.payoff == "call") {
    return call_payoff(o.strike);
  }
  return identity_payoff();
}

AnalyticReference build_reference(const ModelOptions& o) {
  if (o.payoff == "identity") {
    return gbm_identity_reference(o.x0, o.mu, o.vol, o.horizon);
  }
  if (o.vol > 0.0) {
    return black_scholes_call_reference(o.x0, o.mu, o.vol, o.horizon, o.strike);
  }
  return {};
}

std::optional<double> true_value(const ModelOptions& o) {
  if (o.true_value) {
    return o.true_value;
  }
  return build_reference(o).exact_expectation;
}

double require_true_value(const ModelOptions& o) {
  const auto value = true_value(o);
  if (!value) {
    throw std::invalid_argument(
        "no closed-form reference for this model; pass --true-value");
  }
  return *value;
}

/// Writes to --out when given, otherwise to the caller's stream.
class Output {
 public:
  Output(const CommonOptions& o, std::ostream& fallback) : stream_(&fallback) {
    if (!o.out_path.empty()) {
      file_.open(o.out_path);
      if (!file_) {
        throw std::invalid_argument("cannot open --out file " + o.out_path);
      }
      stream_ = &file_;
    }
  }
  std::ostream& operator*() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

void emit_json(const CommonOptions& o, std::ostream& out, const json& j) {
  Output sink(o, out);
  *sink << j.dump(2) << '\n';
}

void write_artifact(const std::string& dir, const std::string& name,
                    const std::string& content) {
  if (dir.empty()) {
    return;
  }
  std::filesystem::create_directories(dir);
  const auto path = std::filesystem::path(dir) / name;
  std::ofstream file(path);
  if (!file) {
    throw std::invalid_argument("cannot write artifact " + path.string());
  }
  file << content;
}

std::string column_csv(const std::string& column,
                       const std::vector<double>& values) {
  std::ostringstream s;
  write_column_csv(s, column, values);
  return s.str();
}

// ---------------------------------------------------------------------------
// plan

struct PlanCommand {
  CommonOptions common;
  PlanOptions plan;
  double horizon = 1.0;

  void attach(CLI::App* app) {
    add_common(app, common);
    add_plan(app, plan);
    app->add_option("--T", horizon, "Horizon")->capture_default_str();
  }

  void run(std::ostream& out) const {
    const MlmcPlan p = build_plan(plan, plan.n, horizon);
    if (common.format == "csv") {
      Output sink(common, out);
      *sink << "level,samples,fine_steps,coarse_steps,cost\n";
      for (int l = 0; l <= p.levels; ++l) {
        const std::int64_t fine = l == 0 ? 1 : integer_power(p.m, l);
        const std::int64_t coarse = l == 0 ? 0 : integer_power(p.m, l - 1);
        const std::int64_t samples = p.sample_sizes[static_cast<std::size_t>(l)];
        *sink << l << ',' << samples << ',' << fine << ',' << coarse << ','
              << samples * (fine + coarse) << '\n';
      }
      return;
    }
    json j = to_json(p);
    j["complexity"] = complexity(p);
    emit_json(common, out, j);
  }
};

// ---------------------------------------------------------------------------
// estimate

struct EstimateCommand {
  CommonOptions common;
  ModelOptions model;
  PlanOptions plan;
  double confidence = 0.9;
  std::string ci = "clt";

  void attach(CLI::App* app) {
    add_common(app, common);
    add_model(app, model);
    add_plan(app, plan);
    app->add_option("--confidence", confidence, "Interval level")
        ->capture_default_str();
    app->add_option("--ci", ci, "Interval method")
        ->check(CLI::IsMember({"clt", "chebyshev"}))
        ->capture_default_str();
  }

  void run(std::ostream& out, std::ostream& err) const {
    const auto sde = build_model(model);
    const auto f = build_payoff(model);
    const MlmcPlan p = build_plan(plan, plan.n, model.horizon);
    EstimateOptions options;
    options.threads = common.threads;
    options.deterministic_reduction = common.deterministic_reduction;
    options.confidence = confidence;
    options.ci_method = parse_ci_method(ci);
    const EstimateReport report = estimate(sde, f, p, common.seed, options);
    if (common.verbose) {
      for (const auto& s : report.level_stats) {
        err << "level " << s.level << ": N=" << s.count
            << " mean=" << format_number(s.mean)
            << " variance=" << format_number(s.variance) << " cost=" << s.cost
            << '\n';
      }
    }
    if (common.format == "csv") {
      Output sink(common, out);
      write_level_stats_csv(*sink, report.level_stats);
      return;
    }
    emit_json(common, out, to_json(report));
  }
};

// ---------------------------------------------------------------------------
// limit-var

struct LimitVarCommand {
  CommonOptions common;
  ModelOptions model;
  std::int64_t samples = 100000;
  std::int64_t grid_steps = 1024;

  void attach(CLI::App* app) {
    add_common(app, common);
    add_model(app, model);
    app->add_option("--samples", samples, "Number of limit draws")
        ->capture_default_str();
    app->add_option("--grid-steps", grid_steps, "Euler grid for X, Z and B")
        ->capture_default_str();
  }

  void run(std::ostream& out) const {
    LimitSimConfig config;
    config.n_steps = grid_steps;
    config.samples = samples;
    config.master_seed = common.seed;
    config.threads = common.threads;
    const auto draws = limit_samples(build_model(model), build_payoff(model), config);
    if (common.format == "csv") {
      Output sink(common, out);
      write_column_csv(*sink, "value", draws);
      return;
    }
    json j = to_json(summarize_limit_samples(draws));
    j["grid_steps"] = grid_steps;
    const auto reference = build_reference(model);
    if (reference.exact_limit_variance) {
      j["exact_limit_variance"] = *reference.exact_limit_variance;
    }
    emit_json(common, out, j);
  }
};

// ---------------------------------------------------------------------------
// verify

struct VerifyCommand {
  CommonOptions common;
  ModelOptions model;
  PlanOptions plan;
  std::string experiment;
  std::string artifacts;
  // bracket
  double t = 1.0;
  std::string kind = "time";
  // shared sample counts
  std::int64_t samples = 100000;
  std::int64_t replications = 500;
  // clt
  std::string reference_variance = "sample";
  std::int64_t grid_steps = 1024;
  std::int64_t limit_samples_count = 100000;
  std::int64_t pilot_replications = 2000;
  double ks_probability = 0.99;
  // coverage
  std::vector<double> confidence_levels = {0.9};
  // berry-esseen
  std::vector<std::int64_t> n_list = {16, 32, 64, 128, 256};
  // two-level-law
  int level = 8;

  void attach(CLI::App* app) {
    add_common(app, common);
    add_model(app, model);
    add_plan(app, plan);
    app->add_option("--experiment", experiment, "Experiment to run")
        ->check(CLI::IsMember(
            {"clt", "bracket", "coverage", "berry-esseen", "two-level-law"}))
        ->required();
    app->add_option("--artifacts", artifacts,
                    "Directory for CSV artifacts (sample sets, coverage table)");
    app->add_option("--t", t, "bracket: integration end point")
        ->capture_default_str();
    app->add_option("--kind", kind, "bracket: time or brownian")
        ->check(CLI::IsMember({"time", "brownian"}))
        ->capture_default_str();
    app->add_option("--samples", samples,
                    "bracket/two-level-law: Monte Carlo sample count")
        ->capture_default_str();
    app->add_option("--replications", replications,
                    "clt/coverage: independent estimator runs")
        ->capture_default_str();
    app->add_option("--reference-variance", reference_variance,
                    "clt: variance of the KS reference Gaussian")
        ->check(CLI::IsMember({"sample", "analytic", "simulated"}))
        ->capture_default_str();
    app->add_option("--grid-steps", grid_steps, "Limit-law Euler grid")
        ->capture_default_str();
    app->add_option("--limit-samples", limit_samples_count,
                    "clt: limit draws for --reference-variance simulated")
        ->capture_default_str();
    app->add_option("--pilot-replications", pilot_replications,
                    "Null simulations for the KS threshold (0 = skip)")
        ->capture_default_str();
    app->add_option("--ks-probability", ks_probability,
                    "Quantile of the KS null reported as threshold")
        ->capture_default_str();
    app->add_option("--confidence-levels", confidence_levels,
                    "coverage: nominal levels")
        ->delimiter(',');
    app->add_option("--n-list", n_list, "berry-esseen: values of n")
        ->delimiter(',');
    app->add_option("--level", level, "two-level-law: level l")
        ->capture_default_str();
  }

  void run(std::ostream& out) const {
    if (experiment == "bracket") {
      run_bracket(out);
    } else if (experiment == "clt") {
      run_clt(out);
    } else if (experiment == "coverage") {
      run_coverage(out);
    } else if (experiment == "berry-esseen") {
      run_berry_esseen(out);
    } else {
      run_two_level_law(out);
    }
  }

  void run_bracket(std::ostream& out) const {
    const auto check = bracket_expectation_check(
        plan.n, plan.m, model.horizon, t,
        kind == "time" ? BracketKind::kTime : BracketKind::kBrownian, samples,
        common.seed, common.threads);
    if (common.format == "csv") {
      Output sink(common, out);
      *sink << "estimate,target,std_error\n"
            << format_number(check.estimate) << ',' << format_number(check.target)
            << ',' << format_number(check.std_error) << '\n';
      return;
    }
    emit_json(common, out, to_json(check));
  }

  std::optional<double> ks_threshold(std::int64_t size, KsNull null) const {
    if (pilot_replications == 0) {
      return std::nullopt;
    }
    return ks_normal_null_quantile(size, ks_probability, null,
                                   pilot_replications, common.seed,
                                   common.threads);
  }

  void run_clt(std::ostream& out) const {
    const auto sde = build_model(model);
    const auto f = build_payoff(model);
    const MlmcPlan p = build_plan(plan, plan.n, model.horizon);
    CltOptions options;
    options.threads = common.threads;
    if (reference_variance == "analytic") {
      const auto sigma2 = build_reference(model).exact_limit_variance;
      if (!sigma2) {
        throw std::invalid_argument("no closed-form limit variance for this payoff");
      }
      options.limit_variance = sigma2;
    } else if (reference_variance == "simulated") {
      LimitSimConfig config;
      config.n_steps = grid_steps;
      config.samples = limit_samples_count;
      config.master_seed = common.seed;
      config.threads = common.threads;
      options.limit_variance = estimate_limit_variance(sde, f, config).sigma2;
    }
    const auto exp = run_clt_experiment(sde, f, p, replications,
                                        require_true_value(model), common.seed,
                                        options);
    write_artifact(artifacts, "standardized_errors.csv",
                   column_csv("standardized_error", exp.standardized_errors));
    if (common.format == "csv") {
      Output sink(common, out);
      write_column_csv(*sink, "standardized_error", exp.standardized_errors);
      return;
    }
    json j = to_json(exp);
    if (const auto threshold = ks_threshold(replications, exp.ks_null)) {
      j["ks_probability"] = ks_probability;
      j["ks_threshold"] = *threshold;
    }
    emit_json(common, out, j);
  }

  void run_coverage(std::ostream& out) const {
    const double truth = require_true_value(model);
    if (replications < 100) {
      throw std::invalid_argument("coverage experiment needs >= 100 replications");
    }
    const auto replicates =
        replicate_estimates(build_model(model), build_payoff(model),
                            build_plan(plan, plan.n, model.horizon),
                            replications, common.seed, common.threads);
    std::ostringstream table;
    table << "method,nominal_confidence,empirical_coverage\n";
    json rows = json::array();
    for (CiMethod method : {CiMethod::kClt, CiMethod::kChebyshev}) {
      for (double level : confidence_levels) {
        const double coverage =
            coverage_from_replicates(replicates, truth, level, method);
        table << to_string(method) << ',' << format_number(level) << ','
              << format_number(coverage) << '\n';
        rows.push_back({{"method", std::string(to_string(method))},
                        {"nominal_confidence", level},
                        {"empirical_coverage", coverage}});
      }
    }
    write_artifact(artifacts, "coverage.csv", table.str());
    if (common.format == "csv") {
      Output sink(common, out);
      *sink << table.str();
      return;
    }
    json j;
    j["replications"] = replications;
    j["true_value"] = truth;
    j["coverage"] = std::move(rows);
    emit_json(common, out, j);
  }

  void run_berry_esseen(std::ostream& out) const {
    const auto sde = build_model(model);
    const auto f = build_payoff(model);
    EstimateOptions options;
    options.threads = common.threads;
    std::ostringstream table;
    table << "n,s_n2,rho_n,bound\n";
    json rows = json::array();
    std::vector<double> log_log_n, log_bound;
    for (std::int64_t n : n_list) {
      const MlmcPlan p = build_plan(plan, n, model.horizon);
      const auto report = estimate(sde, f, p, common.seed, options);
      const auto be = berry_esseen(report.level_stats, p);
      table << n << ',' << format_number(be.s_n2) << ','
            << format_number(be.rho_n) << ',' << format_number(be.bound) << '\n';
      json row = to_json(be);
      row["n"] = n;
      rows.push_back(std::move(row));
      log_log_n.push_back(std::log(std::log(static_cast<double>(n))));
      log_bound.push_back(std::log(be.bound));
    }
    write_artifact(artifacts, "berry_esseen.csv", table.str());
    if (common.format == "csv") {
      Output sink(common, out);
      *sink << table.str();
      return;
    }
    json j;
    j["rows"] = std::move(rows);
    if (n_list.size() >= 2) {
      j["slope_log_bound_vs_log_log_n"] = regression_slope(log_log_n, log_bound);
    }
    emit_json(common, out, j);
  }

  void run_two_level_law(std::ostream& out) const {
    const auto sde = build_model(model);
    const auto f = build_payoff(model);
    const auto two_level = two_level_error_samples(
        sde, f, level, plan.m, samples, common.seed, common.threads);
    LimitSimConfig config;
    config.n_steps = grid_steps;
    config.samples = samples;
    config.master_seed = common.seed;
    config.threads = common.threads;
    const auto limit = limit_samples(sde, f, config);
    write_artifact(artifacts, "two_level_samples.csv", column_csv("value", two_level));
    write_artifact(artifacts, "limit_samples.csv", column_csv("value", limit));
    const double ks = ks_two_sample(two_level, limit);
    if (common.format == "csv") {
      Output sink(common, out);
      *sink << "two_level_variance,limit_variance,ks_statistic\n"
            << format_number(sample_moments(two_level).variance) << ','
            << format_number(sample_moments(limit).variance) << ','
            << format_number(ks) << '\n';
      return;
    }
    json j;
    j["level"] = level;
    j["m"] = plan.m;
    j["samples"] = samples;
    j["grid_steps"] = grid_steps;
    j["two_level_variance"] = sample_moments(two_level).variance;
    j["limit_variance"] = sample_moments(limit).variance;
    j["ks_statistic"] = ks;
    if (pilot_replications > 0) {
      j["ks_probability"] = ks_probability;
      j["ks_threshold"] = ks_two_sample_null_quantile(
          samples, samples, ks_probability, pilot_replications, common.seed,
          common.threads);
    }
    emit_json(common, out, j);
  }
};

// ---------------------------------------------------------------------------
// benchmark

struct BenchmarkRow {
  std::string method;
  std::int64_t n = 0;
  double target_rmse = 0.0;
  double achieved_rmse = 0.0;
  double wall_time_seconds = 0.0;
  std::int64_t cost_units = 0;
};

struct BenchmarkCommand {
  CommonOptions common;
  ModelOptions model;
  PlanOptions plan;
  std::vector<std::string> methods = {"crude-mc", "mlmc"};
  std::vector<std::int64_t> n_list = {16, 32, 64, 128, 256, 512};
  std::int64_t replications = 16;

  void attach(CLI::App* app) {
    add_common(app, common);
    common.format = "csv";
    add_model(app, model);
    add_plan(app, plan, false);
    app->add_option("--methods", methods, "Comma list of crude-mc, mlmc")
        ->delimiter(',')
        ->check(CLI::IsMember({"crude-mc", "mlmc"}));
    app->add_option("--n-list", n_list, "Comma list of powers of m")
        ->delimiter(',');
    app->add_option("--replications", replications,
                    "Estimator runs per row for the achieved RMSE")
        ->capture_default_str();
    app->footer(
        "CSV columns: method,n,target_rmse,achieved_rmse,wall_time_seconds,"
        "cost_units\n"
        "  target_rmse        n^-alpha\n"
        "  achieved_rmse      sqrt(mean((Q - truth)^2)) over the replications\n"
        "  wall_time_seconds  sampling time per replication\n"
        "  cost_units         Euler steps per replication\n"
        "Crude MC uses N = n^{2 alpha} paths of n steps.");
  }

  BenchmarkRow run_row(const std::string& method, std::int64_t n,
                       const SdeModeld& sde, const Payoffd& f,
                       double truth) const {
    if (!exact_log(n, plan.m)) {
      throw std::invalid_argument("n must be a power of m: " + std::to_string(n));
    }
    BenchmarkRow row;
    row.method = method;
    row.n = n;
    row.target_rmse = std::pow(static_cast<double>(n), -plan.alpha);
    std::vector<double> squared(static_cast<std::size_t>(replications));
    std::chrono::steady_clock::duration elapsed{};
    if (method == "mlmc") {
      const MlmcPlan p = build_plan(plan, n, model.horizon);
      row.cost_units = complexity(p);
      EstimateOptions options;
      options.threads = common.threads;
      for (std::int64_t r = 0; r < replications; ++r) {
        options.replication = static_cast<std::uint32_t>(r);
        const auto start = std::chrono::steady_clock::now();
        const double q = estimate(sde, f, p, common.seed, options).estimate;
        elapsed += std::chrono::steady_clock::now() - start;
        squared[static_cast<std::size_t>(r)] = (q - truth) * (q - truth);
      }
    } else {
      const auto paths = static_cast<std::int64_t>(
          std::ceil(std::pow(static_cast<double>(n), 2.0 * plan.alpha) - 1e-9));
      row.cost_units = paths * n;
      for (std::int64_t r = 0; r < replications; ++r) {
        const auto start = std::chrono::steady_clock::now();
        const double q =
            crude_estimate(sde, f, n, paths, common.seed,
                           static_cast<std::uint32_t>(r), common.threads)
                .estimate;
        elapsed += std::chrono::steady_clock::now() - start;
        squared[static_cast<std::size_t>(r)] = (q - truth) * (q - truth);
      }
    }
    row.achieved_rmse =
        std::sqrt(pairwise_sum(squared) / static_cast<double>(replications));
    row.wall_time_seconds = std::chrono::duration<double>(elapsed).count() /
                            static_cast<double>(replications);
    return row;
  }

  void run(std::ostream& out, std::ostream& err) const {
    if (replications < 1) {
      throw std::invalid_argument("--replications must be >= 1");
    }
    if (n_list.empty()) {
      throw std::invalid_argument("--n-list is empty");
    }
    for (std::int64_t n : n_list) {
      if (!exact_log(n, plan.m)) {
        throw std::invalid_argument("n must be a power of m: " + std::to_string(n));
      }
    }
    const auto sde = build_model(model);
    const auto f = build_payoff(model);
    const double truth = require_true_value(model);
    std::vector<BenchmarkRow> rows;
    for (const auto& method : methods) {
      for (std::int64_t n : n_list) {
        rows.push_back(run_row(method, n, sde, f, truth));
        if (common.verbose) {
          err << method << " n=" << n << " rmse="
              << format_number(rows.back().achieved_rmse) << '\n';
        }
      }
    }
    Output sink(common, out);
    if (common.format == "csv") {
      *sink << "method,n,target_rmse,achieved_rmse,wall_time_seconds,cost_units\n";
      for (const auto& r : rows) {
        *sink << r.method << ',' << r.n << ',' << format_number(r.target_rmse)
              << ',' << format_number(r.achieved_rmse) << ','
              << format_number(r.wall_time_seconds) << ',' << r.cost_units
              << '\n';
      }
      return;
    }
    json j = json::array();
    for (const auto& r : rows) {
      j.push_back({{"method", r.method},
                   {"n", r.n},
                   {"target_rmse", r.target_rmse},
                   {"achieved_rmse", r.achieved_rmse},
                   {"wall_time_seconds", r.wall_time_seconds},
                   {"cost_units", r.cost_units}});
    }
    *sink << j.dump(2) << '\n';
  }
};

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Multilevel Monte Carlo Euler estimation of E f(X_T)", "mlmc"};
  app.require_subcommand(1);

  PlanCommand plan;
  EstimateCommand est;
  LimitVarCommand limit;
  VerifyCommand verify;
  BenchmarkCommand bench;
  auto* plan_app = app.add_subcommand("plan", "Print the sample-size allocation");
  auto* est_app = app.add_subcommand("estimate", "Run the multilevel estimator");
  auto* limit_app =
      app.add_subcommand("limit-var", "Simulate the limiting CLT variance");
  auto* verify_app =
      app.add_subcommand("verify", "Run a statistical verification experiment");
  auto* bench_app = app.add_subcommand(
      "benchmark", "Cost versus achieved RMSE for crude MC and MLMC");
  plan.attach(plan_app);
  est.attach(est_app);
  limit.attach(limit_app);
  verify.attach(verify_app);
  bench.attach(bench_app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (plan_app->parsed()) {
      plan.run(out);
    } else if (est_app->parsed()) {
      est.run(out, err);
    } else if (limit_app->parsed()) {
      limit.run(out);
    } else if (verify_app->parsed()) {
      verify.run(out);
    } else {
      bench.run(out, err);
    }
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DivergedPathError& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const DegenerateTransportError& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const DegenerateStatisticsError& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitOk;
}

}  // namespace mlmc::cli
