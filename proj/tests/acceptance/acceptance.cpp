// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. `mlmc_acceptance 3 7` runs a subset.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "mlmc/diagnostics.hpp"
#include "mlmc/limit_law.hpp"
#include "mlmc/mlmc.hpp"
#include "mlmc/statistics.hpp"

namespace {

using namespace mlmc;

const double kHalfE = std::exp(1.0) / 2.0;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* format, auto... args) {
  char buffer[512];
  std::snprintf(buffer, sizeof buffer, format, args...);
  return buffer;
}

SdeModeld unit_gbm() { return make_gbm(1.0, 0.0, 1.0, 1.0); }

// Limit and two-level samples are shared by criteria 4 and 6.
struct SharedSamples {
  std::vector<double> limit;
  std::vector<double> two_level_8;
  bool ready = false;

  void build() {
    if (ready) return;
    LimitSimConfig config;
    config.n_steps = 1024;
    config.samples = 100000;
    config.master_seed = 4;
    limit = limit_samples(unit_gbm(), identity_payoff(), config);
    two_level_8 = two_level_error_samples(unit_gbm(), identity_payoff(), 8, 2,
                                          100000, 6);
    ready = true;
  }
};

SharedSamples shared;

Outcome allocation_tables() {
  const auto bak = plan_bak(16, 2, 1.0, 1.0);
  const auto giles = plan_giles(16, 2, 1.0, 1.0, 1.0);
  const std::vector<std::int64_t> bak_expected = {512, 256, 128, 64};
  const std::vector<std::int64_t> giles_expected = {2560, 1280, 640, 320, 160};
  const std::vector<std::int64_t> bak_levels(bak.sample_sizes.begin() + 1,
                                             bak.sample_sizes.end());
  std::ostringstream detail;
  detail << "bak N_1..4 =";
  for (auto v : bak_levels) detail << ' ' << v;
  detail << ", giles N_0..4 =";
  for (auto v : giles.sample_sizes) detail << ' ' << v;
  return {bak_levels == bak_expected && giles.sample_sizes == giles_expected,
          detail.str()};
}

Outcome optimal_m() {
  const auto scan = optimal_m_scan(1.0, 2, 12);
  return {scan.argmin == 7, fmt("argmin m = %d", scan.argmin)};
}

Outcome bracket_identity() {
  bool exact = true;
  std::string detail;
  for (auto [n, m] : {std::pair<std::int64_t, int>{4, 2}, {3, 3}, {8, 4}}) {
    const auto check = bracket_expectation_check(n, m, 1.0, 1.0, BracketKind::kTime);
    const double expected = (m - 1.0) / (2.0 * m * static_cast<double>(n));
    exact = exact && check.estimate == expected;
    detail += fmt("(%lld,%d): %.17g vs %.17g; ", static_cast<long long>(n), m,
                  check.estimate, expected);
  }
  const auto brownian = bracket_expectation_check(256, 2, 1.0, 1.0,
                                                  BracketKind::kBrownian, 100000, 3);
  const double rel = brownian.estimate / 0.25 - 1.0;
  detail += fmt("brownian %.6f (%+.2f%%, tol 2%%)", brownian.estimate, 100.0 * rel);
  return {exact && std::abs(rel) <= 0.02, detail};
}

Outcome limit_variance() {
  shared.build();
  const auto summary = summarize_limit_samples(shared.limit);
  const double z = (summary.sigma2 - kHalfE) / summary.std_error;
  const double two_level = sample_moments(shared.two_level_8).variance;
  const double rel = two_level / summary.sigma2 - 1.0;
  return {std::abs(z) <= 3.0 && std::abs(rel) <= 0.10,
          fmt("sigma2 = %.5f +- %.5f (e/2 = %.5f, %.2f SE, tol 3); "
              "two-level l=8 variance %.5f (%+.2f%%, tol 10%%)",
              summary.sigma2, summary.std_error, kHalfE, z, two_level, 100.0 * rel)};
}

Outcome level_variance_decay() {
  bool pass = true;
  std::string detail;
  for (int level : {4, 5, 6}) {
    const auto samples = two_level_error_samples(unit_gbm(), identity_payoff(),
                                                 level, 2, 100000, 5);
    const double v = sample_moments(samples).variance;
    const double rel = v / kHalfE - 1.0;
    pass = pass && std::abs(rel) <= 0.10;
    detail += fmt("l=%d: %.5f (%+.2f%%); ", level, v, 100.0 * rel);
  }
  detail += fmt("target e/2 = %.5f, tol 10%%", kHalfE);
  return {pass, detail};
}

Outcome distributional_convergence() {
  shared.build();
  const double ks = ks_two_sample(shared.two_level_8, shared.limit);
  const double null_q99 = ks_two_sample_null_quantile(
      static_cast<std::int64_t>(shared.two_level_8.size()),
      static_cast<std::int64_t>(shared.limit.size()), 0.99, 500, 66);
  return {ks < 0.02, fmt("KS = %.5f (threshold 0.02; pilot null 99%% quantile %.5f)",
                         ks, null_q99)};
}

Outcome clt_replication() {
  const auto plan = plan_bak(16, 2, 1.0, 1.0);
  const auto exp = run_clt_experiment(unit_gbm(), identity_payoff(), plan, 500,
                                      1.0, 7);
  const double threshold =
      ks_normal_null_quantile(500, 0.99, exp.ks_null, 2000, 77);
  const double rel = exp.sample_variance / kHalfE - 1.0;
  return {std::abs(rel) <= 0.15 && exp.ks_statistic < threshold,
          fmt("variance %.5f (%+.2f%% vs e/2, tol 15%%); KS %.5f vs 1%% "
              "threshold %.5f",
              exp.sample_variance, 100.0 * rel, exp.ks_statistic, threshold)};
}

Outcome ci_coverage() {
  const auto plan = plan_bak(16, 2, 1.0, 1.0);
  const auto reps = replicate_estimates(unit_gbm(), identity_payoff(), plan, 200, 8);
  const double clt = coverage_from_replicates(reps, 1.0, 0.9, CiMethod::kClt);
  const double cheb = coverage_from_replicates(reps, 1.0, 0.9, CiMethod::kChebyshev);
  const double ratio = interval_radius_factor(0.9, CiMethod::kChebyshev) /
                       interval_radius_factor(0.9, CiMethod::kClt);
  const bool ratio_ok = std::round(ratio * 1e4) == std::round(3.1623 / 1.6449 * 1e4);
  return {clt >= 0.84 && clt <= 0.96 && cheb >= 0.98 && ratio_ok,
          fmt("CLT coverage %.3f (band [0.84, 0.96]); Chebyshev %.3f (>= 0.98); "
              "radius ratio %.4f (expected %.4f)",
              clt, cheb, ratio, 3.1623 / 1.6449)};
}

Outcome berry_esseen_decay() {
  const auto model = make_gbm(1.0, 0.05, 0.2, 1.0);
  std::vector<double> x, y;
  std::string detail;
  for (std::int64_t n = 16; n <= 256; n *= 2) {
    const auto plan = plan_bak(n, 2, 1.0, 1.0);
    const auto report = estimate(model, identity_payoff(), plan, 9);
    const auto be = berry_esseen(report.level_stats, plan);
    x.push_back(std::log(std::log(static_cast<double>(n))));
    y.push_back(std::log(be.bound));
    detail += fmt("n=%lld: %.4f; ", static_cast<long long>(n), be.bound);
  }
  const double slope = regression_slope(x, y);
  detail += fmt("slope %.3f (target -0.5 +- 0.2)", slope);
  return {std::abs(slope + 0.5) <= 0.2, detail};
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    std::vector<std::string> cells;
    std::istringstream cells_in(line);
    std::string cell;
    while (std::getline(cells_in, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

struct CliRun {
  int code = 0;
  std::string out;
};

CliRun cli(std::vector<std::string> args) {
  args.insert(args.begin(), "mlmc");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  CliRun r;
  r.code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  if (r.code != 0) std::cerr << err.str();
  return r;
}

Outcome complexity_slopes() {
  const auto run = cli({"benchmark", "--n-list", "16,32,64,128,256,512",
                        "--replications", "32", "--x0", "1", "--mu", "0.05",
                        "--vol", "0.2", "--T", "1", "--seed", "7"});
  if (run.code != 0) return {false, fmt("benchmark exited %d", run.code)};
  const auto rows = parse_csv(run.out);
  std::vector<double> crude_x, crude_y, mlmc_x, mlmc_y;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    auto& xs = rows[i][0] == "mlmc" ? mlmc_x : crude_x;
    auto& ys = rows[i][0] == "mlmc" ? mlmc_y : crude_y;
    xs.push_back(std::log(std::stod(rows[i][3])));
    ys.push_back(std::log(std::stod(rows[i][5])));
  }
  const double mlmc_slope = regression_slope(mlmc_x, mlmc_y);
  const double crude_slope = regression_slope(crude_x, crude_y);
  return {std::abs(mlmc_slope + 2.0) <= 0.35 && std::abs(crude_slope + 3.0) <= 0.35,
          fmt("MLMC slope %.3f (target -2 +- 0.35); crude slope %.3f "
              "(target -3 +- 0.35)",
              mlmc_slope, crude_slope)};
}

std::string drop_column(const std::string& csv, std::size_t column) {
  std::string result;
  for (auto& row : parse_csv(csv)) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i != column) result += row[i] + ',';
    }
    result += '\n';
  }
  return result;
}

Outcome determinism() {
  const std::vector<std::vector<std::string>> commands = {
      {"plan", "--n", "64", "--m", "4"},
      {"estimate", "--n", "64", "--vol", "0.3", "--seed", "11"},
      {"estimate", "--n", "27", "--m", "3", "--payoff", "call", "--strike", "1.1",
       "--format", "csv", "--seed", "11"},
      {"limit-var", "--samples", "20000", "--grid-steps", "128", "--seed", "11"},
      {"verify", "--experiment", "clt", "--n", "8", "--replications", "200",
       "--pilot-replications", "200", "--seed", "11"},
      {"verify", "--experiment", "bracket", "--kind", "brownian", "--n", "32",
       "--samples", "20000", "--seed", "11"},
      {"verify", "--experiment", "coverage", "--n", "8", "--replications", "100",
       "--seed", "11"},
      {"verify", "--experiment", "berry-esseen", "--n-list", "16,32,64",
       "--seed", "11"},
      {"verify", "--experiment", "two-level-law", "--level", "5", "--samples",
       "20000", "--grid-steps", "128", "--pilot-replications", "20", "--seed", "11"},
      {"benchmark", "--n-list", "16,32", "--replications", "4", "--seed", "11"},
  };
  int mismatches = 0;
  std::string detail;
  for (const auto& command : commands) {
    std::string reference;
    for (const char* threads : {"1", "2", "8"}) {
      auto args = command;
      args.insert(args.end(), {"--threads", threads, "--deterministic-reduction"});
      const bool csv_benchmark = command[0] == "benchmark";
      if (csv_benchmark) args.insert(args.end(), {"--format", "csv"});
      const auto run = cli(args);
      const std::string text = csv_benchmark ? drop_column(run.out, 4) : run.out;
      if (run.code != 0 || text.empty()) {
        ++mismatches;
        detail += command[0] + " failed; ";
      } else if (reference.empty()) {
        reference = text;
      } else if (text != reference) {
        ++mismatches;
        detail += command[0] + " differs at threads=" + threads + "; ";
      }
    }
  }
  detail += fmt("%zu commands x threads {1,2,8}, %d mismatches (wall time "
                "column excluded)",
                commands.size(), mismatches);
  return {mismatches == 0, detail};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {1, "allocation tables", allocation_tables},
      {2, "optimal refinement factor", optimal_m},
      {3, "bracket identity", bracket_identity},
      {4, "limit variance closed form", limit_variance},
      {5, "level variance decay", level_variance_decay},
      {6, "distributional convergence", distributional_convergence},
      {7, "CLT replication", clt_replication},
      {8, "confidence interval coverage", ci_coverage},
      {9, "Berry-Esseen decay", berry_esseen_decay},
      {10, "complexity slopes", complexity_slopes},
      {11, "determinism across worker counts", determinism},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::stoi(argv[i]));

  int failures = 0;
  for (const auto& c : criteria) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += outcome.pass ? 0 : 1;
    std::cout << (outcome.pass ? "PASS" : "FAIL") << " [" << c.id << "] " << c.name
              << ": " << outcome.detail << fmt(" (%.1fs)", seconds) << std::endl;
  }
  std::cout << (failures == 0 ? "all criteria passed"
                              : std::to_string(failures) + " criteria failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
