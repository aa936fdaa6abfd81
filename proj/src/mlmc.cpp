#include "mlmc/mlmc.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "mlmc/errors.hpp"
#include "mlmc/parallel.hpp"
#include "mlmc/path_engine.hpp"
#include "mlmc/statistics.hpp"

namespace mlmc {

std::string_view to_string(Allocator allocator) {
  return allocator == Allocator::kBak ? "bak" : "giles";
}

std::string_view to_string(Level0Rule rule) {
  return rule == Level0Rule::kLogPower ? "log-power" : "weighted";
}

std::optional<int> exact_log(std::int64_t n, int m) {
  if (m < 2 || n < m) {
    return std::nullopt;
  }
  int levels = 0;
  while (n > 1) {
    if (n % m != 0) {
      return std::nullopt;
    }
    n /= m;
    ++levels;
  }
  return levels;
}

namespace {

// Sample sizes are real-valued in the allocation formulas. Round up, but do
// not let floating-point noise on an exact integer add a whole path.
std::int64_t ceil_count(double value) {
  if (!std::isfinite(value) ||
      value > static_cast<double>(std::numeric_limits<std::int64_t>::max() / 4)) {
    throw std::invalid_argument("sample size overflows");
  }
  const double nearest = std::round(value);
  if (std::abs(value - nearest) <= 1e-9 * std::max(1.0, value)) {
    return static_cast<std::int64_t>(nearest);
  }
  return static_cast<std::int64_t>(std::ceil(value));
}

int require_levels(std::int64_t n, int m) {
  if (m < 2) {
    throw std::invalid_argument("m must be >= 2");
  }
  const auto levels = exact_log(n, m);
  if (!levels) {
    throw std::invalid_argument("n must be a power of m (n = m^L, L >= 1)");
  }
  return *levels;
}

void require_alpha(double alpha) {
  if (!(alpha >= 0.5 && alpha <= 1.0)) {
    throw std::invalid_argument("alpha must lie in [1/2, 1]");
  }
}

void require_horizon(double horizon) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw std::invalid_argument("T must be positive");
  }
}

void require_sample_sizes(const MlmcPlan& plan) {
  for (std::size_t l = 0; l < plan.sample_sizes.size(); ++l) {
    if (plan.sample_sizes[l] < 2) {
      throw std::invalid_argument("level " + std::to_string(l) +
                                  " gets fewer than 2 samples; increase n, "
                                  "alpha, T or the allocation constant");
    }
  }
}

}  // namespace

MlmcPlan plan_bak(std::int64_t n, int m, double alpha, double horizon,
                  const BakOptions& options) {
  const int levels = require_levels(n, m);
  require_alpha(alpha);
  require_horizon(horizon);

  MlmcPlan plan;
  plan.allocator = Allocator::kBak;
  plan.m = m;
  plan.n = n;
  plan.alpha = alpha;
  plan.horizon = horizon;
  plan.levels = levels;
  plan.a0 = options.a0;
  plan.beta0 = options.beta0;
  plan.level0_rule = options.level0_rule;
  plan.weights = options.weights.empty()
                     ? std::vector<double>(static_cast<std::size_t>(levels), 1.0)
                     : options.weights;
  if (plan.weights.size() != static_cast<std::size_t>(levels)) {
    throw std::invalid_argument("expected " + std::to_string(levels) +
                                " weights (one per level 1..L)");
  }
  for (double a : plan.weights) {
    if (!(a > 0.0) || !std::isfinite(a)) {
      throw std::invalid_argument("weights must be positive");
    }
  }
  if (!(plan.a0 > 0.0)) {
    throw std::invalid_argument("a0 must be positive");
  }
  if (!(plan.beta0 > 0.0 && plan.beta0 <= 2.0)) {
    throw std::invalid_argument("beta0 must lie in (0, 2]");
  }

  const double n_pow = std::pow(static_cast<double>(n), 2.0 * alpha);
  // With unit weights the sum is exactly L; keep it exact.
  const double weight_sum =
      std::accumulate(plan.weights.begin(), plan.weights.end(), 0.0);
  const double base = n_pow * (m - 1) * horizon * weight_sum;

  plan.sample_sizes.resize(static_cast<std::size_t>(levels) + 1);
  if (plan.level0_rule == Level0Rule::kLogPower) {
    plan.sample_sizes[0] =
        ceil_count(n_pow * std::pow(std::log(static_cast<double>(n)), plan.beta0));
  } else {
    plan.sample_sizes[0] = ceil_count(base / plan.a0);
  }
  double m_pow = 1.0;
  for (int l = 1; l <= levels; ++l) {
    m_pow *= m;
    plan.sample_sizes[l] = ceil_count(base / (m_pow * plan.weights[l - 1]));
  }
  require_sample_sizes(plan);
  return plan;
}

MlmcPlan plan_giles(std::int64_t n, int m, double alpha, double horizon,
                    double c2) {
  const int levels = require_levels(n, m);
  require_alpha(alpha);
  require_horizon(horizon);
  if (!(c2 > 0.0) || !std::isfinite(c2)) {
    throw std::invalid_argument("c2 must be positive");
  }
  MlmcPlan plan;
  plan.allocator = Allocator::kGiles;
  plan.m = m;
  plan.n = n;
  plan.alpha = alpha;
  plan.horizon = horizon;
  plan.levels = levels;
  plan.c2 = c2;
  const double n_pow = std::pow(static_cast<double>(n), 2.0 * alpha);
  // log n / log m is exactly L.
  const double base = 2.0 * c2 * n_pow * (levels + 1) * horizon;
  plan.sample_sizes.resize(static_cast<std::size_t>(levels) + 1);
  double m_pow = 1.0;
  for (int l = 0; l <= levels; ++l) {
    plan.sample_sizes[l] = ceil_count(base / m_pow);
    m_pow *= m;
  }
  require_sample_sizes(plan);
  return plan;
}

std::int64_t complexity(const MlmcPlan& plan) {
  if (plan.levels < 1 ||
      plan.sample_sizes.size() != static_cast<std::size_t>(plan.levels) + 1) {
    throw std::invalid_argument("plan needs L >= 1 and N_0..N_L");
  }
  std::int64_t total = plan.sample_sizes[0];
  for (int l = 1; l <= plan.levels; ++l) {
    total += plan.sample_sizes[l] *
             (integer_power(plan.m, l) + integer_power(plan.m, l - 1));
  }
  return total;
}

double asymptotic_complexity_constant(int m, double horizon) {
  if (m < 2) {
    throw std::invalid_argument("m must be >= 2");
  }
  const double log_m = std::log(static_cast<double>(m));
  return (static_cast<double>(m) * m - 1.0) * horizon / (m * log_m * log_m);
}

MScanResult optimal_m_scan(double horizon, int m_min, int m_max) {
  if (m_min < 2 || m_max < m_min) {
    throw std::invalid_argument("m scan range must satisfy 2 <= min <= max");
  }
  MScanResult scan;
  for (int m = m_min; m <= m_max; ++m) {
    scan.m_values.push_back(m);
    scan.constants.push_back(asymptotic_complexity_constant(m, horizon));
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < scan.constants.size(); ++i) {
    if (scan.constants[i] < scan.constants[best]) {
      best = i;
    }
  }
  scan.argmin = scan.m_values[best];
  return scan;
}

double variance_upper_bound(const MlmcPlan& plan,
                            std::optional<double> lipschitz_hint,
                            double strong_error_constant) {
  if (!lipschitz_hint) {
    throw std::invalid_argument(
        "variance bound needs a Lipschitz payoff (lipschitz_hint)");
  }
  if (!(strong_error_constant >= 0.0)) {
    throw std::invalid_argument("strong error constant must be nonnegative");
  }
  const double c = *lipschitz_hint * *lipschitz_hint * strong_error_constant;
  double sum = 0.0;
  double m_pow = 1.0;
  for (std::size_t l = 0; l < plan.sample_sizes.size(); ++l) {
    sum += 1.0 / (static_cast<double>(plan.sample_sizes[l]) * m_pow);
    m_pow *= plan.m;
  }
  return c * sum;
}

namespace {

void check_plan_matches(const SdeModeld& model, const MlmcPlan& plan) {
  if (plan.sample_sizes.size() != static_cast<std::size_t>(plan.levels) + 1 ||
      plan.levels < 1 || plan.m < 2) {
    throw std::invalid_argument("malformed plan");
  }
  if (std::abs(plan.horizon - model.horizon) >
      1e-12 * std::max(1.0, model.horizon)) {
    throw std::invalid_argument("plan horizon differs from model horizon");
  }
}

// Fills out[k] for path indices [0, out.size()) of one level.
void fill_level(const SdeModeld& model, const Payoffd& payoff, int level,
                int m, std::uint64_t seed, std::uint32_t replication,
                unsigned threads, std::span<double> out) {
  parallel_for(out.size(), threads, [&](std::size_t begin, std::size_t end) {
    EulerWorkspace<double> ws(model);
    RngStreamKey key{seed, static_cast<std::uint32_t>(level), 0, replication,
                     make_substream(StreamTag::kMlmc)};
    for (std::size_t k = begin; k < end; ++k) {
      key.path_index = k;
      try {
        if (level == 0) {
          out[k] = payoff.value(simulate_single(model, 1, key, ws).terminal);
        } else {
          const auto pair = simulate_coupled(model, level, m, key, ws);
          out[k] = payoff.value(pair.fine) - payoff.value(pair.coarse);
        }
      } catch (const DivergedPathError& e) {
        throw e.with_context(level, k);
      }
    }
  });
}

}  // namespace

std::vector<double> level_samples(const SdeModeld& model, const Payoffd& payoff,
                                  const MlmcPlan& plan, int level,
                                  std::uint64_t seed,
                                  std::uint32_t replication, unsigned threads) {
  check_plan_matches(model, plan);
  if (level < 0 || level > plan.levels) {
    throw std::invalid_argument("level outside plan");
  }
  std::vector<double> values(
      static_cast<std::size_t>(plan.sample_sizes[level]));
  fill_level(model, payoff, level, plan.m, seed, replication, threads, values);
  return values;
}

EstimateReport estimate(const SdeModeld& model, const Payoffd& payoff,
                        const MlmcPlan& plan, std::uint64_t seed,
                        const EstimateOptions& options) {
  validate_model(model);
  validate_payoff(payoff);
  check_plan_matches(model, plan);

  EstimateReport report;
  report.plan = plan;
  report.seed = seed;
  report.replication = options.replication;

  double variance_of_estimate = 0.0;
  std::vector<double> level_means;
  std::vector<double> values;
  for (int l = 0; l <= plan.levels; ++l) {
    values.assign(static_cast<std::size_t>(plan.sample_sizes[l]), 0.0);
    fill_level(model, payoff, l, plan.m, seed, options.replication,
               options.threads, values);
    const SampleMoments moments = sample_moments(values);
    LevelStats stats;
    stats.level = l;
    stats.count = plan.sample_sizes[l];
    stats.mean = moments.mean;
    stats.variance = moments.variance;
    stats.third_abs_moment = moments.third_abs_moment;
    stats.cost = l == 0 ? stats.count
                        : stats.count * (integer_power(plan.m, l) +
                                         integer_power(plan.m, l - 1));
    report.total_cost += stats.cost;
    variance_of_estimate += stats.variance / static_cast<double>(stats.count);
    level_means.push_back(stats.mean);
    report.level_stats.push_back(stats);
  }
  report.estimate = pairwise_sum(level_means);
  report.standard_error = std::sqrt(variance_of_estimate);
  report.confidence_interval =
      confidence_interval(report.estimate, report.standard_error,
                          options.confidence, options.ci_method);
  report.bias_proxy =
      -report.level_stats.back().mean / (std::pow(plan.m, plan.alpha) - 1.0);
  return report;
}

CrudeReport crude_estimate(const SdeModeld& model, const Payoffd& payoff,
                           std::int64_t n_steps, std::int64_t samples,
                           std::uint64_t seed, std::uint32_t replication,
                           unsigned threads) {
  validate_model(model);
  validate_payoff(payoff);
  if (n_steps < 1 || samples < 2) {
    throw std::invalid_argument("crude MC needs n_steps >= 1, samples >= 2");
  }
  std::vector<double> values(static_cast<std::size_t>(samples));
  parallel_for(values.size(), threads, [&](std::size_t begin, std::size_t end) {
    EulerWorkspace<double> ws(model);
    RngStreamKey key{seed, 0, 0, replication,
                     make_substream(StreamTag::kCrude)};
    for (std::size_t k = begin; k < end; ++k) {
      key.path_index = k;
      try {
        values[k] = payoff.value(simulate_single(model, n_steps, key, ws).terminal);
      } catch (const DivergedPathError& e) {
        throw e.with_context(0, k);
      }
    }
  });
  const SampleMoments moments = sample_moments(values);
  CrudeReport report;
  report.estimate = moments.mean;
  report.standard_error =
      std::sqrt(moments.variance / static_cast<double>(samples));
  report.samples = samples;
  report.n_steps = n_steps;
  report.cost = samples * n_steps;
  return report;
}

}  // namespace mlmc
