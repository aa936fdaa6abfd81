#include "mlmc/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "mlmc/errors.hpp"
#include "mlmc/normal.hpp"
#include "mlmc/parallel.hpp"
#include "mlmc/path_engine.hpp"
#include "mlmc/rng.hpp"
#include "mlmc/statistics.hpp"

namespace mlmc {

// ---------------------------------------------------------------------------
// Confidence intervals

std::string_view to_string(CiMethod method) {
  return method == CiMethod::kClt ? "clt" : "chebyshev";
}

CiMethod parse_ci_method(std::string_view text) {
  if (text == "clt") return CiMethod::kClt;
  if (text == "chebyshev") return CiMethod::kChebyshev;
  throw std::invalid_argument("unknown interval method: " + std::string(text));
}

double interval_radius_factor(double confidence, CiMethod method) {
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw std::invalid_argument("confidence must lie in (0, 1)");
  }
  if (method == CiMethod::kClt) {
    return normal_quantile(0.5 * (1.0 + confidence));
  }
  return 1.0 / std::sqrt(1.0 - confidence);
}

ConfidenceInterval confidence_interval(double estimate, double standard_error,
                                       double confidence, CiMethod method) {
  if (!(standard_error >= 0.0)) {
    throw std::invalid_argument("standard error must be nonnegative");
  }
  const double radius =
      interval_radius_factor(confidence, method) * standard_error;
  return {estimate - radius, estimate + radius, confidence, method};
}

// ---------------------------------------------------------------------------
// Kolmogorov-Smirnov

double ks_normal_statistic(std::span<const double> samples, double mean,
                           double sd) {
  if (samples.empty()) {
    throw std::invalid_argument("KS statistic needs samples");
  }
  if (!(sd > 0.0)) {
    throw DegenerateStatisticsError("KS reference Gaussian has zero variance");
  }
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const auto n = static_cast<double>(sorted.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double cdf = normal_cdf((sorted[i] - mean) / sd);
    const auto rank = static_cast<double>(i);
    worst = std::max({worst, (rank + 1.0) / n - cdf, cdf - rank / n});
  }
  return worst;
}

double ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) {
    throw std::invalid_argument("two-sample KS needs non-empty samples");
  }
  std::vector<double> sa(a.begin(), a.end());
  std::vector<double> sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  const auto na = static_cast<double>(sa.size());
  const auto nb = static_cast<double>(sb.size());
  std::size_t i = 0, j = 0;
  double worst = 0.0;
  while (i < sa.size() && j < sb.size()) {
    const double x = std::min(sa[i], sb[j]);
    while (i < sa.size() && sa[i] == x) ++i;
    while (j < sb.size() && sb[j] == x) ++j;
    worst = std::max(worst, std::abs(static_cast<double>(i) / na -
                                     static_cast<double>(j) / nb));
  }
  return worst;
}

namespace {

double upper_quantile(std::vector<double> values, double probability) {
  if (!(probability > 0.0 && probability < 1.0) || values.empty()) {
    throw std::invalid_argument("quantile needs probability in (0, 1)");
  }
  std::sort(values.begin(), values.end());
  const double position = probability * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(position));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = position - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

std::vector<double> pilot_normals(std::uint64_t seed, std::uint64_t index,
                                  std::uint32_t variant, std::int64_t size) {
  GaussianStream normals(RngStreamKey{seed, 0, index, variant,
                                      make_substream(StreamTag::kPilot)});
  std::vector<double> out(static_cast<std::size_t>(size));
  for (auto& v : out) {
    v = normals.next();
  }
  return out;
}

}  // namespace

double ks_normal_null_quantile(std::int64_t sample_size, double probability,
                               KsNull null, std::int64_t pilot_replications,
                               std::uint64_t seed, unsigned threads) {
  if (sample_size < 2 || pilot_replications < 2) {
    throw std::invalid_argument("KS pilot needs sample_size, replications >= 2");
  }
  std::vector<double> stats(static_cast<std::size_t>(pilot_replications));
  parallel_for(stats.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) {
      const auto sample = pilot_normals(seed, r, 0, sample_size);
      const SampleMoments m = sample_moments(sample);
      const double sd = null == KsNull::kEstimatedMeanAndVariance
                            ? std::sqrt(m.variance)
                            : 1.0;
      stats[r] = ks_normal_statistic(sample, m.mean, sd);
    }
  });
  return upper_quantile(std::move(stats), probability);
}

double ks_two_sample_null_quantile(std::int64_t size_a, std::int64_t size_b,
                                   double probability,
                                   std::int64_t pilot_replications,
                                   std::uint64_t seed, unsigned threads) {
  if (size_a < 1 || size_b < 1 || pilot_replications < 2) {
    throw std::invalid_argument("two-sample KS pilot needs positive sizes");
  }
  std::vector<double> stats(static_cast<std::size_t>(pilot_replications));
  parallel_for(stats.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) {
      stats[r] = ks_two_sample(pilot_normals(seed, r, 1, size_a),
                               pilot_normals(seed, r, 2, size_b));
    }
  });
  return upper_quantile(std::move(stats), probability);
}

// ---------------------------------------------------------------------------
// Bracket expectation

BracketCheck bracket_expectation_check(std::int64_t n, int m, double horizon,
                                       double t, BracketKind kind,
                                       std::int64_t samples,
                                       std::uint64_t seed, unsigned threads) {
  if (n < 1 || m < 2) {
    throw std::invalid_argument("bracket check needs n >= 1 and m >= 2");
  }
  if (!(horizon > 0.0)) {
    throw std::invalid_argument("T must be positive");
  }
  if (!(t > 0.0) || t > horizon) {
    throw std::invalid_argument("bracket check needs 0 < t <= T");
  }
  const std::int64_t fine_steps = n * m;
  const double fine_dt = horizon / static_cast<double>(fine_steps);
  // Whole fine intervals inside [0, t], snapped like eta().
  const std::int64_t whole = static_cast<std::int64_t>(
      std::llround(eta(t, fine_steps, horizon) / fine_dt));
  const double tail = std::max(0.0, t - static_cast<double>(whole) * fine_dt);

  BracketCheck check;
  if (kind == BracketKind::kTime) {
    // On fine interval j the integrand is (j mod m) fine_dt.
    const std::int64_t blocks = whole / m;
    const std::int64_t rest = whole % m;
    const std::int64_t units =
        blocks * (static_cast<std::int64_t>(m) * (m - 1) / 2) +
        rest * (rest - 1) / 2;
    check.estimate = static_cast<double>(units) * fine_dt * fine_dt +
                     static_cast<double>(whole % m) * fine_dt * tail;
    check.target = (m - 1) * horizon * t / (2.0 * m * static_cast<double>(n));
    return check;
  }

  if (samples < 2) {
    throw std::invalid_argument("Brownian bracket check needs samples >= 2");
  }
  const std::int64_t intervals = whole + (tail > 0.0 ? 1 : 0);
  const double sqrt_dt = std::sqrt(fine_dt);
  std::vector<double> values(static_cast<std::size_t>(samples));
  parallel_for(values.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      GaussianStream normals(
          RngStreamKey{seed, 0, k, 0, make_substream(StreamTag::kBracket)});
      double w = 0.0;
      double w_coarse = 0.0;
      double integral = 0.0;
      for (std::int64_t j = 0; j < intervals; ++j) {
        if (j % m == 0) {
          w_coarse = w;
        }
        const double gap = w - w_coarse;
        const double width = j < whole ? fine_dt : tail;
        integral += gap * gap * width;
        w += sqrt_dt * normals.next();
      }
      values[k] = static_cast<double>(n) * integral;
    }
  });
  const SampleMoments moments = sample_moments(values);
  check.estimate = moments.mean;
  check.std_error =
      std::sqrt(moments.variance / static_cast<double>(moments.count));
  check.target = (m - 1) * horizon * t / (2.0 * m);
  return check;
}

// ---------------------------------------------------------------------------
// Replications

std::vector<ReplicateSummary> replicate_estimates(const SdeModeld& model,
                                                  const Payoffd& payoff,
                                                  const MlmcPlan& plan,
                                                  std::int64_t replications,
                                                  std::uint64_t seed,
                                                  unsigned threads) {
  if (replications < 1) {
    throw std::invalid_argument("need at least one replication");
  }
  std::vector<ReplicateSummary> out(static_cast<std::size_t>(replications));
  parallel_for(out.size(), threads, [&](std::size_t begin, std::size_t end) {
    EstimateOptions options;
    options.threads = 1;
    for (std::size_t r = begin; r < end; ++r) {
      options.replication = static_cast<std::uint32_t>(r);
      const EstimateReport report = estimate(model, payoff, plan, seed, options);
      out[r] = {report.estimate, report.standard_error};
    }
  });
  return out;
}

CltExperiment run_clt_experiment(const SdeModeld& model, const Payoffd& payoff,
                                 const MlmcPlan& plan,
                                 std::int64_t replications,
                                 std::optional<double> true_value,
                                 std::uint64_t seed,
                                 const CltOptions& options) {
  if (!true_value) {
    throw std::invalid_argument("CLT experiment needs the true value");
  }
  if (replications < 100) {
    throw std::invalid_argument("CLT experiment needs >= 100 replications");
  }
  const auto replicates =
      replicate_estimates(model, payoff, plan, replications, seed, options.threads);
  const double scale = std::pow(static_cast<double>(plan.n), plan.alpha);

  CltExperiment exp;
  exp.replications = replications;
  exp.plan = plan;
  exp.standardized_errors.reserve(replicates.size());
  for (const auto& r : replicates) {
    exp.standardized_errors.push_back(scale * (r.estimate - *true_value));
  }
  const SampleMoments moments = sample_moments(exp.standardized_errors);
  exp.sample_mean = moments.mean;
  exp.sample_variance = moments.variance;
  exp.ks_null = options.limit_variance ? KsNull::kEstimatedMean
                                       : KsNull::kEstimatedMeanAndVariance;
  exp.reference_variance =
      options.limit_variance ? *options.limit_variance : moments.variance;
  if (moments.variance == 0.0 || exp.reference_variance == 0.0) {
    exp.degenerate = true;
    exp.ks_statistic = 0.0;
    return exp;
  }
  exp.ks_statistic = ks_normal_statistic(exp.standardized_errors, moments.mean,
                                         std::sqrt(exp.reference_variance));
  return exp;
}

double coverage_from_replicates(std::span<const ReplicateSummary> replicates,
                                double true_value, double confidence,
                                CiMethod method) {
  if (replicates.empty()) {
    throw std::invalid_argument("coverage needs replicates");
  }
  std::int64_t hits = 0;
  for (const auto& r : replicates) {
    const auto ci =
        confidence_interval(r.estimate, r.standard_error, confidence, method);
    if (ci.lo <= true_value && true_value <= ci.hi) {
      ++hits;
    }
  }
  return static_cast<double>(hits) / static_cast<double>(replicates.size());
}

double coverage_experiment(const SdeModeld& model, const Payoffd& payoff,
                           const MlmcPlan& plan, std::int64_t replications,
                           std::optional<double> true_value, double confidence,
                           CiMethod method, std::uint64_t seed,
                           unsigned threads) {
  if (!true_value) {
    throw std::invalid_argument("coverage experiment needs the true value");
  }
  if (replications < 100) {
    throw std::invalid_argument("coverage experiment needs >= 100 replications");
  }
  const auto replicates =
      replicate_estimates(model, payoff, plan, replications, seed, threads);
  return coverage_from_replicates(replicates, *true_value, confidence, method);
}

// ---------------------------------------------------------------------------
// Berry-Esseen

BerryEsseenReport berry_esseen(std::span<const LevelStats> level_stats,
                               const MlmcPlan& plan) {
  if (level_stats.empty()) {
    throw std::invalid_argument("Berry-Esseen needs level statistics");
  }
  const double scale = std::pow(static_cast<double>(plan.n), plan.alpha);
  BerryEsseenReport report;
  for (const auto& s : level_stats) {
    if (s.count < 2 || !std::isfinite(s.third_abs_moment)) {
      throw std::invalid_argument(
          "Berry-Esseen needs count >= 2 and a finite third moment per level");
    }
    const auto count = static_cast<double>(s.count);
    report.s_n2 += scale * scale / count * s.variance;
    report.rho_n += scale * scale * scale / std::pow(count, 1.5) *
                    s.third_abs_moment;
  }
  if (!(report.s_n2 > 0.0)) {
    throw DegenerateStatisticsError(
        "Berry-Esseen bound undefined: every level has zero variance");
  }
  report.bound = 6.0 * report.rho_n / std::pow(report.s_n2, 1.5);
  return report;
}

}  // namespace mlmc
