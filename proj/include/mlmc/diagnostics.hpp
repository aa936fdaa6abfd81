#pragma once

// Empirical checks of the multilevel CLT: replication experiments, the
// Berry-Esseen bound, confidence-interval coverage, the bracket identity, and
// Kolmogorov-Smirnov distances.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mlmc/confidence.hpp"
#include "mlmc/mlmc.hpp"
#include "mlmc/model.hpp"

namespace mlmc {

// ---------------------------------------------------------------------------
// Kolmogorov-Smirnov

/// sup_x |F_n(x) - Phi((x - mean) / sd)|.
double ks_normal_statistic(std::span<const double> samples, double mean,
                           double sd);

/// sup_x |F_a(x) - F_b(x)| for two empirical distributions (ties handled).
double ks_two_sample(std::span<const double> a, std::span<const double> b);

/// Which parameters of the reference Gaussian are estimated from the data.
enum class KsNull {
  kEstimatedMeanAndVariance,
  kEstimatedMean,
};

/// Upper `probability` quantile of the one-sample KS statistic for Gaussian
/// data of size `sample_size` when the reference Gaussian's parameters are
/// estimated as `null` says (variance known and equal to the truth under
/// kEstimatedMean). Obtained by simulating `pilot_replications` null
/// samples; deterministic in `seed`.
double ks_normal_null_quantile(std::int64_t sample_size, double probability,
                               KsNull null, std::int64_t pilot_replications,
                               std::uint64_t seed, unsigned threads = 0);

/// Same for the two-sample statistic with sizes (size_a, size_b).
double ks_two_sample_null_quantile(std::int64_t size_a, std::int64_t size_b,
                                   double probability,
                                   std::int64_t pilot_replications,
                                   std::uint64_t seed, unsigned threads = 0);

// ---------------------------------------------------------------------------
// Bracket expectation

enum class BracketKind {
  /// int_0^t (eta_{mn}(s) - eta_n(s)) ds, computed exactly.
  kTime,
  /// n int_0^t (W_{eta_{mn}(s)} - W_{eta_n(s)})^2 ds, by simulation.
  kBrownian,
};

struct BracketCheck {
  double estimate = 0.0;
  double target = 0.0;
  /// Zero for the exact time case.
  double std_error = 0.0;
};

/// kTime: estimate = the integral, target = (m-1) T t / (2mn).
/// kBrownian: estimate = n E int (W_{eta_{mn}} - W_{eta_n})^2 ds over
/// `samples` paths, target = (m-1) T t / (2m).
BracketCheck bracket_expectation_check(std::int64_t n, int m, double horizon,
                                       double t, BracketKind kind,
                                       std::int64_t samples = 0,
                                       std::uint64_t seed = 0,
                                       unsigned threads = 0);

// ---------------------------------------------------------------------------
// Replications, CLT and coverage

struct ReplicateSummary {
  double estimate = 0.0;
  double standard_error = 0.0;
};

/// R independent estimates; replication r uses replication id r of `seed`.
/// Parallel over replications, each replication single-threaded.
std::vector<ReplicateSummary> replicate_estimates(const SdeModeld& model,
                                                  const Payoffd& payoff,
                                                  const MlmcPlan& plan,
                                                  std::int64_t replications,
                                                  std::uint64_t seed,
                                                  unsigned threads = 0);

struct CltExperiment {
  std::int64_t replications = 0;
  MlmcPlan plan;
  /// n^alpha (Q_n - true value), one per replication.
  std::vector<double> standardized_errors;
  double ks_statistic = 0.0;
  double sample_mean = 0.0;
  double sample_variance = 0.0;
  /// Variance of the reference Gaussian used for the KS statistic.
  double reference_variance = 0.0;
  KsNull ks_null = KsNull::kEstimatedMeanAndVariance;
  /// Set when every standardized error is identical; ks_statistic is 0.
  bool degenerate = false;
};

struct CltOptions {
  unsigned threads = 0;
  /// When set, the KS reference Gaussian uses this variance (e.g. from
  /// estimate_limit_variance) instead of the sample variance.
  std::optional<double> limit_variance;
};

/// Throws std::invalid_argument if `true_value` is empty or
/// replications < 100.
CltExperiment run_clt_experiment(const SdeModeld& model, const Payoffd& payoff,
                                 const MlmcPlan& plan,
                                 std::int64_t replications,
                                 std::optional<double> true_value,
                                 std::uint64_t seed,
                                 const CltOptions& options = {});

/// Fraction of intervals (built with `method` at `confidence`) containing
/// `true_value`.
double coverage_from_replicates(std::span<const ReplicateSummary> replicates,
                                double true_value, double confidence,
                                CiMethod method);

double coverage_experiment(const SdeModeld& model, const Payoffd& payoff,
                           const MlmcPlan& plan, std::int64_t replications,
                           std::optional<double> true_value, double confidence,
                           CiMethod method, std::uint64_t seed,
                           unsigned threads = 0);

// ---------------------------------------------------------------------------
// Berry-Esseen

struct BerryEsseenReport {
  double s_n2 = 0.0;
  double rho_n = 0.0;
  /// 6 rho_n / s_n^3
  double bound = 0.0;
};

/// Moments of the level aggregates X_{n,l} = (n^alpha / N_l) sum_k Z_k:
///   s_n^2 = sum_l (n^{2 alpha} / N_l) Var_l,
///   rho_n = sum_l (n^{3 alpha} / N_l^{3/2}) E|Z_l - mean|^3,
/// the third moment following the Burkholder-type moment bound of the
/// aggregates. Throws DegenerateStatisticsError when s_n = 0.
BerryEsseenReport berry_esseen(std::span<const LevelStats> level_stats,
                               const MlmcPlan& plan);

}  // namespace mlmc
