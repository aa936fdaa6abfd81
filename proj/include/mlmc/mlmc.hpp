#pragma once

// Multilevel Monte Carlo Euler estimator
//
//   Q_n = (1/N_0) sum_k f(X^1_{T,k})
//       + sum_{l=1..L} (1/N_l) sum_k [f(X^{l,m^l}_{T,k}) - f(X^{l,m^{l-1}}_{T,k})]
//
// with n = m^L, and the two closed-form sample-size allocations that go with
// it. Natural logarithms throughout.

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "mlmc/confidence.hpp"
#include "mlmc/model.hpp"

namespace mlmc {

enum class Allocator { kBak, kGiles };
std::string_view to_string(Allocator allocator);

/// How N_0 is chosen by plan_bak.
enum class Level0Rule {
  /// N_0 = n^{2 alpha} (log n)^{beta0}
  kLogPower,
  /// N_0 = n^{2 alpha} (m-1) T (sum_l a_l) / a0
  kWeighted,
};
std::string_view to_string(Level0Rule rule);

struct MlmcPlan {
  Allocator allocator = Allocator::kBak;
  int m = 2;
  std::int64_t n = 2;
  double alpha = 1.0;
  double horizon = 1.0;
  /// Number of coupled levels, n = m^L.
  int levels = 1;
  /// a_1..a_L (bak only).
  std::vector<double> weights;
  double a0 = 1.0;
  double beta0 = 1.9;
  Level0Rule level0_rule = Level0Rule::kLogPower;
  /// Variance constant of the Giles allocation (giles only).
  double c2 = 0.0;
  /// N_0..N_L.
  std::vector<std::int64_t> sample_sizes;
};

/// log_m(n) when n is an exact positive power of m, otherwise nullopt.
std::optional<int> exact_log(std::int64_t n, int m);

struct BakOptions {
  /// a_1..a_L; empty means all ones (the optimal choice).
  std::vector<double> weights;
  double a0 = 1.0;
  double beta0 = 1.9;
  Level0Rule level0_rule = Level0Rule::kLogPower;
};

/// N_l = ceil(n^{2 alpha} (m-1) T (sum_j a_j) / (m^l a_l)) for l = 1..L, and
/// N_0 per `level0_rule`.
///
/// Throws std::invalid_argument when n is not a power of m (n >= m), alpha is
/// outside [1/2, 1], a weight is not positive, or some N_l < 2.
MlmcPlan plan_bak(std::int64_t n, int m, double alpha, double horizon,
                  const BakOptions& options = {});

/// N_l = ceil(2 c2 n^{2 alpha} (log n / log m + 1) T / m^l), l = 0..L.
MlmcPlan plan_giles(std::int64_t n, int m, double alpha, double horizon,
                    double c2);

/// N_0 + sum_l N_l (m^l + m^{l-1}), in Euler-step units.
std::int64_t complexity(const MlmcPlan& plan);

/// (m^2 - 1) T / (m (log m)^2): the leading constant of the optimal
/// complexity in front of n^{2 alpha} (log n)^2.
double asymptotic_complexity_constant(int m, double horizon);

struct MScanResult {
  std::vector<int> m_values;
  std::vector<double> constants;
  int argmin = 0;
};

MScanResult optimal_m_scan(double horizon, int m_min = 2, int m_max = 12);

/// c sum_l N_l^{-1} m^{-l} with c = lipschitz^2 * strong_error_constant, a
/// ceiling on Var(Q_n) when every level satisfies Var <= c m^{-l}.
double variance_upper_bound(const MlmcPlan& plan,
                            std::optional<double> lipschitz_hint,
                            double strong_error_constant);

struct LevelStats {
  int level = 0;
  std::int64_t count = 0;
  double mean = 0.0;
  double variance = 0.0;
  double third_abs_moment = 0.0;
  std::int64_t cost = 0;
};

struct EstimateReport {
  double estimate = 0.0;
  double standard_error = 0.0;
  ConfidenceInterval confidence_interval;
  std::vector<LevelStats> level_stats;
  std::int64_t total_cost = 0;
  MlmcPlan plan;
  /// Richardson-type weak-error proxy -mean_L / (m^alpha - 1); reported,
  /// never subtracted.
  double bias_proxy = 0.0;
  std::uint64_t seed = 0;
  std::uint32_t replication = 0;
};

struct EstimateOptions {
  unsigned threads = 0;
  /// Level statistics are always computed from the stored per-path values
  /// with a fixed pairwise tree, so results are reproducible for any thread
  /// count. The flag is kept so callers can state the requirement.
  bool deterministic_reduction = true;
  std::uint32_t replication = 0;
  double confidence = 0.9;
  CiMethod ci_method = CiMethod::kClt;
};

/// Runs the multilevel estimator. Level l uses the streams
/// (seed, level l, path k, replication, StreamTag::kMlmc); level 0 is one
/// Euler step of width T. A diverged path aborts with its level and index.
EstimateReport estimate(const SdeModeld& model, const Payoffd& payoff,
                        const MlmcPlan& plan, std::uint64_t seed,
                        const EstimateOptions& options = {});

/// Per-level sample values of a run (f(X^1_T) at level 0, fine-minus-coarse
/// payoff differences above), for diagnostics that need raw draws.
std::vector<double> level_samples(const SdeModeld& model, const Payoffd& payoff,
                                  const MlmcPlan& plan, int level,
                                  std::uint64_t seed,
                                  std::uint32_t replication = 0,
                                  unsigned threads = 0);

struct CrudeReport {
  double estimate = 0.0;
  double standard_error = 0.0;
  std::int64_t samples = 0;
  std::int64_t n_steps = 0;
  std::int64_t cost = 0;
};

/// Single-resolution Monte Carlo with `samples` paths of `n_steps` steps.
CrudeReport crude_estimate(const SdeModeld& model, const Payoffd& payoff,
                           std::int64_t n_steps, std::int64_t samples,
                           std::uint64_t seed, std::uint32_t replication = 0,
                           unsigned threads = 0);

}  // namespace mlmc
