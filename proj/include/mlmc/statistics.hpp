#pragma once

#include <span>

namespace mlmc {

/// Sum in a fixed binary tree (leaves of at most 8 terms, split at the
/// midpoint). The result depends only on the values and their order.
double pairwise_sum(std::span<const double> values);

struct SampleMoments {
  long long count = 0;
  double mean = 0.0;
  /// Unbiased (count - 1) sample variance.
  double variance = 0.0;
  /// Mean of |x - mean|^3.
  double third_abs_moment = 0.0;
  /// Mean of (x - mean)^4.
  double fourth_moment = 0.0;
};

/// Two-pass moments with pairwise sums. Requires at least two samples.
SampleMoments sample_moments(std::span<const double> values);

/// Standard error of the sample variance, sqrt((m4 - s^4) / n).
double variance_standard_error(const SampleMoments& moments);

/// Ordinary least-squares slope of y on x.
double regression_slope(std::span<const double> x, std::span<const double> y);

}  // namespace mlmc
