#include "mlmc/statistics.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace mlmc {

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double sum = 0.0;
    for (double v : values) {
      sum += v;
    }
    return sum;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

SampleMoments sample_moments(std::span<const double> values) {
  if (values.size() < 2) {
    throw std::invalid_argument("sample moments need at least two samples");
  }
  const auto n = static_cast<double>(values.size());
  SampleMoments m;
  m.count = static_cast<long long>(values.size());
  m.mean = pairwise_sum(values) / n;

  std::vector<double> scratch(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double d = values[i] - m.mean;
    scratch[i] = d * d;
  }
  m.variance = pairwise_sum(scratch) / (n - 1.0);
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double d = std::fabs(values[i] - m.mean);
    scratch[i] = d * d * d;
  }
  m.third_abs_moment = pairwise_sum(scratch) / n;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double d = values[i] - m.mean;
    scratch[i] = d * d * d * d;
  }
  m.fourth_moment = pairwise_sum(scratch) / n;
  return m;
}

double variance_standard_error(const SampleMoments& moments) {
  const double excess =
      moments.fourth_moment - moments.variance * moments.variance;
  return std::sqrt(std::max(excess, 0.0) / static_cast<double>(moments.count));
}

double regression_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("regression needs two equal-length series");
  }
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0.0) {
    throw std::invalid_argument("regression abscissae are all equal");
  }
  return sxy / sxx;
}

}  // namespace mlmc
