#pragma once

#include <string_view>

namespace mlmc {

enum class CiMethod { kClt, kChebyshev };

std::string_view to_string(CiMethod method);
CiMethod parse_ci_method(std::string_view text);

struct ConfidenceInterval {
  double lo = 0.0;
  double hi = 0.0;
  double level = 0.9;
  CiMethod method = CiMethod::kClt;
};

/// Radius multiplier: z_{(1+c)/2} for the CLT, 1/sqrt(1-c) for Chebyshev.
double interval_radius_factor(double confidence, CiMethod method);

/// [estimate - r SE, estimate + r SE] with r from interval_radius_factor.
ConfidenceInterval confidence_interval(double estimate, double standard_error,
                                       double confidence, CiMethod method);

}  // namespace mlmc
