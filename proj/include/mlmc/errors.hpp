#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace mlmc {

/// A state became non-finite during Euler integration.
///
/// Estimation aborts on the first diverged path; silently dropping it would
/// bias every level mean. `level` is -1 when the path was not part of a
/// multilevel run.
class DivergedPathError : public std::runtime_error {
 public:
  DivergedPathError(std::int64_t step, int level = -1,
                    std::uint64_t path_index = 0)
      : std::runtime_error(format(step, level, path_index)),
        step_(step),
        level_(level),
        path_index_(path_index) {}

  std::int64_t step() const noexcept { return step_; }
  int level() const noexcept { return level_; }
  std::uint64_t path_index() const noexcept { return path_index_; }

  DivergedPathError with_context(int level, std::uint64_t path_index) const {
    return DivergedPathError(step_, level, path_index);
  }

 private:
  static std::string format(std::int64_t step, int level,
                            std::uint64_t path_index) {
    std::string msg = "diverged path: non-finite state at Euler step " +
                      std::to_string(step);
    if (level >= 0) {
      msg += " (level " + std::to_string(level) + ", path " +
             std::to_string(path_index) + ")";
    }
    return msg;
  }

  std::int64_t step_;
  int level_;
  std::uint64_t path_index_;
};

/// The first-variation matrix Z_s is numerically singular.
class DegenerateTransportError : public std::runtime_error {
 public:
  DegenerateTransportError(std::int64_t step, double reciprocal_condition)
      : std::runtime_error(
            "degenerate transport: Z is singular at step " +
            std::to_string(step) +
            " (reciprocal condition " + std::to_string(reciprocal_condition) +
            ")"),
        step_(step) {}

  std::int64_t step() const noexcept { return step_; }

 private:
  std::int64_t step_;
};

/// A statistic is undefined because every sample is identical.
class DegenerateStatisticsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mlmc
