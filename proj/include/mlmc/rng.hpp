#pragma once

// Counter-based random streams.
//
// Every Gaussian draw in the library is a pure function of
// (master_seed, level, path_index, replication, substream, draw index), so a
// path can be regenerated in isolation and the result of a run does not depend
// on how paths are split across workers.

#include <array>
#include <cstdint>
#include <stdexcept>

#include <Eigen/Core>

#include "mlmc/normal.hpp"

namespace mlmc {

/// Philox4x32-10 block cipher (Salmon et al., "Parallel random numbers: as
/// easy as 1, 2, 3", SC'11).
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static constexpr Counter apply(Counter ctr, Key key) noexcept {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
      }
      ctr = single_round(ctr, key);
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

  static constexpr Counter single_round(const Counter& c,
                                        const Key& k) noexcept {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * c[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * c[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
  }
};

/// Substream tags. Different consumers of the same master seed never share
/// draws.
enum class StreamTag : std::uint16_t {
  kMlmc = 0,
  kCrude = 1,
  kLimitW = 2,
  kLimitB = 3,
  kTwoLevel = 4,
  kBracket = 5,
  kPilot = 6,
};

/// Identifies one independent Gaussian stream.
///
/// Counter layout: word 0 is the block index inside the stream, word 1 the
/// path index, word 2 packs level (low 16 bits) and substream (high 16 bits),
/// word 3 the replication. The 64-bit master seed is the Philox key.
struct RngStreamKey {
  std::uint64_t master_seed = 0;
  std::uint32_t level = 0;
  std::uint64_t path_index = 0;
  std::uint32_t replication = 0;
  std::uint16_t substream = 0;

  friend bool operator==(const RngStreamKey&, const RngStreamKey&) = default;
};

/// Composes a substream id from a tag and a retry/variant counter.
constexpr std::uint16_t make_substream(StreamTag tag, unsigned variant = 0) {
  return static_cast<std::uint16_t>(static_cast<unsigned>(tag) |
                                    (variant << 4));
}

/// Maps two 32-bit words to a double in the open interval (0, 1) with 52
/// random bits.
constexpr double to_open_unit(std::uint32_t hi, std::uint32_t lo) noexcept {
  const std::uint64_t bits =
      ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 12;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-52;
}

/// Standard normal draws from one keyed stream.
///
/// Each Philox block yields two uniforms which are mapped through the
/// Wichura AS241 inverse normal CDF. Inverse-CDF sampling consumes a fixed
/// number of uniforms per draw, so the k-th normal of a stream is always the
/// same number.
class GaussianStream {
 public:
  explicit GaussianStream(const RngStreamKey& key) {
    if (key.path_index > 0xFFFFFFFFull) {
      throw std::invalid_argument("path index exceeds 32-bit stream space");
    }
    if (key.level > 0xFFFFu) {
      throw std::invalid_argument("level exceeds 16-bit stream space");
    }
    key_ = {static_cast<std::uint32_t>(key.master_seed),
            static_cast<std::uint32_t>(key.master_seed >> 32)};
    counter_ = {0u, static_cast<std::uint32_t>(key.path_index),
                key.level | (static_cast<std::uint32_t>(key.substream) << 16),
                key.replication};
  }

  double next() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const auto block = Philox4x32::apply(counter_, key_);
    if (++counter_[0] == 0) {
      throw std::length_error("Gaussian stream exhausted");
    }
    spare_ = normal_quantile(to_open_unit(block[2], block[3]));
    has_spare_ = true;
    return normal_quantile(to_open_unit(block[0], block[1]));
  }

  /// Fills `out` coefficient-wise with independent N(0, scale^2) draws.
  template <typename Derived, typename Scalar>
  void fill(Derived& out, Scalar scale) {
    for (Eigen::Index i = 0; i < out.size(); ++i) {
      out(i) = static_cast<typename Derived::Scalar>(scale * next());
    }
  }

 private:
  Philox4x32::Key key_{};
  Philox4x32::Counter counter_{};
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace mlmc
