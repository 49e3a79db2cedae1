#pragma once

#include <cstdint>
#include <string_view>

namespace relay_ee {

/// Counter-based generator built on the SplitMix64 finalizer.
///
/// Draw i of stream s under seed x is `mix(key + (i + 1) * 0x9E3779B97F4A7C15)`
/// with `key = mix(x ^ (s * 0xD1B54A32D192ED03))`, so any draw can be
/// reproduced from (seed, stream, index) alone.
class CounterRng {
public:
  static constexpr std::string_view kAlgorithm = "splitmix64-counter-v1";

  CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept;

  std::uint64_t next() noexcept;

  /// Uniform on the open interval (0, 1): 53-bit mantissa, offset by half a step.
  double uniform_open() noexcept;

  /// Uniform integer in [0, bound) by Lemire's multiply-shift reduction.
  std::uint64_t below(std::uint64_t bound) noexcept;

  /// Exponential variate with the given mean by inverse CDF; strictly positive.
  double exponential(double mean) noexcept;

  [[nodiscard]] std::uint64_t counter() const noexcept { return counter_; }

  static std::uint64_t mix(std::uint64_t z) noexcept;

private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Stream identifiers; one per consumer so draws never overlap.
namespace streams {
inline constexpr std::uint64_t kChannel = 1;
inline constexpr std::uint64_t kRandomRelay = 2;
inline constexpr std::uint64_t kRandomAssignment = 3;
}  // namespace streams

}  // namespace relay_ee
