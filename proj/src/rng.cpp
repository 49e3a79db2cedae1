#include "relay_ee/rng.hpp"

#include <cmath>

namespace relay_ee {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kStreamSpread = 0xD1B54A32D192ED03ULL;
}  // namespace

std::uint64_t CounterRng::mix(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept
    : key_(mix(seed ^ (stream * kStreamSpread))) {}

std::uint64_t CounterRng::next() noexcept {
  ++counter_;
  return mix(key_ + counter_ * kGolden);
}

double CounterRng::uniform_open() noexcept {
  return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
}

__extension__ typedef unsigned __int128 u128;

std::uint64_t CounterRng::below(std::uint64_t bound) noexcept {
  return static_cast<std::uint64_t>((static_cast<u128>(next()) * bound) >> 64);
}

double CounterRng::exponential(double mean) noexcept { return -mean * std::log(uniform_open()); }

}  // namespace relay_ee
